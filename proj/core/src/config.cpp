#include "msplace/config.hpp"

#include <fstream>
#include <sstream>

#include "msplace/error.hpp"
#include "msplace/text.hpp"

namespace msplace {

namespace {

int to_int32(const std::string& v, const std::string& key) {
  const long long x = text::to_int(v, key);
  if (x < -2147483647LL || x > 2147483647LL) throw ValidationError(key + " is out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ValidationError(key + " expects true|false");
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  const std::string v(text::trim(value));
  if (key == "lambda1") hyper.lambda1 = text::to_double(v, key);
  else if (key == "lambda2") hyper.lambda2 = text::to_double(v, key);
  else if (key == "loss") hyper.loss = parse_loss_variant(v);
  else if (key == "solver.max_iters") solver.max_iters = to_int32(v, key);
  else if (key == "solver.tol") solver.tol = text::to_double(v, key);
  else if (key == "solver.epsilon") solver.epsilon = text::to_double(v, key);
  else if (key == "solver.backend") solver.backend = parse_solver_backend(v);
  else if (key == "hog.cell_size") descriptors.hog.cell_size = to_int32(v, key);
  else if (key == "hog.bins") descriptors.hog.bins = to_int32(v, key);
  else if (key == "hog.block") descriptors.hog.block = to_int32(v, key);
  else if (key == "hog.clip") descriptors.hog.clip = text::to_double(v, key);
  else if (key == "lbp.radius") descriptors.lbp.radius = to_int32(v, key);
  else if (key == "lbp.neighbors") descriptors.lbp.neighbors = to_int32(v, key);
  else if (key == "lbp.uniform") descriptors.lbp.uniform = to_bool(v, key);
  else if (key == "gist.orientations") descriptors.gist.orientations = to_int32(v, key);
  else if (key == "gist.scales") descriptors.gist.scales = to_int32(v, key);
  else if (key == "gist.grid") descriptors.gist.grid = to_int32(v, key);
  else if (key == "frame.width") frame_width = to_int32(v, key);
  else if (key == "frame.height") frame_height = to_int32(v, key);
  else if (key == "radius_m") radius_m = text::to_double(v, key);
  else if (key == "threshold") threshold = text::to_double(v, key);
  else if (key == "threshold_count") threshold_count = to_int32(v, key);
  else if (key == "seed") seed = text::to_u64(v, key);
  else throw ValidationError("unknown config key '" + key + "'");
}

void PipelineConfig::validate() const {
  hyper.validate();
  solver.validate();
  descriptors.validate();
  if (frame_width < 1 || frame_height < 1) throw ValidationError("frame size must be positive");
  if (!(radius_m > 0.0)) throw ValidationError("radius_m must be > 0");
  if (threshold_count < 2) throw ValidationError("threshold_count must be >= 2");
}

std::string PipelineConfig::to_text() const {
  std::ostringstream os;
  os << "lambda1 = " << text::exact(hyper.lambda1) << '\n'
     << "lambda2 = " << text::exact(hyper.lambda2) << '\n'
     << "loss = " << to_string(hyper.loss) << '\n'
     << "solver.max_iters = " << solver.max_iters << '\n'
     << "solver.tol = " << text::exact(solver.tol) << '\n'
     << "solver.epsilon = " << text::exact(solver.epsilon) << '\n'
     << "solver.backend = " << to_string(solver.backend) << '\n'
     << "hog.cell_size = " << descriptors.hog.cell_size << '\n'
     << "hog.bins = " << descriptors.hog.bins << '\n'
     << "hog.block = " << descriptors.hog.block << '\n'
     << "hog.clip = " << text::exact(descriptors.hog.clip) << '\n'
     << "lbp.radius = " << descriptors.lbp.radius << '\n'
     << "lbp.neighbors = " << descriptors.lbp.neighbors << '\n'
     << "lbp.uniform = " << (descriptors.lbp.uniform ? "true" : "false") << '\n'
     << "gist.orientations = " << descriptors.gist.orientations << '\n'
     << "gist.scales = " << descriptors.gist.scales << '\n'
     << "gist.grid = " << descriptors.gist.grid << '\n'
     << "frame.width = " << frame_width << '\n'
     << "frame.height = " << frame_height << '\n'
     << "radius_m = " << text::exact(radius_m) << '\n'
     << "threshold = " << text::exact(threshold) << '\n'
     << "threshold_count = " << threshold_count << '\n'
     << "seed = " << seed << '\n';
  return os.str();
}

PipelineConfig PipelineConfig::parse(const std::string& body) {
  PipelineConfig cfg;
  std::istringstream is(body);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    cfg.set(std::string(text::trim(t.substr(0, eq))), std::string(text::trim(t.substr(eq + 1))));
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

void PipelineConfig::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << to_text();
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace msplace
