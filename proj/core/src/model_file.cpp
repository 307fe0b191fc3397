#include "msplace/model_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "msplace/error.hpp"
#include "msplace/text.hpp"

namespace msplace {

void ModelFile::validate() const {
  const ModalityLayout expected =
      descriptor_layout(config.descriptors, config.frame_width, config.frame_height);
  if (!(expected == layout())) {
    throw ModelError("model layout does not match its descriptor configuration");
  }
  const auto blocks = static_cast<std::size_t>(layout().block_count());
  if (normalization.mean().size() != blocks || normalization.stddev().size() != blocks) {
    throw ModelError("model normalization has " + std::to_string(normalization.mean().size()) +
                     " blocks, layout has " + std::to_string(blocks));
  }
  if (scenario_names.size() != static_cast<std::size_t>(weights.values().cols())) {
    throw ModelError("model scenario count does not match the weight columns");
  }
}

void ModelFile::check_features(const FeatureMatrix& features) const {
  if (!(features.layout() == layout())) {
    throw ModelError("feature layout does not match the model (model file version " +
                     std::to_string(kModelFormatVersion) + ")");
  }
}

std::string ModelFile::to_text() const {
  std::ostringstream os;
  os << "version " << kModelFormatVersion << '\n';
  os << "scenarios " << scenario_names.size();
  for (const auto& s : scenario_names) os << ' ' << s;
  os << '\n';
  const std::string cfg = config.to_text();
  os << "config " << std::count(cfg.begin(), cfg.end(), '\n') << '\n' << cfg;
  for (const auto& e : config.descriptors.external) {
    os << "external " << e.name << ' ' << e.dim << ' ' << to_string(e.sensor) << '\n';
  }
  const std::string lay = layout().to_text();
  os << "layout " << std::count(lay.begin(), lay.end(), '\n') << '\n' << lay;
  os << "normalization " << normalization.mean().size() << '\n';
  for (std::size_t i = 0; i < normalization.mean().size(); ++i) {
    os << text::exact(normalization.mean()[i]) << ' ' << text::exact(normalization.stddev()[i]) << '\n';
  }
  const Matrix& w = weights.values();
  os << "weights " << w.rows() << ' ' << w.cols() << '\n';
  for (Index r = 0; r < w.rows(); ++r) {
    for (Index c = 0; c < w.cols(); ++c) os << (c ? " " : "") << text::exact(w(r, c));
    os << '\n';
  }
  os << "end\n";
  return os.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& body) : is_(body) {}

  std::vector<std::string> next(const char* expected_key) {
    std::string line;
    while (std::getline(is_, line)) {
      ++lineno_;
      if (!text::trim(line).empty()) {
        auto tok = text::split_ws(line);
        if (expected_key && tok.front() != expected_key) {
          fail(std::string("expected '") + expected_key + "', found '" + tok.front() + "'");
        }
        return tok;
      }
    }
    fail(std::string("unexpected end of file") + (expected_key ? std::string(", expected '") + expected_key + "'" : ""));
  }

  std::string raw_line() {
    std::string line;
    if (!std::getline(is_, line)) fail("unexpected end of file");
    ++lineno_;
    return line;
  }

  std::size_t count(const std::vector<std::string>& tok, std::size_t i) {
    if (tok.size() <= i) fail("missing count after '" + tok.front() + "'");
    return static_cast<std::size_t>(text::to_u64(tok[i], tok.front() + " count"));
  }

  double real(const std::string& s) { return text::to_double(s, "model value on line " + std::to_string(lineno_)); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ModelError("model file line " + std::to_string(lineno_) + ": " + msg);
  }

  bool peek_key(const std::string& key) {
    const auto pos = is_.tellg();
    const std::size_t saved = lineno_;
    std::string line;
    while (std::getline(is_, line)) {
      if (!text::trim(line).empty()) {
        const bool hit = text::split_ws(line).front() == key;
        is_.clear();
        is_.seekg(pos);
        lineno_ = saved;
        return hit;
      }
    }
    is_.clear();
    is_.seekg(pos);
    return false;
  }

 private:
  std::istringstream is_;
  std::size_t lineno_ = 0;
};

}  // namespace

namespace {

ModelFile parse_body(const std::string& body) {
  LineReader in(body);
  auto tok = in.next("version");
  if (tok.size() != 2 || tok[1] != std::to_string(kModelFormatVersion)) {
    throw ModelError("unsupported model file version '" + (tok.size() > 1 ? tok[1] : std::string()) +
                     "' (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  tok = in.next("scenarios");
  const std::size_t c = in.count(tok, 1);
  if (tok.size() != 2 + c) in.fail("scenario count does not match the names given");
  std::vector<std::string> names(tok.begin() + 2, tok.end());

  tok = in.next("config");
  std::string cfg_text;
  for (std::size_t i = 0, k = in.count(tok, 1); i < k; ++i) cfg_text += in.raw_line() + '\n';
  PipelineConfig cfg = PipelineConfig::parse(cfg_text);
  while (in.peek_key("external")) {
    tok = in.next("external");
    if (tok.size() != 4) in.fail("expected 'external <name> <dim> <sensor>'");
    cfg.descriptors.external.push_back(
        {tok[1], static_cast<Index>(text::to_u64(tok[2], "external dim")), parse_frame_kind(tok[3])});
  }
  cfg.validate();

  tok = in.next("layout");
  std::vector<std::string> lay_lines;
  for (std::size_t i = 0, k = in.count(tok, 1); i < k; ++i) lay_lines.push_back(in.raw_line());
  ModalityLayout layout = ModalityLayout::parse(lay_lines);

  tok = in.next("normalization");
  const std::size_t blocks = in.count(tok, 1);
  std::vector<double> mean, sd;
  for (std::size_t i = 0; i < blocks; ++i) {
    auto row = in.next(nullptr);
    if (row.size() != 2) in.fail("expected '<mean> <std>'");
    mean.push_back(in.real(row[0]));
    sd.push_back(in.real(row[1]));
  }

  tok = in.next("weights");
  const std::size_t p = in.count(tok, 1);
  const std::size_t cols = in.count(tok, 2);
  if (static_cast<Index>(p) != layout.total_dim()) in.fail("weight rows do not match the layout");
  if (cols != c) in.fail("weight columns do not match the scenario count");
  Matrix w(static_cast<Index>(p), static_cast<Index>(cols));
  for (std::size_t r = 0; r < p; ++r) {
    auto row = in.next(nullptr);
    if (row.size() != cols) in.fail("expected " + std::to_string(cols) + " weights");
    for (std::size_t j = 0; j < cols; ++j) w(static_cast<Index>(r), static_cast<Index>(j)) = in.real(row[j]);
  }
  in.next("end");

  ModelFile m{std::move(cfg), std::move(names), BlockNormalization(std::move(mean), std::move(sd)),
              WeightMatrix(std::move(layout), std::move(w))};
  m.validate();
  return m;
}

}  // namespace

ModelFile ModelFile::parse(const std::string& body) {
  // Every malformed field surfaces as a model error, whichever parser saw it.
  try {
    return parse_body(body);
  } catch (const ModelError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
}

void ModelFile::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write model " + path.string());
  os << to_text();
  if (!os) throw IoError("failed writing model " + path.string());
}

ModelFile ModelFile::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open model " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

}  // namespace msplace
