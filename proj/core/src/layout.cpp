#include "msplace/layout.hpp"

#include <ostream>
#include <set>
#include <sstream>

#include "msplace/error.hpp"
#include "msplace/text.hpp"

namespace msplace {

ModalityLayout::ModalityLayout(std::vector<SensorBlock> sensors) : sensors_(std::move(sensors)) {
  if (sensors_.empty()) throw LayoutError("layout needs at least one sensor");
  std::set<std::string> sensor_names;
  Index offset = 0;
  for (std::size_t q = 0; q < sensors_.size(); ++q) {
    const auto& s = sensors_[q];
    if (s.name.empty()) throw LayoutError("sensor name must not be empty");
    if (!sensor_names.insert(s.name).second) {
      throw LayoutError("duplicate sensor name '" + s.name + "'");
    }
    if (s.features.empty()) throw LayoutError("sensor '" + s.name + "' has no feature blocks");
    std::set<std::string> feature_names;
    first_block_.push_back(blocks_.size());
    const Index sensor_begin = offset;
    for (std::size_t k = 0; k < s.features.size(); ++k) {
      const auto& f = s.features[k];
      if (f.name.empty()) throw LayoutError("feature name must not be empty in sensor '" + s.name + "'");
      if (!feature_names.insert(f.name).second) {
        throw LayoutError("duplicate feature '" + f.name + "' in sensor '" + s.name + "'");
      }
      if (f.dim < 1) {
        throw LayoutError("feature '" + f.name + "' in sensor '" + s.name + "' has dim < 1");
      }
      blocks_.push_back({q, k, {offset, offset + f.dim}});
      offset += f.dim;
    }
    sensor_ranges_.push_back({sensor_begin, offset});
  }
  total_dim_ = offset;
}

std::size_t ModalityLayout::feature_count(std::size_t sensor) const {
  if (sensor >= sensors_.size()) {
    throw LayoutError("sensor index " + std::to_string(sensor) + " out of range (" +
                      std::to_string(sensors_.size()) + " sensors)");
  }
  return sensors_[sensor].features.size();
}

RowRange ModalityLayout::sensor_range(std::size_t sensor) const {
  feature_count(sensor);
  return sensor_ranges_[sensor];
}

RowRange ModalityLayout::feature_range(std::size_t sensor, std::size_t feature) const {
  const std::size_t m = feature_count(sensor);
  if (feature >= m) {
    throw LayoutError("feature index " + std::to_string(feature) + " out of range for sensor '" +
                      sensors_[sensor].name + "' (" + std::to_string(m) + " features)");
  }
  return blocks_[first_block_[sensor] + feature].rows;
}

void ModalityLayout::write(std::ostream& os) const {
  for (const auto& s : sensors_) {
    os << "sensor " << s.name << '\n';
    for (const auto& f : s.features) os << "feature " << f.name << ' ' << f.dim << '\n';
  }
}

std::string ModalityLayout::to_text() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

ModalityLayout ModalityLayout::parse(const std::vector<std::string>& lines) {
  std::vector<SensorBlock> sensors;
  for (const auto& raw : lines) {
    const auto tok = text::split_ws(raw);
    if (tok.empty()) continue;
    if (tok[0] == "sensor") {
      if (tok.size() != 2) throw LayoutError("malformed layout line: '" + raw + "'");
      sensors.push_back({tok[1], {}});
    } else if (tok[0] == "feature") {
      if (tok.size() != 3) throw LayoutError("malformed layout line: '" + raw + "'");
      if (sensors.empty()) throw LayoutError("feature line before any sensor line");
      sensors.back().features.push_back({tok[1], static_cast<Index>(text::to_int(tok[2], "feature dim"))});
    } else {
      throw LayoutError("unexpected layout line: '" + raw + "'");
    }
  }
  return ModalityLayout(std::move(sensors));
}

ModalityLayout ModalityLayout::parse(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) lines.push_back(line);
  return parse(lines);
}

}  // namespace msplace
