#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace msplace {

using Index = std::ptrdiff_t;

struct FeatureBlock {
  std::string name;
  Index dim = 0;

  friend bool operator==(const FeatureBlock&, const FeatureBlock&) = default;
};

struct SensorBlock {
  std::string name;
  std::vector<FeatureBlock> features;

  friend bool operator==(const SensorBlock&, const SensorBlock&) = default;
};

/// Half-open row range [begin, end).
struct RowRange {
  Index begin = 0;
  Index end = 0;

  Index size() const { return end - begin; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

/// One feature block addressed by sensor and feature index together with
/// the rows it occupies.
struct BlockRef {
  std::size_t sensor = 0;
  std::size_t feature = 0;
  RowRange rows;
};

/// Nested block structure sensors -> feature modalities -> dimensions.
///
/// Rows of every feature, label and weight matrix are laid out sensor by
/// sensor, and within a sensor feature by feature, contiguously. The layout
/// is immutable once constructed.
class ModalityLayout {
 public:
  ModalityLayout() = default;
  explicit ModalityLayout(std::vector<SensorBlock> sensors);

  const std::vector<SensorBlock>& sensors() const { return sensors_; }
  std::size_t sensor_count() const { return sensors_.size(); }
  std::size_t feature_count(std::size_t sensor) const;
  /// Number of feature blocks across all sensors.
  std::size_t block_count() const { return blocks_.size(); }
  /// Total row dimension (sum of all feature dims).
  Index total_dim() const { return total_dim_; }
  bool empty() const { return sensors_.empty(); }

  RowRange sensor_range(std::size_t sensor) const;
  RowRange feature_range(std::size_t sensor, std::size_t feature) const;

  /// Feature blocks in layout order.
  const std::vector<BlockRef>& blocks() const { return blocks_; }

  /// Writes `sensor <name>` / `feature <name> <dim>` lines.
  void write(std::ostream& os) const;
  std::string to_text() const;
  /// Parses the line format produced by write(). Blank lines are ignored.
  static ModalityLayout parse(const std::vector<std::string>& lines);
  static ModalityLayout parse(const std::string& text);

  friend bool operator==(const ModalityLayout& a, const ModalityLayout& b) {
    return a.sensors_ == b.sensors_;
  }

 private:
  std::vector<SensorBlock> sensors_;
  std::vector<BlockRef> blocks_;
  std::vector<RowRange> sensor_ranges_;
  std::vector<std::size_t> first_block_;
  Index total_dim_ = 0;
};

}  // namespace msplace
