#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "msplace/error.hpp"
#include "msplace/features.hpp"
#include "msplace/image.hpp"
#include "msplace/random.hpp"
#include "msplace/synth.hpp"

namespace msplace {
namespace {

ImageFrame random_frame(std::uint64_t seed, int w, int h) {
  Rng rng(seed);
  ImageFrame f = ImageFrame::filled(w, h, 0);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return f;
}

TEST(Downsample, ConstantStaysConstant) {
  for (int v : {0, 1, 77, 128, 254, 255}) {
    const ImageFrame out = downsample(ImageFrame::filled(980, 3760, static_cast<std::uint8_t>(v)), 752, 120);
    ASSERT_EQ(out.width, 752);
    ASSERT_EQ(out.height, 120);
    for (auto p : out.pixels) ASSERT_EQ(p, v);
  }
}

TEST(Downsample, CheckerboardRoundsHalfUp) {
  ImageFrame f = ImageFrame::filled(2, 2, 0);
  f.at(1, 0) = 255;
  f.at(0, 1) = 255;
  const ImageFrame out = downsample(f, 1, 1);
  EXPECT_EQ(out.pixels.size(), 1u);
  EXPECT_EQ(out.pixels[0], 128);  // mean 127.5
}

TEST(Downsample, MatchesAreaAverageOnIntegerFactors) {
  const ImageFrame f = random_frame(3, 12, 9);
  const ImageFrame out = downsample(f, 4, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x) {
      int s = 0;
      for (int dy = 0; dy < 3; ++dy)
        for (int dx = 0; dx < 3; ++dx) s += f.at(3 * x + dx, 3 * y + dy);
      EXPECT_EQ(out.at(x, y), static_cast<int>(std::floor(s / 9.0 + 0.5)));
    }
  }
}

TEST(Downsample, FractionalFactorKeepsMean) {
  const ImageFrame f = random_frame(4, 100, 70);
  const ImageFrame out = downsample(f, 37, 23);
  double m_in = 0.0;
  double m_out = 0.0;
  for (auto p : f.pixels) m_in += p;
  for (auto p : out.pixels) m_out += p;
  EXPECT_NEAR(m_in / f.pixels.size(), m_out / out.pixels.size(), 0.6);
}

TEST(Downsample, UpscaleThrows) {
  EXPECT_THROW(downsample(ImageFrame::filled(10, 10, 0), 11, 10), ValidationError);
  EXPECT_THROW(downsample(ImageFrame::filled(10, 10, 0), 10, 11), ValidationError);
}

TEST(Hog, LengthFromConfig) {
  EXPECT_EQ(hog_length({}, 752, 120), 9936);
  EXPECT_EQ(hog(ImageFrame::filled(752, 120, 9)).size(), 9936);
  // Independent count: 7 x 47 whole cells, 6 x 46 block positions.
  EXPECT_EQ(hog_length({}, 752, 120), (120 / 16 - 1) * (752 / 16 - 1) * 2 * 2 * 9);
}

TEST(Hog, ConstantImageIsZero) {
  const Vector d = hog(ImageFrame::filled(752, 120, 200));
  EXPECT_TRUE(d.isZero(0.0));
}

TEST(Hog, VerticalStepEdgeHandComputed) {
  // One 2x2-cell block; the edge between x = 7 and x = 8 sits in the left
  // cell column, so cells 0 and 2 hold equal bin-0 votes and nothing else.
  // L2 gives 1/sqrt2 each, the 0.2 clip hits both, renormalization restores
  // 1/sqrt2.
  ImageFrame f = ImageFrame::filled(32, 32, 10);
  for (int y = 0; y < 32; ++y)
    for (int x = 8; x < 32; ++x) f.at(x, y) = 210;
  const Vector d = hog(f);
  ASSERT_EQ(d.size(), 36);
  for (Index i = 0; i < d.size(); ++i) {
    const double want = (i == 0 || i == 18) ? 1.0 / std::numbers::sqrt2 : 0.0;
    EXPECT_NEAR(d(i), want, 1e-12) << "entry " << i;
  }
}

TEST(Hog, HorizontalEdgeLandsInMiddleBin) {
  ImageFrame f = ImageFrame::filled(32, 32, 10);
  for (int y = 8; y < 32; ++y)
    for (int x = 0; x < 32; ++x) f.at(x, y) = 210;
  const Vector d = hog(f);
  EXPECT_NEAR(d(4), 1.0 / std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(d(9 + 4), 1.0 / std::numbers::sqrt2, 1e-12);
}

TEST(Hog, EntriesInUnitInterval) {
  const Vector d = hog(random_frame(5, 752, 120));
  EXPECT_GE(d.minCoeff(), 0.0);
  EXPECT_LE(d.maxCoeff(), 1.0);
}

TEST(Hog, TooSmallThrows) {
  EXPECT_THROW(hog(ImageFrame::filled(31, 32, 0)), ValidationError);
}

int brute_uniform_bin(unsigned code) {
  auto transitions = [](unsigned c) {
    int t = 0;
    for (int i = 0; i < 8; ++i) t += ((c >> i) & 1u) != ((c >> ((i + 1) % 8)) & 1u);
    return t;
  };
  if (transitions(code) > 2) return 58;
  int rank = 0;
  for (unsigned c = 0; c < code; ++c) rank += transitions(c) <= 2;
  return rank;
}

TEST(Lbp, UniformMappingHas58Codes) {
  int uniform = 0;
  for (unsigned c = 0; c < 256; ++c) {
    EXPECT_EQ(lbp_uniform_bin(c), brute_uniform_bin(c)) << c;
    uniform += lbp_uniform_bin(c) < 58;
  }
  EXPECT_EQ(uniform, 58);
  EXPECT_EQ(lbp_length({}), 59);
}

TEST(Lbp, ConstantImageIsIndicatorOfAllOnes) {
  const Vector h = lbp(ImageFrame::filled(40, 30, 90));
  ASSERT_EQ(h.size(), 59);
  const int bin = lbp_uniform_bin(255);
  EXPECT_EQ(bin, 57);
  for (Index i = 0; i < 59; ++i) EXPECT_EQ(h(i), i == bin ? 1.0 : 0.0);
}

TEST(Lbp, MatchesBruteForceOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ImageFrame f = random_frame(seed, 64, 64);
    Vector ref = Vector::Zero(59);
    const int dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
    const int dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
    for (int y = 1; y < 63; ++y)
      for (int x = 1; x < 63; ++x) {
        unsigned code = 0;
        for (int i = 0; i < 8; ++i) code |= (f.at(x + dx[i], y + dy[i]) >= f.at(x, y) ? 1u : 0u) << i;
        ref(brute_uniform_bin(code)) += 1.0;
      }
    ref /= 62.0 * 62.0;
    const Vector h = lbp(f);
    EXPECT_LE((h - ref).lpNorm<Eigen::Infinity>(), 1e-15);
    EXPECT_NEAR(h.sum(), 1.0, 1e-9);
  }
}

TEST(Lbp, TooSmallThrows) {
  EXPECT_THROW(lbp(ImageFrame::filled(2, 3, 0)), ValidationError);
}

ImageFrame sinusoid(double freq, double amplitude) {
  ImageFrame f = ImageFrame::filled(752, 120, 0);
  for (int y = 0; y < 120; ++y)
    for (int x = 0; x < 752; ++x) {
      const double v = 128.0 + amplitude * std::sin(2.0 * std::numbers::pi * freq * x);
      f.at(x, y) = static_cast<std::uint8_t>(std::lround(v));
    }
  return f;
}

TEST(Gist, ConstantImageIsNearZero) {
  const Vector g = gist(ImageFrame::filled(752, 120, 173));
  ASSERT_EQ(g.size(), 128);
  EXPECT_LE(g.maxCoeff(), 1e-6);
  EXPECT_GE(g.minCoeff(), 0.0);
}

TEST(Gist, TunedSinusoidPeaksInItsFilter) {
  // 0.25 cycles/pixel at orientation 0 is the centre of filter (0, 0), whose
  // gain there is 1. A real sinusoid of amplitude a has one spectral line of
  // weight a/2 inside that filter, so the response magnitude is a/2
  // everywhere (up to 8-bit quantization).
  const Vector g = gist(sinusoid(gist_center_frequency(0), 100.0));
  const double floor_of_tuned = g.head(16).minCoeff();
  EXPECT_NEAR(floor_of_tuned, 50.0, 1.0);
  EXPECT_NEAR(g.head(16).maxCoeff(), 50.0, 1.0);
  EXPECT_LT(g.tail(128 - 16).maxCoeff(), floor_of_tuned);
  EXPECT_EQ(Index{0}, [&] {
    Index i = 0;
    g.maxCoeff(&i);
    return i < 16 ? Index{0} : i;
  }());
}

TEST(Gist, CoarseScaleSinusoidPeaksInScaleOne) {
  const Vector g = gist(sinusoid(gist_center_frequency(1), 100.0));
  const double tuned = g.segment(4 * 16, 16).minCoeff();
  for (Index i = 0; i < 128; ++i) {
    if (i >= 64 && i < 80) continue;
    EXPECT_LT(g(i), tuned) << i;
  }
}

TEST(Gist, FilterShape) {
  EXPECT_DOUBLE_EQ(gist_center_frequency(0), 0.25);
  EXPECT_DOUBLE_EQ(gist_center_frequency(1), 0.125);
  EXPECT_NEAR(gist_filter_response({}, 0, 0, 0.25, 0.0), 1.0, 1e-12);
  EXPECT_EQ(gist_filter_response({}, 0, 0, 0.0, 0.0), 0.0);
  EXPECT_NEAR(gist_filter_response({}, 0, 2, 0.0, 0.25), 1.0, 1e-12);
  EXPECT_LT(gist_filter_response({}, 0, 0, 0.0, 0.25), 1e-3);
  EXPECT_EQ(gist_length({}), 128);
}

TEST(Gist, TooSmallThrows) {
  EXPECT_THROW(gist(ImageFrame::filled(31, 40, 0)), ValidationError);
}

TEST(Layout, DescriptorLengths) {
  const ModalityLayout l = descriptor_layout({}, 752, 120);
  EXPECT_EQ(l.total_dim(), 20246);
  EXPECT_EQ(l.total_dim(), 2 * (128 + 9936 + 59));
  ASSERT_EQ(l.sensor_count(), 2u);
  EXPECT_EQ(l.sensors()[0].name, "intensity");
  EXPECT_EQ(l.sensors()[1].name, "disparity");
  const std::vector<std::string> names = {"gist", "hog", "lbp"};
  for (const auto& s : l.sensors()) {
    ASSERT_EQ(s.features.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(s.features[k].name, names[k]);
  }
  DescriptorConfig cfg;
  cfg.external.push_back({"cnn", 4096, FrameKind::intensity});
  cfg.external.push_back({"cnn", 4096, FrameKind::disparity});
  EXPECT_EQ(descriptor_layout(cfg, 752, 120).total_dim(), 20246 + 2 * 4096);
}

std::vector<FramePair> small_frames(int count) {
  SynthOptions o;
  o.n_places = std::max(2, count);
  o.n_scenarios = 2;
  const SynthDataset d = generate_synthetic(o);
  std::vector<FramePair> out;
  for (const Run& r : d.runs)
    for (const FramePair& p : r.frames)
      if (static_cast<int>(out.size()) < count) out.push_back(p);
  return out;
}

TEST(Extract, TwoImagesGiveFullLayout) {
  const auto frames = small_frames(2);
  const Extraction e = extract_all(frames, {});
  EXPECT_EQ(e.features.values().rows(), 20246);
  EXPECT_EQ(e.features.values().cols(), 2);
  EXPECT_EQ(e.features.image_ids()[0], frames[0].intensity.image_id);
}

TEST(Extract, NormalizationStatistics) {
  const auto frames = small_frames(12);
  const Extraction e = extract_all(frames, {});
  const Matrix& x = e.features.values();
  for (const BlockRef& b : e.features.layout().blocks()) {
    const auto blk = x.middleRows(b.rows.begin, b.rows.size());
    const double n = static_cast<double>(blk.size());
    const double mean = blk.sum() / n;
    const double var = (blk.array() - mean).square().sum() / n;
    EXPECT_LE(std::abs(mean), 1e-9) << b.sensor << "/" << b.feature;
    EXPECT_NEAR(var, 1.0, 1e-6) << b.sensor << "/" << b.feature;
  }
  // Frozen statistics reproduce the training matrix exactly.
  const FeatureMatrix again = extract_normalized(frames, {}, e.normalization);
  EXPECT_TRUE(again.values() == x);
}

TEST(Extract, ConstantBlockMapsToZero) {
  const ModalityLayout l({{"s", {{"a", 2}, {"b", 2}}}});
  Matrix raw(4, 3);
  raw << 1, 2, 3, 4, 5, 6, 7, 7, 7, 7, 7, 7;
  const FeatureMatrix fm(l, raw, {"x", "y", "z"});
  const BlockNormalization n = BlockNormalization::fit(fm);
  EXPECT_EQ(n.stddev()[1], 0.0);
  EXPECT_TRUE(n.apply(fm).values().bottomRows(2).isZero(0.0));
}

TEST(Extract, DeterministicAndDuplicateColumnsIdentical) {
  auto frames = small_frames(3);
  frames.push_back(frames[1]);
  const FeatureMatrix a = extract_raw(frames, {});
  const FeatureMatrix b = extract_raw(frames, {});
  EXPECT_TRUE(a.values() == b.values());
  EXPECT_TRUE(a.values().col(1) == a.values().col(3));
}

TEST(Extract, ExternalBlocks) {
  const auto frames = small_frames(2);
  DescriptorConfig cfg;
  cfg.external.push_back({"cnn", 3, FrameKind::disparity});
  ExternalFeatures ext{cfg.external[0], {}};
  ext.rows[frames[0].intensity.image_id] = Vector::Constant(3, 1.5);
  ext.rows[frames[1].intensity.image_id] = Vector::Constant(3, -2.0);
  const FeatureMatrix f = extract_raw(frames, cfg, {ext});
  EXPECT_EQ(f.values().rows(), 20246 + 3);
  const RowRange r = f.layout().feature_range(1, 3);
  EXPECT_EQ(f.values()(r.begin, 0), 1.5);
  EXPECT_EQ(f.values()(r.begin + 2, 1), -2.0);

  ext.rows.erase(frames[1].intensity.image_id);
  try {
    extract_raw(frames, cfg, {ext});
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find(frames[1].intensity.image_id), std::string::npos);
  }
}

TEST(Extract, MismatchedFrameSizesThrow) {
  auto frames = small_frames(2);
  frames[1].disparity = ImageFrame::filled(100, 60, 3);
  EXPECT_THROW(extract_raw(frames, {}), Error);
}

}  // namespace
}  // namespace msplace
