#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "msplace/error.hpp"
#include "msplace/eval.hpp"
#include "msplace/random.hpp"

namespace msplace {
namespace {

namespace fs = std::filesystem;

struct BrutePoint {
  Index tp = 0;
  Index fp = 0;
  Index fn = 0;
  double precision = 1.0;
  double recall = 0.0;
};

BrutePoint brute(const Matrix& s, const BoolMatrix& gt, double t) {
  BrutePoint p;
  for (Index i = 0; i < s.rows(); ++i)
    for (Index j = 0; j < s.cols(); ++j) {
      const bool predicted = s(i, j) >= t;
      if (predicted && gt(i, j)) ++p.tp;
      if (predicted && !gt(i, j)) ++p.fp;
      if (!predicted && gt(i, j)) ++p.fn;
    }
  if (p.tp + p.fp > 0) p.precision = static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fp);
  p.recall = static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fn);
  return p;
}

TEST(PrCurve, MatchesBruteForceEnumeration) {
  Rng rng(2024);
  const std::vector<double> th = default_thresholds();
  for (int trial = 0; trial < 100; ++trial) {
    const Index q = rng.uniform_int(1, 10);
    const Index t = rng.uniform_int(1, 10);
    Matrix s(q, t);
    GroundTruth gt;
    gt.same_place = BoolMatrix(q, t);
    for (Index k = 0; k < s.size(); ++k) {
      // Quantized scores exercise ties and exact threshold hits.
      s.data()[k] = static_cast<double>(rng.uniform_int(0, 40)) / 40.0;
      gt.same_place.data()[k] = rng.bernoulli(0.3);
    }
    gt.same_place(0, 0) = true;
    const PrCurve c = pr_curve(s, gt, th);
    ASSERT_EQ(c.points.size(), th.size());
    double auc = 0.0;
    double prev_r = 0.0;
    double prev_p = 1.0;
    for (std::size_t k = th.size(); k-- > 0;) {
      const BrutePoint b = brute(s, gt.same_place, th[k]);
      const PrPoint& p = c.points[k];
      EXPECT_EQ(p.threshold, th[k]);
      EXPECT_EQ(p.tp, b.tp);
      EXPECT_EQ(p.fp, b.fp);
      EXPECT_EQ(p.fn, b.fn);
      EXPECT_EQ(p.precision, b.precision);
      EXPECT_EQ(p.recall, b.recall);
      auc += (b.recall - prev_r) * (b.precision + prev_p) / 2.0;
      prev_r = b.recall;
      prev_p = b.precision;
    }
    EXPECT_NEAR(c.auc, auc, 1e-12);
    for (std::size_t k = 1; k < c.points.size(); ++k) EXPECT_LE(c.points[k].recall, c.points[k - 1].recall);
  }
}

TEST(PrCurve, PerfectScorer) {
  GroundTruth gt;
  gt.same_place = BoolMatrix(3, 3);
  gt.same_place << true, false, false, false, true, true, false, false, false;
  const Matrix s = gt.same_place.cast<double>();
  const PrCurve c = pr_curve(s, gt, {0.5});
  EXPECT_EQ(c.points[0].precision, 1.0);
  EXPECT_EQ(c.points[0].recall, 1.0);
  EXPECT_NEAR(pr_curve(s, gt, default_thresholds()).auc, 1.0, 1e-12);
}

TEST(PrCurve, AllEqualScoresGiveBaseRate) {
  GroundTruth gt;
  gt.same_place = BoolMatrix::Zero(4, 5);
  gt.same_place(1, 2) = true;
  gt.same_place(3, 0) = true;
  gt.same_place(0, 4) = true;
  const Matrix s = Matrix::Constant(4, 5, 0.4);
  const PrCurve c = pr_curve(s, gt, {0.4});
  EXPECT_EQ(c.points[0].recall, 1.0);
  EXPECT_DOUBLE_EQ(c.points[0].precision, 3.0 / 20.0);
}

TEST(PrCurve, Errors) {
  GroundTruth gt;
  gt.same_place = BoolMatrix::Zero(2, 2);
  EXPECT_THROW(pr_curve(Matrix::Zero(2, 2), gt, {0.5}), ValidationError);
  gt.same_place(0, 0) = true;
  EXPECT_THROW(pr_curve(Matrix::Zero(2, 3), gt, {0.5}), ShapeError);
  EXPECT_THROW(pr_curve(Matrix::Zero(2, 2), gt, {0.6, 0.5}), ValidationError);
  EXPECT_THROW(default_thresholds(1), ValidationError);
  const auto th = default_thresholds();
  EXPECT_EQ(th.size(), 201u);
  EXPECT_EQ(th.front(), 0.0);
  EXPECT_EQ(th.back(), 1.0);
  EXPECT_EQ(th[100], 0.5);
}

ModalityWeights toy_weights(const Matrix& w) {
  const ModalityLayout l({{"intensity", {{"gist", 1}, {"hog", 1}}}, {"disparity", {{"lbp", 1}}}});
  return extract_weights(WeightMatrix(l, w));
}

TEST(ModalityReport, HandValuesAndLabels) {
  Matrix w(3, 1);
  w << 3, 1, 0;
  const auto r = modality_report(toy_weights(w));
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].name, "GIST");
  EXPECT_EQ(r[1].name, "HOG");
  EXPECT_EQ(r[2].name, "LBP-D");
  EXPECT_DOUBLE_EQ(r[0].percent, 75.0);
  EXPECT_DOUBLE_EQ(r[1].percent, 25.0);
  EXPECT_EQ(r[2].percent, 0.0);

  w << 0, 0, 2;
  EXPECT_DOUBLE_EQ(modality_report(toy_weights(w))[2].percent, 100.0);
  w << 1, 1, 0;
  EXPECT_DOUBLE_EQ(modality_report(toy_weights(w))[0].percent, 50.0);
  EXPECT_EQ(modality_label("lidar", "cnn"), "CNN-lidar");
}

TEST(ModalityReport, PercentagesSumToHundred) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    Matrix w(3, 2);
    for (Index k = 0; k < w.size(); ++k) w.data()[k] = rng.normal();
    const auto r = modality_report(toy_weights(w));
    double sum = 0.0;
    for (const auto& m : r) sum += m.percent;
    EXPECT_NEAR(sum, 100.0, 1e-6);
  }
  ModalityWeights zero = toy_weights(Matrix::Ones(3, 1));
  zero.normalizer = 0.0;
  EXPECT_THROW(modality_report(zero), DegenerateModelError);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

TEST(EmitPlots, DeterministicBytes) {
  GroundTruth gt;
  gt.same_place = Matrix::Identity(4, 4).array() > 0.5;
  Matrix s(4, 4);
  s << 0.9, 0.2, 0.3, 0.1, 0.4, 0.8, 0.6, 0.2, 0.1, 0.7, 0.5, 0.3, 0.2, 0.1, 0.3, 0.95;
  const std::vector<NamedCurve> curves = {{"weighted", pr_curve(s, gt, default_thresholds())},
                                          {"baseline", pr_curve(s.cwiseSqrt(), gt, default_thresholds())}};
  Matrix w(3, 1);
  w << 3, 1, 0.5;
  const auto report = modality_report(toy_weights(w));
  const fs::path a = fs::temp_directory_path() / "msplace_plots_a";
  const fs::path b = fs::temp_directory_path() / "msplace_plots_b";
  fs::remove_all(a);
  fs::remove_all(b);
  fs::create_directories(a);
  fs::create_directories(b);
  const auto fa = emit_plots(curves, report, a);
  const auto fb = emit_plots(curves, report, b);
  ASSERT_EQ(fa.size(), fb.size());
  ASSERT_EQ(fa.size(), 5u);  // two curve CSVs, one PR figure, report CSV and figure
  for (std::size_t i = 0; i < fa.size(); ++i) {
    EXPECT_EQ(fa[i].filename(), fb[i].filename());
    EXPECT_EQ(slurp(fa[i]), slurp(fb[i])) << fa[i];
    EXPECT_FALSE(slurp(fa[i]).empty());
  }
  EXPECT_TRUE(fs::exists(a / "pr_weighted.csv"));
  EXPECT_TRUE(fs::exists(a / "pr_curves.svg"));
  EXPECT_NE(slurp(a / "modality_weights.svg").find("<svg"), std::string::npos);

  const fs::path c = fs::temp_directory_path() / "msplace_plots_c";
  fs::remove_all(c);
  fs::create_directories(c);
  EXPECT_TRUE(emit_plots({}, std::nullopt, c).empty());
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

}  // namespace
}  // namespace msplace
