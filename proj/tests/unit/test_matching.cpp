#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "msplace/error.hpp"
#include "msplace/matching.hpp"
#include "msplace/random.hpp"

namespace msplace {
namespace {

const ModalityLayout kToy({{"intensity", {{"gist", 2}, {"hog", 3}}}, {"disparity", {{"gist", 2}, {"hog", 1}}}});

Matrix random_matrix(Rng& rng, Index r, Index c) {
  Matrix m(r, c);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = rng.normal();
  return m;
}

FeatureMatrix columns(const ModalityLayout& l, const Matrix& m, const std::string& prefix) {
  std::vector<std::string> ids;
  for (Index j = 0; j < m.cols(); ++j) ids.push_back(prefix + std::to_string(j));
  return FeatureMatrix(l, m, ids);
}

TEST(ExtractWeights, HandComputedBlockNorms) {
  Matrix w = Matrix::Zero(8, 2);
  w.row(0) << 3, 0;
  w.row(1) << 0, 4;   // intensity/gist norm 5
  w.row(2) << 1, 2;
  w.row(4) << 2, 0;   // intensity/hog norm 3
  w.row(7) << 0, 12;  // disparity/hog norm 12
  const ModalityWeights mw = extract_weights(WeightMatrix(kToy, w));
  EXPECT_DOUBLE_EQ(mw.feature_w[0][0], 5.0);
  EXPECT_DOUBLE_EQ(mw.feature_w[0][1], 3.0);
  EXPECT_DOUBLE_EQ(mw.feature_w[1][0], 0.0);
  EXPECT_DOUBLE_EQ(mw.feature_w[1][1], 12.0);
  EXPECT_DOUBLE_EQ(mw.sensor_w[0], std::sqrt(34.0));
  EXPECT_DOUBLE_EQ(mw.sensor_w[1], 12.0);
  EXPECT_NEAR(mw.normalizer, std::sqrt(34.0) * 8.0 + 144.0, 1e-12);
}

TEST(ExtractWeights, SingleBlockAndScaling) {
  Matrix w = Matrix::Zero(8, 2);
  w.row(3) << 1, -1;
  const ModalityWeights one = extract_weights(WeightMatrix(kToy, w));
  EXPECT_DOUBLE_EQ(one.feature_w[0][1], std::sqrt(2.0));
  EXPECT_EQ(one.feature_w[0][0], 0.0);
  EXPECT_EQ(one.feature_w[1][0], 0.0);
  EXPECT_EQ(one.feature_w[1][1], 0.0);
  Rng rng(1);
  const Matrix r = random_matrix(rng, 8, 2);
  const ModalityWeights a = extract_weights(WeightMatrix(kToy, r));
  const ModalityWeights b = extract_weights(WeightMatrix(kToy, 3.0 * r));
  EXPECT_NEAR(b.sensor_w[1], 3.0 * a.sensor_w[1], 1e-12);
  EXPECT_NEAR(b.feature_w[0][1], 3.0 * a.feature_w[0][1], 1e-12);
  EXPECT_NEAR(b.normalizer, 9.0 * a.normalizer, 1e-10);
  EXPECT_THROW(extract_weights(WeightMatrix(kToy, Matrix::Zero(8, 2))), DegenerateModelError);
}

TEST(Similarity, HandValues) {
  Vector a(4);
  Vector b(4);
  a << 1, 2, 3, 4;
  b << 2, 3, 4, 5;  // distance 2, sqrt(dim) 2
  EXPECT_DOUBLE_EQ(pairwise_similarity(a, b), std::exp(-1.0));
  EXPECT_EQ(pairwise_similarity(a, a), 1.0);
  EXPECT_EQ(pairwise_similarity(a, b), pairwise_similarity(b, a));
}

TEST(Score, SeventyFiveTwentyFive) {
  const ModalityLayout l({{"s", {{"a", 1}, {"b", 1}}}});
  Matrix w(2, 1);
  w << 3, 1;
  const ModalityWeights mw = extract_weights(WeightMatrix(l, w));
  EXPECT_DOUBLE_EQ(mw.combined(0, 0) / mw.normalizer, 0.75);
  Vector q(2);
  Vector t(2);
  q << 0.5, 0.0;
  t << 0.5, 2000.0;  // block b similarity underflows to 0
  EXPECT_DOUBLE_EQ(score(q, t, mw), 0.75);
}

TEST(Score, EqualBlockSimilaritiesGiveThatValue) {
  const ModalityLayout l({{"s", {{"a", 1}, {"b", 4}}}, {"d", {{"c", 9}}}});
  Rng rng(2);
  const ModalityWeights mw = extract_weights(WeightMatrix(l, random_matrix(rng, 14, 3)));
  Vector q = Vector::Zero(14);
  Vector t(14);
  t.segment(0, 1).setConstant(1.0);   // distance 1, sqrt(1)
  t.segment(1, 4).setConstant(1.0);   // distance 2, sqrt(4)
  t.segment(5, 9).setConstant(1.0);   // distance 3, sqrt(9)
  EXPECT_NEAR(score(q, t, mw), std::exp(-1.0), 1e-15);
}

TEST(Score, IdentitySymmetryRangeAndScaleInvariance) {
  Rng rng(3);
  const Matrix w = random_matrix(rng, 8, 2);
  const ModalityWeights mw = extract_weights(WeightMatrix(kToy, w));
  const ModalityWeights mw8 = extract_weights(WeightMatrix(kToy, 8.0 * w));
  const ModalityWeights mwq = extract_weights(WeightMatrix(kToy, 0.25 * w));
  for (int t = 0; t < 200; ++t) {
    const Vector a = random_matrix(rng, 8, 1);
    const Vector b = random_matrix(rng, 8, 1);
    EXPECT_EQ(score(a, a, mw), 1.0);
    const double s = score(a, b, mw);
    EXPECT_EQ(s, score(b, a, mw));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_EQ(s, score(a, b, mw8));  // power-of-two scaling is exact
    EXPECT_EQ(s, score(a, b, mwq));
    EXPECT_NEAR(s, score(a, b, extract_weights(WeightMatrix(kToy, 3.7 * w))), 1e-14);
  }
}

TEST(Score, ZeroWeightBlockIsIgnored) {
  Rng rng(4);
  Matrix w = random_matrix(rng, 8, 2);
  w.middleRows(5, 3).setZero();  // whole disparity sensor
  const ModalityWeights mw = extract_weights(WeightMatrix(kToy, w));
  const Vector a = random_matrix(rng, 8, 1);
  Vector b = random_matrix(rng, 8, 1);
  const double s = score(a, b, mw);
  for (int t = 0; t < 20; ++t) {
    b.tail(3) = random_matrix(rng, 3, 1) * 100.0;
    EXPECT_EQ(score(a, b, mw), s);
  }
}

TEST(Match, ReportShapeRankingAndThresholds) {
  Rng rng(5);
  const ModalityWeights mw = extract_weights(WeightMatrix(kToy, random_matrix(rng, 8, 2)));
  const Matrix t = random_matrix(rng, 8, 6);
  Matrix q = random_matrix(rng, 8, 4);
  q.col(2) = t.col(5);
  const FeatureMatrix qf = columns(kToy, q, "q");
  const FeatureMatrix tf = columns(kToy, t, "t");
  const MatchReport r = match(qf, tf, mw, 0.9);
  ASSERT_EQ(r.scores.rows(), 4);
  ASSERT_EQ(r.scores.cols(), 6);
  EXPECT_EQ(r.scores(2, 5), 1.0);
  EXPECT_TRUE(r.accepted(2, 5));
  EXPECT_EQ(r.ranked[2][0].template_index, 5);
  EXPECT_EQ(r.ranked[2][0].template_id, "t5");
  for (const auto& list : r.ranked) {
    ASSERT_EQ(list.size(), 6u);
    for (std::size_t k = 1; k < list.size(); ++k) EXPECT_GE(list[k - 1].score, list[k].score);
  }
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 6; ++j) {
      EXPECT_EQ(r.scores(i, j), score(q.col(i), t.col(j), mw));
      EXPECT_EQ(r.baseline_scores(i, j), score(q.col(i), t.col(j), equal_weights(kToy)));
      EXPECT_EQ(r.accepted(i, j), r.scores(i, j) >= 0.9);
    }
  EXPECT_EQ(match(qf, tf, mw, 1.0 + 1e-12).accepted_count(), 0);
}

TEST(Match, TiesBreakByTemplateIndex) {
  Rng rng(6);
  const ModalityWeights mw = extract_weights(WeightMatrix(kToy, random_matrix(rng, 8, 2)));
  Matrix t = random_matrix(rng, 8, 5);
  t.col(1) = t.col(3);
  t.col(4) = t.col(3);
  Matrix q(8, 1);
  q.col(0) = t.col(3);
  const MatchReport r = match(columns(kToy, q, "q"), columns(kToy, t, "t"), mw, 0.5);
  EXPECT_EQ(r.ranked[0][0].template_index, 1);
  EXPECT_EQ(r.ranked[0][1].template_index, 3);
  EXPECT_EQ(r.ranked[0][2].template_index, 4);
}

TEST(Match, Errors) {
  Rng rng(7);
  const ModalityWeights mw = extract_weights(WeightMatrix(kToy, random_matrix(rng, 8, 2)));
  const FeatureMatrix q = columns(kToy, random_matrix(rng, 8, 2), "q");
  const ModalityLayout other({{"intensity", {{"gist", 5}}}, {"disparity", {{"gist", 3}}}});
  EXPECT_THROW(match(q, columns(other, random_matrix(rng, 8, 2), "t"), mw, 0.5), ShapeError);
  EXPECT_THROW(score(Vector::Zero(8), Vector::Zero(7), mw), ShapeError);
}

TEST(ScoreCsv, RoundTripIsExact) {
  Rng rng(9);
  const Matrix s = random_matrix(rng, 3, 4).cwiseAbs() / 7.0;
  const auto path = std::filesystem::temp_directory_path() / "msplace_scores_test.csv";
  write_score_csv(s, {"a", "b", "c"}, {"w", "x", "y", "z"}, path);
  const ScoreTable t = read_score_csv(path);
  EXPECT_EQ(t.query_ids, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(t.template_ids, (std::vector<std::string>{"w", "x", "y", "z"}));
  EXPECT_TRUE(t.scores == s);
  std::filesystem::remove(path);
  EXPECT_THROW(FeatureMatrix(kToy, Matrix(8, 0), {}), ShapeError);
}

TEST(Top1Recall, CountsOnlyQueriesWithTruth) {
  Matrix s(3, 3);
  s << 0.9, 0.1, 0.2,
       0.3, 0.4, 0.8,
       0.5, 0.5, 0.1;
  BoolMatrix gt(3, 3);
  gt << true, false, false,
        false, true, false,
        false, false, false;
  EXPECT_DOUBLE_EQ(top1_recall(s, gt), 0.5);
  gt(2, 1) = true;  // tie at 0.5 resolves to template 0
  EXPECT_DOUBLE_EQ(top1_recall(s, gt), 1.0 / 3.0);
}

TEST(Match, NoiseSensorHurtsOnlyTheBaseline) {
  // Intensity columns identify the place; disparity is large noise.
  Rng rng(8);
  const ModalityLayout l({{"intensity", {{"gist", 6}}}, {"disparity", {{"gist", 6}}}});
  const int places = 20;
  Matrix proto = random_matrix(rng, 6, places);
  Matrix t(12, places);
  Matrix q(12, places);
  for (int j = 0; j < places; ++j) {
    t.col(j) << proto.col(j) + 0.05 * random_matrix(rng, 6, 1), 3.0 * random_matrix(rng, 6, 1);
    q.col(j) << proto.col(j) + 0.05 * random_matrix(rng, 6, 1), 3.0 * random_matrix(rng, 6, 1);
  }
  Matrix w = Matrix::Zero(12, 1);
  w.topRows(6).setOnes();
  w(6, 0) = 1e-3;
  const MatchReport r = match(columns(l, q, "q"), columns(l, t, "t"), extract_weights(WeightMatrix(l, w)), 0.5);
  BoolMatrix gt = BoolMatrix::Zero(places, places);
  for (int j = 0; j < places; ++j) gt(j, j) = true;
  const double weighted = top1_recall(r.scores, gt);
  const double baseline = top1_recall(r.baseline_scores, gt);
  EXPECT_GE(weighted, baseline);
  EXPECT_EQ(weighted, 1.0);
}

}  // namespace
}  // namespace msplace
