#include "msplace/matching.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "msplace/error.hpp"
#include "msplace/text.hpp"
#include "parallel.hpp"

namespace msplace {

ModalityWeights extract_weights(const WeightMatrix& w) {
  const auto& layout = w.layout();
  ModalityWeights out;
  out.layout = layout;
  out.feature_w.resize(layout.sensor_count());
  out.sensor_w.resize(layout.sensor_count());
  for (std::size_t q = 0; q < layout.sensor_count(); ++q) {
    const RowRange sr = layout.sensor_range(q);
    out.sensor_w[q] = w.values().middleRows(sr.begin, sr.size()).norm();
    for (std::size_t k = 0; k < layout.feature_count(q); ++k) {
      const RowRange fr = layout.feature_range(q, k);
      out.feature_w[q].push_back(w.values().middleRows(fr.begin, fr.size()).norm());
    }
  }
  for (std::size_t q = 0; q < layout.sensor_count(); ++q) {
    for (std::size_t k = 0; k < layout.feature_count(q); ++k) out.normalizer += out.combined(q, k);
  }
  if (!(out.normalizer > 0.0)) {
    throw DegenerateModelError("weight matrix is zero; no modality carries weight");
  }
  return out;
}

ModalityWeights equal_weights(const ModalityLayout& layout) {
  ModalityWeights out;
  out.layout = layout;
  out.feature_w.resize(layout.sensor_count());
  out.sensor_w.assign(layout.sensor_count(), 1.0);
  for (std::size_t q = 0; q < layout.sensor_count(); ++q) {
    out.feature_w[q].assign(layout.feature_count(q), 1.0);
  }
  out.normalizer = static_cast<double>(layout.block_count());
  return out;
}

double pairwise_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  if (a.size() != b.size() || a.size() == 0) throw ShapeError("similarity blocks differ in size");
  return std::exp(-(a - b).norm() / std::sqrt(static_cast<double>(a.size())));
}

double score(const Eigen::Ref<const Vector>& query, const Eigen::Ref<const Vector>& templ,
             const ModalityWeights& weights) {
  const auto& layout = weights.layout;
  if (query.size() != layout.total_dim() || templ.size() != layout.total_dim()) {
    throw ShapeError("score inputs do not match the weight layout");
  }
  double total = 0.0;
  for (const auto& b : layout.blocks()) {
    const double c = weights.combined(b.sensor, b.feature);
    if (c == 0.0) continue;
    total += c * pairwise_similarity(query.segment(b.rows.begin, b.rows.size()),
                                     templ.segment(b.rows.begin, b.rows.size()));
  }
  return std::clamp(total / weights.normalizer, 0.0, 1.0);
}

Index MatchReport::accepted_count() const { return accepted.count(); }

namespace {

void check_pair(const FeatureMatrix& queries, const FeatureMatrix& templates,
                const ModalityWeights& weights) {
  if (templates.image_count() == 0) throw ValidationError("template set is empty");
  if (!(queries.layout() == templates.layout())) {
    throw ShapeError("query and template layouts differ");
  }
  if (!(queries.layout() == weights.layout)) {
    throw ShapeError("feature layout differs from the model layout");
  }
}

}  // namespace

Matrix score_matrix(const FeatureMatrix& queries, const FeatureMatrix& templates,
                    const ModalityWeights& weights) {
  check_pair(queries, templates, weights);
  Matrix s(queries.image_count(), templates.image_count());
  detail::parallel_for(static_cast<std::size_t>(queries.image_count()), [&](std::size_t i) {
    const auto qi = static_cast<Index>(i);
    for (Index j = 0; j < templates.image_count(); ++j) {
      s(qi, j) = score(queries.values().col(qi), templates.values().col(j), weights);
    }
  });
  return s;
}

MatchReport match(const FeatureMatrix& queries, const FeatureMatrix& templates,
                  const ModalityWeights& weights, double threshold) {
  MatchReport r;
  r.query_ids = queries.image_ids();
  r.template_ids = templates.image_ids();
  r.scores = score_matrix(queries, templates, weights);
  r.baseline_scores = score_matrix(queries, templates, equal_weights(queries.layout()));
  r.threshold = threshold;
  r.accepted = r.scores.array() >= threshold;
  r.ranked.resize(static_cast<std::size_t>(queries.image_count()));
  for (Index i = 0; i < queries.image_count(); ++i) {
    std::vector<Index> order(static_cast<std::size_t>(templates.image_count()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return r.scores(i, a) > r.scores(i, b); });
    auto& list = r.ranked[static_cast<std::size_t>(i)];
    for (Index j : order) list.push_back({j, r.template_ids[static_cast<std::size_t>(j)], r.scores(i, j)});
  }
  return r;
}

double top1_recall(const Matrix& scores, const BoolMatrix& same_place) {
  if (scores.rows() != same_place.rows() || scores.cols() != same_place.cols()) {
    throw ShapeError("score and ground-truth shapes differ");
  }
  if (scores.cols() == 0) throw ValidationError("no templates to rank");
  Index eligible = 0;
  Index hits = 0;
  for (Index i = 0; i < scores.rows(); ++i) {
    if (!same_place.row(i).any()) continue;
    ++eligible;
    Index best = 0;
    for (Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    hits += same_place(i, best);
  }
  if (eligible == 0) throw ValidationError("no query has a ground-truth match");
  return static_cast<double>(hits) / static_cast<double>(eligible);
}

void write_score_csv(const Matrix& scores, const std::vector<std::string>& query_ids,
                     const std::vector<std::string>& template_ids, const std::filesystem::path& path) {
  if (scores.rows() != static_cast<Index>(query_ids.size()) ||
      scores.cols() != static_cast<Index>(template_ids.size())) {
    throw ShapeError("score matrix does not match the id lists");
  }
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "query_id";
  for (const auto& t : template_ids) os << ',' << t;
  os << '\n';
  for (Index i = 0; i < scores.rows(); ++i) {
    os << query_ids[static_cast<std::size_t>(i)];
    for (Index j = 0; j < scores.cols(); ++j) os << ',' << text::exact(scores(i, j));
    os << '\n';
  }
  if (!os) throw IoError("failed writing " + path.string());
}

ScoreTable read_score_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw ValidationError(path.string() + ": empty score file");
  auto head = text::split(text::trim(line), ',');
  if (head.empty() || head[0] != "query_id") {
    throw ValidationError(path.string() + ": expected 'query_id' header");
  }
  ScoreTable t;
  t.template_ids.assign(head.begin() + 1, head.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (text::trim(line).empty()) continue;
    auto f = text::split(text::trim(line), ',');
    if (f.size() != head.size()) throw ValidationError(path.string() + ": ragged score row");
    t.query_ids.push_back(f[0]);
    std::vector<double> r;
    for (std::size_t j = 1; j < f.size(); ++j) r.push_back(text::to_double(f[j], "score"));
    rows.push_back(std::move(r));
  }
  t.scores.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.template_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      t.scores(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return t;
}

}  // namespace msplace
