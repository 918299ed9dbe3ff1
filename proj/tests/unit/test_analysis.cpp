#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "graspsim/analysis/forest.hpp"
#include "graspsim/analysis/percentiles.hpp"
#include "graspsim/analysis/ranking.hpp"
#include "graspsim/analysis/report.hpp"
#include "graspsim/analysis/stats.hpp"

using namespace graspsim::analysis;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Rows of `features` noise columns; the label is column 0 above its median,
// flipped with probability `flip`.
TrainingSet dominant_feature_set(int n, int features, double flip, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TrainingSet data;
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(features);
    for (double& v : row) v = u(rng);
    data.x.push_back(row);
  }
  std::vector<double> first;
  for (const auto& row : data.x) first.push_back(row[0]);
  std::nth_element(first.begin(), first.begin() + n / 2, first.end());
  const double median = first[n / 2];
  for (const auto& row : data.x) {
    int label = row[0] > median ? 1 : 0;
    if (u(rng) < flip) label = 1 - label;
    data.y.push_back(label);
  }
  return data;
}

ForestOptions options(std::uint64_t seed, int threads = 1) {
  ForestOptions o;
  o.seed = seed;
  o.threads = threads;
  return o;
}

// Rows whose value has fewer than `k` strictly larger values.
std::set<int> brute_top(const std::vector<double>& v, int k) {
  std::set<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    int larger = 0;
    for (double w : v) larger += w > v[i];
    if (larger < k) out.insert(static_cast<int>(i));
  }
  return out;
}

std::vector<double> negated(std::vector<double> v) {
  for (double& x : v) x = -x;
  return v;
}

}  // namespace

TEST(Pearson, ExactLinearRelations) {
  const std::vector<double> x{0.5, 1.0, 2.0, 3.5, 7.0, 11.0};
  std::vector<double> up, down;
  for (double v : x) {
    up.push_back(2.0 * v + 1.0);
    down.push_back(-v);
  }
  EXPECT_NEAR(*pearson_r(x, up), 1.0, 1e-12);
  EXPECT_NEAR(*pearson_r(x, down), -1.0, 1e-12);
}

TEST(Pearson, FivePointClosedForm) {
  // Centered: dx = (-2,-1,0,1,2), dy = (-1,-2,1,0,2); sxy = 8, sxx = syy = 10.
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 1, 4, 3, 5};
  EXPECT_NEAR(*pearson_r(x, y), 8.0 / std::sqrt(10.0 * 10.0), 1e-12);
}

TEST(Pearson, InvariantToPositiveAffineMaps) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(100), y(100);
  for (int i = 0; i < 100; ++i) {
    x[i] = n(rng);
    y[i] = 0.5 * x[i] + n(rng);
  }
  const double r = *pearson_r(x, y);
  std::vector<double> x2, y2;
  for (int i = 0; i < 100; ++i) {
    x2.push_back(1e3 * x[i] - 7.0);
    y2.push_back(0.01 * y[i] + 1e6);
  }
  EXPECT_NEAR(*pearson_r(x2, y2), r, 1e-9);
}

TEST(Pearson, UndefinedCasesAreAbsent) {
  EXPECT_FALSE(pearson_r({1, 2, 3}, {4, 4, 4}).has_value());
  EXPECT_FALSE(pearson_r({1, 2}, {3, 4}).has_value());
  EXPECT_FALSE(pearson_r({1, kNaN, 3, 4}, {1, 2, kNaN, 4}).has_value());  // only 2 complete pairs
  EXPECT_NEAR(*pearson_r({1, kNaN, 3, 4, 5}, {1, 9, 3, 4, 5}), 1.0, 1e-12);
}

TEST(Percentiles, FiftyValuesSplitFifteenFifteenTwenty) {
  std::vector<double> v(50);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  for (double& x : v) x = u(rng);
  const Labeling l = label_percentiles(v, 0.3);
  EXPECT_EQ(std::count(l.labels.begin(), l.labels.end(), Label::top), 15);
  EXPECT_EQ(std::count(l.labels.begin(), l.labels.end(), Label::bottom), 15);
  EXPECT_EQ(std::count(l.labels.begin(), l.labels.end(), Label::excluded), 20);
  EXPECT_FALSE(l.degenerate);
  // Every top value exceeds every bottom value.
  double min_top = 1e9, max_bottom = -1e9;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (l.labels[i] == Label::top) min_top = std::min(min_top, v[i]);
    if (l.labels[i] == Label::bottom) max_bottom = std::max(max_bottom, v[i]);
  }
  EXPECT_GT(min_top, max_bottom);
}

TEST(Percentiles, OneToTen) {
  std::vector<double> v{4, 9, 1, 7, 10, 2, 5, 3, 8, 6};
  const Labeling l = label_percentiles(v, 0.3);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Label want = v[i] >= 8 ? Label::top : v[i] <= 3 ? Label::bottom : Label::excluded;
    EXPECT_EQ(l.labels[i], want) << v[i];
  }
}

TEST(Percentiles, AllEqualSplitsByStableOrder) {
  const Labeling l = label_percentiles(std::vector<double>(50, 2.5), 0.3);
  EXPECT_TRUE(l.degenerate);
  for (int i = 0; i < 50; ++i) {
    const Label want = i < 15 ? Label::bottom : i >= 35 ? Label::top : Label::excluded;
    EXPECT_EQ(l.labels[i], want) << i;
  }
}

TEST(Percentiles, TopAndBottomNeverOverlap) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> small(0, 3);
  for (int n = 10; n < 80; n += 7) {
    std::vector<double> v(n);
    for (double& x : v) x = small(rng);  // heavy ties
    const Labeling l = label_percentiles(v, 0.3);
    EXPECT_EQ(std::count(l.labels.begin(), l.labels.end(), Label::top), l.per_class);
    EXPECT_EQ(std::count(l.labels.begin(), l.labels.end(), Label::bottom), l.per_class);
    EXPECT_EQ(l.per_class, static_cast<int>(std::floor(0.3 * n)));
  }
}

TEST(Percentiles, PreconditionsRejected) {
  EXPECT_THROW(label_percentiles(std::vector<double>(9, 1.0)), std::invalid_argument);
  EXPECT_THROW(label_percentiles(std::vector<double>(10, 1.0), 0.7), std::invalid_argument);
  std::vector<double> v(12, 1.0);
  v[3] = kNaN;
  EXPECT_THROW(label_percentiles(v), std::invalid_argument);
}

TEST(Forest, DominantFeatureWins) {
  const TrainingSet data = dominant_feature_set(200, 8, 0.0, 11);
  const RandomForest forest = RandomForest::train(data, options(42));
  const ForestImportance& imp = forest.importance();
  ASSERT_EQ(imp.importance.size(), 8u);
  EXPECT_GT(imp.importance[0], 0.5);
  EXPECT_EQ(imp.most_important, 0);
  EXPECT_NEAR(std::accumulate(imp.importance.begin(), imp.importance.end(), 0.0), 1.0, 1e-9);
  for (std::size_t f = 0; f < 8; ++f) {
    EXPECT_GE(imp.importance[f], 0.0);
    EXPECT_GE(imp.std_error[f], 0.0);
  }
  // Standard errors are small next to the dominant importance.
  EXPECT_LT(imp.std_error[0], 0.05);
  int correct = 0;
  for (std::size_t i = 0; i < data.x.size(); ++i) correct += forest.predict(data.x[i]) == data.y[i];
  EXPECT_GT(correct, 190);
}

TEST(Forest, BitwiseDeterministicAcrossThreadCounts) {
  const TrainingSet data = dominant_feature_set(150, 8, 0.2, 2);
  const auto a = RandomForest::train(data, options(9, 1)).importance();
  const auto b = RandomForest::train(data, options(9, 4)).importance();
  const auto c = RandomForest::train(data, options(9, 1)).importance();
  EXPECT_EQ(a.importance, b.importance);
  EXPECT_EQ(a.importance, c.importance);
  EXPECT_EQ(a.std_error, b.std_error);
  const auto d = RandomForest::train(data, options(10, 1)).importance();
  EXPECT_NE(a.importance, d.importance);
}

TEST(Forest, DuplicatedFeatureSharesItsImportance) {
  const TrainingSet base = dominant_feature_set(300, 8, 0.25, 17);
  TrainingSet dup = base;
  for (auto& row : dup.x) row.push_back(row[0]);
  const double original = RandomForest::train(base, options(1)).importance().importance[0];
  const auto shared = RandomForest::train(dup, options(1)).importance();
  EXPECT_GT(shared.importance[0], 0.05);
  EXPECT_GT(shared.importance[8], 0.05);
  EXPECT_NEAR(shared.importance[0] + shared.importance[8], original, 0.15);
}

TEST(Forest, RejectsSingleClassAndBadInput) {
  TrainingSet data = dominant_feature_set(30, 4, 0.0, 1);
  std::fill(data.y.begin(), data.y.end(), 1);
  EXPECT_THROW(RandomForest::train(data), std::invalid_argument);
  data = dominant_feature_set(30, 4, 0.0, 1);
  data.x[3].pop_back();
  EXPECT_THROW(RandomForest::train(data), std::invalid_argument);
  data = dominant_feature_set(30, 4, 0.0, 1);
  data.x[2][1] = kNaN;
  EXPECT_THROW(RandomForest::train(data), std::invalid_argument);
}

TEST(Forest, TreeRespectsDepthLimit) {
  const TrainingSet data = dominant_feature_set(200, 4, 0.4, 3);
  ForestOptions o = options(0);
  o.max_depth = 3;
  std::vector<int> rows(data.x.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<double> imp;
  const DecisionTree tree = DecisionTree::grow(data, rows, o, 5, imp);
  // A binary tree of depth 3 has at most 15 nodes.
  EXPECT_LE(tree.nodes().size(), 15u);
}

TEST(ImportanceReport, MarksTheDominantFeature) {
  const TrainingSet data = dominant_feature_set(60, 8, 0.0, 23);
  Table t;
  for (int f = 0; f < 8; ++f) {
    t.feature_names.push_back("f" + std::to_string(f));
    std::vector<double> col;
    for (const auto& row : data.x) col.push_back(row[f]);
    t.features.push_back(col);
  }
  t.metric_names = {"metric"};
  std::vector<double> metric;
  for (const auto& row : data.x) metric.push_back(3.0 * row[0]);
  t.metrics = {metric};
  const ImportanceTable table = importance_for_metric(t, 0, options(4));
  EXPECT_EQ(table.samples, 36);
  EXPECT_EQ(table.importance.most_important, 0);

  // Absent metric values shrink the labelled set below 20.
  for (int i = 0; i < 30; ++i) t.metrics[0][i] = kNaN;
  EXPECT_THROW(importance_for_metric(t, 0, options(4)), std::invalid_argument);
}

TEST(RankPredict, PerfectMonotoneData) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> feature(50);
  for (double& x : feature) x = u(rng);
  const RankPrediction same = rank_predict(feature, feature, 5);
  EXPECT_EQ(same.accuracy, 1.0);
  EXPECT_EQ(same.direction, Direction::positive);
  const RankPrediction opposite = rank_predict(feature, negated(feature), 5);
  EXPECT_EQ(opposite.accuracy, 1.0);
  EXPECT_EQ(opposite.direction, Direction::negative);
  EXPECT_EQ(same.predicted_top, opposite.predicted_bottom);
}

TEST(RankPredict, NoisyDataMatchesBruteForceAccuracy) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> feature(50), metric(50);
    for (int i = 0; i < 50; ++i) {
      feature[i] = n(rng);
      metric[i] = feature[i] + n(rng);  // correlation about 0.7
    }
    const RankPrediction p = rank_predict(feature, metric, 5);
    const auto top_metric = brute_top(metric, 15), bottom_metric = brute_top(negated(metric), 15);
    const auto top_feature = brute_top(feature, 5), bottom_feature = brute_top(negated(feature), 5);
    int hits = 0;
    for (int i : top_feature) hits += top_metric.count(i);
    for (int i : bottom_feature) hits += bottom_metric.count(i);
    EXPECT_DOUBLE_EQ(p.accuracy, hits / 10.0) << seed;
    EXPECT_EQ(std::set<int>(p.predicted_top.begin(), p.predicted_top.end()), top_feature);
  }
}

TEST(RankPredict, InvariantToMonotoneFeatureTransform) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> feature(40), metric(40), cubed;
  for (int i = 0; i < 40; ++i) {
    feature[i] = n(rng);
    metric[i] = feature[i] + 0.8 * n(rng);
    cubed.push_back(std::exp(feature[i]) + feature[i] * feature[i] * feature[i]);
  }
  const RankPrediction a = rank_predict(feature, metric, 5, Direction::positive);
  const RankPrediction b = rank_predict(cubed, metric, 5, Direction::positive);
  EXPECT_EQ(a.predicted_top, b.predicted_top);
  EXPECT_EQ(a.predicted_bottom, b.predicted_bottom);
  EXPECT_EQ(a.accuracy, b.accuracy);
}

TEST(RankPredict, UninformativeFeatureRefused) {
  std::vector<double> feature, metric;
  for (int i = 0; i < 20; ++i) {
    feature.push_back(i);
    metric.push_back(i % 2);  // R = 5 / sqrt(665 * 5), about 0.087
  }
  EXPECT_THROW(rank_predict(feature, metric, 5), UninformativeFeature);
  EXPECT_THROW(rank_predict(std::vector<double>(19, 1.0), std::vector<double>(19, 1.0)), std::invalid_argument);
}
