#include "graspsim/analysis/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace graspsim::analysis {

namespace {

double gini(double ones, double total) {
  if (total <= 0.0) return 0.0;
  const double p = ones / total;
  return 2.0 * p * (1.0 - p);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;  // weighted by sample count
};

class Grower {
 public:
  Grower(const TrainingSet& data, const ForestOptions& options, std::uint64_t seed, std::vector<double>& importance)
      : data_(data), options_(options), rng_(seed), importance_(importance) {
    features_.resize(data.x.front().size());
    std::iota(features_.begin(), features_.end(), 0);
  }

  int build(std::vector<int> rows, int depth, std::vector<DecisionTree::Node>& nodes) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    double ones = 0.0;
    for (int r : rows) ones += data_.y[r];
    const double n = static_cast<double>(rows.size());
    nodes[id].probability = ones / n;

    const bool pure = ones == 0.0 || ones == n;
    if (pure || depth >= options_.max_depth || static_cast<int>(rows.size()) < options_.min_samples_split) return id;

    const Split split = best_split(rows, ones);
    if (split.feature < 0) return id;
    importance_[split.feature] += split.decrease;

    std::vector<int> left, right;
    for (int r : rows) (data_.x[r][split.feature] <= split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    nodes[id].feature = split.feature;
    nodes[id].threshold = split.threshold;
    const int l = build(std::move(left), depth + 1, nodes);
    const int r = build(std::move(right), depth + 1, nodes);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }

 private:
  // Features are visited in a fresh random order; the first `mtry` are
  // searched, and more only while none of them admits a split.
  Split best_split(const std::vector<int>& rows, double ones) {
    const int nf = static_cast<int>(features_.size());
    const int mtry = std::clamp(options_.features_per_split, 1, nf);
    std::vector<std::pair<double, int>> column(rows.size());
    const double n = static_cast<double>(rows.size());
    const double parent = n * gini(ones, n);

    Split best;
    for (int k = 0; k < nf; ++k) {
      std::uniform_int_distribution<int> pick(k, nf - 1);
      std::swap(features_[k], features_[pick(rng_)]);
      if (k >= mtry && best.feature >= 0) break;
      const int f = features_[k];

      for (std::size_t i = 0; i < rows.size(); ++i) column[i] = {data_.x[rows[i]][f], data_.y[rows[i]]};
      std::sort(column.begin(), column.end());
      double left_ones = 0.0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left_ones += column[i].second;
        if (column[i].first == column[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1), nr = n - nl;
        const double decrease = parent - nl * gini(left_ones, nl) - nr * gini(ones - left_ones, nr);
        if (decrease > best.decrease) {
          best.feature = f;
          best.decrease = decrease;
          best.threshold = 0.5 * (column[i].first + column[i + 1].first);
        }
      }
    }
    return best;
  }

  const TrainingSet& data_;
  const ForestOptions& options_;
  std::mt19937_64 rng_;
  std::vector<double>& importance_;
  std::vector<int> features_;
};

std::uint64_t tree_seed(std::uint64_t seed, int tree) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tree)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

DecisionTree DecisionTree::grow(const TrainingSet& data, const std::vector<int>& rows, const ForestOptions& options,
                                std::uint64_t seed, std::vector<double>& importance) {
  DecisionTree tree;
  importance.assign(data.x.front().size(), 0.0);
  Grower grower(data, options, seed, importance);
  grower.build(rows, 0, tree.nodes_);
  return tree;
}

double DecisionTree::predict_probability(const std::vector<double>& x) const {
  int i = 0;
  while (nodes_[i].feature >= 0) i = x[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  return nodes_[i].probability;
}

RandomForest RandomForest::train(const TrainingSet& data, const ForestOptions& options) {
  const std::size_t n = data.x.size();
  if (n < 2 || data.y.size() != n) throw std::invalid_argument("forest needs at least 2 labelled samples");
  const std::size_t nf = data.x.front().size();
  if (nf == 0) throw std::invalid_argument("forest needs at least one feature");
  for (const auto& row : data.x) {
    if (row.size() != nf) throw std::invalid_argument("ragged feature rows");
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    }
  }
  const long ones = std::count(data.y.begin(), data.y.end(), 1);
  if (ones + std::count(data.y.begin(), data.y.end(), 0) != static_cast<long>(n))
    throw std::invalid_argument("labels must be 0 or 1");
  if (ones == 0 || ones == static_cast<long>(n)) throw std::invalid_argument("both classes must be present");
  if (options.trees < 1 || options.max_depth < 1) throw std::invalid_argument("forest needs trees and depth");

  const int count = options.trees;
  RandomForest forest;
  forest.trees_.resize(count);
  std::vector<std::vector<double>> per_tree(count);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < count; t = next++) {
      std::mt19937_64 rng(tree_seed(options.seed, t));
      std::uniform_int_distribution<int> draw(0, static_cast<int>(n) - 1);
      std::vector<int> rows(n);
      for (int& r : rows) r = draw(rng);
      forest.trees_[t] = DecisionTree::grow(data, rows, options, rng(), per_tree[t]);
    }
  };
  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, count);
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // Trees that never split (a one-class bootstrap) carry no importance.
  ForestImportance& imp = forest.importance_;
  imp.importance.assign(nf, 0.0);
  imp.std_error.assign(nf, 0.0);
  std::vector<std::vector<double>> normalized;
  for (const auto& v : per_tree) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (total <= 0.0) continue;
    std::vector<double> w(v);
    for (double& x : w) x /= total;
    normalized.push_back(std::move(w));
  }
  if (normalized.empty()) throw std::invalid_argument("no tree found a split");
  const double m = static_cast<double>(normalized.size());
  for (const auto& w : normalized) {
    for (std::size_t f = 0; f < nf; ++f) imp.importance[f] += w[f] / m;
  }
  for (const auto& w : normalized) {
    for (std::size_t f = 0; f < nf; ++f) imp.std_error[f] += (w[f] - imp.importance[f]) * (w[f] - imp.importance[f]);
  }
  for (double& s : imp.std_error) s = std::sqrt(s / m) / std::sqrt(m);
  // Renormalize away rounding so the sum is 1 to machine precision.
  const double total = std::accumulate(imp.importance.begin(), imp.importance.end(), 0.0);
  for (double& x : imp.importance) x /= total;
  imp.most_important =
      static_cast<int>(std::max_element(imp.importance.begin(), imp.importance.end()) - imp.importance.begin());
  return forest;
}

double RandomForest::predict_probability(const std::vector<double>& x) const {
  double sum = 0.0;
  for (const DecisionTree& t : trees_) sum += t.predict_probability(x);
  return sum / static_cast<double>(trees_.size());
}

}  // namespace graspsim::analysis
