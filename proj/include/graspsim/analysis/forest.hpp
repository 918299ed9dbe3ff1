#pragma once

#include <cstdint>
#include <vector>

namespace graspsim::analysis {

struct ForestOptions {
  int trees = 200;
  int max_depth = 8;
  int features_per_split = 3;  // mtry
  int min_samples_split = 2;
  std::uint64_t seed = 0;
  /// Worker threads; 0 uses the hardware concurrency. The result does not
  /// depend on this.
  int threads = 0;
};

/// Binary classification samples: rows of `x` are samples, labels are 0/1.
struct TrainingSet {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

struct ForestImportance {
  std::vector<double> importance;  // mean decrease in Gini impurity, sums to 1
  std::vector<double> std_error;   // per-tree spread / sqrt(trees)
  int most_important = -1;
};

/// CART decision tree with Gini splits. Nodes are stored flat; a leaf has
/// feature = -1.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1, right = -1;
    double probability = 0.0;  // fraction of class 1 among the node's samples
  };

  /// Grows a tree on `rows` (indices into `data`, repeats allowed).
  /// `importance` receives the weighted impurity decrease per feature.
  static DecisionTree grow(const TrainingSet& data, const std::vector<int>& rows, const ForestOptions& options,
                           std::uint64_t seed, std::vector<double>& importance);

  double predict_probability(const std::vector<double>& x) const;
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
};

class RandomForest {
 public:
  /// Bootstrap-aggregated trees; tree t draws from a generator seeded by
  /// (seed, t), so the forest is identical for any thread count. Throws
  /// std::invalid_argument with fewer than 2 samples, ragged rows, or a
  /// missing class.
  static RandomForest train(const TrainingSet& data, const ForestOptions& options = {});

  double predict_probability(const std::vector<double>& x) const;
  int predict(const std::vector<double>& x) const { return predict_probability(x) >= 0.5 ? 1 : 0; }

  /// Per-feature importance, each tree's vector normalized to 1 before
  /// averaging.
  const ForestImportance& importance() const { return importance_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
  ForestImportance importance_;
};

}  // namespace graspsim::analysis
