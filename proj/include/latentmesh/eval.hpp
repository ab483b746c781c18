#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "latentmesh/graph.hpp"

namespace latentmesh {

enum class EdgeOperator { Hadamard, WeightedL2 };

// Hadamard: elementwise product. WeightedL2: elementwise squared
// difference.
Eigen::VectorXd edge_features(const Eigen::VectorXd& y_u, const Eigen::VectorXd& y_v,
                              EdgeOperator op);

struct LogisticModel {
  Eigen::VectorXd weights;
  double bias = 0.0;

  double score(const Eigen::VectorXd& x) const { return weights.dot(x) + bias; }
  double probability(const Eigen::VectorXd& x) const;
};

// Full-batch gradient descent on the L2-regularized logistic loss.
// Labels are 0/1; throws if only one class is present.
LogisticModel train_logistic(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                             double penalty, int epochs, std::uint64_t seed);

struct OneVsRestModel {
  std::vector<int> classes;            // sorted distinct class ids seen in training
  std::vector<LogisticModel> models;   // parallel to classes
  int absent_classes = 0;              // classes requested but unseen in training

  // Argmax of per-class scores; ties resolve to the lowest class id.
  int predict(const Eigen::VectorXd& x) const;
};

OneVsRestModel one_vs_rest(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                           double penalty, int epochs, std::uint64_t seed);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Rank-statistic AUC (ties counted half) plus a threshold-sweep ROC curve
// from (0,0) to (1,1). Throws when only one class is present.
std::pair<double, std::vector<RocPoint>> auc_roc(const std::vector<double>& scores,
                                                 const std::vector<int>& labels);

// Micro-F1 over pooled counts and macro-F1 as the unweighted per-class
// mean; a class with no predictions and no truth scores 0.
std::pair<double, double> f1_scores(const std::vector<int>& predicted,
                                    const std::vector<int>& actual,
                                    const std::vector<int>& classes);

struct MetricsReport {
  double auc = 0.0;
  std::vector<RocPoint> roc;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  // ratio -> (micro, macro)
  std::map<double, std::pair<double, double>> per_ratio;
};

// Edge features for removed (positive) and negative pairs, 50/50
// train/test split over those pairs, in-repo logistic classifier,
// AUC + ROC on the held-out half. Embeddings must come from the train
// graph only.
MetricsReport link_prediction_experiment(const Graph& original, const Eigen::MatrixXd& embeddings,
                                         const EdgeSplit& split, EdgeOperator op,
                                         std::uint64_t seed);

// For each training ratio, averages micro/macro F1 over `runs` stratified
// splits. Top-level micro/macro are the means across ratios.
MetricsReport node_classification_experiment(const Eigen::MatrixXd& embeddings,
                                             const std::vector<int>& labels,
                                             const std::vector<double>& ratios, int runs,
                                             std::uint64_t seed);

}  // namespace latentmesh
