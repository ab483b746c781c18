#include "latentmesh/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "latentmesh/rng.hpp"

namespace latentmesh {

namespace {

constexpr double kLogisticPenalty = 1e-4;
constexpr int kLogisticEpochs = 500;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void shuffle(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

Eigen::VectorXd edge_features(const Eigen::VectorXd& y_u, const Eigen::VectorXd& y_v,
                              EdgeOperator op) {
  if (y_u.size() != y_v.size())
    throw std::invalid_argument("edge_features: dimension mismatch");
  if (op == EdgeOperator::Hadamard) return y_u.cwiseProduct(y_v);
  return (y_u - y_v).cwiseAbs2();
}

double LogisticModel::probability(const Eigen::VectorXd& x) const {
  return sigmoid(score(x));
}

LogisticModel train_logistic(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                             double penalty, int epochs, std::uint64_t seed) {
  const long n = features.rows();
  if (n == 0 || static_cast<long>(labels.size()) != n)
    throw std::invalid_argument("train_logistic: features/labels size mismatch");
  const long positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == n)
    throw std::invalid_argument("train_logistic: both classes required");

  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) y(i) = labels[i] ? 1.0 : 0.0;

  LogisticModel model;
  Rng rng(Rng::mix(seed, 0x10c));
  model.weights = Eigen::VectorXd::Zero(features.cols());
  for (long j = 0; j < model.weights.size(); ++j)
    model.weights(j) = 0.01 * (2.0 * rng.uniform() - 1.0);

  // Step size from the Lipschitz bound of the mean logistic gradient, so
  // full-batch descent is monotone.
  double max_sq = 0.0;
  for (long i = 0; i < n; ++i) max_sq = std::max(max_sq, features.row(i).squaredNorm());
  const double lipschitz = 0.25 * (max_sq + 1.0) + penalty;
  const double lr = 1.0 / lipschitz;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    const Eigen::VectorXd scores = features * model.weights;
    Eigen::VectorXd p(n);
    for (long i = 0; i < n; ++i) p(i) = sigmoid(scores(i) + model.bias);
    const Eigen::VectorXd err = p - y;
    const Eigen::VectorXd grad_w =
        features.transpose() * err / static_cast<double>(n) + penalty * model.weights;
    const double grad_b = err.mean() + penalty * model.bias;
    model.weights -= lr * grad_w;
    model.bias -= lr * grad_b;
  }
  return model;
}

int OneVsRestModel::predict(const Eigen::VectorXd& x) const {
  int best_class = classes.front();
  double best_score = models.front().score(x);
  for (std::size_t c = 1; c < classes.size(); ++c) {
    const double s = models[c].score(x);
    if (s > best_score) {
      best_score = s;
      best_class = classes[c];
    }
  }
  return best_class;
}

OneVsRestModel one_vs_rest(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                           double penalty, int epochs, std::uint64_t seed) {
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2)
    throw std::invalid_argument("one_vs_rest: need at least 2 classes");
  OneVsRestModel model;
  model.classes.assign(distinct.begin(), distinct.end());
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    std::vector<int> binary(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
      binary[i] = labels[i] == model.classes[c] ? 1 : 0;
    model.models.push_back(
        train_logistic(features, binary, penalty, epochs, Rng::mix(seed, c)));
  }
  return model;
}

std::pair<double, std::vector<RocPoint>> auc_roc(const std::vector<double>& scores,
                                                 const std::vector<int>& labels) {
  const std::size_t n = scores.size();
  if (n == 0 || labels.size() != n)
    throw std::invalid_argument("auc_roc: scores/labels size mismatch");
  const long p = std::count(labels.begin(), labels.end(), 1);
  const long m = static_cast<long>(n) - p;
  if (p == 0 || m == 0) throw std::invalid_argument("auc_roc: both classes required");

  // Rank statistic with average ranks over ties.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
    i = j;
  }
  const double auc =
      (pos_rank_sum - 0.5 * p * (p + 1)) / (static_cast<double>(p) * m);

  // Threshold sweep, highest score first; ties enter together.
  std::vector<RocPoint> roc{{0.0, 0.0}};
  long tp = 0, fp = 0;
  std::size_t k = n;
  while (k > 0) {
    std::size_t j = k;
    while (j > 0 && scores[order[j - 1]] == scores[order[k - 1]]) --j;
    for (std::size_t t = j; t < k; ++t) {
      if (labels[order[t]] == 1)
        ++tp;
      else
        ++fp;
    }
    roc.push_back({static_cast<double>(fp) / m, static_cast<double>(tp) / p});
    k = j;
  }
  return {auc, roc};
}

std::pair<double, double> f1_scores(const std::vector<int>& predicted,
                                    const std::vector<int>& actual,
                                    const std::vector<int>& classes) {
  if (predicted.size() != actual.size())
    throw std::invalid_argument("f1_scores: length mismatch");
  long pooled_tp = 0, pooled_fp = 0, pooled_fn = 0;
  double macro_sum = 0.0;
  for (int c : classes) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const bool pred_c = predicted[i] == c;
      const bool true_c = actual[i] == c;
      tp += pred_c && true_c;
      fp += pred_c && !true_c;
      fn += !pred_c && true_c;
    }
    pooled_tp += tp;
    pooled_fp += fp;
    pooled_fn += fn;
    const double denom = 2.0 * tp + fp + fn;
    macro_sum += denom > 0.0 ? 2.0 * tp / denom : 0.0;
  }
  const double micro_denom = 2.0 * pooled_tp + pooled_fp + pooled_fn;
  const double micro = micro_denom > 0.0 ? 2.0 * pooled_tp / micro_denom : 0.0;
  const double macro = classes.empty() ? 0.0 : macro_sum / classes.size();
  return {micro, macro};
}

MetricsReport link_prediction_experiment(const Graph& original,
                                         const Eigen::MatrixXd& embeddings,
                                         const EdgeSplit& split, EdgeOperator op,
                                         std::uint64_t seed) {
  if (embeddings.rows() != original.num_nodes())
    throw std::invalid_argument("link_prediction: embedding row count mismatch");

  const std::size_t n_pos = split.removed_edges.size();
  const std::size_t n_neg = split.negative_edges.size();
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("link_prediction: empty positive or negative set");

  Eigen::MatrixXd feats(n_pos + n_neg, embeddings.cols());
  std::vector<int> labels(n_pos + n_neg);
  for (std::size_t i = 0; i < n_pos; ++i) {
    const auto& [u, v] = split.removed_edges[i];
    feats.row(i) = edge_features(embeddings.row(u), embeddings.row(v), op);
    labels[i] = 1;
  }
  for (std::size_t i = 0; i < n_neg; ++i) {
    const auto& [u, v] = split.negative_edges[i];
    feats.row(n_pos + i) = edge_features(embeddings.row(u), embeddings.row(v), op);
    labels[n_pos + i] = 0;
  }

  std::vector<int> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(Rng::mix(seed, 0x11f));
  shuffle(order, rng);

  const std::size_t n_train = order.size() / 2;
  Eigen::MatrixXd train_x(n_train, feats.cols());
  Eigen::MatrixXd test_x(order.size() - n_train, feats.cols());
  std::vector<int> train_y(n_train), test_y(order.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < n_train) {
      train_x.row(i) = feats.row(order[i]);
      train_y[i] = labels[order[i]];
    } else {
      test_x.row(i - n_train) = feats.row(order[i]);
      test_y[i - n_train] = labels[order[i]];
    }
  }

  const LogisticModel clf =
      train_logistic(train_x, train_y, kLogisticPenalty, kLogisticEpochs, seed);
  std::vector<double> scores(test_y.size());
  for (std::size_t i = 0; i < test_y.size(); ++i) scores[i] = clf.score(test_x.row(i));

  MetricsReport report;
  std::tie(report.auc, report.roc) = auc_roc(scores, test_y);
  return report;
}

MetricsReport node_classification_experiment(const Eigen::MatrixXd& embeddings,
                                             const std::vector<int>& labels,
                                             const std::vector<double>& ratios, int runs,
                                             std::uint64_t seed) {
  const long n = embeddings.rows();
  if (static_cast<long>(labels.size()) != n)
    throw std::invalid_argument("node_classification: labels size mismatch");
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2)
    throw std::invalid_argument("node_classification: need at least 2 classes");
  if (runs < 1) throw std::invalid_argument("node_classification: runs must be >= 1");

  std::map<int, std::vector<int>> by_class;
  for (long i = 0; i < n; ++i) by_class[labels[i]].push_back(static_cast<int>(i));

  MetricsReport report;
  for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
    const double ratio = ratios[ri];
    if (!(ratio > 0.0 && ratio < 1.0))
      throw std::invalid_argument("node_classification: ratio must lie in (0,1)");
    double micro_sum = 0.0, macro_sum = 0.0;
    for (int run = 0; run < runs; ++run) {
      Rng rng(Rng::mix(Rng::mix(seed, ri), run));
      std::vector<int> train_idx, test_idx;
      for (auto& [cls, members] : by_class) {
        std::vector<int> shuffled = members;
        shuffle(shuffled, rng);
        const std::size_t take = static_cast<std::size_t>(
            std::lround(ratio * static_cast<double>(shuffled.size())));
        for (std::size_t i = 0; i < shuffled.size(); ++i)
          (i < take ? train_idx : test_idx).push_back(shuffled[i]);
      }

      std::vector<int> train_y, test_y;
      Eigen::MatrixXd train_x(train_idx.size(), embeddings.cols());
      Eigen::MatrixXd test_x(test_idx.size(), embeddings.cols());
      for (std::size_t i = 0; i < train_idx.size(); ++i) {
        train_x.row(i) = embeddings.row(train_idx[i]);
        train_y.push_back(labels[train_idx[i]]);
      }
      for (std::size_t i = 0; i < test_idx.size(); ++i) {
        test_x.row(i) = embeddings.row(test_idx[i]);
        test_y.push_back(labels[test_idx[i]]);
      }

      const OneVsRestModel clf =
          one_vs_rest(train_x, train_y, kLogisticPenalty, kLogisticEpochs,
                      Rng::mix(seed, 1000 + ri * 100 + run));
      std::vector<int> pred(test_y.size());
      for (std::size_t i = 0; i < test_y.size(); ++i)
        pred[i] = clf.predict(test_x.row(i));

      // Classes absent from the training split are skipped in macro
      // averaging.
      const auto [micro, macro] = f1_scores(pred, test_y, clf.classes);
      micro_sum += micro;
      macro_sum += macro;
    }
    report.per_ratio[ratio] = {micro_sum / runs, macro_sum / runs};
  }

  for (const auto& [ratio, f1] : report.per_ratio) {
    report.micro_f1 += f1.first;
    report.macro_f1 += f1.second;
  }
  report.micro_f1 /= static_cast<double>(report.per_ratio.size());
  report.macro_f1 /= static_cast<double>(report.per_ratio.size());
  return report;
}

}  // namespace latentmesh
