#include "progle/eval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "progle/errors.hpp"
#include "progle/rng.hpp"

namespace progle {

std::vector<index_t> LabelSet::labeled_nodes() const {
  std::vector<index_t> out;
  for (index_t i = 0; i < n_nodes; ++i)
    if (!labels[i].empty()) out.push_back(i);
  return out;
}

void LabelSet::validate() const {
  if (labels.size() != static_cast<std::size_t>(n_nodes))
    throw ValidationError("label set: node count mismatch");
  for (const auto& ls : labels)
    for (const auto l : ls)
      if (l < 0 || l >= n_labels) throw ValidationError("label set: label id out of range");
}

Split split(const LabelSet& labels, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw ValidationError("split ratio must lie in (0, 1), got " + std::to_string(ratio));
  std::vector<index_t> pool = labels.labeled_nodes();
  const auto count = static_cast<index_t>(pool.size());
  // floor with a nudge so exact products like 0.3 * 10 do not drop a node
  const auto n_train = static_cast<index_t>(ratio * static_cast<double>(count) + 1e-9);
  if (n_train < 1 || n_train >= count)
    throw ValidationError("split is degenerate: " + std::to_string(n_train) + " train of " +
                          std::to_string(count) + " labeled nodes");

  CounterRng rng(seed);
  for (index_t i = count - 1; i > 0; --i) {
    const auto j = static_cast<index_t>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(pool[i], pool[j]);
  }
  Split out;
  out.train.assign(pool.begin(), pool.begin() + n_train);
  out.test.assign(pool.begin() + n_train, pool.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

namespace {

double log1p_exp(double z) {
  // ln(1 + e^z), overflow-safe
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Newton iteration for one binary problem; returns (weights, bias).
std::pair<Eigen::VectorXd, double> fit_binary_logreg(const Eigen::MatrixXd& x,
                                                     const Eigen::VectorXd& y, double l2) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;

  auto loss_at = [&](const Eigen::VectorXd& wv, double bv) {
    const Eigen::VectorXd z = x * wv + Eigen::VectorXd::Constant(n, bv);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) loss += log1p_exp(z[i]) - y[i] * z[i];
    return loss + 0.5 * l2 * wv.squaredNorm();
  };

  constexpr double kGradTol = 1e-6;
  constexpr int kMaxIter = 100;
  double grad_norm = 0.0;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd z = x * w + Eigen::VectorXd::Constant(n, b);
    Eigen::VectorXd p(n), s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = 1.0 / (1.0 + std::exp(-z[i]));
      s[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
    }
    const Eigen::VectorXd resid = p - y;
    Eigen::VectorXd grad(d + 1);
    grad.head(d) = x.transpose() * resid + l2 * w;
    grad[d] = resid.sum();
    grad_norm = grad.norm();
    if (grad_norm <= kGradTol) return {w, b};

    Eigen::MatrixXd hess(d + 1, d + 1);
    const Eigen::MatrixXd xs = s.asDiagonal() * x;
    hess.topLeftCorner(d, d) = x.transpose() * xs;
    hess.topLeftCorner(d, d).diagonal().array() += l2;
    hess.topRightCorner(d, 1) = xs.colwise().sum().transpose();
    hess.bottomLeftCorner(1, d) = xs.colwise().sum();
    hess(d, d) = s.sum();

    const Eigen::VectorXd step = hess.ldlt().solve(-grad);
    const double directional = grad.dot(step);

    const double f0 = loss_at(w, b);
    double t = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd wt = w + t * step.head(d);
      const double bt = b + t * step[d];
      if (loss_at(wt, bt) <= f0 + 1e-4 * t * directional) {
        w = wt;
        b = bt;
        break;
      }
      t *= 0.5;
    }
  }
  if (grad_norm > kGradTol)
    throw ConvergenceError("logistic regression: gradient norm " + std::to_string(grad_norm) +
                               " after Newton iteration cap",
                           grad_norm);
  return {w, b};
}

}  // namespace

OvrClassifier train_ovr_logreg(const DenseMatrix& features, const std::vector<index_t>& train_ids,
                               const LabelSet& labels, double l2) {
  if (!features.allFinite()) throw ValidationError("classifier features contain NaN or Inf");
  if (l2 < 0.0) throw ValidationError("l2 strength must be >= 0");
  labels.validate();
  const auto n = static_cast<Eigen::Index>(train_ids.size());
  const Eigen::Index d = features.cols();
  if (n == 0) throw ValidationError("empty training set");

  Eigen::MatrixXd x(n, d);
  for (Eigen::Index r = 0; r < n; ++r) x.row(r) = features.row(train_ids[r]);

  OvrClassifier clf;
  clf.weights = DenseMatrix::Zero(labels.n_labels, d);
  clf.bias = DenseVector::Zero(labels.n_labels);

  // Extreme but finite constant for one-class fallbacks; sigmoid saturates.
  constexpr double kExtremeLogit = 37.0;

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int32_t label = 0; label < labels.n_labels; ++label) {
    try {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto& ls = labels.labels[train_ids[r]];
        if (std::binary_search(ls.begin(), ls.end(), label)) y[r] = 1.0;
      }
      const double positives = y.sum();
      if (positives == 0.0) {
        clf.bias[label] = -kExtremeLogit;
        continue;
      }
      if (positives == static_cast<double>(n)) {
        clf.bias[label] = kExtremeLogit;
        continue;
      }
      const auto [w, b] = fit_binary_logreg(x, y, l2);
      clf.weights.row(label) = w.transpose();
      clf.bias[label] = b;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return clf;
}

std::vector<std::vector<std::int32_t>> predict_topk(const OvrClassifier& classifier,
                                                    const DenseMatrix& features,
                                                    const std::vector<index_t>& node_ids,
                                                    const std::vector<std::int32_t>& k_per_node) {
  const auto n_labels = static_cast<std::int32_t>(classifier.weights.rows());
  if (node_ids.size() != k_per_node.size())
    throw ValidationError("predict_topk: ids and label counts disagree");

  for (const auto k : k_per_node)
    if (k < 1 || k > n_labels)
      throw ValidationError("predict_topk: label count " + std::to_string(k) + " outside [1, " +
                            std::to_string(n_labels) + "]");

  std::vector<std::vector<std::int32_t>> out(node_ids.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    const std::int32_t k = k_per_node[i];
    const DenseVector scores =
        classifier.weights * features.row(node_ids[i]).transpose() + classifier.bias;
    std::vector<std::int32_t> order(static_cast<std::size_t>(n_labels));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](std::int32_t a, std::int32_t b) {
                        if (scores[a] != scores[b]) return scores[a] > scores[b];
                        return a < b;  // tie rule: smaller label id wins
                      });
    out[i].assign(order.begin(), order.begin() + k);
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

std::pair<double, double> micro_macro_f1(const std::vector<std::vector<std::int32_t>>& predicted,
                                         const std::vector<std::vector<std::int32_t>>& truth) {
  if (predicted.size() != truth.size())
    throw ValidationError("micro_macro_f1: node sets are not aligned");
  std::int32_t max_label = -1;
  for (const auto& v : predicted)
    for (const auto l : v) max_label = std::max(max_label, l);
  for (const auto& v : truth)
    for (const auto l : v) max_label = std::max(max_label, l);

  std::vector<std::int64_t> tp(max_label + 1, 0), fp(max_label + 1, 0), fn(max_label + 1, 0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto& p = predicted[i];
    const auto& t = truth[i];
    for (const auto l : p)
      if (std::binary_search(t.begin(), t.end(), l)) ++tp[l]; else ++fp[l];
    for (const auto l : t)
      if (!std::binary_search(p.begin(), p.end(), l)) ++fn[l];
  }

  std::int64_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
  double macro_acc = 0.0;
  std::int64_t macro_labels = 0;
  for (std::int32_t l = 0; l <= max_label; ++l) {
    tp_sum += tp[l];
    fp_sum += fp[l];
    fn_sum += fn[l];
    const std::int64_t denom = 2 * tp[l] + fp[l] + fn[l];
    if (denom > 0) {  // labels absent from both sides are excluded
      macro_acc += 2.0 * static_cast<double>(tp[l]) / static_cast<double>(denom);
      ++macro_labels;
    }
  }
  const std::int64_t micro_denom = 2 * tp_sum + fp_sum + fn_sum;
  const double micro =
      micro_denom > 0 ? 2.0 * static_cast<double>(tp_sum) / static_cast<double>(micro_denom) : 0.0;
  const double macro = macro_labels > 0 ? macro_acc / static_cast<double>(macro_labels) : 0.0;
  return {micro, macro};
}

EvalReport run_evaluation(const DenseMatrix& features, const LabelSet& labels,
                          const std::vector<double>& ratios, int trials, std::uint64_t seed,
                          double l2) {
  if (trials < 1) throw ValidationError("evaluation needs at least one trial");
  if (features.rows() != labels.n_nodes)
    throw ValidationError("evaluation: feature rows do not match label set");

  EvalReport report;
  for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
    std::vector<double> micros, macros;
    for (int trial = 0; trial < trials; ++trial) {
      const auto trial_seed = mix_seed(mix_seed(seed, ri), static_cast<std::uint64_t>(trial));
      const Split sp = split(labels, ratios[ri], trial_seed);
      const OvrClassifier clf = train_ovr_logreg(features, sp.train, labels, l2);

      std::vector<std::int32_t> k_per_node(sp.test.size());
      std::vector<std::vector<std::int32_t>> truth(sp.test.size());
      for (std::size_t i = 0; i < sp.test.size(); ++i) {
        truth[i] = labels.labels[sp.test[i]];
        k_per_node[i] = static_cast<std::int32_t>(truth[i].size());
      }
      const auto predicted = predict_topk(clf, features, sp.test, k_per_node);
      const auto [micro, macro] = micro_macro_f1(predicted, truth);
      report.rows.push_back({ratios[ri], trial, micro, macro});
      micros.push_back(micro);
      macros.push_back(macro);
    }

    auto mean_std = [](const std::vector<double>& v) {
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      double ss = 0.0;
      for (const double x : v) ss += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
      return std::pair{mean, sd};
    };
    const auto [mm, ms] = mean_std(micros);
    const auto [am, as] = mean_std(macros);
    report.summaries.push_back({ratios[ri], trials, mm, ms, am, as});
  }
  return report;
}

}  // namespace progle
