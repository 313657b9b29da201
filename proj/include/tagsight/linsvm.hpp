#pragma once

// L2-regularised, L1-loss (hinge) linear SVM trained by dual coordinate
// descent. The bias is an augmented constant feature, so it is regularised
// together with w:
//
//   P(w, b) = 1/2 (|w|^2 + b^2) + C * sum_i weight(y_i) * max(0, 1 - y_i (w.x_i + b))
//
// and the solver minimises the dual  D(a) = 1/2 a'Qa - sum_i a_i,
// 0 <= a_i <= C * weight(y_i),  Q_ij = y_i y_j (x_i.x_j + 1).

#include "tagsight/corpus.hpp"
#include "tagsight/error.hpp"
#include "tagsight/metrics.hpp"
#include "tagsight/random.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tagsight::linsvm {

struct ClassWeights {
  double positive = 1.0;
  double negative = 1.0;
};

struct TrainConfig {
  double cost = 1.0;
  // Unset means balanced: n / (2 n_pos) and n / (2 n_neg).
  std::optional<ClassWeights> class_weights;
  double tol = 1e-3;  // largest projected-gradient violation at convergence
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 42;
};

template <typename Scalar = double>
struct LinearModel {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector w;
  Scalar b = 0;
  double cost = 1.0;
  double weight_positive = 1.0;
  double weight_negative = 1.0;
  std::uint64_t seed = 0;
  double tol = 1e-3;
  std::size_t epochs_run = 0;
  double final_objective = 0.0;
  // Dual objective (minimisation form) after every epoch. Not persisted.
  std::vector<double> dual_trace;

  Eigen::Index dim() const { return w.size(); }
  double weight(int label) const { return label > 0 ? weight_positive : weight_negative; }
};

namespace detail {

inline void check_labels(std::span<const int> y, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(y.size()) != rows) {
    throw ValidationError("got " + std::to_string(y.size()) + " labels for " +
                          std::to_string(rows) + " rows");
  }
  std::size_t pos = 0;
  for (int label : y) {
    if (label != 1 && label != -1) throw ValidationError("labels must be +1 or -1");
    pos += label == 1;
  }
  if (pos == 0 || pos == y.size()) {
    throw DegenerateLabels("training needs at least one example of each label");
  }
}

template <typename Derived, typename Scalar>
void check_dim(const Eigen::MatrixBase<Derived>& x, const LinearModel<Scalar>& model) {
  if (x.size() != model.dim()) {
    throw ValidationError("feature row has " + std::to_string(x.size()) +
                          " entries, model expects " + std::to_string(model.dim()));
  }
}

}  // namespace detail

inline ClassWeights balanced_weights(std::span<const int> y) {
  const auto n = static_cast<double>(y.size());
  const auto pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const double neg = n - pos;
  if (pos == 0 || neg == 0) throw DegenerateLabels("class weights need both labels");
  return {n / (2.0 * pos), n / (2.0 * neg)};
}

// w.x + b for a single feature row (row or column vector expression).
template <typename Derived, typename Scalar>
double decision_value(const LinearModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  detail::check_dim(x, model);
  Scalar dot = 0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    dot += model.w(j) * static_cast<Scalar>(x(j));
  }
  return static_cast<double>(dot + model.b);
}

// Zero resolves to +1.
template <typename Derived, typename Scalar>
int predict(const LinearModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  return decision_value(model, x) >= 0.0 ? 1 : -1;
}

// Decision values for every row of X.
template <typename Derived, typename Scalar>
Eigen::VectorXd decision_values(const LinearModel<Scalar>& model,
                                const Eigen::MatrixBase<Derived>& X) {
  if (X.cols() != model.dim()) {
    throw ValidationError("feature rows have " + std::to_string(X.cols()) +
                          " entries, model expects " + std::to_string(model.dim()));
  }
  Eigen::VectorXd out =
      (X.template cast<Scalar>() * model.w).array().template cast<double>() +
      static_cast<double>(model.b);
  return out;
}

// Primal objective of `model` on (X, y), using the model's cost and class weights.
template <typename Derived, typename Scalar>
double objective(const LinearModel<Scalar>& model, const Eigen::MatrixBase<Derived>& X,
                 std::span<const int> y) {
  if (X.cols() != model.dim()) {
    throw ValidationError("feature rows have " + std::to_string(X.cols()) +
                          " entries, model expects " + std::to_string(model.dim()));
  }
  if (static_cast<Eigen::Index>(y.size()) != X.rows()) {
    throw ValidationError("got " + std::to_string(y.size()) + " labels for " +
                          std::to_string(X.rows()) + " rows");
  }
  const Eigen::VectorXd scores = decision_values(model, X);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const int label = y[static_cast<std::size_t>(i)];
    loss += model.weight(label) * std::max(0.0, 1.0 - label * scores(i));
  }
  const double reg = 0.5 * (static_cast<double>(model.w.squaredNorm()) +
                            static_cast<double>(model.b) * static_cast<double>(model.b));
  return reg + model.cost * loss;
}

template <typename Scalar = double, typename Derived>
LinearModel<Scalar> train(const Eigen::MatrixBase<Derived>& X, std::span<const int> y,
                          const TrainConfig& config) {
  detail::check_labels(y, X.rows());
  if (!(config.cost > 0.0) || !std::isfinite(config.cost)) {
    throw ValidationError("cost must be positive");
  }
  if (!(config.tol > 0.0)) throw ValidationError("tol must be positive");
  if (config.max_epochs == 0) throw ValidationError("max_epochs must be at least 1");

  using Matrix = RowMatrix<Scalar>;
  using Vector = typename LinearModel<Scalar>::Vector;
  const Matrix data = X.template cast<Scalar>();
  if (!data.allFinite()) throw ValidationError("training features must be finite");

  const ClassWeights weights = config.class_weights.value_or(balanced_weights(y));
  if (!(weights.positive > 0.0) || !(weights.negative > 0.0)) {
    throw ValidationError("class weights must be positive");
  }

  LinearModel<Scalar> model;
  model.cost = config.cost;
  model.weight_positive = weights.positive;
  model.weight_negative = weights.negative;
  model.seed = config.seed;
  model.tol = config.tol;

  const Eigen::Index n = data.rows();
  Vector w = Vector::Zero(data.cols());
  Scalar b = 0;
  std::vector<Scalar> alpha(static_cast<std::size_t>(n), Scalar(0));
  std::vector<Scalar> upper(static_cast<std::size_t>(n));
  std::vector<Scalar> diag(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    upper[k] = static_cast<Scalar>(config.cost * model.weight(y[k]));
    diag[k] = data.row(i).squaredNorm() + Scalar(1);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(config.seed);
  Scalar alpha_sum = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(std::span<Eigen::Index>(order));
    Scalar max_violation = 0;
    for (Eigen::Index i : order) {
      const auto k = static_cast<std::size_t>(i);
      const Scalar yi = static_cast<Scalar>(y[k]);
      const Scalar grad = yi * (data.row(i).dot(w) + b) - Scalar(1);
      Scalar projected = grad;
      if (alpha[k] <= Scalar(0)) {
        projected = std::min(grad, Scalar(0));
      } else if (alpha[k] >= upper[k]) {
        projected = std::max(grad, Scalar(0));
      }
      max_violation = std::max(max_violation, std::abs(projected));
      if (projected == Scalar(0)) continue;

      const Scalar old = alpha[k];
      alpha[k] = std::clamp(old - grad / diag[k], Scalar(0), upper[k]);
      const Scalar step = (alpha[k] - old) * yi;
      if (step != Scalar(0)) {
        w.noalias() += step * data.row(i).transpose();
        b += step;
        alpha_sum += alpha[k] - old;
      }
    }
    model.epochs_run = epoch;
    model.dual_trace.push_back(static_cast<double>(Scalar(0.5) * (w.squaredNorm() + b * b) -
                                                   alpha_sum));
    if (max_violation < static_cast<Scalar>(config.tol)) break;
  }

  model.w = std::move(w);
  model.b = b;
  model.final_objective = objective(model, data, y);
  return model;
}

// Fold id per example: each label's examples are shuffled by `seed` and dealt
// round-robin, so every fold holds both labels. Throws InsufficientData when a
// label has fewer examples than folds.
inline std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t folds,
                                                 std::uint64_t seed) {
  if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < folds || neg.size() < folds) {
    throw InsufficientData("stratified " + std::to_string(folds) + "-fold split needs " +
                           std::to_string(folds) + " examples of each label");
  }
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(pos));
  rng.shuffle(std::span<std::size_t>(neg));
  std::vector<std::size_t> fold_of(y.size());
  for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = i % folds;
  for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = i % folds;
  return fold_of;
}

// Stratified k-fold selection of the cost parameter. Returns the grid value
// with the highest mean held-out balanced accuracy; ties go to the smaller cost.
template <typename Derived>
double cross_validate_cost(const Eigen::MatrixBase<Derived>& X, std::span<const int> y,
                           std::vector<double> grid, std::size_t folds, std::uint64_t seed,
                           const TrainConfig& base = {}) {
  detail::check_labels(y, X.rows());
  if (grid.empty()) throw ValidationError("cost grid is empty");
  if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  for (double c : grid) {
    if (!(c > 0.0)) throw ValidationError("cost grid values must be positive");
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::vector<std::size_t> fold_of = stratified_folds(y, folds, seed);

  const RowMatrix<double> data = X.template cast<double>();
  double best_cost = grid.front();
  double best_score = -1.0;
  for (double c : grid) {
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<Eigen::Index> train_rows, test_rows;
      std::vector<int> train_y, test_y;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (fold_of[i] == f) {
          test_rows.push_back(static_cast<Eigen::Index>(i));
          test_y.push_back(y[i]);
        } else {
          train_rows.push_back(static_cast<Eigen::Index>(i));
          train_y.push_back(y[i]);
        }
      }
      TrainConfig config = base;
      config.cost = c;
      config.seed = derive_seed(seed, static_cast<std::uint64_t>(f));
      const auto model = train<double>(data(train_rows, Eigen::all), train_y, config);
      const Eigen::VectorXd scores = decision_values(model, data(test_rows, Eigen::all));
      std::vector<int> predicted(test_y.size());
      for (std::size_t i = 0; i < predicted.size(); ++i) {
        predicted[i] = scores(static_cast<Eigen::Index>(i)) >= 0.0 ? 1 : -1;
      }
      total += balanced_accuracy(predicted, test_y);
    }
    const double mean = total / static_cast<double>(folds);
    if (mean > best_score) {
      best_score = mean;
      best_cost = c;
    }
  }
  return best_cost;
}

// Model file: "TSVM0001", u32 d, d + 1 little-endian float64 (w then b), then
// the config block C, weight+, weight-, u64 seed, tol, followed by a training
// summary trailer u32 epochs_run, float64 final_objective.
void save_model(const std::filesystem::path& path, const LinearModel<double>& model);
LinearModel<double> load_model(const std::filesystem::path& path);

}  // namespace tagsight::linsvm
