#pragma once

// Reference implementations used only by tests. Each one takes a different
// route from the library code it checks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

struct SvmSolution {
  Eigen::VectorXd w;
  double b = 0.0;
  double primal = 0.0;
  double dual = 0.0;  // maximisation form; dual <= optimum <= primal
};

// Box-constrained dual QP solved by accelerated projected gradient (FISTA)
// on the full Q matrix. The duality gap certifies how close it got.
inline SvmSolution svm_dual_qp(const Eigen::MatrixXd& X, const std::vector<int>& y, double cost,
                               double weight_pos, double weight_neg, int iterations = 200000) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd Xa(n, X.cols() + 1);
  Xa << X, Eigen::VectorXd::Ones(n);
  Eigen::VectorXd ys(n), upper(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ys(i) = y[static_cast<std::size_t>(i)];
    upper(i) = cost * (y[static_cast<std::size_t>(i)] > 0 ? weight_pos : weight_neg);
  }
  const Eigen::MatrixXd Z = Xa.array().colwise() * ys.array();
  const Eigen::MatrixXd Q = Z * Z.transpose();
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q).eigenvalues().maxCoeff();
  const double step = 1.0 / std::max(lipschitz, 1e-12);

  auto project = [&](Eigen::VectorXd v) {
    return v.cwiseMax(Eigen::VectorXd::Zero(n)).cwiseMin(upper).eval();
  };
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n), z = a;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd grad = Q * z - Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd next = project(z - step * grad);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / t_next) * (next - a);
    // Gradient-based adaptive restart keeps the iteration monotone.
    if ((z - next).dot(next - a) > 0.0) {
      z = next;
      t = 1.0;
    } else {
      t = t_next;
    }
    a = next;
  }

  SvmSolution s;
  const Eigen::VectorXd wa = Z.transpose() * a;
  s.w = wa.head(X.cols());
  s.b = wa(X.cols());
  s.dual = a.sum() - 0.5 * a.dot(Q * a);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double margin = ys(i) * (X.row(i).dot(s.w) + s.b);
    loss += (upper(i) / cost) * std::max(0.0, 1.0 - margin);
  }
  s.primal = 0.5 * wa.squaredNorm() + cost * loss;
  return s;
}

inline double precision_at_k(const std::vector<std::uint8_t>& rel, std::size_t k) {
  k = std::min(k, rel.size());
  if (k == 0) return 0.0;
  double hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += rel[i];
  return hits / static_cast<double>(k);
}

// AP written from its textbook definition: average, over relevant ranks r,
// of precision@r computed from scratch.
inline double average_precision(const std::vector<std::uint8_t>& rel, std::size_t k) {
  k = std::min(k, rel.size());
  double total = 0.0;
  int relevant = 0;
  for (std::size_t r = 1; r <= k; ++r) {
    if (!rel[r - 1]) continue;
    ++relevant;
    total += precision_at_k(rel, r);
  }
  return relevant == 0 ? 0.0 : total / relevant;
}

// Sample Pearson correlation from means and centred sums.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Ray casting toward +x, counting crossings with a half-open rule.
inline bool ray_cast_inside(const std::vector<std::pair<double, double>>& ring, double x,
                            double y) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const auto [xi, yi] = ring[i];
    const auto [xj, yj] = ring[j];
    if ((yi > y) != (yj > y)) {
      const double cross = xj + (y - yj) * (xi - xj) / (yi - yj);
      if (x < cross) inside = !inside;
    }
  }
  return inside;
}

constexpr double kEarthRadiusKm = 6371.0088;

inline double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double rad = 3.14159265358979323846 / 180.0;
  const double dlat = (lat2 - lat1) * rad;
  const double dlon = (lon2 - lon1) * rad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// Standard normal CDF.
inline double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace oracle
