#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "jetlab/matrix_core.hpp"

namespace jetlab {

/// One-dimensional rule: sum_i weights[i] f(nodes[i]).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 times the squared first components of its eigenvectors.
inline GaussRule golub_welsch(const RealVector& diag, const RealVector& offdiag, double mu0) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error("golub_welsch: tridiagonal eigensolver failed for order " +
                std::to_string(diag.size()));
  }
  GaussRule rule;
  const Eigen::Index n = diag.size();
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace detail

/// Gauss-Legendre rule on [a, b], exact for polynomials of degree 2n-1.
inline GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0) {
  if (n < 1) throw Error("gauss_legendre: order must be positive");
  RealVector diag = RealVector::Zero(n);
  RealVector off(std::max(n - 1, 0));
  for (int i = 1; i < n; ++i) off(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
  GaussRule rule = detail::golub_welsch(diag, off, 2.0);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

/// Gauss-Hermite rule for the weight exp(-x^2) on R, exact for degree 2n-1.
inline GaussRule gauss_hermite(int n) {
  if (n < 1) throw Error("gauss_hermite: order must be positive");
  RealVector diag = RealVector::Zero(n);
  RealVector off(std::max(n - 1, 0));
  for (int i = 1; i < n; ++i) off(i - 1) = std::sqrt(0.5 * i);
  return detail::golub_welsch(diag, off, std::sqrt(std::numbers::pi));
}

/**
 * @brief Cubature on C^m against an explicit volume density.
 *
 * integral f dV  ~=  sum_i weights[i] f(nodes.col(i)). Weights already absorb
 * the volume form, so integrands are lifted section products such as
 * s_1 conj(s_2) with the fibre metric included.
 */
struct QuadratureRule {
  int m = 0;
  ComplexMatrix nodes;  ///< m x count
  RealVector weights;   ///< count
};

/**
 * Tensor Gauss-Hermite rule for Lebesgue measure on C^m, tuned to integrands
 * of the form p(z, conj z) exp(-N |z|^2). With `order` points per real axis it
 * is exact when p has degree <= 2*order-1 in each real coordinate.
 */
inline QuadratureRule gauss_hermite_plane(int m, double n_power, int order) {
  if (m < 1) throw Error("gauss_hermite_plane: m must be positive");
  const GaussRule gh = gauss_hermite(order);
  const double s = 1.0 / std::sqrt(n_power);
  const int axes = 2 * m;
  long long count = 1;
  for (int a = 0; a < axes; ++a) count *= order;
  QuadratureRule rule;
  rule.m = m;
  rule.nodes.resize(m, count);
  rule.weights.resize(count);
  std::vector<int> idx(axes, 0);
  for (long long c = 0; c < count; ++c) {
    double w = 1.0;
    double gauss_sq = 0.0;
    for (int j = 0; j < m; ++j) {
      const double x = gh.nodes[idx[2 * j]];
      const double y = gh.nodes[idx[2 * j + 1]];
      rule.nodes(j, c) = cplx(s * x, s * y);
      w *= gh.weights[idx[2 * j]] * gh.weights[idx[2 * j + 1]] * s * s;
      gauss_sq += x * x + y * y;
    }
    // Undo the Hermite weight so the rule integrates against Lebesgue measure.
    rule.weights(c) = w * std::exp(gauss_sq);
    for (int a = 0; a < axes; ++a) {
      if (++idx[a] < order) break;
      idx[a] = 0;
    }
  }
  return rule;
}

/**
 * Polar rule on C for the Fubini-Study area form dA / (1+|z|^2)^2.
 *
 * With t = r^2 / (1 + r^2) the form becomes (1/2) dt dtheta on [0,1) x [0, 2pi).
 * Uses Gauss-Legendre in t and the trapezoid rule in theta; exact for
 * z^j conj(z)^k (1+|z|^2)^{-n} whenever j + k <= 2n, radial_order >= n/2 + 1,
 * and angular_order > |j - k|.
 */
inline QuadratureRule fubini_study_polar(int radial_order, int angular_order) {
  if (radial_order < 1 || angular_order < 1) throw Error("fubini_study_polar: orders must be positive");
  const GaussRule gl = gauss_legendre(radial_order, 0.0, 1.0);
  QuadratureRule rule;
  rule.m = 1;
  const Eigen::Index count = static_cast<Eigen::Index>(radial_order) * angular_order;
  rule.nodes.resize(1, count);
  rule.weights.resize(count);
  const double dtheta = 2.0 * std::numbers::pi / angular_order;
  Eigen::Index c = 0;
  for (int i = 0; i < radial_order; ++i) {
    const double t = gl.nodes[i];
    const double r = std::sqrt(t / (1.0 - t));
    for (int a = 0; a < angular_order; ++a, ++c) {
      rule.nodes(0, c) = std::polar(r, a * dtheta);
      rule.weights(c) = 0.5 * gl.weights[i] * dtheta;
    }
  }
  return rule;
}

}  // namespace jetlab
