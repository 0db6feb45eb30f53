#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "jetlab/matrix_core.hpp"

namespace jetlab {

/// n points of C^m in preferred coordinates centred at the base point.
class PointConfiguration {
public:
  PointConfiguration() = default;

  /// `points` is m x n, one point per column.
  explicit PointConfiguration(ComplexMatrix points) : points_(std::move(points)) {
    if (points_.cols() < 1) throw Error("PointConfiguration: need at least one point");
    if (points_.rows() < 1) throw Error("PointConfiguration: complex dimension m must be positive");
    if (!points_.allFinite()) throw Error("PointConfiguration: non-finite coordinate");
  }

  /// Convenience for m = 1.
  static PointConfiguration on_line(const std::vector<cplx>& zs) {
    ComplexMatrix p(1, static_cast<Eigen::Index>(zs.size()));
    for (std::size_t i = 0; i < zs.size(); ++i) p(0, static_cast<Eigen::Index>(i)) = zs[i];
    return PointConfiguration(std::move(p));
  }

  int m() const noexcept { return static_cast<int>(points_.rows()); }
  int n() const noexcept { return static_cast<int>(points_.cols()); }
  const ComplexMatrix& points() const noexcept { return points_; }
  ComplexVector point(int p) const { return points_.col(p); }
  cplx coordinate(int p, int q) const { return points_(q, p); }

  /// z / sqrt(N).
  PointConfiguration scaled(double n_power) const {
    return PointConfiguration(points_ / std::sqrt(n_power));
  }

  PointConfiguration shifted(const ComplexVector& by) const {
    return PointConfiguration(points_.colwise() + by);
  }

private:
  ComplexMatrix points_;
};

/**
 * @brief Slot ordering for the n(2m+1) complex jet variables.
 *
 * Values x^p come first (p ascending). Then the derivative slots xi^p_q,
 * point-major, with q = 1..m holomorphic and q = m+1..2m anti-holomorphic.
 * Indices here are 0-based: point p in [0, n), derivative q in [0, 2m).
 */
class JetLayout {
public:
  JetLayout(int m, int n) : m_(m), n_(n) {
    if (m < 1 || n < 1) throw Error("JetLayout: m and n must be positive");
  }
  explicit JetLayout(const PointConfiguration& z) : JetLayout(z.m(), z.n()) {}

  int m() const noexcept { return m_; }
  int n() const noexcept { return n_; }
  int size() const noexcept { return n_ * (2 * m_ + 1); }

  int value_slot(int p) const { return p; }
  int derivative_slot(int p, int q) const { return n_ + p * 2 * m_ + q; }
  bool is_antiholomorphic_slot(int slot) const {
    return slot >= n_ && ((slot - n_) % (2 * m_)) >= m_;
  }

  struct Slot {
    bool is_value;
    int point;       ///< 0-based
    int derivative;  ///< 0-based q, -1 for values
  };

  Slot slot(int index) const {
    if (index < n_) return {true, index, -1};
    const int rest = index - n_;
    return {false, rest / (2 * m_), rest % (2 * m_)};
  }

  /// Human-readable name: x1, xi1_1, xi1_2, ... (1-based as in the usual notation).
  std::string slot_name(int index) const {
    const Slot s = slot(index);
    if (s.is_value) return "x" + std::to_string(s.point + 1);
    return "xi" + std::to_string(s.point + 1) + "_" + std::to_string(s.derivative + 1);
  }

private:
  int m_;
  int n_;
};

}  // namespace jetlab
