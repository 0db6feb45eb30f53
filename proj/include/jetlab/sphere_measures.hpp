#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "jetlab/gaussian_measures.hpp"
#include "jetlab/matrix_core.hpp"
#include "jetlab/random.hpp"

namespace jetlab {

/// Uniform (Haar) probability measure on the unit sphere S^{d-1} of R^d.
class SphereSampler {
public:
  explicit SphereSampler(std::size_t ambient_dimension) : d_(ambient_dimension) {
    if (d_ < 1) throw Error("SphereSampler: ambient dimension must be at least 1");
  }

  std::size_t dimension() const noexcept { return d_; }

  /// One point: a standard Gaussian vector divided by its norm.
  void draw(RandomStream& stream, double* out) const {
    double sq = 0.0;
    do {
      sq = 0.0;
      for (std::size_t i = 0; i < d_; ++i) {
        out[i] = stream.normal();
        sq += out[i] * out[i];
      }
    } while (sq == 0.0);
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t i = 0; i < d_; ++i) out[i] *= inv;
  }

private:
  std::size_t d_;
};

/// `count` uniform points on S^{d-1}, one per column.
inline RealMatrix sphere_sample(const SphereSampler& s, const StreamSpec& spec, std::size_t count) {
  const auto d = static_cast<Eigen::Index>(s.dimension());
  auto chunks = map_chunks(spec, count, [&](std::size_t, std::size_t b, std::size_t e,
                                            RandomStream& stream) {
    RealMatrix block(d, static_cast<Eigen::Index>(e - b));
    for (Eigen::Index c = 0; c < block.cols(); ++c) s.draw(stream, block.col(c).data());
    return block;
  });
  RealMatrix out(d, static_cast<Eigen::Index>(count));
  Eigen::Index col = 0;
  for (const auto& c : chunks) {
    out.middleCols(col, c.cols()) = c;
    col += c.cols();
  }
  return out;
}

/// Uniform point on the unit sphere of C^d (real sphere S^{2d-1}).
inline void complex_sphere_draw(RandomStream& stream, Eigen::Ref<ComplexVector> out) {
  double sq = 0.0;
  do {
    sq = 0.0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      out(i) = stream.complex_normal();
      sq += std::norm(out(i));
    }
  } while (sq == 0.0);
  out /= std::sqrt(sq);
}

/// log of the area of the unit sphere S^{n-1} in R^n: log(2 pi^{n/2} / Gamma(n/2)).
inline double log_sphere_area(double n) {
  return std::log(2.0) + 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n);
}

/**
 * @brief Density of sqrt(d) times the orthogonal projection of the uniform
 * measure on S^{d-1} onto a k-dimensional subspace.
 *
 *   psi_d(x) = (sigma_{d-k} / sigma_d) d^{-k/2} (1 - |x|^2/d)^{(d-k-2)/2}  for |x| < sqrt(d)
 *
 * and 0 otherwise. The d^{-k/2} factor is the Jacobian of the sqrt(d) dilation;
 * it makes psi_d a probability density. Requires d >= k + 2.
 */
inline double projection_density(std::size_t d, std::size_t k, const RealVector& x) {
  if (d < k + 2) {
    throw Error("projection_density: need d >= k + 2, got d=" + std::to_string(d) +
                " k=" + std::to_string(k));
  }
  if (static_cast<std::size_t>(x.size()) != k) {
    throw Error("projection_density: point has length " + std::to_string(x.size()) +
                ", expected " + std::to_string(k));
  }
  const double dd = static_cast<double>(d);
  const double kk = static_cast<double>(k);
  const double u = 1.0 - x.squaredNorm() / dd;
  if (u <= 0.0) return 0.0;
  const double log_prefactor = log_sphere_area(dd - kk) - log_sphere_area(dd) - 0.5 * kk * std::log(dd);
  const double exponent = 0.5 * (dd - kk - 2.0);
  if (exponent == 0.0) return std::exp(log_prefactor);
  return std::exp(log_prefactor + exponent * std::log(u));
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Kolmogorov-Smirnov distance of a sample against the standard normal law.
inline double ks_distance_normal(std::vector<double> sample) {
  if (sample.empty()) throw Error("ks_distance_normal: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    worst = std::max({worst, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return worst;
}

struct PoincareBorelReport {
  std::size_t d = 0;
  std::size_t k = 0;
  std::size_t samples = 0;
  std::vector<double> ks;  ///< one KS distance per scaled coordinate
  RealMatrix covariance;   ///< empirical k x k covariance of sqrt(d) (x_1..x_k)
};

/// Push S uniform points on S^{d-1} through x -> sqrt(d)(x_1,...,x_k) and compare with N(0, I_k).
inline PoincareBorelReport poincare_borel_check(std::size_t d, std::size_t k, const StreamSpec& spec,
                                                std::size_t samples) {
  if (d < k + 2) {
    throw Error("poincare_borel_check: need d >= k + 2, got d=" + std::to_string(d) +
                " k=" + std::to_string(k));
  }
  if (samples == 0) throw Error("poincare_borel_check: need at least one sample");
  const SphereSampler sampler(d);
  const double scale = std::sqrt(static_cast<double>(d));
  auto chunks = map_chunks(spec, samples, [&](std::size_t, std::size_t b, std::size_t e,
                                              RandomStream& stream) {
    std::vector<double> buf(d);
    RealMatrix block(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(e - b));
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      sampler.draw(stream, buf.data());
      for (std::size_t i = 0; i < k; ++i) block(static_cast<Eigen::Index>(i), c) = scale * buf[i];
    }
    return block;
  });

  RealMatrix projected(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(samples));
  Eigen::Index col = 0;
  for (const auto& c : chunks) {
    projected.middleCols(col, c.cols()) = c;
    col += c.cols();
  }

  PoincareBorelReport report;
  report.d = d;
  report.k = k;
  report.samples = samples;
  report.covariance = projected * projected.transpose() / static_cast<double>(samples);
  for (Eigen::Index i = 0; i < projected.rows(); ++i) {
    std::vector<double> marginal(samples);
    for (std::size_t s = 0; s < samples; ++s) marginal[s] = projected(i, static_cast<Eigen::Index>(s));
    report.ks.push_back(ks_distance_normal(std::move(marginal)));
  }
  return report;
}

/**
 * Empirical covariance of T c for c uniform on the unit sphere of C^{d}, d = T.cols().
 * Its expectation is (1/d) T T*.
 */
inline HermitianMatrix spherical_pushforward_covariance(const ComplexMatrix& t, const StreamSpec& spec,
                                                        std::size_t samples) {
  if (samples == 0) throw Error("spherical_pushforward_covariance: need at least one sample");
  const Eigen::Index k = t.rows();
  const Eigen::Index d = t.cols();
  auto partial = map_chunks(spec, samples, [&](std::size_t, std::size_t b, std::size_t e,
                                               RandomStream& stream) {
    ComplexMatrix coeffs(d, static_cast<Eigen::Index>(e - b));
    for (Eigen::Index c = 0; c < coeffs.cols(); ++c) complex_sphere_draw(stream, coeffs.col(c));
    const ComplexMatrix mapped = t * coeffs;
    return ComplexMatrix(mapped * mapped.adjoint());
  });
  ComplexMatrix acc = ComplexMatrix::Zero(k, k);
  for (const auto& p : partial) acc += p;
  return HermitianMatrix(acc / static_cast<double>(samples));
}

}  // namespace jetlab
