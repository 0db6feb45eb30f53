#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "jetlab/matrix_core.hpp"
#include "jetlab/random.hpp"

namespace jetlab {

inline constexpr double kDefaultRankCutoff = 1e-12;

/// Real 2k x 2k covariance of (Re z, Im z) for a complex covariance Delta:
/// 1/2 [[Re D, -Im D], [Im D, Re D]].
struct RealEmbedding {
  RealMatrix covariance;

  static RealEmbedding from(const HermitianMatrix& delta) {
    const Eigen::Index k = delta.dimension();
    RealEmbedding out;
    out.covariance.resize(2 * k, 2 * k);
    const RealMatrix re = delta.matrix().real();
    const RealMatrix im = delta.matrix().imag();
    out.covariance.topLeftCorner(k, k) = 0.5 * re;
    out.covariance.topRightCorner(k, k) = -0.5 * im;
    out.covariance.bottomLeftCorner(k, k) = 0.5 * im;
    out.covariance.bottomRightCorner(k, k) = 0.5 * re;
    return out;
  }
};

/**
 * @brief Complex Gaussian measure with positive semi-definite covariance.
 *
 * The measure lives on the span of the eigenvectors whose eigenvalues exceed
 * rank_cutoff * lambda_max. With Delta = 0 it is the point mass at the origin.
 * Moments: <z_j> = 0, <z_j z_k> = 0, <z_j conj(z_k)> = Delta_jk.
 */
class GeneralizedGaussian {
public:
  explicit GeneralizedGaussian(const HermitianMatrix& delta, double rank_cutoff = kDefaultRankCutoff,
                               double psd_tol = kDefaultPsdTolerance)
      : covariance_(psd_project(delta, psd_tol)), rank_cutoff_(rank_cutoff) {
    const auto eig = hermitian_eig(covariance_);
    const Eigen::Index k = covariance_.dimension();
    const double lmax = k > 0 ? eig.eigenvalues(0) : 0.0;
    Eigen::Index r = 0;
    if (lmax > 0.0) {
      while (r < k && eig.eigenvalues(r) > rank_cutoff_ * lmax) ++r;
    }
    support_basis_ = eig.eigenvectors.leftCols(r);
    support_eigenvalues_ = eig.eigenvalues.head(r);
    sqrt_factor_ = support_basis_ * support_eigenvalues_.cwiseSqrt().cast<cplx>().asDiagonal();
    embedding_ = RealEmbedding::from(covariance_);
  }

  Eigen::Index dimension() const noexcept { return covariance_.dimension(); }
  Eigen::Index rank() const noexcept { return support_eigenvalues_.size(); }
  double rank_cutoff() const noexcept { return rank_cutoff_; }
  const HermitianMatrix& covariance() const noexcept { return covariance_; }
  const ComplexMatrix& support_basis() const noexcept { return support_basis_; }
  const RealVector& support_eigenvalues() const noexcept { return support_eigenvalues_; }

  /// k x r factor F with F F* equal to the covariance restricted to the support.
  const ComplexMatrix& sqrt_factor() const noexcept { return sqrt_factor_; }

  /// Component of z orthogonal to the support.
  ComplexVector off_support(const ComplexVector& z) const {
    return z - support_basis_ * (support_basis_.adjoint() * z);
  }

  /// Real embedding of the covariance used by the characteristic function.
  const RealEmbedding& real_embedding() const noexcept { return embedding_; }

private:
  HermitianMatrix covariance_;
  double rank_cutoff_;
  ComplexMatrix support_basis_;
  RealVector support_eigenvalues_;
  ComplexMatrix sqrt_factor_;
  RealEmbedding embedding_;
};

inline GeneralizedGaussian gaussian_new(const HermitianMatrix& delta) {
  return GeneralizedGaussian(delta);
}

/// Draw `count` samples into the columns of a k x count matrix, advancing `stream`.
inline ComplexMatrix gaussian_sample(const GeneralizedGaussian& g, RandomStream& stream,
                                     std::size_t count) {
  if (count == 0) throw Error("gaussian_sample: count must be at least 1");
  const Eigen::Index r = g.rank();
  ComplexMatrix zeta(r, static_cast<Eigen::Index>(count));
  for (Eigen::Index s = 0; s < zeta.cols(); ++s) {
    for (Eigen::Index i = 0; i < r; ++i) zeta(i, s) = stream.complex_normal();
  }
  if (r == 0) return ComplexMatrix::Zero(g.dimension(), static_cast<Eigen::Index>(count));
  return g.sqrt_factor() * zeta;
}

/// Chunked, reproducible version of gaussian_sample.
inline ComplexMatrix gaussian_sample(const GeneralizedGaussian& g, const StreamSpec& spec,
                                     std::size_t count) {
  if (count == 0) throw Error("gaussian_sample: count must be at least 1");
  auto chunks = map_chunks(spec, count, [&](std::size_t, std::size_t b, std::size_t e,
                                            RandomStream& stream) {
    return gaussian_sample(g, stream, e - b);
  });
  ComplexMatrix out(g.dimension(), static_cast<Eigen::Index>(count));
  Eigen::Index col = 0;
  for (const auto& c : chunks) {
    out.middleCols(col, c.cols()) = c;
    col += c.cols();
  }
  return out;
}

/**
 * Density with respect to Lebesgue measure on the support (real dimension 2r):
 * exp(-<D^-1 z, z>) / (pi^r det+ D). Throws if z has an off-support component
 * of magnitude >= 1e-8.
 */
inline double gaussian_density(const GeneralizedGaussian& g, const ComplexVector& z) {
  if (z.size() != g.dimension()) {
    throw Error("gaussian_density: vector length " + std::to_string(z.size()) +
                " does not match dimension " + std::to_string(g.dimension()));
  }
  const double residual = g.off_support(z).norm();
  if (!(residual < 1e-8)) {
    std::ostringstream os;
    os.precision(17);
    os << "gaussian_density: point is off the support, residual " << residual;
    throw Error(os.str());
  }
  const ComplexVector coords = g.support_basis().adjoint() * z;
  double quad = 0.0;
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < g.rank(); ++i) {
    quad += std::norm(coords(i)) / g.support_eigenvalues()(i);
    log_det += std::log(g.support_eigenvalues()(i));
  }
  const double r = static_cast<double>(g.rank());
  return std::exp(-quad - log_det - r * std::log(std::numbers::pi));
}

/// exp(-1/2 t^T (1/2 Delta^c) t) for t = (t_re, t_im) in R^{2k}.
inline cplx characteristic_function(const GeneralizedGaussian& g, const RealVector& t) {
  if (t.size() != 2 * g.dimension()) {
    throw Error("characteristic_function: expected a real vector of length " +
                std::to_string(2 * g.dimension()));
  }
  const RealMatrix& cov = g.real_embedding().covariance;
  return {std::exp(-0.5 * t.dot(cov * t)), 0.0};
}

/// Empirical E[exp(i t . (Re z, Im z))] over sample columns.
inline cplx empirical_characteristic_function(const ComplexMatrix& samples, const RealVector& t) {
  const Eigen::Index k = samples.rows();
  cplx acc = 0.0;
  for (Eigen::Index s = 0; s < samples.cols(); ++s) {
    double phase = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      phase += t(i) * samples(i, s).real() + t(k + i) * samples(i, s).imag();
    }
    acc += std::polar(1.0, phase);
  }
  return acc / static_cast<double>(samples.cols());
}

/// Law of T z for z ~ g: the generalized Gaussian with covariance T D T*.
inline GeneralizedGaussian gaussian_pushforward(const GeneralizedGaussian& g, const ComplexMatrix& t) {
  if (t.cols() != g.dimension()) {
    throw Error("gaussian_pushforward: map has " + std::to_string(t.cols()) +
                " columns, measure has dimension " + std::to_string(g.dimension()));
  }
  return GeneralizedGaussian(HermitianMatrix(t * g.covariance().matrix() * t.adjoint()),
                             g.rank_cutoff());
}

/// <z z*> over sample columns, symmetrized.
inline HermitianMatrix empirical_covariance(const ComplexMatrix& samples) {
  return HermitianMatrix(samples * samples.adjoint() / static_cast<double>(samples.cols()));
}

/// <z z^T> over sample columns (pseudo-covariance, zero for circular laws).
inline ComplexMatrix empirical_pseudo_covariance(const ComplexMatrix& samples) {
  return samples * samples.transpose() / static_cast<double>(samples.cols());
}

}  // namespace jetlab
