#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace jetlab {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by psd_project when an eigenvalue lies below the tolerance band.
class NotPsdError : public Error {
public:
  NotPsdError(double eigenvalue, double threshold)
      : Error(format(eigenvalue, threshold)), eigenvalue_(eigenvalue) {}

  double eigenvalue() const noexcept { return eigenvalue_; }

private:
  static std::string format(double eigenvalue, double threshold) {
    std::ostringstream os;
    os.precision(17);
    os << "matrix is not PSD: eigenvalue " << eigenvalue << " below -" << threshold;
    return os.str();
  }

  double eigenvalue_;
};

inline constexpr double kDefaultPsdTolerance = 1e-10;

/**
 * @brief Complex square matrix with exact Hermitian symmetry.
 *
 * The constructor symmetrizes its argument as (M + M*)/2 and zeroes the
 * imaginary part of the diagonal, so entry(i,j) == conj(entry(j,i)) holds
 * bit-for-bit. Monte Carlo estimates are only Hermitian up to noise, so
 * they are accepted rather than rejected.
 */
class HermitianMatrix {
public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
      throw Error("HermitianMatrix: expected a square matrix, got " + std::to_string(m.rows()) +
                  "x" + std::to_string(m.cols()));
    }
    const Eigen::Index k = m.rows();
    data_.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      data_(i, i) = cplx(m(i, i).real(), 0.0);
      for (Eigen::Index j = i + 1; j < k; ++j) {
        const cplx upper = 0.5 * (m(i, j) + std::conj(m(j, i)));
        data_(i, j) = upper;
        data_(j, i) = std::conj(upper);
      }
    }
  }

  static HermitianMatrix identity(Eigen::Index k) {
    return HermitianMatrix(ComplexMatrix::Identity(k, k));
  }
  static HermitianMatrix zero(Eigen::Index k) {
    return HermitianMatrix(ComplexMatrix::Zero(k, k));
  }
  static HermitianMatrix diagonal(const RealVector& d) {
    return HermitianMatrix(d.cast<cplx>().asDiagonal().toDenseMatrix());
  }

  Eigen::Index dimension() const noexcept { return data_.rows(); }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }
  const ComplexMatrix& matrix() const noexcept { return data_; }

  HermitianMatrix scaled(double factor) const {
    HermitianMatrix out;
    out.data_ = data_ * factor;
    return out;
  }

private:
  ComplexMatrix data_;
};

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
struct EigenDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  ComplexMatrix reconstruct() const {
    return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
  }
};

inline EigenDecomposition hermitian_eig(const HermitianMatrix& m) {
  const Eigen::Index k = m.dimension();
  if (!m.matrix().allFinite()) {
    throw Error("hermitian_eig: non-finite entries in " + std::to_string(k) + "x" +
                std::to_string(k) + " matrix");
  }
  EigenDecomposition out;
  if (k == 0) return out;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eig: eigensolver did not converge for dimension " + std::to_string(k));
  }
  // Eigen returns ascending order.
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << what << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
       << b.cols();
    throw Error(os.str());
  }
}

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "frobenius_distance");
  return (a - b).norm();
}

inline double frobenius_distance(const HermitianMatrix& a, const HermitianMatrix& b) {
  return frobenius_distance(a.matrix(), b.matrix());
}

/// Operator 2-norm of a - b. For Hermitian arguments this is max |eigenvalue|.
inline double spectral_distance(const HermitianMatrix& a, const HermitianMatrix& b) {
  require_same_shape(a.matrix(), b.matrix(), "spectral_distance");
  if (a.dimension() == 0) return 0.0;
  const auto eig = hermitian_eig(HermitianMatrix(a.matrix() - b.matrix()));
  return std::max(std::abs(eig.eigenvalues(0)), std::abs(eig.eigenvalues(eig.eigenvalues.size() - 1)));
}

inline double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

/**
 * @brief Clamp slightly negative eigenvalues to zero.
 *
 * Eigenvalues in [-tol*scale, 0) become 0, with scale = 1 + max(lambda_max, 0).
 * Anything lower throws NotPsdError. Inputs with no negative eigenvalue are
 * returned untouched.
 */
inline HermitianMatrix psd_project(const HermitianMatrix& m, double tol = kDefaultPsdTolerance) {
  if (m.dimension() == 0) return m;
  auto eig = hermitian_eig(m);
  const double lmax = eig.eigenvalues(0);
  const double lmin = eig.eigenvalues(eig.eigenvalues.size() - 1);
  const double threshold = tol * (1.0 + std::max(lmax, 0.0));
  if (lmin < -threshold) throw NotPsdError(lmin, threshold);
  if (lmin >= 0.0) return m;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues(i) < 0.0) eig.eigenvalues(i) = 0.0;
  }
  return HermitianMatrix(eig.reconstruct());
}

}  // namespace jetlab
