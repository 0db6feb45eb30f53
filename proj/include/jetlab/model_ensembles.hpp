#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jetlab/jet_layout.hpp"
#include "jetlab/matrix_core.hpp"
#include "jetlab/quadrature.hpp"

namespace jetlab {

/**
 * Writes the local jets of every basis section at z into `out` (d x (2m+1)):
 * column 0 is the lifted value at theta = 0, columns 1..m the holomorphic
 * horizontal derivatives d^h/dz_q, columns m+1..2m the anti-holomorphic ones
 * d^h/dzbar_q. Derivatives are not yet scaled by N^{-1/2}.
 */
using JetEvaluator = std::function<void(const ComplexVector& z, Eigen::Ref<ComplexMatrix> out)>;

/// A family of lifted sections that is not necessarily orthonormal.
struct RawFamily {
  std::string name;
  int m = 1;
  int n_power = 1;
  Eigen::Index size = 0;
  bool holomorphic = true;
  JetEvaluator evaluate;
};

/**
 * @brief Finite orthonormal family of sections {S_j} of L^N with jet evaluators.
 *
 * Immutable; copies share the evaluator.
 */
class ModelEnsemble {
public:
  ModelEnsemble(std::string name, int m, int n_power, Eigen::Index dimension, bool holomorphic,
                JetEvaluator evaluate)
      : name_(std::move(name)),
        m_(m),
        n_power_(n_power),
        dimension_(dimension),
        holomorphic_(holomorphic),
        evaluate_(std::make_shared<const JetEvaluator>(std::move(evaluate))) {
    if (m_ < 1) throw Error("ModelEnsemble: m must be positive");
    if (n_power_ < 1) throw Error("ModelEnsemble: N must be positive");
  }

  const std::string& name() const noexcept { return name_; }
  int m() const noexcept { return m_; }
  int n_power() const noexcept { return n_power_; }
  Eigen::Index dimension() const noexcept { return dimension_; }
  bool holomorphic() const noexcept { return holomorphic_; }

  /// d x (2m+1) local jets at z, derivatives unscaled.
  ComplexMatrix local_jets(const ComplexVector& z) const {
    if (z.size() != m_) {
      throw Error("ModelEnsemble::local_jets: point has " + std::to_string(z.size()) +
                  " coordinates, expected " + std::to_string(m_));
    }
    ComplexMatrix out = ComplexMatrix::Zero(dimension_, 2 * m_ + 1);
    (*evaluate_)(z, out);
    return out;
  }

  /// Lifted values S_j(z, 0).
  ComplexVector values(const ComplexVector& z) const { return local_jets(z).col(0); }

private:
  std::string name_;
  int m_;
  int n_power_;
  Eigen::Index dimension_;
  bool holomorphic_;
  std::shared_ptr<const JetEvaluator> evaluate_;
};

/// Coefficients c of s = sum_j c_j S_j.
using SectionCoefficients = ComplexVector;

// ---------------------------------------------------------------------------
// Multi-indices

/// All alpha in N^m with |alpha| <= max_degree, ordered by total degree, then lexicographically.
inline std::vector<std::vector<int>> multi_indices(int m, int max_degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> alpha(m, 0);
  for (int total = 0; total <= max_degree; ++total) {
    // Enumerate compositions of `total` into m non-negative parts.
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == m - 1) {
        alpha[pos] = left;
        out.push_back(alpha);
        return;
      }
      for (int a = left; a >= 0; --a) {
        alpha[pos] = a;
        rec(pos + 1, left - a);
      }
    };
    rec(0, total);
  }
  return out;
}

/// C(N + m, m) as a double.
inline double bargmann_fock_dimension(int m, int n_power) {
  double d = 1.0;
  for (int i = 1; i <= m; ++i) d = d * (n_power + i) / i;
  return std::round(d);
}

namespace detail {

// Per-coordinate factors for product bases: g[k] is the one-variable lifted
// value, h[k] its holomorphic horizontal derivative.
struct AxisFactors {
  std::vector<cplx> g;
  std::vector<cplx> h;
};

// Bargmann-Fock axis: g_k = sqrt(N^{k+1}/(pi k!)) z^k e^{-N|z|^2/2} (normalized)
// or z^k e^{-N|z|^2/2} (raw); h_k = (d/dz - N zbar) applied before the weight.
inline AxisFactors bargmann_fock_axis(cplx z, int n_power, int max_degree, bool normalized) {
  const double nn = static_cast<double>(n_power);
  AxisFactors f;
  f.g.assign(max_degree + 1, cplx{});
  f.h.assign(max_degree + 1, cplx{});
  const double r = std::abs(z);
  const double log_weight = -0.5 * nn * r * r;
  auto log_coeff = [&](int k) {
    return normalized ? 0.5 * ((k + 1) * std::log(nn) - std::log(std::numbers::pi) - std::lgamma(k + 1.0))
                      : 0.0;
  };
  if (r == 0.0) {
    f.g[0] = std::exp(log_coeff(0));
  } else {
    const double log_r = std::log(r);
    const double arg = std::arg(z);
    for (int k = 0; k <= max_degree; ++k) {
      f.g[k] = std::polar(std::exp(log_coeff(k) + k * log_r + log_weight), k * arg);
    }
  }
  for (int k = 0; k <= max_degree; ++k) {
    // k z^{k-1} * coeff_k * weight == ratio * g_{k-1}
    cplx lower{};
    if (k >= 1) {
      const double ratio = normalized ? std::sqrt(nn * k) : static_cast<double>(k);
      lower = ratio * f.g[k - 1];
    }
    f.h[k] = lower - nn * std::conj(z) * f.g[k];
  }
  return f;
}

inline JetEvaluator product_evaluator(int m, std::vector<std::vector<int>> alphas,
                                      std::function<AxisFactors(cplx)> axis) {
  return [m, alphas = std::move(alphas), axis = std::move(axis)](const ComplexVector& z,
                                                                 Eigen::Ref<ComplexMatrix> out) {
    std::vector<AxisFactors> factors;
    factors.reserve(m);
    for (int j = 0; j < m; ++j) factors.push_back(axis(z(j)));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const auto& alpha = alphas[a];
      const auto row = static_cast<Eigen::Index>(a);
      cplx value = 1.0;
      for (int j = 0; j < m; ++j) value *= factors[j].g[alpha[j]];
      out(row, 0) = value;
      for (int q = 0; q < m; ++q) {
        cplx d = factors[q].h[alpha[q]];
        for (int j = 0; j < m; ++j) {
          if (j != q) d *= factors[j].g[alpha[j]];
        }
        out(row, 1 + q) = d;
        out(row, 1 + m + q) = 0.0;
      }
    }
  };
}

}  // namespace detail

/**
 * @brief Truncated Bargmann-Fock ensemble on C^m.
 *
 * Basis: S_alpha(z) = sqrt(N^{|alpha|+m} / (pi^m alpha!)) z^alpha e^{-N|z|^2/2},
 * |alpha| <= N, orthonormal for the Lebesgue inner product. The frame has
 * |e_L|^2 = e^{-|z|^2}, so the horizontal derivatives of the lift of f e_L^N are
 * (df/dz_q - N zbar_q f) e^{-N|z|^2/2} and exactly 0 in the zbar directions.
 */
inline ModelEnsemble bargmann_fock_ensemble(int m, int n_power) {
  if (m < 1 || n_power < 1) throw Error("bargmann_fock_ensemble: m and N must be positive");
  auto alphas = multi_indices(m, n_power);
  const auto d = static_cast<Eigen::Index>(alphas.size());
  auto axis = [n_power](cplx z) { return detail::bargmann_fock_axis(z, n_power, n_power, true); };
  return ModelEnsemble("bargmann-fock", m, n_power, d, true,
                       detail::product_evaluator(m, std::move(alphas), axis));
}

/// Unnormalized monomials z^alpha e^{-N|z|^2/2}, |alpha| <= N (input to gram_ensemble).
inline RawFamily bargmann_fock_monomials(int m, int n_power) {
  auto alphas = multi_indices(m, n_power);
  RawFamily raw;
  raw.name = "bargmann-fock-monomials";
  raw.m = m;
  raw.n_power = n_power;
  raw.size = static_cast<Eigen::Index>(alphas.size());
  raw.holomorphic = true;
  auto axis = [n_power](cplx z) { return detail::bargmann_fock_axis(z, n_power, n_power, false); };
  raw.evaluate = detail::product_evaluator(m, std::move(alphas), axis);
  return raw;
}

/**
 * Monomials z^k, k = 0..N, on C for the Fubini-Study metric |e_L|^2 = 1/(1+|z|^2).
 * Lifted value z^k (1+|z|^2)^{-N/2}; holomorphic horizontal derivative
 * (k z^{k-1} - N zbar z^k / (1+|z|^2)) (1+|z|^2)^{-N/2}.
 */
inline RawFamily fubini_study_monomials(int n_power) {
  if (n_power < 1) throw Error("fubini_study_monomials: N must be positive");
  RawFamily raw;
  raw.name = "fubini-study-monomials";
  raw.m = 1;
  raw.n_power = n_power;
  raw.size = n_power + 1;
  raw.holomorphic = true;
  raw.evaluate = [n_power](const ComplexVector& zv, Eigen::Ref<ComplexMatrix> out) {
    const cplx z = zv(0);
    const double r = std::abs(z);
    const double one_plus = 1.0 + r * r;
    const double log_weight = -0.5 * n_power * std::log1p(r * r);
    std::vector<cplx> v(n_power + 1, cplx{});
    if (r == 0.0) {
      v[0] = 1.0;
    } else {
      const double log_r = std::log(r);
      const double arg = std::arg(z);
      for (int k = 0; k <= n_power; ++k) v[k] = std::polar(std::exp(k * log_r + log_weight), k * arg);
    }
    for (int k = 0; k <= n_power; ++k) {
      const cplx lower = k >= 1 ? static_cast<double>(k) * v[k - 1] : cplx{};
      out(k, 0) = v[k];
      out(k, 1) = lower - static_cast<double>(n_power) * std::conj(z) * v[k] / one_plus;
      out(k, 2) = 0.0;
    }
  };
  return raw;
}

/// Gram matrix G_jk = <f_j, f_k> = sum_i w_i f_j(x_i) conj(f_k(x_i)) of lifted values.
template <typename ValueFn>
ComplexMatrix gram_by_quadrature(Eigen::Index size, const QuadratureRule& rule, ValueFn&& values_at) {
  ComplexMatrix gram = ComplexMatrix::Zero(size, size);
  constexpr Eigen::Index kBlock = 2048;
  const Eigen::Index count = rule.nodes.cols();
  for (Eigen::Index start = 0; start < count; start += kBlock) {
    const Eigen::Index len = std::min(kBlock, count - start);
    ComplexMatrix f(size, len);
    for (Eigen::Index i = 0; i < len; ++i) {
      f.col(i) = values_at(ComplexVector(rule.nodes.col(start + i))) * std::sqrt(rule.weights(start + i));
    }
    gram.noalias() += f * f.adjoint();
  }
  return gram;
}

/// Gram matrix of an ensemble's basis under a quadrature rule (identity when orthonormal).
inline ComplexMatrix gram_matrix(const ModelEnsemble& e, const QuadratureRule& rule) {
  if (rule.m != e.m()) throw Error("gram_matrix: quadrature dimension does not match ensemble");
  return gram_by_quadrature(e.dimension(), rule, [&](const ComplexVector& z) { return e.values(z); });
}

/**
 * @brief Orthonormalize a raw family against a quadrature inner product.
 *
 * The Gram matrix is first equilibrated by its diagonal, G = D^{1/2} Gt D^{1/2};
 * the new basis is S = Lt^{-1} D^{-1/2} f with Gt = Lt Lt*. Throws when Gt has
 * condition number >= 1e12 (reported in the message) or when the result fails
 * the identity check at 1e-8.
 */
inline ModelEnsemble gram_ensemble(const RawFamily& raw, const QuadratureRule& rule,
                                   std::string name = {}) {
  if (rule.m != raw.m) throw Error("gram_ensemble: quadrature dimension does not match family");
  const Eigen::Index d = raw.size;
  auto raw_values = [&](const ComplexVector& z) {
    ComplexMatrix jets = ComplexMatrix::Zero(d, 2 * raw.m + 1);
    raw.evaluate(z, jets);
    return ComplexVector(jets.col(0));
  };
  const ComplexMatrix gram = gram_by_quadrature(d, rule, raw_values);
  RealVector inv_sqrt_diag(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double g = gram(i, i).real();
    if (!(g > 0.0)) throw Error("gram_ensemble: basis element " + std::to_string(i) + " has zero norm");
    inv_sqrt_diag(i) = 1.0 / std::sqrt(g);
  }
  const ComplexMatrix scaled =
      inv_sqrt_diag.cast<cplx>().asDiagonal() * gram * inv_sqrt_diag.cast<cplx>().asDiagonal();
  const auto eig = hermitian_eig(HermitianMatrix(scaled));
  const double lmax = eig.eigenvalues(0);
  const double lmin = eig.eigenvalues(d - 1);
  const double condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(condition < 1e12)) {
    std::ostringstream os;
    os.precision(3);
    os << "gram_ensemble: Gram matrix is ill-conditioned (condition estimate " << condition << ")";
    throw Error(os.str());
  }
  Eigen::LLT<ComplexMatrix> llt(HermitianMatrix(scaled).matrix());
  if (llt.info() != Eigen::Success) throw Error("gram_ensemble: Cholesky factorization failed");
  const ComplexMatrix lower = llt.matrixL();
  const ComplexMatrix transform =
      lower.triangularView<Eigen::Lower>().solve(ComplexMatrix(inv_sqrt_diag.cast<cplx>().asDiagonal()));

  const ComplexMatrix check = transform * gram * transform.adjoint();
  const double defect = (check - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (!(defect < 1e-8)) {
    std::ostringstream os;
    os << "gram_ensemble: orthonormalized Gram matrix deviates from identity by " << defect;
    throw Error(os.str());
  }

  auto evaluate = [raw_eval = raw.evaluate, transform, m = raw.m](const ComplexVector& z,
                                                                   Eigen::Ref<ComplexMatrix> out) {
    ComplexMatrix jets = ComplexMatrix::Zero(transform.cols(), 2 * m + 1);
    raw_eval(z, jets);
    out = transform * jets;
  };
  return ModelEnsemble(name.empty() ? raw.name + "/gram" : std::move(name), raw.m, raw.n_power, d,
                       raw.holomorphic, std::move(evaluate));
}

/// Quadrature exact for the Fubini-Study Gram matrix at tensor power N.
inline QuadratureRule fubini_study_rule(int n_power) {
  return fubini_study_polar(n_power / 2 + 2, n_power + 2);
}

/// Fubini-Study (SU(2)-type) ensemble on C: monomials of degree <= N orthonormalized numerically.
inline ModelEnsemble fubini_study_ensemble(int n_power) {
  return gram_ensemble(fubini_study_monomials(n_power), fubini_study_rule(n_power), "fubini-study");
}

// ---------------------------------------------------------------------------
// Evaluation

/// Szego kernel Pi_N(z, 0; w, 0) = sum_j S_j(z) conj(S_j(w)).
inline cplx kernel_eval(const ModelEnsemble& e, const ComplexVector& z, const ComplexVector& w) {
  return e.values(w).dot(e.values(z));
}

/**
 * @brief Jet map of the ensemble at a point configuration.
 *
 * Returns the k x d matrix whose column j is the jet vector of S_j in
 * JetLayout order, derivatives scaled by N^{-1/2}. The jets of
 * s = sum c_j S_j are jet_map * c.
 */
inline ComplexMatrix jet_map(const ModelEnsemble& e, const PointConfiguration& z) {
  if (z.m() != e.m()) {
    throw Error("jet_map: configuration has m=" + std::to_string(z.m()) + ", ensemble has m=" +
                std::to_string(e.m()));
  }
  const JetLayout layout(z);
  const int m = e.m();
  const double scale = 1.0 / std::sqrt(static_cast<double>(e.n_power()));
  ComplexMatrix out(layout.size(), e.dimension());
  for (int p = 0; p < z.n(); ++p) {
    const ComplexMatrix local = e.local_jets(z.point(p));
    out.row(layout.value_slot(p)) = local.col(0).transpose();
    for (int q = 0; q < 2 * m; ++q) {
      out.row(layout.derivative_slot(p, q)) = scale * local.col(1 + q).transpose();
    }
  }
  return out;
}

inline ComplexVector jet_eval(const ModelEnsemble& e, const SectionCoefficients& c,
                              const PointConfiguration& z) {
  if (c.size() != e.dimension()) {
    throw Error("jet_eval: coefficient vector has length " + std::to_string(c.size()) + ", expected " +
                std::to_string(e.dimension()));
  }
  return jet_map(e, z) * c;
}

// ---------------------------------------------------------------------------
// Families indexed by N

struct EnsembleFamily {
  std::string name;
  int m = 1;
  std::function<ModelEnsemble(int)> make;
  std::function<double(int)> dimension;
};

inline EnsembleFamily bargmann_fock_family(int m) {
  return {"bargmann-fock", m, [m](int n) { return bargmann_fock_ensemble(m, n); },
          [m](int n) { return bargmann_fock_dimension(m, n); }};
}

inline EnsembleFamily fubini_study_family() {
  return {"fubini-study", 1, [](int n) { return fubini_study_ensemble(n); },
          [](int n) { return static_cast<double>(n + 1); }};
}

/**
 * lim N^m / d_N for a family, by two levels of Richardson extrapolation at
 * N = 2^20, 2^21, 2^22. Plays the role of m!/c_1(L)^m for noncompact models
 * (m! for Bargmann-Fock).
 */
inline double limit_factor(const EnsembleFamily& family) {
  auto ratio = [&](int n) { return std::pow(static_cast<double>(n), family.m) / family.dimension(n); };
  const int n0 = 1 << 20;
  const double r0 = ratio(n0), r1 = ratio(2 * n0), r2 = ratio(4 * n0);
  const double a = 2.0 * r1 - r0;
  const double b = 2.0 * r2 - r1;
  return (4.0 * b - a) / 3.0;
}

}  // namespace jetlab
