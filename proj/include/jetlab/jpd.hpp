#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "jetlab/gaussian_measures.hpp"
#include "jetlab/jet_layout.hpp"
#include "jetlab/matrix_core.hpp"
#include "jetlab/model_ensembles.hpp"
#include "jetlab/random.hpp"
#include "jetlab/sphere_measures.hpp"

namespace jetlab {

/**
 * @brief Jet covariance split as [[A, B], [B*, C]].
 *
 * A is n x n (values), B is n x 2mn (values against derivatives), C is
 * 2mn x 2mn (derivatives). Rows are indexed by (p, q), columns by (p', q');
 * derivative columns follow the JetLayout order (p' major, q' minor).
 */
struct CovarianceBlocks {
  ComplexMatrix a;
  ComplexMatrix b;
  ComplexMatrix c;

  HermitianMatrix assemble() const {
    const Eigen::Index n = a.rows();
    const Eigen::Index r = c.rows();
    ComplexMatrix full(n + r, n + r);
    full.topLeftCorner(n, n) = a;
    full.topRightCorner(n, r) = b;
    full.bottomLeftCorner(r, n) = b.adjoint();
    full.bottomRightCorner(r, r) = c;
    return HermitianMatrix(full);
  }
};

/// Heisenberg model kernel pi^{-m} exp(u.conj(v) - (|u|^2 + |v|^2)/2).
inline cplx heisenberg_kernel(const ComplexVector& u, const ComplexVector& v) {
  const double m = static_cast<double>(u.size());
  const cplx exponent = v.dot(u) - 0.5 * (u.squaredNorm() + v.squaredNorm());
  return std::exp(exponent) / std::pow(std::numbers::pi, m);
}

/**
 * @brief Universal scaling limit Delta^inf(z) of the jet covariance.
 *
 *   A^p_p'          = Pi(z^p, z^p')
 *   B^p_{p'q'}      = (z^p_q' - z^p'_q') Pi(z^p, z^p')                       (q' holomorphic)
 *   C^{pq}_{p'q'}   = (delta_qq' + conj(z^p'_q - z^p_q)(z^p_q' - z^p'_q')) Pi  (q, q' holomorphic)
 *
 * with Pi the Heisenberg kernel, all entries multiplied by `limit_factor`
 * (m!/c_1(L)^m; m! for the Bargmann-Fock normalization). Rows and columns of
 * anti-holomorphic slots are exactly zero.
 */
inline HermitianMatrix limit_covariance(const PointConfiguration& z, double limit_factor) {
  if (!(limit_factor > 0.0)) throw Error("limit_covariance: limit factor must be positive");
  const int m = z.m();
  const int n = z.n();
  const int dm = 2 * m;
  CovarianceBlocks blocks;
  blocks.a.resize(n, n);
  blocks.b = ComplexMatrix::Zero(n, dm * n);
  blocks.c = ComplexMatrix::Zero(dm * n, dm * n);
  for (int p = 0; p < n; ++p) {
    for (int pp = 0; pp < n; ++pp) {
      const cplx pi = heisenberg_kernel(z.point(p), z.point(pp));
      blocks.a(p, pp) = pi;
      for (int qq = 0; qq < m; ++qq) {
        blocks.b(p, pp * dm + qq) = (z.coordinate(p, qq) - z.coordinate(pp, qq)) * pi;
      }
      for (int q = 0; q < m; ++q) {
        for (int qq = 0; qq < m; ++qq) {
          const cplx delta = q == qq ? 1.0 : 0.0;
          const cplx diff_bar = std::conj(z.coordinate(pp, q) - z.coordinate(p, q));
          const cplx diff = z.coordinate(p, qq) - z.coordinate(pp, qq);
          blocks.c(p * dm + q, pp * dm + qq) = (delta + diff_bar * diff) * pi;
        }
      }
    }
  }
  blocks.a *= limit_factor;
  blocks.b *= limit_factor;
  blocks.c *= limit_factor;
  return blocks.assemble();
}

/**
 * @brief Exact covariance Delta^N(z) for the normalized Gaussian (or spherical) ensemble.
 *
 * A = Pi_N / d_N, B = conj(nabla^2) Pi_N / d_N, C = nabla^1 conj(nabla^2) Pi_N / d_N,
 * each written as (1/d_N) sum_j (jet of S_j at z^p) conj(jet of S_j at z^p').
 * Points are model coordinates; apply z / sqrt(N) beforehand for scaling studies.
 */
inline CovarianceBlocks exact_covariance(const ModelEnsemble& e, const PointConfiguration& z) {
  if (z.m() != e.m()) throw Error("exact_covariance: configuration and ensemble disagree on m");
  const int m = e.m();
  const int n = z.n();
  const int dm = 2 * m;
  const Eigen::Index d = e.dimension();
  const double inv_d = 1.0 / static_cast<double>(d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(e.n_power()));

  std::vector<ComplexVector> values(n);
  std::vector<ComplexMatrix> derivs(n);  // d x 2m, scaled
  for (int p = 0; p < n; ++p) {
    const ComplexMatrix local = e.local_jets(z.point(p));
    values[p] = local.col(0);
    derivs[p] = scale * local.rightCols(dm);
  }

  CovarianceBlocks blocks;
  blocks.a.resize(n, n);
  blocks.b.resize(n, dm * n);
  blocks.c.resize(dm * n, dm * n);
  for (int p = 0; p < n; ++p) {
    for (int pp = 0; pp < n; ++pp) {
      // Eigen's u.dot(v) is sum conj(u_j) v_j.
      blocks.a(p, pp) = inv_d * values[pp].dot(values[p]);
      for (int qq = 0; qq < dm; ++qq) {
        blocks.b(p, pp * dm + qq) = inv_d * derivs[pp].col(qq).dot(values[p]);
      }
      for (int q = 0; q < dm; ++q) {
        for (int qq = 0; qq < dm; ++qq) {
          blocks.c(p * dm + q, pp * dm + qq) = inv_d * derivs[pp].col(qq).dot(derivs[p].col(q));
        }
      }
    }
  }
  return blocks;
}

/**
 * Closed-form Szego kernel route for the truncated Bargmann-Fock model.
 *
 * With E_N(x) = sum_{s<=N} x^s/s!, x = N <z, w> and K = (N/pi)^m e^{-N(|z|^2+|w|^2)/2}:
 *   Pi_N                = K E_N
 *   conj(nabla_q') Pi_N = K sqrt(N) (z_q' E_{N-1} - w_q' E_N)
 *   nabla_q conj(nabla_q') Pi_N
 *                       = K [delta E_{N-1} + N (z_q' wbar_q E_{N-2} - w_q' wbar_q E_{N-1}
 *                                                - zbar_q z_q' E_{N-1} + zbar_q w_q' E_N)]
 * Anti-holomorphic entries vanish. Independent of the basis evaluators.
 */
inline CovarianceBlocks bargmann_fock_kernel_covariance(int m, int n_power, const PointConfiguration& z) {
  if (z.m() != m) throw Error("bargmann_fock_kernel_covariance: configuration has the wrong m");
  const int n = z.n();
  const int dm = 2 * m;
  const double nn = static_cast<double>(n_power);
  const double inv_d = 1.0 / bargmann_fock_dimension(m, n_power);

  auto truncated_exp = [&](cplx x) {
    // returns {E_N, E_{N-1}, E_{N-2}}
    cplx term = 1.0;
    cplx sum = 0.0;
    cplx e_nm1 = 0.0, e_nm2 = 0.0;
    for (int s = 0; s <= n_power; ++s) {
      if (s > 0) term *= x / static_cast<double>(s);
      sum += term;
      if (s == n_power - 1) e_nm1 = sum;
      if (s == n_power - 2) e_nm2 = sum;
    }
    return std::array<cplx, 3>{sum, e_nm1, e_nm2};
  };

  CovarianceBlocks blocks;
  blocks.a.resize(n, n);
  blocks.b = ComplexMatrix::Zero(n, dm * n);
  blocks.c = ComplexMatrix::Zero(dm * n, dm * n);
  for (int p = 0; p < n; ++p) {
    const ComplexVector zp = z.point(p);
    for (int pp = 0; pp < n; ++pp) {
      const ComplexVector wp = z.point(pp);
      const cplx x = nn * wp.dot(zp);
      const auto [en, en1, en2] = truncated_exp(x);
      const double k0 =
          std::pow(nn / std::numbers::pi, m) * std::exp(-0.5 * nn * (zp.squaredNorm() + wp.squaredNorm()));
      blocks.a(p, pp) = inv_d * k0 * en;
      for (int qq = 0; qq < m; ++qq) {
        blocks.b(p, pp * dm + qq) = inv_d * k0 * std::sqrt(nn) * (zp(qq) * en1 - wp(qq) * en);
      }
      for (int q = 0; q < m; ++q) {
        for (int qq = 0; qq < m; ++qq) {
          const cplx delta = q == qq ? en1 : cplx{};
          const cplx rest = zp(qq) * std::conj(wp(q)) * en2 - wp(qq) * std::conj(wp(q)) * en1 -
                            std::conj(zp(q)) * zp(qq) * en1 + std::conj(zp(q)) * wp(qq) * en;
          blocks.c(p * dm + q, pp * dm + qq) = inv_d * k0 * (delta + nn * rest);
        }
      }
    }
  }
  return blocks;
}

/// Coefficient laws on the section space.
enum class EnsembleLaw { NormalizedGaussian, Spherical, UnnormalizedGaussian, Ball };

inline EnsembleLaw parse_ensemble_law(std::string_view name) {
  if (name == "normalized-gaussian") return EnsembleLaw::NormalizedGaussian;
  if (name == "spherical") return EnsembleLaw::Spherical;
  if (name == "unnormalized-gaussian") return EnsembleLaw::UnnormalizedGaussian;
  if (name == "ball") return EnsembleLaw::Ball;
  throw Error("unknown ensemble law '" + std::string(name) + "'");
}

inline std::string_view to_string(EnsembleLaw law) {
  switch (law) {
    case EnsembleLaw::NormalizedGaussian: return "normalized-gaussian";
    case EnsembleLaw::Spherical: return "spherical";
    case EnsembleLaw::UnnormalizedGaussian: return "unnormalized-gaussian";
    case EnsembleLaw::Ball: return "ball";
  }
  return "?";
}

/// One coefficient vector c in C^d under `law`.
inline void draw_coefficients(EnsembleLaw law, RandomStream& stream, Eigen::Ref<ComplexVector> c) {
  const auto d = static_cast<double>(c.size());
  switch (law) {
    case EnsembleLaw::NormalizedGaussian: {
      const double s = 1.0 / std::sqrt(d);
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = s * stream.complex_normal();
      return;
    }
    case EnsembleLaw::UnnormalizedGaussian:
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = stream.complex_normal();
      return;
    case EnsembleLaw::Spherical:
      complex_sphere_draw(stream, c);
      return;
    case EnsembleLaw::Ball: {
      complex_sphere_draw(stream, c);
      // Radius of a uniform point in the unit ball of R^{2d}.
      c *= std::pow(stream.uniform(), 1.0 / (2.0 * d));
      return;
    }
  }
}

/**
 * Monte Carlo estimate of <jet jet*> with coefficients drawn from `law`.
 * Expectations: Delta^N (normalized Gaussian, spherical), d_N Delta^N
 * (unnormalized Gaussian), d_N/(d_N+1) Delta^N (ball).
 */
inline HermitianMatrix empirical_covariance(const ModelEnsemble& e, const PointConfiguration& z,
                                            EnsembleLaw law, const StreamSpec& spec, std::size_t samples) {
  if (samples < 10) throw Error("empirical_covariance: need at least 10 samples");
  const ComplexMatrix jmap = jet_map(e, z);
  const Eigen::Index k = jmap.rows();
  const Eigen::Index d = jmap.cols();
  auto partial = map_chunks(spec, samples, [&](std::size_t, std::size_t b, std::size_t end,
                                               RandomStream& stream) {
    ComplexMatrix coeffs(d, static_cast<Eigen::Index>(end - b));
    for (Eigen::Index col = 0; col < coeffs.cols(); ++col) draw_coefficients(law, stream, coeffs.col(col));
    const ComplexMatrix jets = jmap * coeffs;
    return ComplexMatrix(jets * jets.adjoint());
  });
  ComplexMatrix acc = ComplexMatrix::Zero(k, k);
  for (const auto& p : partial) acc += p;
  return HermitianMatrix(acc / static_cast<double>(samples));
}

/// Delta^N(z / sqrt(N)) for the N-th member of a family.
inline HermitianMatrix scaled_covariance(const EnsembleFamily& family, const PointConfiguration& z, int n_power) {
  return exact_covariance(family.make(n_power), z.scaled(n_power)).assemble();
}

/// The joint distribution of jets with covariance Delta.
inline GeneralizedGaussian jpd_measure(const HermitianMatrix& delta) { return GeneralizedGaussian(delta); }

enum class Comparison { Exact, SphericalMc, GaussianMc };

inline Comparison parse_comparison(std::string_view name) {
  if (name == "exact") return Comparison::Exact;
  if (name == "spherical-mc") return Comparison::SphericalMc;
  if (name == "gaussian-mc") return Comparison::GaussianMc;
  throw Error("unknown comparison '" + std::string(name) + "'");
}

struct ConvergenceRow {
  int n_power = 0;
  double frobenius = 0.0;
  double spectral = 0.0;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double slope = std::numeric_limits<double>::quiet_NaN();  ///< least-squares slope of log frobenius vs log N
};

/// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

/**
 * @brief Distance of Delta^N(z/sqrt(N)) from Delta^inf(z) over a list of N.
 *
 * MC comparisons estimate Delta^N with `samples` draws; the stream for the
 * i-th N is spec.child(i), so rows do not depend on evaluation order.
 */
inline ConvergenceReport converge_sweep(const EnsembleFamily& family, const PointConfiguration& z,
                                        const std::vector<int>& n_list, Comparison comparison,
                                        const StreamSpec& spec, std::size_t samples) {
  if (n_list.empty()) throw Error("converge_sweep: empty N list");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 4) throw Error("converge_sweep: every N must be at least 4");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw Error("converge_sweep: N list must be strictly increasing");
  }
  if (z.m() != family.m) throw Error("converge_sweep: configuration and family disagree on m");
  const HermitianMatrix limit = limit_covariance(z, limit_factor(family));

  ConvergenceReport report;
  std::vector<double> ns, frob;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const int n_power = n_list[i];
    const auto start = std::chrono::steady_clock::now();
    const ModelEnsemble e = family.make(n_power);
    const PointConfiguration zs = z.scaled(n_power);
    HermitianMatrix delta;
    switch (comparison) {
      case Comparison::Exact: delta = exact_covariance(e, zs).assemble(); break;
      case Comparison::GaussianMc:
        delta = empirical_covariance(e, zs, EnsembleLaw::NormalizedGaussian, spec.child(i), samples);
        break;
      case Comparison::SphericalMc:
        delta = empirical_covariance(e, zs, EnsembleLaw::Spherical, spec.child(i), samples);
        break;
    }
    ConvergenceRow row;
    row.n_power = n_power;
    row.frobenius = frobenius_distance(delta, limit);
    row.spectral = spectral_distance(delta, limit);
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.rows.push_back(row);
    ns.push_back(n_power);
    frob.push_back(row.frobenius);
  }
  report.slope = fit_loglog_slope(ns, frob);
  return report;
}

}  // namespace jetlab
