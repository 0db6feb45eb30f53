#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"

using namespace jetlab;

namespace {

constexpr std::size_t kSamples = 100000;

double psi_radial(std::size_t d, std::size_t k, double r) {
  RealVector x = RealVector::Zero(static_cast<Eigen::Index>(k));
  x(0) = r;
  return projection_density(d, k, x);
}

}  // namespace

TEST(SphereSampler, UnitNorm) {
  const RealMatrix s = sphere_sample(SphereSampler(17), StreamSpec{1}, 2000);
  for (Eigen::Index c = 0; c < s.cols(); ++c) EXPECT_NEAR(s.col(c).norm(), 1.0, 1e-12);
}

TEST(SphereSampler, LowDimensionalMoments) {
  const RealMatrix s2 = sphere_sample(SphereSampler(2), StreamSpec{2}, kSamples);
  EXPECT_LT(std::abs(s2.row(0).mean()), 0.02);
  EXPECT_LT(std::abs(s2.row(1).mean()), 0.02);
  const RealMatrix s3 = sphere_sample(SphereSampler(3), StreamSpec{3}, kSamples);
  EXPECT_NEAR(s3.row(0).squaredNorm() / kSamples, 1.0 / 3.0, 0.01);
}

TEST(SphereSampler, SecondMomentIsIdentityOverD) {
  for (std::size_t d : {5u, 20u, 100u}) {
    const RealMatrix s = sphere_sample(SphereSampler(d), StreamSpec{d}, kSamples);
    const RealMatrix m = s * s.transpose() / static_cast<double>(kSamples);
    const double band = 5.0 / std::sqrt(static_cast<double>(kSamples));
    EXPECT_LT((m - RealMatrix::Identity(d, d) / static_cast<double>(d)).cwiseAbs().maxCoeff(), band / d * 2.0)
        << "d=" << d;
  }
}

TEST(SphereSampler, Deterministic) {
  EXPECT_EQ(sphere_sample(SphereSampler(6), StreamSpec{5, 64}, 300),
            sphere_sample(SphereSampler(6), StreamSpec{5, 64}, 300));
}

TEST(ProjectionDensity, ArchimedesCase) {
  for (double x : {-1.7, -0.5, 0.0, 0.9, 1.73}) {
    EXPECT_NEAR(psi_radial(3, 1, x), 1.0 / (2.0 * std::sqrt(3.0)), 1e-14) << x;
  }
  EXPECT_EQ(psi_radial(3, 1, 1.7321), 0.0);
  EXPECT_EQ(psi_radial(3, 1, -2.0), 0.0);
}

TEST(ProjectionDensity, ZeroOutsideSupport) {
  EXPECT_EQ(psi_radial(10, 2, std::sqrt(10.0)), 0.0);
  EXPECT_EQ(psi_radial(10, 2, 4.0), 0.0);
}

TEST(ProjectionDensity, DomainError) {
  EXPECT_THROW(psi_radial(3, 2, 0.0), Error);
  EXPECT_THROW(projection_density(10, 2, RealVector::Zero(3)), Error);
}

TEST(ProjectionDensity, IntegratesToOne) {
  for (auto [d, k] : {std::pair<std::size_t, std::size_t>{5, 1}, {10, 3}, {100, 2}}) {
    const double total =
        oracle::radial_integral([&](double r) { return psi_radial(d, k, r); }, static_cast<int>(k), std::sqrt(d));
    EXPECT_NEAR(total, 1.0, 1e-6) << "d=" << d << " k=" << k;
  }
}

TEST(ProjectionDensity, LargeDGaussianValue) {
  EXPECT_NEAR(psi_radial(10000, 2, 0.0), 1.0 / (2.0 * std::numbers::pi), 1e-3);
}

TEST(ProjectionDensity, GaussianEnvelope) {
  for (std::size_t k : {1u, 2u, 3u}) {
    const double ck = std::exp((k + 2.0) / 2.0) * std::pow(2.0 * std::numbers::pi, -0.5 * k);
    for (std::size_t d = k + 2; d <= 2000; d = d < 40 ? d + 1 : d * 2) {
      for (double r = 0.0; r <= 6.0; r += 0.05) {
        EXPECT_LE(psi_radial(d, k, r), ck * std::exp(-0.5 * r * r)) << "d=" << d << " k=" << k << " r=" << r;
      }
    }
  }
}

TEST(ProjectionDensity, SupDistanceToGaussianDecreases) {
  const std::size_t k = 2;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t d : {100u, 1000u, 10000u}) {
    double worst = 0.0;
    for (double r = 0.0; r <= 3.0; r += 0.01) {
      const double gauss = std::exp(-0.5 * r * r) / (2.0 * std::numbers::pi);
      worst = std::max(worst, std::abs(psi_radial(d, k, r) - gauss));
    }
    EXPECT_LT(worst, previous) << "d=" << d;
    previous = worst;
  }
}

TEST(PoincareBorel, SmallDimensionCovarianceIsIdentity) {
  const auto report = poincare_borel_check(4, 2, StreamSpec{7}, kSamples);
  const double band = 5.0 / std::sqrt(static_cast<double>(kSamples));
  EXPECT_LT((report.covariance - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 2.0 * band);
  EXPECT_EQ(report.ks.size(), 2u);
}

TEST(PoincareBorel, DomainError) {
  EXPECT_THROW(poincare_borel_check(3, 2, StreamSpec{}, 100), Error);
}

TEST(PoincareBorel, KsAgainstExactCdf) {
  // A sample drawn by inverse CDF at mid-quantiles has KS distance exactly 1/(2n).
  std::vector<double> xs;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const double p = (i + 0.5) / n;
    double lo = -10, hi = 10;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    xs.push_back(0.5 * (lo + hi));
  }
  EXPECT_NEAR(ks_distance_normal(xs), 0.5 / n, 1e-12);
}

TEST(SphericalPushforward, ZeroMapGivesZero) {
  const auto c = spherical_pushforward_covariance(ComplexMatrix::Zero(3, 10), StreamSpec{1}, 100);
  EXPECT_EQ(c.matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(SphericalPushforward, RandomMapMatchesExpectation) {
  std::mt19937_64 rng(8);
  const Eigen::Index d = 50;
  const ComplexMatrix t = oracle::random_matrix(rng, 3, d);
  const HermitianMatrix target(t * t.adjoint() / static_cast<double>(d));
  const auto c = spherical_pushforward_covariance(t, StreamSpec{8}, kSamples);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double scale = std::sqrt(target(i, i).real() * target(j, j).real());
      EXPECT_LE(std::abs(c(i, j) - target(i, j)), 5.0 * scale / std::sqrt(static_cast<double>(kSamples)));
    }
  }
}
