// sqrt(d) times a coordinate of a uniform point on S^{d-1} is close to N(0,1) for large d.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "jetlab/jetlab.hpp"

int main() {
  using namespace jetlab;
  std::printf("%6s %10s %12s\n", "d", "KS", "psi_d(0)");
  for (std::size_t d : {3u, 10u, 100u, 1000u}) {
    const auto report = poincare_borel_check(d, 1, StreamSpec{}, 100000);
    std::printf("%6zu %10.5f %12.8f\n", d, report.ks[0], projection_density(d, 1, RealVector::Zero(1)));
  }
  std::printf("%6s %10s %12.8f\n", "limit", "", 1.0 / std::sqrt(2.0 * std::numbers::pi));

  // A jet sample from the limit law at one point: the third slot is always zero.
  const auto law = jpd_measure(limit_covariance(PointConfiguration::on_line({0.0}), 1.0));
  const ComplexMatrix s = gaussian_sample(law, StreamSpec{1}, 3);
  for (Eigen::Index c = 0; c < s.cols(); ++c) {
    std::printf("x=% .4f%+.4fi  xi1=% .4f%+.4fi  xi2=%g\n", s(0, c).real(), s(0, c).imag(), s(1, c).real(),
                s(1, c).imag(), std::abs(s(2, c)));
  }
  return 0;
}
