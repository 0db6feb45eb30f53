// Prints the distance between the scaled jet covariance and its universal limit
// for the Bargmann-Fock and Fubini-Study ensembles at two points.

#include <cstdio>

#include "jetlab/jetlab.hpp"

int main() {
  using namespace jetlab;
  const auto z = PointConfiguration::on_line({0.0, 1.0});
  const std::pair<EnsembleFamily, std::vector<int>> runs[] = {
      {bargmann_fock_family(1), {16, 64, 256, 1024}},
      // The Gram ensemble costs O(N^3) to orthonormalize.
      {fubini_study_family(), {16, 64, 256}},
  };

  for (const auto& [family, ns] : runs) {
    const auto report = converge_sweep(family, z, ns, Comparison::Exact, StreamSpec{}, 0);
    std::printf("%s\n%8s %14s %14s\n", family.name.c_str(), "N", "frobenius", "spectral");
    for (const auto& row : report.rows) {
      std::printf("%8d %14.6e %14.6e\n", row.n_power, row.frobenius, row.spectral);
    }
    std::printf("log-log slope %.3f\n\n", report.slope);
  }

  // Same limit reached through the spherical ensemble.
  const auto mc = converge_sweep(bargmann_fock_family(1), z, {16, 64}, Comparison::SphericalMc, StreamSpec{1}, 100000);
  for (const auto& row : mc.rows) std::printf("spherical MC, N=%d: %.4e\n", row.n_power, row.frobenius);
  return 0;
}
