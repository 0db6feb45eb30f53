#pragma once

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jetlab/jet_layout.hpp"

namespace jetlab::cli {

/// Bad flag values; mapped to exit code 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Parses "1", "-0.5", "2i", "-i", "1+2i", "3.5e-1-4i".
std::complex<double> parse_complex(std::string_view text);

/// Points separated by ',', coordinates within a point by '/'. Every point needs m coordinates.
PointConfiguration parse_points(std::string_view text, int m);

/// Comma-separated positive integers.
std::vector<int> parse_int_list(std::string_view text);

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

/// "lo:hi:count", count >= 1.
Grid parse_grid(std::string_view text);

/// Entry point: `jetlab <command> [flags]`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jetlab::cli
