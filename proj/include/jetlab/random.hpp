#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <future>
#include <random>
#include <thread>
#include <utility>
#include <vector>

namespace jetlab {

/// splitmix64 finalizer, used to derive independent child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of chunk/stream `index` under `master`. Pure function of its inputs.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// A single sequential random stream.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }

  /// Standard complex normal: real and imaginary parts N(0, 1/2), so E|z|^2 = 1.
  std::complex<double> complex_normal() {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {re * kHalfSqrt, im * kHalfSqrt};
  }

  double uniform() { return uniform_(engine_); }

private:
  static constexpr double kHalfSqrt = 0.70710678118654752440;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/**
 * @brief Reproducible description of a chunked Monte Carlo stream.
 *
 * A run of `count` draws is cut into chunks of `chunk_size`; chunk i gets its
 * own RandomStream seeded with derive_seed(seed, i). Results depend only on
 * (seed, chunk_size, count), never on thread scheduling.
 */
struct StreamSpec {
  std::uint64_t seed = 0;
  std::size_t chunk_size = 4096;

  StreamSpec child(std::uint64_t index) const { return {derive_seed(seed, index), chunk_size}; }
};

/**
 * Run fn(chunk_index, begin, end, stream) for every chunk and return the
 * per-chunk results in chunk order. Chunks are spread over hardware threads.
 */
template <typename Fn>
auto map_chunks(const StreamSpec& spec, std::size_t count, Fn&& fn) {
  using Result = decltype(fn(std::size_t{}, std::size_t{}, std::size_t{},
                             std::declval<RandomStream&>()));
  const std::size_t chunk = std::max<std::size_t>(spec.chunk_size, 1);
  const std::size_t nchunks = (count + chunk - 1) / chunk;
  std::vector<Result> results(nchunks);

  auto run = [&](std::size_t c) {
    RandomStream stream(derive_seed(spec.seed, c));
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    results[c] = fn(c, begin, end, stream);
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), nchunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c) run(c);
    return results;
  }
  std::vector<std::future<void>> pending;
  pending.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pending.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t c = w; c < nchunks; c += workers) run(c);
    }));
  }
  for (auto& f : pending) f.get();
  return results;
}

}  // namespace jetlab
