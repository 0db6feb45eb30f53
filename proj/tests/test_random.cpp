#include <gtest/gtest.h>

#include <set>

#include "jetlab/random.hpp"

using namespace jetlab;

TEST(Seeds, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {0ULL, 1ULL, 7ULL}) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(master, i));
  }
  EXPECT_EQ(seen.size(), 3000u);
}

TEST(Seeds, ChildStreamsDiffer) {
  const StreamSpec spec{7, 128};
  EXPECT_NE(spec.child(0).seed, spec.child(1).seed);
  EXPECT_EQ(spec.child(3).chunk_size, 128u);
  EXPECT_EQ(spec.child(3).seed, (StreamSpec{7, 64}.child(3).seed));
}

TEST(RandomStream, ComplexNormalHasUnitSecondMoment) {
  RandomStream s(11);
  const int n = 200000;
  double re2 = 0.0, im2 = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = s.complex_normal();
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    cross += z.real() * z.imag();
  }
  EXPECT_NEAR(re2 / n, 0.5, 0.01);
  EXPECT_NEAR(im2 / n, 0.5, 0.01);
  EXPECT_NEAR(cross / n, 0.0, 0.01);
}

TEST(MapChunks, ResultsInChunkOrderAndReproducible) {
  const StreamSpec spec{3, 10};
  auto run = [&] {
    return map_chunks(spec, 95, [](std::size_t c, std::size_t b, std::size_t e, RandomStream& s) {
      return std::vector<double>{static_cast<double>(c), static_cast<double>(b), static_cast<double>(e),
                                 s.uniform()};
    });
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.size(), 10u);
  for (std::size_t c = 0; c < a.size(); ++c) {
    EXPECT_EQ(a[c][0], static_cast<double>(c));
    EXPECT_EQ(a[c][1], static_cast<double>(10 * c));
    EXPECT_EQ(a[c][2], static_cast<double>(std::min<std::size_t>(95, 10 * c + 10)));
    EXPECT_EQ(a[c][3], b[c][3]);
  }
}

TEST(MapChunks, ChunkDrawsDependOnlyOnSeedAndIndex) {
  // The first chunk of a run with 5 chunks equals the first chunk of a run with 1.
  const StreamSpec spec{9, 4};
  auto first = [&](std::size_t count) {
    return map_chunks(spec, count, [](std::size_t, std::size_t, std::size_t, RandomStream& s) {
      return s.normal();
    })[0];
  };
  EXPECT_EQ(first(4), first(20));
}
