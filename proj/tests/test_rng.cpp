#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sandpile/rng.hpp"

using namespace sandpile;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("stream is keyed by seed and stream id") {
  RngStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  std::vector<std::uint32_t> xa, xb, xc, xd;
  for (int i = 0; i < 16; ++i) {
    xa.push_back(a.next_u32());
    xb.push_back(b.next_u32());
    xc.push_back(c.next_u32());
    xd.push_back(d.next_u32());
  }
  CHECK(xa == xb);
  CHECK(xa != xc);
  CHECK(xa != xd);

  // First block of (seed 0, stream 0) is the zero-counter Philox output.
  RngStream z(0, 0);
  CHECK(z.next_u32() == 0x6627e8d5u);
  CHECK(z.next_u32() == 0xe169c58du);
}

TEST_CASE("uniform_below") {
  RngStream r(1, 0);
  CHECK_THROWS_AS(r.uniform_below(0), std::invalid_argument);
  std::vector<int> hist(6, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++hist[r.uniform_below(6)];
  for (int h : hist) CHECK(std::abs(h - draws / 6) < 400);
  for (int i = 0; i < 1000; ++i) CHECK(r.uniform_below(1ull << 40) < (1ull << 40));
  for (int i = 0; i < 100; ++i) CHECK(r.uniform_below(1) == 0);
}

TEST_CASE("uniform01 range and mean") {
  RngStream r(2, 9);
  double sum = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / draws - 0.5) < 0.005);
}
