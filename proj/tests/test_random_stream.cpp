#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "postsel/random_stream.hpp"

using namespace postsel;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and copies fork") {
  RandomStream a(42);
  RandomStream b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());
  RandomStream c = a;
  CHECK(c.uniform() == a.uniform());
}

TEST_CASE("split children differ from each other and from the parent") {
  const RandomStream root(7);
  std::set<std::uint32_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(root.split(i).next_u32());
  CHECK(firsts.size() == 1000);
  CHECK(root.split(3).next_u32() == root.split(3).next_u32());
}

TEST_CASE("uniform and normal moments") {
  RandomStream s(2024);
  const int n = 400000;
  double su = 0, sn = 0, sn2 = 0;
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    su += u;
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sn / n) < 4 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1.0) < 4 * std::sqrt(2.0 / n));
}
