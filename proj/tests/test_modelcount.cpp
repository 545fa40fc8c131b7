#include "doctest.h"

#include <numeric>

#include "solvlab/exact.hpp"
#include "solvlab/modelcount.hpp"

namespace {
using namespace solvlab;
using modelcount::GraphOfGroupsDatum;
using modelcount::IndexIdentity;
}  // namespace

TEST_CASE("common base: pinned values and guards") {
  const auto same = modelcount::common_base(2, 2);
  REQUIRE(same.has_value());
  CHECK(same->root == 2);
  CHECK(same->i == 1);
  CHECK(same->j == 1);

  const auto four_eight = modelcount::common_base(4, 8);
  REQUIRE(four_eight.has_value());
  CHECK(four_eight->root == 2);
  CHECK(four_eight->i == 2);
  CHECK(four_eight->j == 3);

  CHECK(!modelcount::common_base(2, 3).has_value());

  CHECK_THROWS_AS(modelcount::common_base(1, 5), std::invalid_argument);
  CHECK_THROWS_AS(modelcount::common_base(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(modelcount::common_base(-4, 8), std::invalid_argument);
}

TEST_CASE("common base: reconstruction, symmetry, and an exhaustive none-oracle") {
  for (long long m = 2; m <= 200; ++m)
    for (long long p = 2; p <= 200; ++p) {
      const auto ab = modelcount::common_base(m, p);
      const auto ba = modelcount::common_base(p, m);
      CHECK(ab.has_value() == ba.has_value());
      if (ab) {
        CHECK(ipow(ab->root, ab->i) == m);
        CHECK(ipow(ab->root, ab->j) == p);
        CHECK(!is_proper_power(ab->root));
        CHECK(ba->root == ab->root);
        CHECK(ba->i == ab->j);
        CHECK(ba->j == ab->i);
      } else {
        // Exhaustive witness: no r^i = m, r^j = p with any shared r up to m, p.
        for (long long r = 2; r <= std::min(m, p); ++r) {
          bool divides_m = false, divides_p = false;
          for (Int acc = r; acc <= m; acc *= r)
            if (acc == m) divides_m = true;
          for (Int acc = r; acc <= p; acc *= r)
            if (acc == p) divides_p = true;
          CHECK(!(divides_m && divides_p));
        }
      }
    }

  for (long long m = 2; m <= 64; ++m) {
    const auto self = modelcount::common_base(m, m);
    REQUIRE(self.has_value());
    CHECK(self->i == self->j);
    CHECK(ipow(self->root, self->i) == m);
  }
}

TEST_CASE("admissible exponents form an initial segment of the integers") {
  CHECK(modelcount::admissible_exponents(2, 3) == std::vector<long long>{1, 2, 3});
  CHECK(modelcount::admissible_exponents(6, 2) == std::vector<long long>{1, 2});
  CHECK(modelcount::admissible_exponents(2, 0).empty());
  CHECK(modelcount::admissible_exponents(10, -3).empty());

  CHECK_THROWS_AS(modelcount::admissible_exponents(4, 3), modelcount::ProperPowerBase);
  CHECK_THROWS_AS(modelcount::admissible_exponents(9, 1), modelcount::ProperPowerBase);
  CHECK_THROWS_AS(modelcount::admissible_exponents(27, 2), modelcount::ProperPowerBase);
  CHECK_THROWS_AS(modelcount::admissible_exponents(64, 2), modelcount::ProperPowerBase);
  CHECK_THROWS_AS(modelcount::admissible_exponents(1, 2), std::invalid_argument);

  for (long long d = 2; d <= 50; ++d) {
    if (is_proper_power(d)) {
      CHECK_THROWS_AS(modelcount::admissible_exponents(d, 5), modelcount::ProperPowerBase);
      continue;
    }
    const auto ks = modelcount::admissible_exponents(d, 7);
    REQUIRE(ks.size() == 7);
    for (std::size_t idx = 0; idx < ks.size(); ++idx)
      CHECK(ks[idx] == static_cast<long long>(idx) + 1);

    // Root-extraction oracle: a reduced fractional exponent i/j with j > 1
    // never lands on an integer, so integers are the whole answer.
    for (unsigned j = 2; j <= 4; ++j)
      for (long long i = 1; i <= 7; ++i) {
        if (std::gcd(i, static_cast<long long>(j)) != 1) continue;
        Int root;
        CHECK(!exact_root(ipow(d, static_cast<std::uint64_t>(i)), j, root));
      }
  }

  // The contrast making the precondition necessary: 4^{1/2} is an integer.
  Int r;
  CHECK(exact_root(4, 2, r));
  CHECK(r == 2);
}

TEST_CASE("index identity: pinned decisions and the exhaustive oracle") {
  CHECK(modelcount::index_identity_check({4, 4, 2, 2}) == IndexIdentity::Consistent);
  CHECK(modelcount::index_identity_check({1, 1, 1, 1}) == IndexIdentity::Consistent);
  CHECK(modelcount::index_identity_check({4, 8, 2, 2}) == IndexIdentity::Inconsistent);
  CHECK(modelcount::index_identity_check({5, 4, 2, 2}) == IndexIdentity::Inconsistent);

  GraphOfGroupsDatum bad;
  bad.d = 0;
  CHECK_THROWS_AS(modelcount::index_identity_check(bad), std::invalid_argument);
  bad.d = 2;
  bad.g = -1;
  CHECK_THROWS_AS(modelcount::index_identity_check(bad), std::invalid_argument);

  for (int d = 1; d <= 6; ++d)
    for (int e = 1; e <= 6; ++e)
      for (int f = 1; f <= 6; ++f)
        for (int g = 1; g <= 6; ++g) {
          const bool expect = (d == f * g) && (e == f * g);
          CHECK((modelcount::index_identity_check({d, e, f, g}) ==
                 IndexIdentity::Consistent) == expect);
        }
}
