#include "doctest.h"
#include "solvlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

using namespace solvlab;
using namespace solvlab::spectral;

namespace {

IMat mat22(long long a, long long b, long long c, long long d) {
  IMat m(2, 2);
  m(0, 0) = a; m(0, 1) = b; m(1, 0) = c; m(1, 1) = d;
  return m;
}

IMat mat11(long long a) {
  IMat m(1, 1);
  m(0, 0) = a;
  return m;
}

double reconstruction_error(const SpectralSplit& s) {
  Eigen::MatrixXd md(s.n, s.n);
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) md(i, j) = to_double(s.M(i, j));
  return (s.S * s.Mbar.asDiagonal() * s.P * s.Sinv - md).cwiseAbs().maxCoeff();
}

std::vector<double> sorted_lambdas(const DiagBlock& b) {
  auto v = b.lambdas;
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("analyze [[2]]") {
  auto s = analyze(mat11(2));
  CHECK(s.Mbar.size() == 1);
  CHECK(s.Mbar(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.Mbar1.lambdas == std::vector<double>{2.0});
  CHECK(s.Mbar2.empty());
  CHECK(s.d == 2);
  CHECK(s.exact);
  CHECK(classify(s) == CaseLabel::ScalarTree);
  CHECK(reconstruction_error(s) <= 1e-9);
}

TEST_CASE("analyze [[2,1],[1,1]] against quadratic-formula oracle") {
  // Characteristic polynomial: l^2 - 3l + 1; roots (3 +- sqrt(5)) / 2.
  const double r_plus = (3.0 + std::sqrt(5.0)) / 2.0;
  const double r_minus = (3.0 - std::sqrt(5.0)) / 2.0;
  auto s = analyze(mat22(2, 1, 1, 1));
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(s.eigenvalues[0].real() == doctest::Approx(r_plus).epsilon(1e-12));
  CHECK(s.eigenvalues[0].imag() == doctest::Approx(0.0));
  CHECK(s.eigenvalues[1].real() == doctest::Approx(r_minus).epsilon(1e-12));
  CHECK(s.d == 1);
  REQUIRE(s.Mbar1.dim() == 1);
  REQUIRE(s.Mbar2.dim() == 1);
  CHECK(s.Mbar1.lambdas[0] == doctest::Approx(r_plus).epsilon(1e-12));
  // Reciprocal of the contracting modulus: 1/r_minus = r_plus (det 1).
  CHECK(s.Mbar2.lambdas[0] == doctest::Approx(r_plus).epsilon(1e-12));
  CHECK(!s.exact);
  CHECK(classify(s) == CaseLabel::SolLike);
  CHECK(reconstruction_error(s) <= 1e-9);
  CHECK((s.P * s.P.transpose() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("analyze [[2,0],[0,3]]") {
  auto s = analyze(mat22(2, 0, 0, 3));
  CHECK(s.d == 6);
  CHECK(s.exact);
  CHECK(sorted_lambdas(s.Mbar1) == std::vector<double>{2.0, 3.0});
  CHECK(s.Mbar2.empty());
  CHECK(classify(s) == CaseLabel::Expanding);
  CHECK(reconstruction_error(s) == 0.0);  // exact rational route
  // Sorted by modulus descending.
  CHECK(s.Mbar(0) == 3.0);
  CHECK(s.Mbar(1) == 2.0);
}

TEST_CASE("analyze negative and complex spectra") {
  auto neg = analyze(mat11(-2));
  CHECK(neg.Mbar(0) == 2.0);
  CHECK(neg.P(0, 0) == -1.0);
  CHECK(neg.d == 2);
  CHECK(reconstruction_error(neg) == 0.0);

  // [[1,-2],[2,1]] has eigenvalues 1 +- 2i, modulus sqrt(5), det 5.
  auto cx = analyze(mat22(1, -2, 2, 1));
  CHECK(cx.d == 5);
  CHECK(!cx.exact);
  CHECK(std::abs(cx.eigenvalues[0]) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(cx.n1 == 2);
  CHECK(cx.n2 == 0);
  CHECK(classify(cx) == CaseLabel::Expanding);
  CHECK(reconstruction_error(cx) <= 1e-9);
  CHECK((cx.P * cx.P.transpose() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("analyze rejections") {
  CHECK_THROWS_AS(analyze(mat22(1, 1, 0, 1)), EigenvalueOnUnitCircle);   // eigenvalue 1
  CHECK_THROWS_AS(analyze(mat22(0, 1, -1, 0)), EigenvalueOnUnitCircle);  // eigenvalues +-i
  CHECK_THROWS_AS(analyze(mat22(2, 1, 0, 2)), NotDiagonalizable);
  CHECK_THROWS_AS(analyze(mat22(1, 2, 2, 4)), SingularMatrix);
  CHECK_THROWS_AS(analyze(mat11(1)), EigenvalueOnUnitCircle);
}

TEST_CASE("classify invariances") {
  auto base = mat22(2, 1, 1, 1);
  auto s = analyze(base);
  IMat t(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t(i, j) = base(j, i);
  CHECK(classify(analyze(t)) == classify(s));

  // Conjugate by the unimodular matrix [[1,1],[0,1]].
  IMat u = mat22(1, 1, 0, 1), uinv = mat22(1, -1, 0, 1);
  IMat conj = mat_mul(mat_mul(u, base), uinv);
  CHECK(classify(analyze(conj)) == classify(s));
  CHECK(analyze(conj).d == s.d);

  // d = 1 never classifies as Expanding or Mixed.
  for (const auto& m : {mat22(2, 1, 1, 1), mat22(3, 1, 2, 1)}) {
    auto sp = analyze(m);
    if (sp.d == 1) {
      auto c = classify(sp);
      CHECK(c != CaseLabel::Expanding);
      CHECK(c != CaseLabel::Mixed);
    }
  }
}

TEST_CASE("absolute_power") {
  auto s4 = analyze(mat11(4));
  auto p = absolute_power(s4, Rat(1, 2));
  CHECK(p.dk == 2);
  CHECK(p.Mbar_k(0) == doctest::Approx(2.0).epsilon(1e-12));

  auto s2 = analyze(mat11(2));
  auto ident = absolute_power(s2, Rat(1));
  CHECK(ident.dk == 2);
  CHECK(ident.Mbar_k(0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(absolute_power(s2, Rat(1, 2)), NonIntegralDeterminantPower);

  // Composition: the (k1+k2)-power is the entrywise product of the two
  // individual powers, within 1e-12.
  auto s6 = analyze(mat22(2, 0, 0, 3));
  Rat k1(2), k2(3);
  auto once = absolute_power(s6, k1 + k2);
  auto p1 = absolute_power(s6, k1);
  auto p2 = absolute_power(s6, k2);
  for (int i = 0; i < 2; ++i)
    CHECK(once.Mbar_k(i) ==
          doctest::Approx(p1.Mbar_k(i) * p2.Mbar_k(i)).epsilon(1e-12));
  CHECK(once.dk == p1.dk * p2.dk);

  // SolLike split: d = 1 admits every rational power.
  auto s1 = analyze(mat22(2, 1, 1, 1));
  CHECK(absolute_power(s1, Rat(-7, 3)).dk == 1);
}

TEST_CASE("snowflake_exponents") {
  auto b24 = DiagBlock::from_lambdas({2.0, 4.0});
  auto r = snowflake_exponents(b24);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == 1.0);
  CHECK(r[1] == doctest::Approx(std::log(2.0) / std::log(4.0)).epsilon(1e-12));

  CHECK(snowflake_exponents(DiagBlock::from_lambdas({3.0})) == std::vector<double>{1.0});

  auto b228 = DiagBlock::from_lambdas({2.0, 2.0, 8.0});
  auto r3 = snowflake_exponents(b228);
  REQUIRE(r3.size() == 2);  // repeated 2 merges into one alpha class
  CHECK(r3[0] == 1.0);
  CHECK(r3[1] == doctest::Approx(std::log(2.0) / std::log(8.0)).epsilon(1e-12));

  auto s = analyze(mat22(2, 1, 1, 1));
  CHECK(snowflake_exponents(s, BlockSide::Expanding1) == std::vector<double>{1.0});
  CHECK(snowflake_exponents(s, BlockSide::Expanding2) == std::vector<double>{1.0});
  auto e = analyze(mat22(2, 0, 0, 3));
  CHECK_THROWS_AS(snowflake_exponents(e, BlockSide::Expanding2), EmptyBlock);
}

TEST_CASE("parse_int_matrix") {
  auto m = parse_int_matrix("[[2,1],[1,1]]");
  CHECK(m.rows == 2);
  CHECK(m(0, 0) == 2);
  CHECK(m(1, 1) == 1);
  auto one = parse_int_matrix("[[3]]");
  CHECK(one.rows == 1);
  CHECK(one(0, 0) == 3);
  auto flat = parse_int_matrix("[-2]");
  CHECK(flat(0, 0) == -2);
  CHECK_THROWS(parse_int_matrix("[[1,2],[3]]"));
}
