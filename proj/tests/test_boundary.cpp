#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "solvlab/boundary.hpp"
#include "solvlab/horoprod.hpp"
#include "solvlab/madic.hpp"
#include "solvlab/spaces.hpp"
#include "solvlab/spectral.hpp"
#include "solvlab/tree.hpp"

using namespace solvlab;
using boundary::BlockVector;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Eigen::VectorXd random_vec(std::mt19937_64& rng, int dim, double span) {
  std::uniform_real_distribution<double> U(-span, span);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = U(rng);
  return v;
}

// Independent evaluation of the powered-max metric from flat vectors, using
// the per-class norm helper instead of BlockVector grouping.
double dm_oracle(const spectral::DiagBlock& block, const Eigen::VectorXd& v,
                 const Eigen::VectorXd& w) {
  std::vector<double> norms = spaces::block_norms(block, v - w);
  double best = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i)
    best = std::max(best, std::pow(norms[i], block.alphas[0] / block.alphas[i]));
  return best;
}

double dm_flat(const spectral::DiagBlock& block, const Eigen::VectorXd& v,
               const Eigen::VectorXd& w) {
  return boundary::dM_metric(BlockVector::from_flat(block, v), BlockVector::from_flat(block, w),
                             block);
}

tree::TreeVertex random_vertex(std::mt19937_64& rng, int m) {
  std::uniform_int_distribution<int> H(-6, 3);
  std::uniform_int_distribution<int> L(0, 6);
  std::uniform_int_distribution<int> D(0, m - 1);
  int h = H(rng);
  int len = L(rng);
  std::vector<std::uint8_t> addr(static_cast<std::size_t>(len));
  for (auto& d : addr) d = static_cast<std::uint8_t>(D(rng));
  return tree::TreeVertex(m, h, addr);
}

}  // namespace

TEST_CASE("block vectors group coordinates by expansion class") {
  auto block = spectral::DiagBlock::from_lambdas({2.0, 2.0, 8.0});
  auto bv = BlockVector::from_flat(block, vec({3, 4, 5}));
  REQUIRE(bv.levels() == 2);
  CHECK(bv.blocks[0].isApprox(vec({3, 4})));
  CHECK(bv.blocks[1].isApprox(vec({5})));
  CHECK(bv.flat().isApprox(vec({3, 4, 5})));

  // Interleaved classes regroup; the flat form is class-ordered.
  auto inter = spectral::DiagBlock::from_lambdas({2.0, 8.0, 2.0});
  auto bi = BlockVector::from_flat(inter, vec({1, 2, 3}));
  REQUIRE(bi.levels() == 2);
  CHECK(bi.blocks[0].isApprox(vec({1, 3})));
  CHECK(bi.blocks[1].isApprox(vec({2})));
  CHECK(bi.flat().isApprox(vec({1, 3, 2})));

  CHECK_THROWS_AS(BlockVector::from_flat(block, vec({1, 2})), boundary::BlockMismatch);
}

TEST_CASE("powered-max metric: worked values") {
  auto block = spectral::DiagBlock::from_lambdas({2.0, 4.0});
  CHECK(dm_flat(block, vec({1, 7}), vec({1, 7})) == 0.0);
  CHECK(dm_flat(block, vec({0, 4}), vec({0, 0})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(dm_flat(block, vec({3, 1}), vec({0, 0})) == doctest::Approx(3.0).epsilon(1e-12));

  // Shape mismatches are rejected.
  BlockVector lopsided;
  lopsided.blocks = {vec({1, 2})};
  CHECK_THROWS_AS(boundary::dM_metric(lopsided, lopsided, block), boundary::BlockMismatch);
  BlockVector wrongdim;
  wrongdim.blocks = {vec({1, 2}), vec({3})};
  auto good = BlockVector::from_flat(block, vec({0, 0}));
  CHECK_THROWS_AS(boundary::dM_metric(wrongdim, good, block), boundary::BlockMismatch);
}

TEST_CASE("powered-max metric: symmetry, identity, triangle inequality per split") {
  std::vector<std::string> mats = {"[[2,0],[0,3]]", "[[2,1],[1,1]]", "[[3]]"};
  std::mt19937_64 rng(20260826);
  for (const auto& rows : mats) {
    auto split = spectral::analyze(spectral::parse_int_matrix(rows));
    const auto& block = split.Mbar1;
    REQUIRE(!block.empty());
    int dim = block.dim();
    for (int trial = 0; trial < 10000; ++trial) {
      auto x = BlockVector::from_flat(block, random_vec(rng, dim, 5.0));
      auto y = BlockVector::from_flat(block, random_vec(rng, dim, 5.0));
      auto z = BlockVector::from_flat(block, random_vec(rng, dim, 5.0));
      double dxy = boundary::dM_metric(x, y, split, spectral::BlockSide::Expanding1);
      double dyx = boundary::dM_metric(y, x, split, spectral::BlockSide::Expanding1);
      double dyz = boundary::dM_metric(y, z, block);
      double dxz = boundary::dM_metric(x, z, block);
      REQUIRE(dxy == dyx);
      REQUIRE(dxy >= 0.0);
      REQUIRE(dxz <= dxy + dyz + 1e-9);
      REQUIRE(boundary::dM_metric(x, x, block) == 0.0);
    }
  }
  // A side with no coordinates has no metric.
  auto expanding_only = spectral::analyze(spectral::parse_int_matrix("[[2,0],[0,3]]"));
  auto x0 = BlockVector::from_flat(expanding_only.Mbar1, vec({1, 2}));
  CHECK_THROWS_AS(boundary::dM_metric(x0, x0, expanding_only, spectral::BlockSide::Expanding2),
                  spectral::EmptyBlock);
}

TEST_CASE("powered-max metric agrees with the per-class norm oracle") {
  std::mt19937_64 rng(7);
  std::vector<spectral::DiagBlock> blocks = {
      spectral::DiagBlock::from_lambdas({2.0}),
      spectral::DiagBlock::from_lambdas({2.0, 4.0}),
      spectral::DiagBlock::from_lambdas({2.0, 2.0, 8.0}),
      spectral::DiagBlock::from_lambdas({1.5, 3.0, 3.0, 9.0}),
  };
  for (const auto& block : blocks) {
    for (int trial = 0; trial < 500; ++trial) {
      auto v = random_vec(rng, block.dim(), 10.0);
      auto w = random_vec(rng, block.dim(), 10.0);
      REQUIRE(dm_flat(block, v, w) == doctest::Approx(dm_oracle(block, v, w)).epsilon(1e-12));
    }
  }
}

TEST_CASE("powered scalar blocks snowflake the visual metric") {
  // For a scalar block, raising the block to the k-th power divides every
  // divergence height by k, so the visual metric at the base block's own
  // base a = lambda becomes the 1/k-th power of the powered-max metric.
  std::mt19937_64 rng(11);
  const double lam = 2.0;
  auto base1 = spectral::DiagBlock::from_lambdas({lam});
  auto base2 = spectral::DiagBlock::from_lambdas({lam, lam});
  for (long long k : {2LL, 3LL}) {
    auto pow1 = spectral::DiagBlock::from_lambdas({std::pow(lam, double(k))});
    auto pow2 =
        spectral::DiagBlock::from_lambdas({std::pow(lam, double(k)), std::pow(lam, double(k))});
    double ratio1 = base1.alphas[0] / pow1.alphas[0];
    REQUIRE(ratio1 == doctest::Approx(1.0 / double(k)).epsilon(1e-12));
    for (int trial = 0; trial < 1000; ++trial) {
      const auto& base = trial % 2 == 0 ? base1 : base2;
      const auto& powered = trial % 2 == 0 ? pow1 : pow2;
      auto v = random_vec(rng, base.dim(), 8.0);
      auto w = random_vec(rng, base.dim(), 8.0);
      if ((v - w).norm() < 1e-6) continue;
      double plain = boundary::dM_metric(BlockVector::from_flat(base, v),
                                         BlockVector::from_flat(base, w), base);
      double via_power = boundary::visual_metric(spaces::GRay{v}, spaces::GRay{w}, powered, lam,
                                                 /*eps=*/1.0);
      double ratio = base.alphas[0] / powered.alphas[0];
      REQUIRE(via_power == doctest::Approx(std::pow(plain, ratio)).epsilon(1e-9));
      // Under the normalized max formula itself, powering the block changes
      // nothing: the exponent ratios are power-invariant.
      REQUIRE(dm_flat(powered, v, w) == doctest::Approx(plain).epsilon(1e-12));
    }
  }
}

TEST_CASE("product boundary metric takes the larger factor") {
  auto block = spectral::DiagBlock::from_lambdas({2.0, 4.0});
  auto bx = [&](double a, double b) { return BlockVector::from_flat(block, vec({a, b})); };
  madic::MAdic y0 = madic::MAdic::zero(2);
  madic::MAdic y1 = madic::MAdic::from_integer(2, 1);    // distance 1 from 0
  madic::MAdic y4 = madic::MAdic::from_integer(2, 4);    // distance 1/4 from 0

  boundary::ProductBoundaryPoint p{bx(0, 4), y4};
  boundary::ProductBoundaryPoint q{bx(0, 0), y0};
  CHECK(boundary::product_metric(p, q, block) == doctest::Approx(2.0));  // 2 vs 1/4

  boundary::ProductBoundaryPoint r{bx(1, 1), y1};
  boundary::ProductBoundaryPoint s{bx(1, 1), y0};
  CHECK(boundary::product_metric(r, s, block) == doctest::Approx(1.0));  // x equal

  CHECK(boundary::product_metric(p, p, block) == 0.0);

  // Factor errors surface unchanged.
  boundary::ProductBoundaryPoint t{bx(0, 0), madic::MAdic::zero(3)};
  CHECK_THROWS_AS(boundary::product_metric(t, q, block), std::invalid_argument);
}

TEST_CASE("divergence height solves the scaled-norm equation") {
  auto block = spectral::DiagBlock::from_lambdas({2.0, 4.0});
  // ||diag(2,4)^{-t} (0,4)|| = 1  at  t = 1.
  CHECK(boundary::g_divergence_height(vec({0, 4}), block, 1.0) == doctest::Approx(1.0));
  // Scalar case: t = log2 |dv|.
  auto scalar = spectral::DiagBlock::from_lambdas({2.0});
  CHECK(boundary::g_divergence_height(vec({8}), scalar, 1.0) == doctest::Approx(3.0));
  CHECK(boundary::g_divergence_height(vec({0.25}), scalar, 1.0) == doctest::Approx(-2.0));

  // Residual oracle on random inputs: the returned height reproduces eps and
  // the scaled norm straddles eps around it.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> E(0.1, 4.0);
  std::vector<spectral::DiagBlock> blocks = {
      scalar, block, spectral::DiagBlock::from_lambdas({1.5, 3.0, 9.0})};
  for (const auto& b : blocks) {
    for (int trial = 0; trial < 500; ++trial) {
      Eigen::VectorXd dv = random_vec(rng, b.dim(), 10.0);
      if (dv.norm() < 1e-6) continue;
      double eps = E(rng);
      double t0 = boundary::g_divergence_height(dv, b, eps);
      auto scaled = [&](double t) {
        double acc = 0;
        for (int i = 0; i < dv.size(); ++i) {
          double x = std::pow(b.lambdas[static_cast<std::size_t>(i)], -t) * dv(i);
          acc += x * x;
        }
        return std::sqrt(acc);
      };
      REQUIRE(scaled(t0) == doctest::Approx(eps).epsilon(1e-9));
      REQUIRE(scaled(t0 - 0.1) > eps);
      REQUIRE(scaled(t0 + 0.1) < eps);
    }
  }

  CHECK_THROWS_AS(boundary::g_divergence_height(vec({1, 0}), block, 0.0),
                  boundary::NotComparable);
  CHECK_THROWS_AS(boundary::g_divergence_height(vec({0, 0}), block, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(boundary::g_divergence_height(vec({1}), block, 1.0), boundary::BlockMismatch);
}

TEST_CASE("visual metric on trees: worked values and line identification") {
  // Same line, different representatives -> 0.
  tree::TreeVertex deep(2, -3, {0, 0, 1});
  tree::TreeVertex high(2, -1, {1});
  CHECK(boundary::visual_metric(deep, high, 2.0, 0.0) == 0.0);
  CHECK(boundary::visual_metric(high, high, 2.0, 0.0) == 0.0);

  // Lines differing first at edge index 2 with a=2: 2^2 = 4.
  tree::TreeVertex u(2, 0, {0, 1});   // digit 1 at index 2
  tree::TreeVertex v(2, 0, {});       // anchor line: all zeros
  CHECK(boundary::visual_metric(u, v, 2.0, 0.0) == doctest::Approx(4.0));

  // Larger eps lowers the meeting height: vertices 2(e - t) apart.
  CHECK(boundary::visual_metric(u, v, 2.0, 2.0) == doctest::Approx(2.0));
  CHECK(boundary::visual_metric(u, v, 2.0, 4.0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(boundary::visual_metric(u, tree::TreeVertex(3, 0, {}), 2.0, 0.0),
                  tree::BranchingMismatch);
  CHECK_THROWS_AS(boundary::visual_metric(u, v, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(boundary::visual_metric(u, v, 2.0, -1.0), std::invalid_argument);
}

TEST_CASE("tree visual metric at (a=m, eps=0) is the digit metric") {
  std::mt19937_64 rng(31);
  for (int m : {2, 3, 5}) {
    for (int trial = 0; trial < 1000; ++trial) {
      auto u = random_vertex(rng, m);
      auto v = random_vertex(rng, m);
      double visual = boundary::visual_metric(u, v, double(m), 0.0);
      double digit = madic::madic_dist(horoprod::vertex_to_madic(u), horoprod::vertex_to_madic(v));
      REQUIRE(visual == digit);
    }
  }
}

TEST_CASE("visual metric on continuous rays") {
  auto scalar = spectral::DiagBlock::from_lambdas({2.0});
  // eps = 1, a = 2: the metric is |dv| itself.
  CHECK(boundary::visual_metric(spaces::GRay{vec({5})}, spaces::GRay{vec({0})}, scalar, 2.0,
                                1.0) == doctest::Approx(5.0));
  CHECK(boundary::visual_metric(spaces::GRay{vec({3})}, spaces::GRay{vec({3})}, scalar, 2.0,
                                1.0) == 0.0);
  // Distinct rays never meet exactly.
  CHECK_THROWS_AS(boundary::visual_metric(spaces::GRay{vec({1})}, spaces::GRay{vec({0})}, scalar,
                                          2.0, 0.0),
                  boundary::NotComparable);

  // Mixed rays take the later (larger) meeting height of the two parts.
  tree::TreeVertex off(2, -1, {1});  // line digit 1 at index 0
  tree::TreeVertex anchor(2, 0, {});
  spaces::ZRay zu{off, vec({3})};
  spaces::ZRay zv{anchor, vec({0})};
  // Tree part meets at height 0; the continuous part at log2(3) > 0.
  CHECK(boundary::visual_metric(zu, zv, scalar, 2.0, 1.0) == doctest::Approx(3.0));
  // With a small continuous difference the tree part dominates.
  spaces::ZRay zw{off, vec({0.25})};
  CHECK(boundary::visual_metric(zw, zv, scalar, 2.0, 1.0) == doctest::Approx(1.0));
  // Same line and equal vectors -> 0.
  spaces::ZRay zdeep{tree::TreeVertex(2, -3, {0, 0, 1}), vec({3})};
  CHECK(boundary::visual_metric(zdeep, zu, scalar, 2.0, 1.0) == 0.0);
}

TEST_CASE("boundary classes of vertical geodesics") {
  // Base geodesic of each model: zero data on both sides.
  auto sol = horoprod::ModelSpace::sol();
  auto psol = horoprod::make_point(sol, spaces::GPoint(0.0, vec({0})), spaces::GPoint(0.0, vec({0})));
  auto lsol = boundary::vertical_ray_through(sol, psol);
  auto s1 = boundary::horo_boundary_class(lsol, 1);
  auto s2 = boundary::horo_boundary_class(lsol, 2);
  CHECK(std::get<spaces::GRay>(s1).v.isApprox(vec({0})));
  CHECK(std::get<spaces::GRay>(s2).v.isApprox(vec({0})));

  auto dl = horoprod::ModelSpace::dl(3, 3);
  auto pdl = horoprod::make_point(dl, tree::TreeVertex(3, 0, {}), tree::TreeVertex(3, 0, {}));
  auto ldl = boundary::vertical_ray_through(dl, pdl);
  CHECK(std::get<tree::TreeVertex>(boundary::horo_boundary_class(ldl, 1)) ==
        tree::TreeVertex(3, 0, {}));
  CHECK_THROWS_AS(boundary::horo_boundary_class(ldl, 3), std::invalid_argument);

  // Two geodesics agreeing in the first factor share the side-1 class, even
  // through different representatives of the same line.
  auto q1 = horoprod::make_point(dl, tree::TreeVertex(3, -3, {0, 0, 1}),
                                 tree::TreeVertex(3, 3, {1, 2}));
  auto q2 = horoprod::make_point(dl, tree::TreeVertex(3, -1, {1}), tree::TreeVertex(3, 1, {}));
  auto c1 = boundary::horo_boundary_class(boundary::vertical_ray_through(dl, q1), 1);
  auto c2 = boundary::horo_boundary_class(boundary::vertical_ray_through(dl, q2), 1);
  CHECK(std::get<tree::TreeVertex>(c1) == std::get<tree::TreeVertex>(c2));
  auto d1 = boundary::horo_boundary_class(boundary::vertical_ray_through(dl, q1), 2);
  auto d2 = boundary::horo_boundary_class(boundary::vertical_ray_through(dl, q2), 2);
  CHECK_FALSE(std::get<tree::TreeVertex>(d1) == std::get<tree::TreeVertex>(d2));
}

TEST_CASE("matrix model classes split into expanding and product data") {
  auto space =
      horoprod::ModelSpace::xmbar(spectral::analyze(spectral::parse_int_matrix("[[3,1],[1,1]]")));
  const auto& split = *space.split;
  REQUIRE(split.n1 == 1);
  REQUIRE(split.n2 == 1);
  REQUIRE(split.d == 2);

  horoprod::XMbarCoords c;
  c.v = vec({1.5, -0.75});
  c.t = 0.0;
  c.y = madic::MAdic(2, -2, {1, 1});  // digits at positions -2, -1
  auto p = horoprod::make_point(space, c);
  auto l = boundary::vertical_ray_through(space, p);

  auto side1 = boundary::horo_boundary_class(l, 1);
  CHECK(std::get<spaces::GRay>(side1).v.isApprox(vec({1.5})));

  auto side2 = boundary::horo_boundary_class(l, 2);
  auto zr = std::get<spaces::ZRay>(side2);
  auto pb = boundary::to_product_boundary(zr, split.Mbar2);
  REQUIRE(pb.x.levels() == 1);
  CHECK(pb.x.blocks[0].isApprox(vec({-0.75})));
  CHECK(pb.y == c.y);
  CHECK(madic::madic_dist(pb.y, c.y) == 0.0);
}
