#include "doctest.h"
#include "graph_oracle.hpp"
#include "solvlab/horoprod.hpp"

#include <cstdlib>
#include <random>
#include <vector>

using namespace solvlab;
using namespace solvlab::horoprod;
using solvlab::spaces::GPoint;
using solvlab::spaces::ZPoint;
using solvlab::tree::TreeVertex;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

struct DLNode {
  TreeVertex a, b;
};

std::string dl_key(const DLNode& p) { return p.a.key() + "|" + p.b.key(); }

std::vector<DLNode> dl_neighbors_of(const DLNode& p, int n, int m) {
  std::vector<DLNode> out;
  for (int j = 0; j < m; ++j) out.push_back({p.a.parent(), p.b.child(j)});
  for (int j = 0; j < n; ++j) out.push_back({p.a.child(j), p.b.parent()});
  return out;
}

HPoint mk(const ModelSpace& s, const DLNode& p) { return make_point(s, p.a, p.b); }

bool same_g(const GPoint& a, const GPoint& b) {
  return a.t == b.t && a.v.size() == b.v.size() && (a.v - b.v).norm() == 0.0;
}

bool same_hpoint(const HPoint& p, const HPoint& q) {
  if (p.x1.index() != q.x1.index() || p.x2.index() != q.x2.index()) return false;
  auto cmp = [](const FactorPoint& x, const FactorPoint& y) {
    if (const auto* g = std::get_if<GPoint>(&x)) return same_g(*g, std::get<GPoint>(y));
    if (const auto* t = std::get_if<TreeVertex>(&x)) return *t == std::get<TreeVertex>(y);
    const auto& zx = std::get<ZPoint>(x);
    const auto& zy = std::get<ZPoint>(y);
    return zx.tv == zy.tv && (zx.v - zy.v).norm() == 0.0;
  };
  return cmp(p.x1, q.x1) && cmp(p.x2, q.x2);
}

}  // namespace

TEST_CASE("make_point validates shapes and heights") {
  ModelSpace sol = ModelSpace::sol();
  CHECK_NOTHROW(make_point(sol, GPoint(0, vec1(0)), GPoint(0, vec1(0))));
  CHECK_NOTHROW(make_point(sol, GPoint(2.5, vec1(1)), GPoint(-2.5, vec1(-3))));
  CHECK_THROWS_AS(make_point(sol, GPoint(0.3, vec1(0)), GPoint(-0.2, vec1(0))),
                  HeightConstraintViolated);
  CHECK_THROWS_AS(make_point(sol, TreeVertex(2, 0, {}), GPoint(0, vec1(0))),
                  MalformedCoordinates);
  Eigen::VectorXd two(2);
  two << 0, 0;
  CHECK_THROWS_AS(make_point(sol, GPoint(0, two), GPoint(0, vec1(0))), MalformedCoordinates);

  ModelSpace dl22 = ModelSpace::dl(2, 2);
  CHECK_NOTHROW(make_point(dl22, TreeVertex(2, 3, {}), TreeVertex(2, -3, {1, 1})));
  CHECK_THROWS_AS(make_point(dl22, TreeVertex(2, 3, {}), TreeVertex(2, -2, {})),
                  HeightConstraintViolated);
  CHECK_THROWS_AS(make_point(dl22, TreeVertex(3, 3, {}), TreeVertex(2, -3, {})),
                  MalformedCoordinates);

  ModelSpace x2 = ModelSpace::xn(2);
  CHECK_NOTHROW(make_point(x2, GPoint(2.0, vec1(0)), TreeVertex(2, -2, {})));
  CHECK_THROWS_AS(make_point(x2, GPoint(0.5, vec1(0)), TreeVertex(2, 0, {})),
                  HeightConstraintViolated);
  CHECK(height(make_point(x2, GPoint(2.0, vec1(7)), TreeVertex(2, -2, {}))) == 2.0);
}

TEST_CASE("dl_distance matches a plain breadth-first oracle") {
  ModelSpace s = ModelSpace::dl(2, 2);
  DLNode base{TreeVertex(2, 0, {}), TreeVertex(2, 0, {})};
  auto nbrs = [&](const DLNode& p) { return dl_neighbors_of(p, 2, 2); };

  CHECK(dl_distance(s, mk(s, base), mk(s, base)) == 0);
  DLNode adj{TreeVertex(2, 1, {}), TreeVertex(2, -1, {})};
  CHECK(dl_distance(s, mk(s, base), mk(s, adj)) == 1);
  // Same first coordinate; second coordinates merge two levels up.
  DLNode sib{TreeVertex(2, 0, {}), TreeVertex(2, 0, {0, 1})};
  CHECK(dl_distance(s, mk(s, base), mk(s, sib)) == 4);

  auto ball = testutil::bfs_ball(base, 6, nbrs, dl_key);
  std::mt19937_64 rng(313);
  std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
  for (int trial = 0; trial < 150; ++trial) {
    const DLNode& w = ball[pick(rng)];
    long long oracle = testutil::bfs_distance(base, w, nbrs, dl_key);
    CHECK(dl_distance(s, mk(s, base), mk(s, w)) == oracle);
  }
  // Off-base pairs too (both endpoints random, drawn from a smaller ball so
  // the plain one-sided oracle stays cheap).
  auto small_ball = testutil::bfs_ball(base, 5, nbrs, dl_key);
  std::uniform_int_distribution<std::size_t> pick_small(0, small_ball.size() - 1);
  for (int trial = 0; trial < 40; ++trial) {
    const DLNode& u = small_ball[pick_small(rng)];
    const DLNode& w = small_ball[pick_small(rng)];
    long long oracle = testutil::bfs_distance(u, w, nbrs, dl_key);
    CHECK(dl_distance(s, mk(s, u), mk(s, w)) == oracle);
  }
}

TEST_CASE("dl_distance is a metric on small balls") {
  for (int m2 : {2, 3}) {
    ModelSpace s = ModelSpace::dl(2, m2);
    DLNode base{TreeVertex(2, 0, {}), TreeVertex(m2, 0, {})};
    auto nbrs = [&](const DLNode& p) { return dl_neighbors_of(p, 2, m2); };
    auto ball = testutil::bfs_ball(base, 3, nbrs, dl_key);
    const std::size_t N = ball.size();
    std::vector<std::vector<int>> d(N, std::vector<int>(N, 0));
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) {
        long long dij = dl_distance(s, mk(s, ball[i]), mk(s, ball[j]));
        long long dji = dl_distance(s, mk(s, ball[j]), mk(s, ball[i]));
        CHECK(dij == dji);
        CHECK(dij >= 1);
        d[i][j] = d[j][i] = static_cast<int>(dij);
      }
    long long worst = 0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < N; ++k)
          worst = std::max<long long>(worst, d[i][k] - d[i][j] - d[j][k]);
    CHECK(worst <= 0);
  }
  // Deeper random triples keep the triangle inequality.
  ModelSpace s = ModelSpace::dl(2, 2);
  std::mt19937_64 rng(6161);
  auto random_node = [&](int steps) {
    DLNode p{TreeVertex(2, 0, {}), TreeVertex(2, 0, {})};
    for (int i = 0; i < steps; ++i) {
      auto nb = dl_neighbors_of(p, 2, 2);
      p = nb[rng() % nb.size()];
    }
    return p;
  };
  for (int trial = 0; trial < 20; ++trial) {
    DLNode x = random_node(8), y = random_node(8), z = random_node(8);
    long long dxz = dl_distance(s, mk(s, x), mk(s, z), 40);
    long long dxy = dl_distance(s, mk(s, x), mk(s, y), 40);
    long long dyz = dl_distance(s, mk(s, y), mk(s, z), 40);
    CHECK(dxz <= dxy + dyz);
  }
}

TEST_CASE("dl_distance radius cap and environment override") {
  ModelSpace s = ModelSpace::dl(2, 2);
  DLNode base{TreeVertex(2, 0, {}), TreeVertex(2, 0, {})};
  DLNode sib{TreeVertex(2, 0, {}), TreeVertex(2, 0, {0, 1})};  // distance 4
  CHECK_THROWS_AS(dl_distance(s, mk(s, base), mk(s, sib), 3), RadiusExceeded);
  CHECK(dl_distance(s, mk(s, base), mk(s, sib), 4) == 4);

  setenv("SOLVLAB_MAX_RADIUS", "3", 1);
  CHECK_THROWS_AS(dl_distance(s, mk(s, base), mk(s, sib)), RadiusExceeded);
  setenv("SOLVLAB_MAX_RADIUS", "20", 1);
  CHECK(dl_distance(s, mk(s, base), mk(s, sib)) == 4);
  setenv("SOLVLAB_MAX_RADIUS", "banana", 1);
  CHECK_THROWS_AS(dl_distance(s, mk(s, base), mk(s, sib)), std::invalid_argument);
  unsetenv("SOLVLAB_MAX_RADIUS");
  CHECK(dl_distance(s, mk(s, base), mk(s, sib)) == 4);
}

TEST_CASE("coarse_distance on sol is the doubled clearing height") {
  ModelSpace s = ModelSpace::sol();
  HPoint o = make_point(s, GPoint(0, vec1(0)), GPoint(0, vec1(0)));
  CHECK(coarse_distance(s, o, o) == 0.0);
  for (double t : {3.5, -2.0, 0.25}) {
    HPoint p = make_point(s, GPoint(t, vec1(0)), GPoint(-t, vec1(0)));
    CHECK(coarse_distance(s, o, p) == doctest::Approx(2 * std::abs(t)));
  }
}

TEST_CASE("coarse_distance brackets the dl graph metric") {
  ModelSpace s = ModelSpace::dl(2, 2);
  DLNode base{TreeVertex(2, 0, {}), TreeVertex(2, 0, {})};
  DLNode sib{TreeVertex(2, 0, {}), TreeVertex(2, 0, {0, 1})};
  double c = coarse_distance(s, mk(s, base), mk(s, sib));
  CHECK(c == doctest::Approx(4.0));  // tree distances 0 and 4
  CHECK(c >= 4.0 / 3.0 - 4.0);
  CHECK(c <= 3.0 * 4.0 + 4.0);

  std::mt19937_64 rng(777);
  auto random_node = [&](int steps) {
    DLNode p = base;
    for (int i = 0; i < steps; ++i) {
      auto nb = dl_neighbors_of(p, 2, 2);
      p = nb[rng() % nb.size()];
    }
    return p;
  };
  for (int trial = 0; trial < 60; ++trial) {
    DLNode u = random_node(static_cast<int>(rng() % 11));
    DLNode w = random_node(static_cast<int>(rng() % 11));
    long long g = dl_distance(s, mk(s, u), mk(s, w), 24);
    double cc = coarse_distance(s, mk(s, u), mk(s, w));
    CHECK(cc >= static_cast<double>(g) / 3.0 - 4.0);
    CHECK(cc <= 3.0 * static_cast<double>(g) + 4.0);
  }
}

TEST_CASE("xmbar coordinates: build, extract, round-trip") {
  // Fully expanding split: second factor is a bare tree of branching 6.
  ModelSpace s6 = ModelSpace::xmbar(spectral::analyze(spectral::parse_int_matrix("[[2,0],[0,3]]")));
  CHECK(s6.has_tree_factor());
  CHECK(s6.tree_branching() == 6);
  Eigen::VectorXd v2d(2);
  v2d << 1.5, -0.25;

  XMbarCoords c;
  c.v = v2d;
  c.t = -2;
  c.y = madic::parse_madic("0001@-6", 6);  // one digit below the truncation height
  HPoint p = make_point(s6, c);
  CHECK(height(p) == -2.0);
  const auto& tv = std::get<TreeVertex>(p.x2);
  CHECK(tv.h == 2);
  CHECK(tv.addr == std::vector<std::uint8_t>{1});
  XMbarCoords back = extract_coords(s6, p);
  CHECK(back.t == c.t);
  CHECK((back.v - c.v).norm() == 0.0);
  CHECK(back.y == madic::MAdic(6, -3, {1}, true));
  CHECK(same_hpoint(make_point(s6, back), p));

  // Digits at positions >= t are truncated away: here everything goes.
  XMbarCoords shallow = c;
  shallow.y = madic::parse_madic("11@-2", 6);
  HPoint q = make_point(s6, shallow);
  CHECK(std::get<TreeVertex>(q.x2).addr.empty());
  CHECK(same_hpoint(q, make_point(s6, extract_coords(s6, q))));

  // Mixed split: millefeuille second factor.
  ModelSpace sm = ModelSpace::xmbar(spectral::analyze(spectral::parse_int_matrix("[[3,1],[1,1]]")));
  CHECK(sm.tree_branching() == 2);
  XMbarCoords cm;
  cm.v = v2d;
  cm.t = 4;
  cm.y = madic::parse_madic("1011@0", 2);
  HPoint pm = make_point(sm, cm);
  const auto& zp = std::get<ZPoint>(pm.x2);
  CHECK(zp.tv.h == -4);
  CHECK(zp.tv.addr == std::vector<std::uint8_t>{1, 1, 0, 1});
  CHECK(zp.v(0) == v2d(1));
  XMbarCoords backm = extract_coords(sm, pm);
  CHECK(backm.y == cm.y);
  CHECK(same_hpoint(make_point(sm, backm), pm));
  CHECK_THROWS_AS([&] {
    XMbarCoords bad = cm;
    bad.t = 0.5;
    make_point(sm, bad);
  }(), MalformedCoordinates);
  CHECK_THROWS_AS([&] {
    XMbarCoords bad = cm;
    bad.y = madic::parse_madic("1@0", 3);
    make_point(sm, bad);
  }(), MalformedCoordinates);

  // Unimodular split: no tree factor, real heights allowed, y must vanish.
  ModelSpace s1 = ModelSpace::xmbar(spectral::analyze(spectral::parse_int_matrix("[[2,1],[1,1]]")));
  CHECK(!s1.has_tree_factor());
  XMbarCoords c1;
  c1.v = v2d;
  c1.t = 0.75;
  c1.y = madic::MAdic::zero(2);
  HPoint p1 = make_point(s1, c1);
  CHECK(std::get<GPoint>(p1.x2).t == doctest::Approx(-0.75));
  CHECK(same_hpoint(make_point(s1, extract_coords(s1, p1)), p1));
  CHECK_THROWS_AS([&] {
    XMbarCoords bad = c1;
    bad.y = madic::MAdic::from_integer(2, 1);
    make_point(s1, bad);
  }(), MalformedCoordinates);
}

TEST_CASE("tree line / digit expansion bridge") {
  // Zero expansion is the anchor line at every height.
  for (int h : {-3, 0, 4})
    CHECK(madic_to_vertex(madic::MAdic::zero(2), h, 2) == TreeVertex(2, h, {}));
  // Hand example: value 1 seen from height -1 is the child with digit 1.
  TreeVertex v = madic_to_vertex(madic::MAdic::from_integer(2, 1), -1, 2);
  CHECK(v == TreeVertex(2, -1, {1}));
  CHECK(vertex_to_madic(v) == madic::MAdic::from_integer(2, 1));
  // Seen from height 0 the same value truncates to the anchor.
  CHECK(madic_to_vertex(madic::MAdic::from_integer(2, 1), 0, 2) == TreeVertex(2, 0, {}));

  std::mt19937_64 rng(424242);
  for (int m : {2, 3, 5}) {
    for (int trial = 0; trial < 200; ++trial) {
      std::uniform_int_distribution<int> len(0, 8), hgt(-5, 5), dig(0, m - 1);
      std::vector<std::uint8_t> addr(static_cast<std::size_t>(len(rng)));
      for (auto& d : addr) d = static_cast<std::uint8_t>(dig(rng));
      TreeVertex u(m, hgt(rng), std::move(addr));
      CHECK(madic_to_vertex(vertex_to_madic(u), u.h, m) == u);
    }
  }
  // Metric correspondence spot check: lines through (2,0,{1}) and the anchor
  // split below index 1, and the expansions sit at distance 2^1.
  double d = madic::madic_dist(vertex_to_madic(TreeVertex(2, 0, {1})),
                               vertex_to_madic(TreeVertex(2, 0, {})));
  CHECK(d == doctest::Approx(2.0));
  CHECK_THROWS_AS(madic_to_vertex(madic::MAdic::from_integer(3, 1), 0, 2), MalformedCoordinates);
}

TEST_CASE("parse_space understands the model names") {
  CHECK(parse_space("sol").kind == Kind::Sol);
  ModelSpace dl = parse_space("dl:2,3");
  CHECK(dl.kind == Kind::DL);
  CHECK(dl.n == 2);
  CHECK(dl.m == 3);
  ModelSpace xn = parse_space("xn:3");
  CHECK(xn.kind == Kind::Xn);
  CHECK(xn.n == 3);
  ModelSpace xm = parse_space("xmbar:[[2,0],[0,3]]");
  CHECK(xm.kind == Kind::XMbar);
  CHECK(xm.split->d == 6);
  CHECK(to_string(xm.kind) == "xmbar");
  CHECK_THROWS(parse_space("dl:2"));
  CHECK_THROWS(parse_space("torus:5"));
  CHECK_THROWS(parse_space("sol:1"));
}
