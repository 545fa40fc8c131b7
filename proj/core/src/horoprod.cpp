#include "solvlab/horoprod.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "solvlab/runtime.hpp"

namespace solvlab::horoprod {

namespace {

constexpr double kHeightTol = 1e-12;

struct HeightVisitor {
  double operator()(const spaces::GPoint& p) const { return p.t; }
  double operator()(const tree::TreeVertex& v) const { return static_cast<double>(v.h); }
  double operator()(const spaces::ZPoint& z) const { return static_cast<double>(z.height()); }
};

void check_heights(const FactorPoint& x1, const FactorPoint& x2) {
  double h1 = factor_height(x1), h2 = factor_height(x2);
  if (factor_height_is_integral(x1) && factor_height_is_integral(x2)) {
    if (h1 + h2 != 0.0)
      throw HeightConstraintViolated("make_point: integer heights must sum to zero");
  } else if (std::abs(h1 + h2) > kHeightTol) {
    throw HeightConstraintViolated("make_point: heights must sum to zero");
  }
}

void validate_factors(const ModelSpace& space, const FactorPoint& x1, const FactorPoint& x2) {
  auto expect_g = [](const FactorPoint& x, int dim, const char* what) -> const spaces::GPoint& {
    const auto* p = std::get_if<spaces::GPoint>(&x);
    if (!p) throw MalformedCoordinates(std::string(what) + ": continuous factor expected");
    if (p->v.size() != dim)
      throw MalformedCoordinates(std::string(what) + ": wrong coordinate dimension");
    return *p;
  };
  auto expect_tree = [](const FactorPoint& x, int branching,
                        const char* what) -> const tree::TreeVertex& {
    const auto* v = std::get_if<tree::TreeVertex>(&x);
    if (!v) throw MalformedCoordinates(std::string(what) + ": tree factor expected");
    if (v->m != branching)
      throw MalformedCoordinates(std::string(what) + ": wrong tree branching");
    return *v;
  };
  switch (space.kind) {
    case Kind::Sol:
      expect_g(x1, 1, "sol x1");
      expect_g(x2, 1, "sol x2");
      break;
    case Kind::DL:
      expect_tree(x1, space.n, "dl x1");
      expect_tree(x2, space.m, "dl x2");
      break;
    case Kind::Xn:
      expect_g(x1, 1, "xn x1");
      expect_tree(x2, space.n, "xn x2");
      break;
    case Kind::XMbar: {
      const auto& split = *space.split;
      expect_g(x1, split.n1, "xmbar x1");
      if (split.n2 == 0) {
        expect_tree(x2, space.tree_branching(), "xmbar x2");
      } else if (space.has_tree_factor()) {
        const auto* z = std::get_if<spaces::ZPoint>(&x2);
        if (!z) throw MalformedCoordinates("xmbar x2: millefeuille factor expected");
        if (z->tv.m != space.tree_branching())
          throw MalformedCoordinates("xmbar x2: wrong tree branching");
        if (z->v.size() != split.n2)
          throw MalformedCoordinates("xmbar x2: wrong coordinate dimension");
      } else {
        expect_g(x2, split.n2, "xmbar x2");
      }
      break;
    }
  }
}

}  // namespace

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Sol: return "sol";
    case Kind::DL: return "dl";
    case Kind::Xn: return "xn";
    case Kind::XMbar: return "xmbar";
  }
  return "?";
}

double factor_height(const FactorPoint& x) { return std::visit(HeightVisitor{}, x); }

bool factor_height_is_integral(const FactorPoint& x) {
  return !std::holds_alternative<spaces::GPoint>(x);
}

ModelSpace ModelSpace::sol() { return ModelSpace{Kind::Sol, 0, 0, std::nullopt}; }

ModelSpace ModelSpace::dl(int n, int m) {
  if (n < 2 || m < 2) throw std::invalid_argument("dl: branchings must be >= 2");
  return ModelSpace{Kind::DL, n, m, std::nullopt};
}

ModelSpace ModelSpace::xn(int n) {
  if (n < 2) throw std::invalid_argument("xn: branching must be >= 2");
  return ModelSpace{Kind::Xn, n, 0, std::nullopt};
}

ModelSpace ModelSpace::xmbar(spectral::SpectralSplit s) {
  ModelSpace out{Kind::XMbar, 0, 0, std::move(s)};
  if (out.split->d > 255) throw std::invalid_argument("xmbar: tree branching too large");
  return out;
}

bool ModelSpace::has_tree_factor() const {
  switch (kind) {
    case Kind::Sol: return false;
    case Kind::DL:
    case Kind::Xn: return true;
    case Kind::XMbar: return split->d >= 2;
  }
  return false;
}

int ModelSpace::tree_branching() const {
  if (kind != Kind::XMbar) throw std::invalid_argument("tree_branching: xmbar models only");
  if (split->d < 2) throw std::invalid_argument("tree_branching: no tree factor (|det| = 1)");
  return split->d.convert_to<int>();
}

spectral::DiagBlock ModelSpace::side1_block() const {
  switch (kind) {
    case Kind::Sol:
    case Kind::Xn: return spaces::hyperbolic_plane_block();
    case Kind::XMbar: return split->Mbar1;
    case Kind::DL: break;
  }
  throw spectral::EmptyBlock("side1_block: no continuous part on side 1");
}

spectral::DiagBlock ModelSpace::side2_block() const {
  switch (kind) {
    case Kind::Sol: return spaces::hyperbolic_plane_block();
    case Kind::XMbar:
      if (split->n2 > 0) return split->Mbar2;
      break;
    default: break;
  }
  throw spectral::EmptyBlock("side2_block: no continuous part on side 2");
}

ModelSpace parse_space(const std::string& text) {
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "sol") {
    if (!args.empty()) throw std::invalid_argument("parse_space: sol takes no parameters");
    return ModelSpace::sol();
  }
  if (head == "dl") {
    auto comma = args.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("parse_space: dl:n,m expected");
    return ModelSpace::dl(std::stoi(args.substr(0, comma)), std::stoi(args.substr(comma + 1)));
  }
  if (head == "xn") {
    if (args.empty()) throw std::invalid_argument("parse_space: xn:n expected");
    return ModelSpace::xn(std::stoi(args));
  }
  if (head == "xmbar") {
    if (args.empty()) throw std::invalid_argument("parse_space: xmbar:[[...]] expected");
    return ModelSpace::xmbar(spectral::analyze(spectral::parse_int_matrix(args)));
  }
  throw std::invalid_argument("parse_space: unknown model kind '" + head + "'");
}

HPoint make_point(const ModelSpace& space, const FactorPoint& x1, const FactorPoint& x2) {
  validate_factors(space, x1, x2);
  check_heights(x1, x2);
  return HPoint{x1, x2, factor_height(x1)};
}

HPoint make_point(const ModelSpace& space, const XMbarCoords& c) {
  if (space.kind != Kind::XMbar)
    throw MalformedCoordinates("make_point: (v,t,y) coordinates are for xmbar models");
  const auto& split = *space.split;
  if (c.v.size() != split.n)
    throw MalformedCoordinates("make_point: v must have the full dimension");
  Eigen::VectorXd v1 = c.v.head(split.n1), v2 = c.v.tail(split.n2);
  FactorPoint x1 = spaces::GPoint(c.t, v1);
  FactorPoint x2;
  if (space.has_tree_factor()) {
    double rounded = std::nearbyint(c.t);
    if (std::abs(c.t - rounded) > 1e-9)
      throw MalformedCoordinates("make_point: tree models need integer heights");
    int th = -static_cast<int>(rounded);
    tree::TreeVertex tv = madic_to_vertex(c.y, th, space.tree_branching());
    if (split.n2 > 0)
      x2 = spaces::ZPoint{tv, v2};
    else
      x2 = tv;
  } else {
    if (!c.y.is_zero())
      throw MalformedCoordinates("make_point: no tree coordinate in this model");
    x2 = spaces::GPoint(-c.t, v2);
  }
  return make_point(space, x1, x2);
}

XMbarCoords extract_coords(const ModelSpace& space, const HPoint& p) {
  if (space.kind != Kind::XMbar)
    throw MalformedCoordinates("extract_coords: xmbar models only");
  validate_factors(space, p.x1, p.x2);
  const auto& split = *space.split;
  const auto& g1 = std::get<spaces::GPoint>(p.x1);
  XMbarCoords out;
  out.t = g1.t;
  out.v.resize(split.n);
  out.v.head(split.n1) = g1.v;
  if (const auto* z = std::get_if<spaces::ZPoint>(&p.x2)) {
    out.v.tail(split.n2) = z->v;
    out.y = vertex_to_madic(z->tv);
  } else if (const auto* tv = std::get_if<tree::TreeVertex>(&p.x2)) {
    out.y = vertex_to_madic(*tv);
  } else {
    out.v.tail(split.n2) = std::get<spaces::GPoint>(p.x2).v;
    out.y = madic::MAdic::zero(2);
  }
  return out;
}

double height(const HPoint& p) { return factor_height(p.x1); }

tree::TreeVertex madic_to_vertex(const madic::MAdic& y, int height, int branching) {
  if (y.base() != branching)
    throw MalformedCoordinates("madic_to_vertex: digit base must match tree branching");
  // addr[i] is the digit at expansion position -(height+1) - i; positions
  // below the window start are zero, so the address is finite.
  const long long start = -(static_cast<long long>(height) + 1);
  const long long lowest = y.window_start();
  std::vector<std::uint8_t> addr;
  if (start >= lowest) {
    const long long len = start - lowest + 1;
    if (len > 1000000) throw MalformedCoordinates("madic_to_vertex: address too deep");
    addr.reserve(static_cast<std::size_t>(len));
    for (long long i = 0; i < len; ++i)
      addr.push_back(static_cast<std::uint8_t>(y.digit_at(start - i)));
  }
  return tree::TreeVertex(branching, height, std::move(addr));
}

madic::MAdic vertex_to_madic(const tree::TreeVertex& v) {
  std::vector<std::uint8_t> ds(v.addr.rbegin(), v.addr.rend());
  const long long val = -(static_cast<long long>(v.h) + static_cast<long long>(v.addr.size()));
  return madic::MAdic(v.m, val, std::move(ds), true);
}

namespace {

struct TreePair {
  tree::TreeVertex a, b;
};

std::string pair_key(const TreePair& p) { return p.a.key() + "|" + p.b.key(); }

}  // namespace

long long dl_distance(const ModelSpace& space, const HPoint& u, const HPoint& v,
                      int max_radius) {
  if (space.kind != Kind::DL) throw std::invalid_argument("dl_distance: dl models only");
  validate_factors(space, u.x1, u.x2);
  validate_factors(space, v.x1, v.x2);
  const int cap = max_radius >= 0 ? max_radius : bfs_radius_cap(14);
  TreePair start{std::get<tree::TreeVertex>(u.x1), std::get<tree::TreeVertex>(u.x2)};
  TreePair goal{std::get<tree::TreeVertex>(v.x1), std::get<tree::TreeVertex>(v.x2)};
  if (start.a == goal.a && start.b == goal.b) return 0;

  const int m1 = space.n, m2 = space.m;
  auto for_each_neighbor = [&](const TreePair& p, auto&& emit) {
    for (int j = 0; j < m2; ++j) emit(TreePair{p.a.parent(), p.b.child(j)});
    for (int j = 0; j < m1; ++j) emit(TreePair{p.a.child(j), p.b.parent()});
  };

  std::unordered_map<std::string, int> dist[2];
  std::vector<TreePair> front[2];
  dist[0].emplace(pair_key(start), 0);
  dist[1].emplace(pair_key(goal), 0);
  front[0].push_back(start);
  front[1].push_back(goal);
  int depth[2] = {0, 0};
  long long best = LLONG_MAX;
  constexpr std::size_t kBudget = 8000000;

  while (true) {
    if (best <= depth[0] + depth[1]) return best;
    if (depth[0] + depth[1] >= cap) {
      if (best <= cap) return best;
      throw RadiusExceeded("dl_distance: distance exceeds radius " + std::to_string(cap));
    }
    const int side = front[0].size() <= front[1].size() ? 0 : 1;
    const int other = 1 - side;
    std::vector<TreePair> next;
    for (const TreePair& node : front[side]) {
      for_each_neighbor(node, [&](const TreePair& nb) {
        std::string k = pair_key(nb);
        if (dist[side].count(k)) return;
        auto it = dist[other].find(k);
        if (it != dist[other].end())
          best = std::min(best, static_cast<long long>(depth[side]) + 1 + it->second);
        dist[side].emplace(std::move(k), depth[side] + 1);
        next.push_back(nb);
      });
      if (dist[0].size() + dist[1].size() > kBudget)
        throw RadiusExceeded("dl_distance: search budget exceeded");
    }
    front[side] = std::move(next);
    depth[side] += 1;
    if (front[side].empty()) {
      if (best != LLONG_MAX) return best;
      throw RadiusExceeded("dl_distance: frontier exhausted");
    }
  }
}

double coarse_distance(const ModelSpace& space, const HPoint& u, const HPoint& v) {
  validate_factors(space, u.x1, u.x2);
  validate_factors(space, v.x1, v.x2);
  auto factor = [&](const FactorPoint& x, const FactorPoint& y, int side) -> double {
    if (const auto* gp = std::get_if<spaces::GPoint>(&x)) {
      const auto& gq = std::get<spaces::GPoint>(y);
      return spaces::coarse_distance_G(*gp, gq,
                                       side == 1 ? space.side1_block() : space.side2_block());
    }
    if (const auto* tp = std::get_if<tree::TreeVertex>(&x)) {
      const auto& tq = std::get<tree::TreeVertex>(y);
      return static_cast<double>(tree::tree_distance(*tp, tq));
    }
    const auto& zp = std::get<spaces::ZPoint>(x);
    const auto& zq = std::get<spaces::ZPoint>(y);
    return spaces::coarse_distance_Z(zp, zq, space.side2_block());
  };
  return factor(u.x1, v.x1, 1) + factor(u.x2, v.x2, 2);
}

}  // namespace solvlab::horoprod
