#include "solvlab/groups.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace solvlab::groups {

namespace {

constexpr long long kMaxPower = 65536;

Int rat_floor(const Rat& r) {
  Int n = numerator(r), d = denominator(r);
  Int q = n / d;  // truncates toward zero
  if (q * d != n && n < 0) q -= 1;
  return q;
}

Rat fractional(const Rat& r) { return r - Rat(rat_floor(r)); }

std::vector<Rat> column_of(const IMat& M, int j) {
  std::vector<Rat> out(static_cast<std::size_t>(M.rows));
  for (int i = 0; i < M.rows; ++i) out[static_cast<std::size_t>(i)] = Rat(M(i, j - 1));
  return out;
}

std::vector<Rat> basis_vector(int n, int j, const Rat& scale) {
  std::vector<Rat> out(static_cast<std::size_t>(n), Rat(0));
  out[static_cast<std::size_t>(j - 1)] = scale;
  return out;
}

std::string abc_key(const AbcElement& g) {
  std::ostringstream os;
  os << g.k;
  for (const auto& r : g.u) os << '|' << r;
  return os.str();
}

std::string lamp_key(const LampElement& g) {
  std::ostringstream os;
  os << g.pos;
  for (const auto& [i, c] : g.lamps) os << '|' << i << ':' << c;
  return os.str();
}

void check_radius(int max_radius) {
  if (max_radius < 0 || max_radius > 12)
    throw std::invalid_argument("word_length: the radius cap must lie in [0, 12]");
}

// Level-by-level breadth-first search from the identity; Elem needs multiply
// against a fixed generator list and a string key.
template <class Elem, class Mul>
int bfs_word_length(const Elem& target, const Elem& id, const std::vector<Elem>& gens,
                    const Mul& mul, const std::function<std::string(const Elem&)>& key,
                    int max_radius) {
  check_radius(max_radius);
  const std::string want = key(target);
  if (key(id) == want) return 0;
  std::unordered_map<std::string, bool> seen;
  seen.emplace(key(id), true);
  std::vector<Elem> level = {id};
  for (int depth = 1; depth <= max_radius; ++depth) {
    std::vector<Elem> next;
    for (const auto& e : level)
      for (const auto& g : gens) {
        Elem p = mul(e, g);
        std::string k = key(p);
        if (seen.count(k)) continue;
        if (k == want) return depth;
        seen.emplace(std::move(k), true);
        next.push_back(std::move(p));
      }
    level = std::move(next);
  }
  throw RadiusExceeded("word_length: element outside the ball of radius " +
                       std::to_string(max_radius));
}

double matrix_inf_norm(const Eigen::MatrixXd& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

// P restricted to one side of the splitting; the corners must vanish because
// the orthogonal part only mixes directions of equal modulus.
Eigen::MatrixXd side_orthogonal(const spectral::SpectralSplit& split, int side) {
  const int n1 = split.n1, n2 = split.n2;
  if (n1 > 0 && n2 > 0) {
    if (matrix_inf_norm(split.P.topRightCorner(n1, n2)) > 1e-9 ||
        matrix_inf_norm(split.P.bottomLeftCorner(n2, n1)) > 1e-9)
      throw std::invalid_argument("boundary_action: orthogonal part mixes the two sides");
  }
  return side == 1 ? split.P.topLeftCorner(n1, n1) : split.P.bottomRightCorner(n2, n2);
}

Eigen::MatrixXd orthogonal_power(const Eigen::MatrixXd& Q, long long k) {
  const int n = static_cast<int>(Q.rows());
  Eigen::MatrixXd step = k >= 0 ? Q : Eigen::MatrixXd(Q.transpose());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(n, n);
  for (long long i = 0; i < std::llabs(k); ++i) acc = step * acc;
  return acc;
}

}  // namespace

// --- abelian-by-cyclic groups ----------------------------------------------

AbcGroup AbcGroup::from_matrix(const IMat& M) {
  if (M.rows != M.cols || M.rows == 0)
    throw std::invalid_argument("AbcGroup: a nonempty square matrix is required");
  AbcGroup G;
  G.M = M;
  G.n = M.rows;
  G.det = bareiss_det(M);
  if (G.det == 0) throw spectral::SingularMatrix("AbcGroup: det M = 0");
  G.Minv = rat_inverse(to_rational(M));
  return G;
}

AbcElement identity(const AbcGroup& G) {
  return AbcElement{0, std::vector<Rat>(static_cast<std::size_t>(G.n), Rat(0))};
}

AbcElement gen_a(const AbcGroup& G, long long power) {
  AbcElement g = identity(G);
  g.k = power;
  return g;
}

AbcElement gen_b(const AbcGroup& G, int j, long long power) {
  if (j < 1 || j > G.n) throw std::invalid_argument("gen_b: index out of range");
  AbcElement g = identity(G);
  g.u[static_cast<std::size_t>(j - 1)] = Rat(power);
  return g;
}

std::vector<Rat> matrix_power_apply(const AbcGroup& G, long long e, const std::vector<Rat>& u) {
  if (static_cast<int>(u.size()) != G.n)
    throw std::invalid_argument("matrix_power_apply: dimension mismatch");
  if (std::llabs(e) > kMaxPower) throw std::invalid_argument("matrix_power_apply: exponent too large");
  std::vector<Rat> out = u;
  if (e >= 0) {
    RMat Mr = to_rational(G.M);
    for (long long i = 0; i < e; ++i) out = mat_vec(Mr, out);
  } else {
    for (long long i = 0; i < -e; ++i) out = mat_vec(G.Minv, out);
  }
  return out;
}

AbcElement multiply(const AbcGroup& G, const AbcElement& g, const AbcElement& h) {
  AbcElement p;
  p.k = g.k + h.k;
  p.u = matrix_power_apply(G, -h.k, g.u);
  for (int i = 0; i < G.n; ++i) p.u[static_cast<std::size_t>(i)] += h.u[static_cast<std::size_t>(i)];
  return p;
}

AbcElement inverse(const AbcGroup& G, const AbcElement& g) {
  AbcElement inv;
  inv.k = -g.k;
  inv.u = matrix_power_apply(G, g.k, g.u);
  for (auto& r : inv.u) r = -r;
  return inv;
}

namespace {

long long parse_exponent(const std::string& tok, std::size_t caret) {
  if (caret == std::string::npos) return 1;
  const std::string e = tok.substr(caret + 1);
  if (e.empty()) throw MalformedWord("word: empty exponent in '" + tok + "'");
  std::size_t used = 0;
  long long val;
  try {
    val = std::stoll(e, &used);
  } catch (const std::exception&) {
    throw MalformedWord("word: bad exponent in '" + tok + "'");
  }
  if (used != e.size()) throw MalformedWord("word: bad exponent in '" + tok + "'");
  return val;
}

}  // namespace

AbcElement evaluate_word(const AbcGroup& G, const std::string& word) {
  AbcElement acc = identity(G);
  std::istringstream in(word);
  std::string tok;
  while (in >> tok) {
    const std::size_t caret = tok.find('^');
    const std::string name = tok.substr(0, caret);
    const long long e = parse_exponent(tok, caret);
    AbcElement gen;
    if (name == "a") {
      gen = gen_a(G, e);
    } else if (name == "b") {
      gen = gen_b(G, 1, e);
    } else if (name.size() >= 2 && name[0] == 'b' &&
               std::all_of(name.begin() + 1, name.end(),
                           [](unsigned char c) { return std::isdigit(c); })) {
      gen = gen_b(G, std::stoi(name.substr(1)), e);
    } else {
      throw MalformedWord("word: unknown generator '" + name + "'");
    }
    acc = multiply(G, acc, gen);
  }
  return acc;
}

int word_length(const AbcGroup& G, const AbcElement& g, int max_radius) {
  std::vector<AbcElement> gens;
  gens.push_back(gen_a(G, 1));
  gens.push_back(gen_a(G, -1));
  for (int j = 1; j <= G.n; ++j) {
    gens.push_back(gen_b(G, j, 1));
    gens.push_back(gen_b(G, j, -1));
  }
  auto mul = [&G](const AbcElement& x, const AbcElement& y) { return multiply(G, x, y); };
  std::function<std::string(const AbcElement&)> key = [](const AbcElement& x) {
    return abc_key(x);
  };
  return bfs_word_length(g, identity(G), gens, mul, key, max_radius);
}

// --- lamplighter groups -----------------------------------------------------

namespace {

void check_lamp_group(const LampGroup& G) {
  if (G.q < 2) throw std::invalid_argument("LampGroup: the lamp group order must be >= 2");
}

void set_lamp(const LampGroup& G, LampElement& g, long long i, long long value) {
  int v = static_cast<int>(((value % G.q) + G.q) % G.q);
  if (v == 0)
    g.lamps.erase(i);
  else
    g.lamps[i] = v;
}

}  // namespace

LampElement identity(const LampGroup& G) {
  check_lamp_group(G);
  return LampElement{};
}

LampElement shift(const LampGroup& G, long long step) {
  check_lamp_group(G);
  LampElement g;
  g.pos = step;
  return g;
}

LampElement toggle(const LampGroup& G, int amount) {
  check_lamp_group(G);
  LampElement g;
  set_lamp(G, g, 0, amount);
  return g;
}

LampElement multiply(const LampGroup& G, const LampElement& g, const LampElement& h) {
  check_lamp_group(G);
  LampElement p;
  p.pos = g.pos + h.pos;
  p.lamps = g.lamps;
  for (const auto& [i, c] : h.lamps) {
    const long long at = i + g.pos;
    auto it = p.lamps.find(at);
    set_lamp(G, p, at, (it == p.lamps.end() ? 0 : it->second) + c);
  }
  return p;
}

LampElement inverse(const LampGroup& G, const LampElement& g) {
  check_lamp_group(G);
  LampElement inv;
  inv.pos = -g.pos;
  for (const auto& [i, c] : g.lamps) set_lamp(G, inv, i - g.pos, -c);
  return inv;
}

LampElement evaluate_word(const LampGroup& G, const std::string& word) {
  LampElement acc = identity(G);
  std::istringstream in(word);
  std::string tok;
  while (in >> tok) {
    const std::size_t caret = tok.find('^');
    const std::string name = tok.substr(0, caret);
    const long long e = parse_exponent(tok, caret);
    LampElement gen;
    if (name == "s") {
      gen = shift(G, e);
    } else if (name == "t") {
      gen = toggle(G, static_cast<int>(((e % G.q) + G.q) % G.q));
    } else {
      throw MalformedWord("word: unknown generator '" + name + "'");
    }
    acc = multiply(G, acc, gen);
  }
  return acc;
}

int word_length(const LampGroup& G, const LampElement& g, LampGenerators gens, int max_radius) {
  check_lamp_group(G);
  std::vector<LampElement> gen_list;
  if (gens == LampGenerators::ShiftAndToggle) {
    gen_list.push_back(shift(G, 1));
    gen_list.push_back(shift(G, -1));
    gen_list.push_back(toggle(G, 1));
    gen_list.push_back(toggle(G, G.q - 1));
  } else {
    for (int c = 0; c < G.q; ++c) {
      LampElement w;
      w.pos = 1;
      set_lamp(G, w, 0, c);
      gen_list.push_back(w);
      gen_list.push_back(inverse(G, w));
    }
  }
  // Dedupe (for q = 2 the toggle equals its inverse).
  std::vector<LampElement> uniq;
  for (const auto& x : gen_list)
    if (std::find(uniq.begin(), uniq.end(), x) == uniq.end()) uniq.push_back(x);
  auto mul = [&G](const LampElement& x, const LampElement& y) { return multiply(G, x, y); };
  std::function<std::string(const LampElement&)> key = [](const LampElement& x) {
    return lamp_key(x);
  };
  return bfs_word_length(g, identity(G), uniq, mul, key, max_radius);
}

long long shift_toggle_length(const LampGroup& G, const LampElement& g) {
  check_lamp_group(G);
  long long toggles = 0;
  long long right = std::max<long long>(0, g.pos);
  long long left = std::min<long long>(0, g.pos);
  for (const auto& [i, c] : g.lamps) {
    toggles += std::min(c, G.q - c);
    right = std::max(right, i);
    left = std::min(left, i);
  }
  const long long travel = 2 * right - 2 * left - std::llabs(g.pos);
  return toggles + travel;
}

long long walk_adjust_length(const LampGroup& G, const LampElement& g) {
  check_lamp_group(G);
  // The walk must reach the right endpoint of the edge above the highest lit
  // cell, and the left endpoint of the edge above the lowest one.
  long long lo = std::min<long long>(0, g.pos);
  long long hi = std::max<long long>(0, g.pos);
  if (!g.lamps.empty()) {
    lo = std::min(lo, g.lamps.begin()->first);
    hi = std::max(hi, g.lamps.rbegin()->first + 1);
  }
  const long long low_first = (0 - lo) + (hi - lo) + (hi - g.pos);
  const long long high_first = (hi - 0) + (hi - lo) + (g.pos - lo);
  return std::min(low_first, high_first);
}

horoprod::HPoint lamp_to_dl_point(const LampGroup& G, const LampElement& g) {
  check_lamp_group(G);
  auto lamp_at = [&g](long long i) -> int {
    auto it = g.lamps.find(i);
    return it == g.lamps.end() ? 0 : it->second;
  };
  std::vector<std::uint8_t> below, above;
  if (!g.lamps.empty()) {
    const long long lo = g.lamps.begin()->first, hi = g.lamps.rbegin()->first;
    for (long long i = g.pos - 1; i >= std::min(lo, g.pos - 1); --i)
      below.push_back(static_cast<std::uint8_t>(lamp_at(i)));
    for (long long i = g.pos; i <= std::max(hi, g.pos - 1); ++i)
      above.push_back(static_cast<std::uint8_t>(lamp_at(i)));
  }
  const int h = static_cast<int>(g.pos);
  tree::TreeVertex first(G.q, -h, std::move(below));
  tree::TreeVertex second(G.q, h, std::move(above));
  return horoprod::make_point(horoprod::ModelSpace::dl(G.q, G.q), first, second);
}

// --- the action on the tree T_{d+1} ----------------------------------------

BassSerreAction::BassSerreAction(const IMat& M, int depth_bound) {
  if (M.rows != M.cols || M.rows == 0)
    throw std::invalid_argument("BassSerreAction: a nonempty square matrix is required");
  if (depth_bound < 1) throw std::invalid_argument("BassSerreAction: depth bound must be >= 1");
  M_ = M;
  n_ = M.rows;
  depth_ = depth_bound;
  Int det = bareiss_det(M);
  if (det == 0) throw spectral::SingularMatrix("BassSerreAction: det M = 0");
  Int ad = abs(det);
  if (ad < 2) throw std::invalid_argument("BassSerreAction: |det M| must be >= 2 for a tree");
  if (ad > 255) throw std::invalid_argument("BassSerreAction: |det M| exceeds the digit range");
  d_ = static_cast<int>(ad);
  Minv_ = rat_inverse(to_rational(M));

  // Enumerate Z^n / M Z^n by a breadth-first walk over unit steps.
  std::map<std::vector<Int>, int> seen;
  std::deque<std::vector<Int>> queue;
  std::vector<Int> zero(static_cast<std::size_t>(n_), Int(0));
  seen.emplace(zero, 0);
  queue.push_back(zero);
  while (!queue.empty()) {
    std::vector<Int> z = queue.front();
    queue.pop_front();
    for (int i = 0; i < n_; ++i)
      for (int s : {1, -1}) {
        std::vector<Int> w = z;
        w[static_cast<std::size_t>(i)] += s;
        w = canonical_residue(w);
        if (seen.emplace(w, 0).second) queue.push_back(w);
      }
  }
  if (static_cast<int>(seen.size()) != d_)
    throw std::logic_error("BassSerreAction: residue count does not match |det M|");
  residues_.push_back(zero);
  for (auto& [rep, unused] : seen) {
    (void)unused;
    if (rep != zero) residues_.push_back(rep);
  }
  std::sort(residues_.begin() + 1, residues_.end());
  for (int i = 0; i < d_; ++i) digit_lookup_.emplace(residues_[static_cast<std::size_t>(i)], i);
}

std::vector<Int> BassSerreAction::canonical_residue(const std::vector<Int>& z) const {
  std::vector<Rat> zr(z.begin(), z.end());
  std::vector<Rat> x = mat_vec(Minv_, zr);
  std::vector<Int> out = z;
  for (int i = 0; i < n_; ++i) {
    Int q = rat_floor(x[static_cast<std::size_t>(i)]);
    if (q == 0) continue;
    for (int r = 0; r < n_; ++r) out[static_cast<std::size_t>(r)] -= M_(r, i) * q;
  }
  return out;
}

int BassSerreAction::digit_of(const std::vector<Int>& residue) const {
  auto it = digit_lookup_.find(residue);
  if (it == digit_lookup_.end())
    throw std::logic_error("BassSerreAction: representative outside the residue table");
  return it->second;
}

BassSerreAction::Coset BassSerreAction::coset_of(const tree::TreeVertex& v) const {
  if (v.m != d_)
    throw tree::BranchingMismatch("coset_of: vertex branching does not match |det M|");
  Coset c;
  c.k = -static_cast<long long>(v.h);
  std::vector<Rat> u(static_cast<std::size_t>(n_), Rat(0));
  for (auto it = v.addr.rbegin(); it != v.addr.rend(); ++it) {
    const auto& rep = residues_[static_cast<std::size_t>(*it)];
    for (int i = 0; i < n_; ++i) u[static_cast<std::size_t>(i)] += Rat(rep[static_cast<std::size_t>(i)]);
    u = mat_vec(Minv_, u);
  }
  for (auto& r : u) r = fractional(r);
  c.u = std::move(u);
  return c;
}

tree::TreeVertex BassSerreAction::vertex_of(const Coset& c) const {
  if (std::llabs(c.k) > (1LL << 30)) throw std::invalid_argument("vertex_of: height out of range");
  if (static_cast<int>(c.u.size()) != n_)
    throw std::invalid_argument("vertex_of: dimension mismatch");
  std::vector<Rat> w(c.u);
  for (auto& r : w) r = fractional(r);
  RMat Mr = to_rational(M_);
  int depth = 0;
  auto integral = [](const std::vector<Rat>& x) {
    for (const auto& r : x)
      if (denominator(r) != 1) return false;
    return true;
  };
  while (!integral(w)) {
    if (++depth > depth_)
      throw DepthExceeded("vertex_of: digit expansion exceeds the depth bound");
    w = mat_vec(Mr, w);
  }
  std::vector<Int> W(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) W[static_cast<std::size_t>(i)] = numerator(w[static_cast<std::size_t>(i)]);
  std::vector<std::uint8_t> addr(static_cast<std::size_t>(depth), 0);
  for (int step = 0; step < depth; ++step) {
    std::vector<Int> rep = canonical_residue(W);
    addr[static_cast<std::size_t>(depth - 1 - step)] = static_cast<std::uint8_t>(digit_of(rep));
    std::vector<Rat> next(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      next[static_cast<std::size_t>(i)] = Rat(W[static_cast<std::size_t>(i)] - rep[static_cast<std::size_t>(i)]);
    next = mat_vec(Minv_, next);
    for (int i = 0; i < n_; ++i) {
      if (denominator(next[static_cast<std::size_t>(i)]) != 1)
        throw std::logic_error("vertex_of: digit peel left a non-integer remainder");
      W[static_cast<std::size_t>(i)] = numerator(next[static_cast<std::size_t>(i)]);
    }
  }
  return tree::TreeVertex(d_, static_cast<int>(-c.k), std::move(addr));
}

tree::TreeVertex BassSerreAction::act(const AbcElement& g, const tree::TreeVertex& v) const {
  if (static_cast<int>(g.u.size()) != n_)
    throw std::invalid_argument("act: element dimension mismatch");
  Coset c = coset_of(v);
  Coset moved;
  moved.k = g.k + c.k;
  std::vector<Rat> shifted = g.u;
  const long long e = -c.k;
  if (std::llabs(e) > kMaxPower) throw std::invalid_argument("act: height out of range");
  if (e >= 0) {
    RMat Mr = to_rational(M_);
    for (long long i = 0; i < e; ++i) shifted = mat_vec(Mr, shifted);
  } else {
    for (long long i = 0; i < -e; ++i) shifted = mat_vec(Minv_, shifted);
  }
  moved.u = c.u;
  for (int i = 0; i < n_; ++i) {
    moved.u[static_cast<std::size_t>(i)] += shifted[static_cast<std::size_t>(i)];
    moved.u[static_cast<std::size_t>(i)] = fractional(moved.u[static_cast<std::size_t>(i)]);
  }
  return vertex_of(moved);
}

madic::MAdic BassSerreAction::boundary_translation(const std::vector<Rat>& u, int window) const {
  if (static_cast<int>(u.size()) != n_)
    throw std::invalid_argument("boundary_translation: dimension mismatch");
  if (window < 1) throw std::invalid_argument("boundary_translation: window must be >= 1");
  std::vector<Rat> w(u);
  RMat Mr = to_rational(M_);
  auto integral = [](const std::vector<Rat>& x) {
    for (const auto& r : x)
      if (denominator(r) != 1) return false;
    return true;
  };
  int j = 0;
  while (!integral(w)) {
    if (++j > window + 64)
      throw std::invalid_argument("boundary_translation: denominators never clear");
    w = mat_vec(Mr, w);
  }
  std::vector<Int> W(static_cast<std::size_t>(n_));
  bool zero = true;
  for (int i = 0; i < n_; ++i) {
    W[static_cast<std::size_t>(i)] = numerator(w[static_cast<std::size_t>(i)]);
    if (W[static_cast<std::size_t>(i)] != 0) zero = false;
  }
  std::vector<std::uint8_t> digits;
  bool exact = true;
  while (!zero) {
    if (static_cast<int>(digits.size()) >= window) {
      exact = false;
      break;
    }
    std::vector<Int> rep = canonical_residue(W);
    digits.push_back(static_cast<std::uint8_t>(digit_of(rep)));
    std::vector<Rat> next(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      next[static_cast<std::size_t>(i)] = Rat(W[static_cast<std::size_t>(i)] - rep[static_cast<std::size_t>(i)]);
    next = mat_vec(Minv_, next);
    zero = true;
    for (int i = 0; i < n_; ++i) {
      if (denominator(next[static_cast<std::size_t>(i)]) != 1)
        throw std::logic_error("boundary_translation: digit peel left a non-integer remainder");
      W[static_cast<std::size_t>(i)] = numerator(next[static_cast<std::size_t>(i)]);
      if (W[static_cast<std::size_t>(i)] != 0) zero = false;
    }
  }
  return madic::MAdic(d_, -j, std::move(digits), exact);
}

// --- the isometric action on model coordinates ------------------------------

ModelAction ModelAction::build(const spectral::SpectralSplit& split, int depth_bound) {
  ModelAction a;
  a.split = split;
  a.group = AbcGroup::from_matrix(split.M);
  if (split.d > 1) a.tree_action.emplace(split.M, depth_bound);
  return a;
}

GAffineExact g_affine_exact(const spectral::SpectralSplit& split, const AbcGroup&,
                            const AbcElement& g) {
  if (!split.exact)
    throw std::invalid_argument("g_affine_exact: the splitting has irrational data");
  const int n = split.n;
  GAffineExact out;
  out.k = g.k;
  out.A = RMat(n, n);
  for (int i = 0; i < n; ++i) {
    Rat base = Rat(split.mbar_exact[static_cast<std::size_t>(i)]) *
               Rat(split.p_sign[static_cast<std::size_t>(i)]);
    out.A(i, i) = rat_pow(base, g.k);
  }
  out.w = mat_vec(out.A, mat_vec(split.Sxinv, g.u));
  return out;
}

GAffine g_affine(const spectral::SpectralSplit& split, const AbcGroup& group,
                 const AbcElement& g) {
  (void)group;  // the affine data is fully determined by the splitting
  const int n = split.n;
  if (static_cast<int>(g.u.size()) != n) throw std::invalid_argument("g_affine: dimension mismatch");
  GAffine out;
  out.k = g.k;
  if (split.exact) {
    GAffineExact ex = g_affine_exact(split, group, g);
    out.A = Eigen::MatrixXd::Zero(n, n);
    out.w = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) {
      out.A(i, i) = to_double(ex.A(i, i));
      out.w(i) = to_double(ex.w[static_cast<std::size_t>(i)]);
    }
    return out;
  }
  if (std::llabs(g.k) > kMaxPower) throw std::invalid_argument("g_affine: exponent too large");
  Eigen::MatrixXd forward = split.Mbar.asDiagonal() * split.P;
  Eigen::MatrixXd step =
      g.k >= 0 ? forward
               : Eigen::MatrixXd(split.P.transpose() * split.Mbar.cwiseInverse().asDiagonal());
  out.A = Eigen::MatrixXd::Identity(n, n);
  for (long long i = 0; i < std::llabs(g.k); ++i) out.A = step * out.A;
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u(i) = to_double(g.u[static_cast<std::size_t>(i)]);
  out.w = out.A * (split.Sinv * u);
  return out;
}

horoprod::XMbarCoords act_on_model(const ModelAction& action, const AbcElement& g,
                                   const horoprod::XMbarCoords& p) {
  const auto& split = action.split;
  if (p.v.size() != split.n)
    throw horoprod::MalformedCoordinates("act_on_model: v must have the full dimension");
  GAffine aff = g_affine(split, action.group, g);
  horoprod::XMbarCoords out;
  out.v = aff.A * p.v + aff.w;
  out.t = p.t + static_cast<double>(aff.k);
  if (action.tree_action) {
    const double rounded = std::nearbyint(p.t);
    if (std::abs(p.t - rounded) > 1e-9)
      throw horoprod::MalformedCoordinates("act_on_model: tree models need integer heights");
    const int th = -static_cast<int>(rounded);
    tree::TreeVertex tv =
        horoprod::madic_to_vertex(p.y, th, action.tree_action->branching());
    out.y = horoprod::vertex_to_madic(action.tree_action->act(g, tv));
  } else {
    if (!p.y.is_zero())
      throw horoprod::MalformedCoordinates("act_on_model: no tree coordinate in this model");
    out.y = p.y;
  }
  return out;
}

namespace {

double affine_eval_gap(const GAffine& f, const GAffine& via, const Eigen::VectorXd& v) {
  Eigen::VectorXd a = f.A * v + f.w;
  Eigen::VectorXd b = via.A * v + via.w;
  return (a - b).cwiseAbs().maxCoeff() + std::abs(static_cast<double>(f.k - via.k));
}

}  // namespace

RelationReport verify_relations(const ModelAction& action,
                                const std::vector<horoprod::XMbarCoords>& samples,
                                double tol) {
  if (samples.empty()) throw std::invalid_argument("verify_relations: need at least one sample");
  const auto& G = action.group;
  const auto& split = action.split;
  RelationReport report;

  auto record = [&](const std::string& label, double dev, const std::string& witness) {
    report.entries.push_back({label, dev});
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > tol)
      throw RelationViolated(label + " deviates by " + std::to_string(dev) + " at " + witness);
  };

  AbcElement a = gen_a(G, 1);
  AbcElement a_inv = inverse(G, a);

  for (int j = 1; j <= G.n; ++j) {
    AbcElement bj = gen_b(G, j, 1);
    AbcElement lhs = multiply(G, multiply(G, a, bj), a_inv);
    AbcElement rhs{0, column_of(G.M, j)};
    const std::string label = "a b" + std::to_string(j) + " a^-1 vs the M-column translation";
    if (lhs != rhs) throw RelationViolated(label + " fails on normal forms");
    if (split.exact) {
      GAffineExact l = g_affine_exact(split, G, lhs);
      GAffineExact r = g_affine_exact(split, G, rhs);
      if (!(l.A == r.A) || l.w != r.w || l.k != r.k)
        throw RelationViolated(label + " fails on exact affine data");
    }
    double dev = 0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      auto step = act_on_model(action, a, act_on_model(action, bj, act_on_model(action, a_inv, samples[s])));
      auto direct = act_on_model(action, rhs, samples[s]);
      double gap = (step.v - direct.v).cwiseAbs().maxCoeff() + std::abs(step.t - direct.t);
      if (step.y != direct.y)
        throw RelationViolated(label + " moves the tree coordinate differently at sample " +
                               std::to_string(s));
      dev = std::max(dev, gap);
    }
    record(label, dev, "samples");
  }

  for (int i = 1; i <= G.n; ++i)
    for (int j = i + 1; j <= G.n; ++j) {
      AbcElement bi = gen_b(G, i, 1), bj = gen_b(G, j, 1);
      const std::string label = "b" + std::to_string(i) + " b" + std::to_string(j) + " vs b" +
                                std::to_string(j) + " b" + std::to_string(i);
      if (multiply(G, bi, bj) != multiply(G, bj, bi))
        throw RelationViolated(label + " fails on normal forms");
      double dev = 0;
      for (std::size_t s = 0; s < samples.size(); ++s) {
        auto ij = act_on_model(action, bi, act_on_model(action, bj, samples[s]));
        auto ji = act_on_model(action, bj, act_on_model(action, bi, samples[s]));
        double gap = (ij.v - ji.v).cwiseAbs().maxCoeff() + std::abs(ij.t - ji.t);
        if (ij.y != ji.y)
          throw RelationViolated(label + " moves the tree coordinate differently at sample " +
                                 std::to_string(s));
        dev = std::max(dev, gap);
      }
      record(label, dev, "samples");
    }

  return report;
}

qimaps::BoundarySimilarity boundary_action(const ModelAction& action, const AbcElement& g,
                                           int side, int digit_window) {
  if (side != 1 && side != 2) throw std::invalid_argument("boundary_action: side must be 1 or 2");
  const auto& split = action.split;
  GAffine aff = g_affine(split, action.group, g);
  qimaps::BoundarySimilarity sim;
  Eigen::MatrixXd Q = side_orthogonal(split, side);
  sim.orthogonal = orthogonal_power(Q, g.k);
  if (side == 1) {
    sim.scale_exponent = static_cast<double>(g.k);
    sim.translation = boundary::BlockVector::from_flat(split.Mbar1, aff.w.head(split.n1));
  } else {
    sim.scale_exponent = static_cast<double>(-g.k);
    sim.translation = boundary::BlockVector::from_flat(split.Mbar2, aff.w.tail(split.n2));
    if (action.tree_action)
      sim.madic_part = qimaps::MadicSimilarity{
          g.k, action.tree_action->boundary_translation(g.u, digit_window).scaled_by(g.k)};
  }
  return sim;
}

// --- dense boundary translations -------------------------------------------

SamplerResult dense_translation_sampler(const spectral::SpectralSplit& split, int side,
                                        const Eigen::VectorXd& target, double eps, int t_max,
                                        int max_terms) {
  if (eps <= 0) throw std::invalid_argument("dense_translation_sampler: eps must be positive");
  if (side != 1 && side != 2)
    throw std::invalid_argument("dense_translation_sampler: side must be 1 or 2");
  if (side == 2 && split.d != 1)
    throw std::invalid_argument(
        "dense_translation_sampler: side 2 needs a tree-free model (|det M| = 1)");
  const int dim = side == 1 ? split.n1 : split.n2;
  if (target.size() != dim)
    throw std::invalid_argument("dense_translation_sampler: target dimension mismatch");
  if (t_max < 0 || max_terms < 1)
    throw std::invalid_argument("dense_translation_sampler: bad search budget");

  AbcGroup G = AbcGroup::from_matrix(split.M);
  Eigen::MatrixXd forward = split.Mbar.asDiagonal() * split.P;
  Eigen::MatrixXd backward = split.P.transpose() * split.Mbar.cwiseInverse().asDiagonal();

  struct Candidate {
    long long t;
    int j;
    Eigen::VectorXd tau;
  };
  std::vector<Candidate> candidates;
  for (int j = 1; j <= split.n; ++j) {
    Eigen::VectorXd base = split.Sinv.col(j - 1);
    Eigen::VectorXd up = base, down = base;
    for (long long t = 0; t <= t_max; ++t) {
      const Eigen::VectorXd& full = t == 0 ? base : down;
      Eigen::VectorXd part = side == 1 ? full.head(dim) : full.tail(dim);
      candidates.push_back({t, j, part});
      if (t > 0) {
        Eigen::VectorXd part_up = side == 1 ? up.head(dim) : up.tail(dim);
        candidates.push_back({-t, j, part_up});
      }
      down = backward * down;  // translation of a^{-(t+1)} b_j a^{t+1}
      up = forward * up;
    }
  }

  SamplerResult res;
  res.g = identity(G);
  Eigen::VectorXd r = target;
  for (int iter = 0; iter < max_terms && r.norm() > eps; ++iter) {
    double best = r.norm();
    const Candidate* pick = nullptr;
    int sign = 1;
    for (const auto& c : candidates)
      for (int s : {1, -1}) {
        double val = (r - s * c.tau).norm();
        if (val < best - 1e-15) {
          best = val;
          pick = &c;
          sign = s;
        }
      }
    if (!pick) break;
    AbcElement conj{0, matrix_power_apply(G, -pick->t, basis_vector(split.n, pick->j, Rat(sign)))};
    res.g = multiply(G, res.g, conj);
    res.picks.push_back({pick->t, pick->j, sign});
    r -= sign * pick->tau;
  }
  if (r.norm() > eps)
    throw SearchBudgetExceeded("dense_translation_sampler: residual " + std::to_string(r.norm()) +
                               " stalled above eps");
  res.achieved = target - r;
  res.error = r.norm();
  return res;
}

}  // namespace solvlab::groups
