#pragma once

// Regular rooted-at-infinity trees T_{m+1} with the height orientation: every
// vertex has one outgoing edge "up" (toward the fixed anchor end) and m
// incoming edges from below. Vertices carry finite addresses relative to a
// fixed anchor ray; the parabolic boundary is the set of downward ends.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace solvlab::tree {

struct BranchingMismatch : std::runtime_error {
  explicit BranchingMismatch(const std::string& w) : std::runtime_error(w) {}
};

// Address digits are stored lowest-edge-first: addr[i] labels the edge between
// heights h+i and h+i+1. Edges above the stored word take the default digit 0
// (the anchor ray). Display form writes digits top-down: "011@-3" is the
// vertex at height -3 reached from the anchor ray by branches 0, 1, 1.
struct TreeVertex {
  int m = 2;
  int h = 0;
  std::vector<std::uint8_t> addr;

  TreeVertex() = default;
  TreeVertex(int branching, int height, std::vector<std::uint8_t> digits = {})
      : m(branching), h(height), addr(std::move(digits)) {
    canonicalize();
  }

  void canonicalize() {
    if (m < 2) throw std::invalid_argument("TreeVertex: branching must be >= 2");
    for (auto d : addr)
      if (d >= m) throw std::invalid_argument("TreeVertex: digit out of range");
    while (!addr.empty() && addr.back() == 0) addr.pop_back();
  }

  // Digit of the edge between heights e-1 and e (index = upper endpoint).
  int digit_at_index(long long e) const {
    long long i = e - h - 1;
    if (i < 0 || i >= static_cast<long long>(addr.size())) return 0;
    return addr[static_cast<std::size_t>(i)];
  }

  TreeVertex parent() const {
    TreeVertex p(*this);
    p.h += 1;
    if (!p.addr.empty()) p.addr.erase(p.addr.begin());
    return p;
  }

  TreeVertex child(int digit) const {
    if (digit < 0 || digit >= m) throw std::invalid_argument("TreeVertex: bad child digit");
    TreeVertex c(*this);
    c.h -= 1;
    c.addr.insert(c.addr.begin(), static_cast<std::uint8_t>(digit));
    c.canonicalize();
    return c;
  }

  TreeVertex ancestor_at(int height) const {
    if (height < h) throw std::invalid_argument("TreeVertex: ancestor height below vertex");
    TreeVertex a(m, height, {});
    std::size_t drop = static_cast<std::size_t>(height - h);
    if (drop < addr.size()) a.addr.assign(addr.begin() + static_cast<long>(drop), addr.end());
    a.canonicalize();
    return a;
  }

  // Vertex at the given height on the vertical line through *this (default
  // digit 0 below).
  TreeVertex on_line_at(int height) const {
    if (height >= h) return ancestor_at(height);
    TreeVertex v(m, height, {});
    v.addr.assign(static_cast<std::size_t>(h - height), 0);
    v.addr.insert(v.addr.end(), addr.begin(), addr.end());
    v.canonicalize();
    return v;
  }

  std::vector<TreeVertex> neighbors() const {
    std::vector<TreeVertex> out;
    out.reserve(static_cast<std::size_t>(m) + 1);
    out.push_back(parent());
    for (int j = 0; j < m; ++j) out.push_back(child(j));
    return out;
  }

  std::string format() const {
    std::string s;
    for (auto it = addr.rbegin(); it != addr.rend(); ++it) s.push_back(static_cast<char>('0' + *it));
    s.push_back('@');
    s += std::to_string(h);
    return s;
  }

  std::string key() const { return format(); }

  friend bool operator==(const TreeVertex& a, const TreeVertex& b) {
    return a.m == b.m && a.h == b.h && a.addr == b.addr;
  }
  friend bool operator!=(const TreeVertex& a, const TreeVertex& b) { return !(a == b); }
};

// Parses the "digits@height" display form.
TreeVertex parse_vertex(const std::string& text, int m);

// Least height >= max(h_u, h_v) at which the two vertical lines coincide.
int merge_height(const TreeVertex& u, const TreeVertex& v);

// Graph metric: (t0 - h_u) + (t0 - h_v) with t0 the merge height.
long long tree_distance(const TreeVertex& u, const TreeVertex& v);

}  // namespace solvlab::tree
