#include "solvlab/tree.hpp"

#include <algorithm>

namespace solvlab::tree {

TreeVertex parse_vertex(const std::string& text, int m) {
  auto at = text.rfind('@');
  if (at == std::string::npos)
    throw std::invalid_argument("parse_vertex: expected digits@height, got " + text);
  std::string digits = text.substr(0, at);
  int h = std::stoi(text.substr(at + 1));
  std::vector<std::uint8_t> addr;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (*it < '0' || *it > '9') throw std::invalid_argument("parse_vertex: bad digit in " + text);
    addr.push_back(static_cast<std::uint8_t>(*it - '0'));
  }
  return TreeVertex(m, h, std::move(addr));
}

int merge_height(const TreeVertex& u, const TreeVertex& v) {
  if (u.m != v.m) throw BranchingMismatch("merge_height: different branching numbers");
  long long top_u = u.h + static_cast<long long>(u.addr.size());
  long long top_v = v.h + static_cast<long long>(v.addr.size());
  long long highest_diff = std::min(u.h, v.h);  // sentinel: no difference found
  bool diff = false;
  for (long long e = std::max(top_u, top_v); e > std::min(u.h, v.h); --e) {
    if (u.digit_at_index(e) != v.digit_at_index(e)) {
      highest_diff = e;
      diff = true;
      break;
    }
  }
  int base = std::max(u.h, v.h);
  if (!diff) return base;
  return static_cast<int>(std::max<long long>(base, highest_diff));
}

long long tree_distance(const TreeVertex& u, const TreeVertex& v) {
  int t0 = merge_height(u, v);
  return (static_cast<long long>(t0) - u.h) + (static_cast<long long>(t0) - v.h);
}

}  // namespace solvlab::tree
