#pragma once

// Commensuration arithmetic for tree lattices: detecting when two branching
// numbers are powers of a common base, listing the exponents k for which d^k
// is an integer, and the single-edge index identity d = e = f·g that a
// quasi-conjugacy of transitive tree actions forces.

#include <optional>
#include <stdexcept>
#include <vector>

#include "solvlab/exact.hpp"

namespace solvlab::modelcount {

// Raised when an operation needs a base that is not a proper power; the
// caller should first replace d by its primitive base.
struct ProperPowerBase : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// m = root^i and p = root^j, with root not a proper power. Such a triple is
// unique when it exists.
struct CommonBase {
  Int root;
  unsigned i = 0;
  unsigned j = 0;
};

// The unique common-base triple of m, p >= 2, or nothing when the primitive
// bases differ.
std::optional<CommonBase> common_base(const Int& m, const Int& p);

// The exponents k <= kmax with d^k an integer. For d >= 2 not a proper power
// a fractional exponent i/j in lowest terms with j > 1 never gives an
// integer, so the answer is exactly the initial segment 1, 2, ..., kmax.
// Throws ProperPowerBase when d is a proper power (reduce it first).
std::vector<long long> admissible_exponents(const Int& d, long long kmax);

// Indices of a single-edge graph-of-groups cycle: d and e are the two edge
// indices, and f, g the subgroup-chain indices that factor them. Multi-edge
// cycles must be collapsed (indices multiplied) before filling this in.
struct GraphOfGroupsDatum {
  Int d = 1;
  Int e = 1;
  Int f = 1;
  Int g = 1;
};

enum class IndexIdentity { Consistent, Inconsistent };

// Consistent exactly when d = f·g and e = f·g, the arithmetic shadow of a
// quasi-conjugacy between the two transitive actions. All indices must be
// >= 1.
IndexIdentity index_identity_check(const GraphOfGroupsDatum& datum);

}  // namespace solvlab::modelcount
