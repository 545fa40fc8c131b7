#include "solvlab/modelcount.hpp"

namespace solvlab::modelcount {

std::optional<CommonBase> common_base(const Int& m, const Int& p) {
  if (m < 2 || p < 2)
    throw std::invalid_argument("common_base: both arguments must be >= 2");
  const auto [rm, im] = primitive_base(m);
  const auto [rp, ip] = primitive_base(p);
  if (rm != rp) return std::nullopt;
  return CommonBase{rm, im, ip};
}

std::vector<long long> admissible_exponents(const Int& d, long long kmax) {
  if (d < 2) throw std::invalid_argument("admissible_exponents: need d >= 2");
  if (is_proper_power(d))
    throw ProperPowerBase("admissible_exponents: " + d.str() +
                          " is a proper power; reduce to its primitive base");
  std::vector<long long> out;
  for (long long k = 1; k <= kmax; ++k) out.push_back(k);
  return out;
}

IndexIdentity index_identity_check(const GraphOfGroupsDatum& datum) {
  if (datum.d < 1 || datum.e < 1 || datum.f < 1 || datum.g < 1)
    throw std::invalid_argument("index_identity_check: indices must be >= 1");
  const Int fg = datum.f * datum.g;
  return (datum.d == fg && datum.e == fg) ? IndexIdentity::Consistent
                                          : IndexIdentity::Inconsistent;
}

}  // namespace solvlab::modelcount
