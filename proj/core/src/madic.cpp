#include "solvlab/madic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace solvlab::madic {

void MAdic::canonicalize() {
  if (m_ < 2) throw std::invalid_argument("MAdic: base must be >= 2");
  if (precision_ < 1) throw std::invalid_argument("MAdic: precision must be >= 1");
  for (auto d : digits_)
    if (d >= m_) throw std::invalid_argument("MAdic: digit out of range");
  // Drop leading zeros, raising the window start to the valuation.
  std::size_t lead = 0;
  while (lead < digits_.size() && digits_[lead] == 0) ++lead;
  if (lead > 0) {
    // For inexact values the dropped zeros still shrink the known window,
    // which is the honest reading: the window below the valuation is free.
    digits_.erase(digits_.begin(), digits_.begin() + static_cast<long>(lead));
    val_ += static_cast<long long>(lead);
  }
  if (exact_) {
    while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
  } else if (static_cast<int>(digits_.size()) > precision_) {
    digits_.resize(static_cast<std::size_t>(precision_));
  }
  if (digits_.empty() && exact_) val_ = 0;
}

MAdic MAdic::from_integer(int base, long long n, int precision) {
  if (n >= 0) {
    std::vector<std::uint8_t> ds;
    for (long long v = n; v > 0; v /= base) ds.push_back(static_cast<std::uint8_t>(v % base));
    return MAdic(base, 0, std::move(ds), true, precision);
  }
  // -|n| = (base^N - |n|) mod base^N on an N-digit window.
  std::vector<std::uint8_t> ds(static_cast<std::size_t>(precision), 0);
  long long v = -n;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ds[i] = static_cast<std::uint8_t>(v % base);
    v /= base;
  }
  int borrow = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    int d = -ds[i] - borrow;  // digit of 0 minus digit of |n|
    borrow = d < 0 ? 1 : 0;
    if (d < 0) d += base;
    ds[i] = static_cast<std::uint8_t>(d);
  }
  return MAdic(base, 0, std::move(ds), false, precision);
}

std::string MAdic::format() const {
  if (is_zero()) return "0@0";
  std::string s;
  s.reserve(digits_.size() + 8);
  for (auto d : digits_) {
    if (d > 9) throw std::invalid_argument("MAdic::format: base > 10 not printable");
    s.push_back(static_cast<char>('0' + d));
  }
  s.push_back('@');
  s += std::to_string(val_);
  return s;
}

MAdic add(const MAdic& x, const MAdic& y) {
  if (x.base() != y.base()) throw std::invalid_argument("add: mixed m-adic bases");
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  const int base = x.base();
  const long long lo = std::min(x.window_start(), y.window_start());
  const bool exact = x.exact() && y.exact();
  long long hi;  // exclusive bound of computable digits
  if (exact) {
    hi = std::max(x.window_start() + static_cast<long long>(x.digits().size()),
                  y.window_start() + static_cast<long long>(y.digits().size())) +
         1;  // room for the final carry
  } else {
    hi = std::min(x.known_until().value_or(std::numeric_limits<long long>::max()),
                  y.known_until().value_or(std::numeric_limits<long long>::max()));
    if (hi <= lo) throw PrecisionExhausted("add: known windows do not overlap");
  }
  std::vector<std::uint8_t> ds;
  ds.reserve(static_cast<std::size_t>(hi - lo));
  int carry = 0;
  for (long long p = lo; p < hi; ++p) {
    int d = x.digit_at(p) + y.digit_at(p) + carry;
    carry = d / base;
    ds.push_back(static_cast<std::uint8_t>(d % base));
  }
  return MAdic(base, lo, std::move(ds), exact, std::min(x.precision(), y.precision()));
}

std::optional<long long> difference_valuation(const MAdic& x, const MAdic& y) {
  if (x.base() != y.base()) throw std::invalid_argument("difference_valuation: mixed bases");
  if (x == y) return std::nullopt;  // identical representations denote one point
  const long long lo = std::min(x.window_start(), y.window_start());
  const bool both_exact = x.exact() && y.exact();
  constexpr long long kInf = std::numeric_limits<long long>::max();
  long long scan_hi;
  if (both_exact) {
    scan_hi = std::max(x.window_start() + static_cast<long long>(x.digits().size()),
                       y.window_start() + static_cast<long long>(y.digits().size()));
  } else {
    scan_hi = std::min(x.known_until().value_or(kInf), y.known_until().value_or(kInf));
  }
  // Borrows never cross a first mismatch, so the valuation of the difference
  // is exactly the first position where the expansions differ.
  for (long long p = lo; p < scan_hi; ++p)
    if (x.digit_at(p) != y.digit_at(p)) return p;
  if (both_exact) return std::nullopt;  // equal finite expansions
  throw PrecisionExhausted("difference_valuation: equal on the common window");
}

double madic_dist(const MAdic& x, const MAdic& y) {
  auto v = difference_valuation(x, y);
  if (!v) return 0.0;
  return std::pow(static_cast<double>(x.base()), -static_cast<double>(*v));
}

MAdic parse_madic(const std::string& text, int base) {
  auto at = text.rfind('@');
  if (at == std::string::npos) throw std::invalid_argument("parse_madic: missing '@'");
  const std::string digit_part = text.substr(0, at);
  const std::string val_part = text.substr(at + 1);
  if (val_part.empty()) throw std::invalid_argument("parse_madic: missing window start");
  long long val = std::stoll(val_part);
  std::vector<std::uint8_t> ds;
  ds.reserve(digit_part.size());
  for (char c : digit_part) {
    if (c < '0' || c > '9') throw std::invalid_argument("parse_madic: bad digit");
    ds.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return MAdic(base, val, std::move(ds), true);
}

}  // namespace solvlab::madic
