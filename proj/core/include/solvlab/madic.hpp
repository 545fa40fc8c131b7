#pragma once

// Finite-precision m-adic numbers: digit windows in base m with an exactness
// flag. An exact value has all digits outside the stored list equal to zero
// (so exact values are the nonnegative finite base-m expansions in Z[1/m]);
// an inexact value is known only on the window [val, val + digits.size()).
// Digits below `val` are zero by the canonical-form invariant, so the first
// stored digit of a nonzero value is nonzero and `val` is its valuation.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace solvlab::madic {

struct PrecisionExhausted : std::runtime_error {
  explicit PrecisionExhausted(const std::string& w) : std::runtime_error(w) {}
};

class MAdic {
 public:
  static constexpr int kDefaultPrecision = 64;

  MAdic() = default;
  MAdic(int base, long long val, std::vector<std::uint8_t> digits, bool exact = true,
        int precision = kDefaultPrecision)
      : m_(base), val_(val), digits_(std::move(digits)), exact_(exact), precision_(precision) {
    canonicalize();
  }

  static MAdic zero(int base) { return MAdic(base, 0, {}, true); }

  // Nonnegative integers are exact; negative ones get an N-digit complement
  // window (their expansions do not terminate).
  static MAdic from_integer(int base, long long n, int precision = kDefaultPrecision);

  int base() const { return m_; }
  bool is_zero() const { return digits_.empty() && exact_; }
  bool exact() const { return exact_; }
  int precision() const { return precision_; }
  long long window_start() const { return val_; }
  const std::vector<std::uint8_t>& digits() const { return digits_; }

  // Valuation (position of the lowest nonzero digit); nullopt for exact zero.
  // An inexact value whose whole window is zero has no decidable valuation.
  std::optional<long long> valuation() const {
    if (is_zero()) return std::nullopt;
    if (digits_.empty()) throw PrecisionExhausted("MAdic: valuation beyond the known window");
    return val_;
  }

  // Digit at an arbitrary position; 0 below the window, throws above the
  // known region of an inexact value.
  int digit_at(long long pos) const {
    if (pos < val_) return 0;
    long long i = pos - val_;
    if (i < static_cast<long long>(digits_.size())) return digits_[static_cast<std::size_t>(i)];
    if (exact_) return 0;
    throw PrecisionExhausted("MAdic: digit above the known window");
  }

  // Exclusive upper bound of the known digit region; nullopt = known forever.
  std::optional<long long> known_until() const {
    if (exact_) return std::nullopt;
    return val_ + static_cast<long long>(digits_.size());
  }

  // Multiplication by base^e (an m-adic similarity of ratio base^{-e}).
  // Zero is a fixed point and keeps its canonical window.
  MAdic scaled_by(long long e) const {
    MAdic out(*this);
    if (!(out.digits_.empty() && out.exact_)) out.val_ += e;
    return out;
  }

  std::string format() const;

  friend bool operator==(const MAdic& a, const MAdic& b) {
    return a.m_ == b.m_ && a.val_ == b.val_ && a.digits_ == b.digits_ && a.exact_ == b.exact_;
  }
  friend bool operator!=(const MAdic& a, const MAdic& b) { return !(a == b); }

 private:
  void canonicalize();

  int m_ = 2;
  long long val_ = 0;
  std::vector<std::uint8_t> digits_;
  bool exact_ = true;
  int precision_ = kDefaultPrecision;
};

// Digit-wise sum with carries. Exact + exact is exact; otherwise the result
// is truncated to the common known region (and to the smaller precision).
MAdic add(const MAdic& x, const MAdic& y);

// Valuation of x - y: the first position where the expansions differ.
// nullopt means provably equal; PrecisionExhausted when the windows agree
// but at least one side is inexact.
std::optional<long long> difference_valuation(const MAdic& x, const MAdic& y);

// base^{-v} with v the valuation of the difference; 0 when provably equal.
double madic_dist(const MAdic& x, const MAdic& y);

// Little-endian literal "digits@val": first character is the digit at
// position val. "11@-1" in base 2 is 2^{-1} + 2^0.
MAdic parse_madic(const std::string& text, int base);

}  // namespace solvlab::madic
