#pragma once

// Exact integer / rational arithmetic helpers shared by the spectral and group
// modules: Bareiss determinants, Smith normal form, rational linear algebra,
// and decimal-literal parsing. Everything is header-only and built on
// boost::multiprecision so denominators can grow without overflow.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace solvlab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }
inline double to_double(const Int& i) { return i.template convert_to<double>(); }

inline Int ipow(Int base, std::uint64_t e) {
  Int acc = 1;
  while (e) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

inline Rat rat_pow(const Rat& base, std::int64_t e) {
  if (e >= 0) {
    Int n = ipow(numerator(base), static_cast<std::uint64_t>(e));
    Int d = ipow(denominator(base), static_cast<std::uint64_t>(e));
    return Rat(n, d);
  }
  if (base == 0) throw std::domain_error("rat_pow: zero to negative power");
  Int n = ipow(numerator(base), static_cast<std::uint64_t>(-e));
  Int d = ipow(denominator(base), static_cast<std::uint64_t>(-e));
  return Rat(d, n);
}

// Floor of the k-th root of a nonnegative integer.
inline Int iroot(const Int& x, unsigned k) {
  if (x < 0) throw std::domain_error("iroot: negative radicand");
  if (k == 0) throw std::domain_error("iroot: zeroth root");
  if (x == 0 || x == 1 || k == 1) return x;
  Int lo = 1, hi = 2;
  while (ipow(hi, k) <= x) hi <<= 1;
  while (lo + 1 < hi) {
    Int mid = (lo + hi) >> 1;
    if (ipow(mid, k) <= x)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

inline bool exact_root(const Int& x, unsigned k, Int& out) {
  Int r = iroot(x, k);
  if (ipow(r, k) == x) {
    out = r;
    return true;
  }
  return false;
}

// Largest e with m = r^e; returns (r, e), e = 1 when m is not a proper power.
inline std::pair<Int, unsigned> primitive_base(const Int& m) {
  if (m < 2) throw std::domain_error("primitive_base: need m >= 2");
  unsigned maxe = 1;
  Int t = m;
  while (t > 1) {
    t >>= 1;
    ++maxe;
  }
  for (unsigned e = maxe; e >= 2; --e) {
    Int r;
    if (exact_root(m, e, r)) return {r, e};
  }
  return {m, 1};
}

inline bool is_proper_power(const Int& m) { return m >= 2 && primitive_base(m).second >= 2; }

// --- small dense matrices over exact scalars -------------------------------

template <class T>
struct Mat {
  int rows = 0, cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, T(0)) {}

  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
};

using IMat = Mat<Int>;
using RMat = Mat<Rat>;

template <class T>
Mat<T> mat_mul(const Mat<T>& x, const Mat<T>& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat_mul: shape mismatch");
  Mat<T> z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const T& v = x(i, k);
      if (v == 0) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) += v * y(k, j);
    }
  return z;
}

template <class T>
std::vector<T> mat_vec(const Mat<T>& x, const std::vector<T>& v) {
  if (x.cols != static_cast<int>(v.size())) throw std::invalid_argument("mat_vec: shape mismatch");
  std::vector<T> out(static_cast<std::size_t>(x.rows), T(0));
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) out[i] += x(i, j) * v[j];
  return out;
}

inline RMat to_rational(const IMat& m) {
  RMat r(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r(i, j) = Rat(m(i, j));
  return r;
}

// Fraction-free Bareiss elimination; exact determinant of an integer matrix.
inline Int bareiss_det(IMat m) {
  if (m.rows != m.cols) throw std::invalid_argument("bareiss_det: square matrix required");
  const int n = m.rows;
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m(k, k) == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (m(i, k) != 0) {
          p = i;
          break;
        }
      if (p < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        Int num = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        m(i, j) = num / prev;  // divides exactly (Bareiss identity)
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

// Gauss-Jordan inverse over the rationals; throws on singular input.
inline RMat rat_inverse(RMat m) {
  if (m.rows != m.cols) throw std::invalid_argument("rat_inverse: square matrix required");
  const int n = m.rows;
  RMat inv = RMat::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (m(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) throw std::domain_error("rat_inverse: singular matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(m(piv, j), m(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    Rat d = m(col, col);
    for (int j = 0; j < n; ++j) {
      m(col, j) /= d;
      inv(col, j) /= d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == col || m(i, col) == 0) continue;
      Rat f = m(i, col);
      for (int j = 0; j < n; ++j) {
        m(i, j) -= f * m(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

// Basis of the right nullspace of an n x m rational matrix (columns as vectors).
inline std::vector<std::vector<Rat>> rat_nullspace(RMat m) {
  const int rows = m.rows, cols = m.cols;
  std::vector<int> pivot_of_col(cols, -1);
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (m(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < cols; ++j) std::swap(m(piv, j), m(r, j));
    Rat d = m(r, c);
    for (int j = 0; j < cols; ++j) m(r, j) /= d;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rat f = m(i, c);
      for (int j = 0; j < cols; ++j) m(i, j) -= f * m(r, j);
    }
    pivot_of_col[c] = r;
    ++r;
  }
  std::vector<std::vector<Rat>> basis;
  for (int c = 0; c < cols; ++c) {
    if (pivot_of_col[c] >= 0) continue;
    std::vector<Rat> v(cols, Rat(0));
    v[c] = 1;
    for (int cc = 0; cc < cols; ++cc)
      if (pivot_of_col[cc] >= 0) v[cc] = -m(pivot_of_col[cc], c);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Smith normal form: returns unimodular U, V and diagonal D with U * M * V = D,
// d_i >= 0 and d_i | d_{i+1}.
struct SmithForm {
  IMat U, V, D;
};

inline SmithForm smith_normal_form(IMat m) {
  const int rows = m.rows, cols = m.cols;
  IMat U = IMat::identity(rows);
  IMat V = IMat::identity(cols);

  auto swap_rows = [&](int a, int b) {
    for (int j = 0; j < cols; ++j) std::swap(m(a, j), m(b, j));
    for (int j = 0; j < rows; ++j) std::swap(U(a, j), U(b, j));
  };
  auto swap_cols = [&](int a, int b) {
    for (int i = 0; i < rows; ++i) std::swap(m(i, a), m(i, b));
    for (int i = 0; i < cols; ++i) std::swap(V(i, a), V(i, b));
  };
  auto add_row = [&](int dst, int src, const Int& f) {  // row dst += f * row src
    for (int j = 0; j < cols; ++j) m(dst, j) += f * m(src, j);
    for (int j = 0; j < rows; ++j) U(dst, j) += f * U(src, j);
  };
  auto add_col = [&](int dst, int src, const Int& f) {
    for (int i = 0; i < rows; ++i) m(i, dst) += f * m(i, src);
    for (int i = 0; i < cols; ++i) V(i, dst) += f * V(i, src);
  };
  auto negate_row = [&](int a) {
    for (int j = 0; j < cols; ++j) m(a, j) = -m(a, j);
    for (int j = 0; j < rows; ++j) U(a, j) = -U(a, j);
  };

  const int t = std::min(rows, cols);
  for (int k = 0; k < t; ++k) {
    // Move a nonzero pivot into (k, k); stop when the trailing block is zero.
    int pi = -1, pj = -1;
    for (int i = k; i < rows && pi < 0; ++i)
      for (int j = k; j < cols; ++j)
        if (m(i, j) != 0) {
          pi = i;
          pj = j;
          break;
        }
    if (pi < 0) break;
    if (pi != k) swap_rows(pi, k);
    if (pj != k) swap_cols(pj, k);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = k + 1; i < rows; ++i) {
        if (m(i, k) == 0) continue;
        Int q = m(i, k) / m(k, k);
        add_row(i, k, -q);
        if (m(i, k) != 0) {
          swap_rows(i, k);
          clean = false;
        }
      }
      for (int j = k + 1; j < cols; ++j) {
        if (m(k, j) == 0) continue;
        Int q = m(k, j) / m(k, k);
        add_col(j, k, -q);
        if (m(k, j) != 0) {
          swap_cols(j, k);
          clean = false;
        }
      }
      if (clean) {
        // Enforce divisibility of the trailing block by the pivot.
        for (int i = k + 1; i < rows && clean; ++i)
          for (int j = k + 1; j < cols; ++j)
            if (m(i, j) % m(k, k) != 0) {
              add_row(k, i, Int(1));
              clean = false;
              break;
            }
      }
    }
    if (m(k, k) < 0) negate_row(k);
  }
  SmithForm out;
  out.U = std::move(U);
  out.V = std::move(V);
  out.D = std::move(m);
  return out;
}

// --- parsing ----------------------------------------------------------------

// Parses "p/q", integer, or decimal ("-0.9", "2.5e3") text into an exact
// rational. Decimal literals become exact tenth-powers, never binary floats.
inline Rat parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("parse_rational: empty literal");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
    return Rat(num, den);
  }

  bool neg = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    neg = (s[i] == '-');
    ++i;
  }
  std::string digits;
  long frac_len = 0;
  bool seen_dot = false, seen_digit = false;
  long exp10 = 0;
  for (; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '.') {
      if (seen_dot) throw std::invalid_argument("parse_rational: bad literal " + text);
      seen_dot = true;
    } else if (ch >= '0' && ch <= '9') {
      digits.push_back(ch);
      seen_digit = true;
      if (seen_dot) ++frac_len;
    } else if (ch == 'e' || ch == 'E') {
      exp10 = std::stol(s.substr(i + 1));
      break;
    } else {
      throw std::invalid_argument("parse_rational: bad literal " + text);
    }
  }
  if (!seen_digit) throw std::invalid_argument("parse_rational: bad literal " + text);
  Int mant = 0;  // accumulate digits (Int's string ctor treats leading 0 as octal)
  for (char ch : digits) mant = mant * 10 + (ch - '0');
  if (neg) mant = -mant;
  long net = exp10 - frac_len;
  if (net >= 0) return Rat(mant * ipow(Int(10), static_cast<std::uint64_t>(net)));
  return Rat(mant, ipow(Int(10), static_cast<std::uint64_t>(-net)));
}

}  // namespace solvlab
