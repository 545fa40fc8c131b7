#include "solvlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace solvlab::spectral {

namespace {

constexpr double kUnitCircleTol = 1e-9;
constexpr double kReconstructTol = 1e-9;
constexpr double kAlphaMergeTol = 1e-9;

struct Unit {  // one real eigenvalue or one conjugate pair
  std::complex<double> lambda;  // imag > 0 for pairs
  bool complex_pair = false;
  Eigen::VectorXcd vec;
};

Eigen::MatrixXd to_eigen(const IMat& m) {
  Eigen::MatrixXd out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(i, j) = to_double(m(i, j));
  return out;
}

Eigen::MatrixXd to_eigen(const RMat& m) {
  Eigen::MatrixXd out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(i, j) = to_double(m(i, j));
  return out;
}

// Try the all-integer-eigenvalue route: exact rational S, integer Mbar, sign
// matrix P. Returns false when some eigenvalue is not an integer; throws
// NotDiagonalizable when integer eigenvalues lack a full eigenbasis.
bool try_exact_split(const IMat& M, const std::vector<std::complex<double>>& eigs,
                     SpectralSplit& out) {
  const int n = M.rows;
  std::vector<long long> rounded;
  for (const auto& ev : eigs) {
    if (std::abs(ev.imag()) > kUnitCircleTol) return false;
    double re = ev.real();
    long long r = std::llround(re);
    if (std::abs(re - r) > 1e-7 * std::max(1.0, std::abs(re))) return false;
    rounded.push_back(r);
  }
  // Distinct integer eigenvalues with multiplicities, sorted |l| desc, then l desc.
  std::vector<std::pair<long long, int>> distinct;
  for (long long r : rounded) {
    auto it = std::find_if(distinct.begin(), distinct.end(),
                           [&](const auto& p) { return p.first == r; });
    if (it == distinct.end())
      distinct.push_back({r, 1});
    else
      ++it->second;
  }
  std::sort(distinct.begin(), distinct.end(), [](const auto& a, const auto& b) {
    if (std::llabs(a.first) != std::llabs(b.first)) return std::llabs(a.first) > std::llabs(b.first);
    return a.first > b.first;
  });

  RMat S(n, n);
  std::vector<Int> mbar;
  std::vector<int> psign;
  std::vector<std::complex<double>> ordered_eigs;
  int col = 0;
  for (auto [lam, mult] : distinct) {
    IMat shifted = M;
    for (int i = 0; i < n; ++i) shifted(i, i) -= Int(lam);
    if (bareiss_det(shifted) != 0) return false;  // not actually an eigenvalue
    auto basis = rat_nullspace(to_rational(shifted));
    if (static_cast<int>(basis.size()) != mult)
      throw NotDiagonalizable("integer eigenvalue " + std::to_string(lam) +
                              " has defective eigenspace");
    for (const auto& v : basis) {
      for (int i = 0; i < n; ++i) S(i, col) = v[i];
      mbar.push_back(Int(std::llabs(lam)));
      psign.push_back(lam >= 0 ? 1 : -1);
      ordered_eigs.push_back({static_cast<double>(lam), 0.0});
      ++col;
    }
  }
  if (col != n) throw NotDiagonalizable("defective integer spectrum");

  out.exact = true;
  out.Sx = S;
  out.Sxinv = rat_inverse(S);
  out.mbar_exact = mbar;
  out.p_sign = psign;
  out.eigenvalues = ordered_eigs;
  out.S = to_eigen(S);
  out.Sinv = to_eigen(out.Sxinv);
  out.Mbar = Eigen::VectorXd(n);
  out.P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    out.Mbar(i) = to_double(mbar[i]);
    out.P(i, i) = psign[i];
  }
  return true;
}

}  // namespace

DiagBlock DiagBlock::from_lambdas(std::vector<double> ls) {
  DiagBlock b;
  b.lambdas = std::move(ls);
  b.alpha_index.resize(b.lambdas.size());
  std::vector<double> sorted_logs;
  for (double l : b.lambdas) sorted_logs.push_back(std::log(l));
  std::vector<double> distinct;
  for (std::size_t i = 0; i < b.lambdas.size(); ++i) {
    double a = std::log(b.lambdas[i]);
    int found = -1;
    for (std::size_t k = 0; k < distinct.size(); ++k)
      if (std::abs(distinct[k] - a) <= kAlphaMergeTol) {
        found = static_cast<int>(k);
        break;
      }
    if (found < 0) {
      distinct.push_back(a);
      found = static_cast<int>(distinct.size()) - 1;
    }
    b.alpha_index[i] = found;
  }
  // Re-sort alpha classes ascending and remap indices.
  std::vector<int> order(distinct.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return distinct[x] < distinct[y]; });
  std::vector<int> rank(distinct.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  b.alphas.resize(distinct.size());
  b.alpha_dims.assign(distinct.size(), 0);
  for (std::size_t i = 0; i < distinct.size(); ++i) b.alphas[rank[i]] = distinct[i];
  for (auto& idx : b.alpha_index) {
    idx = rank[idx];
    ++b.alpha_dims[idx];
  }
  return b;
}

std::string to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::SolLike: return "SolLike";
    case CaseLabel::Expanding: return "Expanding";
    case CaseLabel::Mixed: return "Mixed";
    case CaseLabel::ScalarTree: return "ScalarTree";
  }
  return "?";
}

SpectralSplit analyze(const IMat& M) {
  if (M.rows != M.cols || M.rows == 0)
    throw std::invalid_argument("analyze: square nonempty matrix required");
  const int n = M.rows;

  SpectralSplit out;
  out.M = M;
  out.n = n;
  out.det = bareiss_det(M);
  if (out.det == 0) throw SingularMatrix("det M = 0");
  out.d = out.det < 0 ? -out.det : out.det;

  Eigen::MatrixXd Md = to_eigen(M);
  Eigen::EigenSolver<Eigen::MatrixXd> es(Md);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");

  std::vector<std::complex<double>> raw(n);
  for (int i = 0; i < n; ++i) raw[i] = es.eigenvalues()(i);
  for (const auto& ev : raw)
    if (std::abs(std::abs(ev) - 1.0) <= kUnitCircleTol)
      throw EigenvalueOnUnitCircle("eigenvalue of modulus 1 within 1e-9");

  if (!try_exact_split(M, raw, out)) {
    // Floating route: group conjugate pairs, sort by modulus descending.
    std::vector<bool> used(n, false);
    std::vector<Unit> units;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      std::complex<double> ev = raw[i];
      if (std::abs(ev.imag()) > 1e-9 * std::max(1.0, std::abs(ev))) {
        int best = -1;
        double bestgap = 1e300;
        for (int j = 0; j < n; ++j) {
          if (used[j]) continue;
          double gap = std::abs(raw[j] - std::conj(ev));
          if (gap < bestgap) {
            bestgap = gap;
            best = j;
          }
        }
        if (best < 0) throw NotDiagonalizable("unpaired complex eigenvalue");
        used[best] = true;
        Unit u;
        u.complex_pair = true;
        u.lambda = ev.imag() > 0 ? ev : raw[best];
        u.vec = ev.imag() > 0 ? es.eigenvectors().col(i) : es.eigenvectors().col(best);
        units.push_back(std::move(u));
      } else {
        Unit u;
        u.complex_pair = false;
        u.lambda = {ev.real(), 0.0};
        u.vec = es.eigenvectors().col(i);
        units.push_back(std::move(u));
      }
    }
    std::stable_sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) {
      double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
      if (std::abs(ma - mb) > 1e-12) return ma > mb;
      if (std::abs(a.lambda.real() - b.lambda.real()) > 1e-12)
        return a.lambda.real() > b.lambda.real();
      return a.lambda.imag() < b.lambda.imag();
    });

    out.S = Eigen::MatrixXd(n, n);
    out.Mbar = Eigen::VectorXd(n);
    out.P = Eigen::MatrixXd::Zero(n, n);
    out.eigenvalues.clear();
    int col = 0;
    for (const auto& u : units) {
      if (!u.complex_pair) {
        // Rotate the eigenvector to a real phase.
        int imax = 0;
        double best = -1;
        for (int i = 0; i < n; ++i)
          if (std::abs(u.vec(i)) > best) {
            best = std::abs(u.vec(i));
            imax = i;
          }
        std::complex<double> phase = u.vec(imax) / std::abs(u.vec(imax));
        Eigen::VectorXcd w = u.vec / phase;
        if (w.imag().norm() > 1e-6 * w.real().norm())
          throw NotDiagonalizable("real eigenvalue with essentially complex eigenvector");
        Eigen::VectorXd v = w.real();
        v.normalize();
        out.S.col(col) = v;
        out.Mbar(col) = std::abs(u.lambda.real());
        out.P(col, col) = u.lambda.real() >= 0 ? 1.0 : -1.0;
        out.eigenvalues.push_back(u.lambda);
        ++col;
      } else {
        Eigen::VectorXd re = u.vec.real(), im = u.vec.imag();
        double scale = std::max(re.norm(), im.norm());
        re /= scale;
        im /= scale;
        out.S.col(col) = re;
        out.S.col(col + 1) = im;
        double rho = std::abs(u.lambda);
        double a = u.lambda.real() / rho, b = u.lambda.imag() / rho;
        out.Mbar(col) = rho;
        out.Mbar(col + 1) = rho;
        out.P(col, col) = a;
        out.P(col, col + 1) = b;
        out.P(col + 1, col) = -b;
        out.P(col + 1, col + 1) = a;
        out.eigenvalues.push_back(u.lambda);
        out.eigenvalues.push_back(std::conj(u.lambda));
        col += 2;
      }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.S);
    double smin = svd.singularValues()(n - 1), smax = svd.singularValues()(0);
    if (smin <= 1e-10 * smax) throw NotDiagonalizable("eigenbasis numerically singular");
    out.Sinv = out.S.inverse();
  }

  Eigen::MatrixXd rec = out.S * out.Mbar.asDiagonal() * out.P * out.Sinv;
  if ((rec - Md).cwiseAbs().maxCoeff() > kReconstructTol)
    throw NotDiagonalizable("splitting fails to reconstruct M within 1e-9");

  out.n1 = 0;
  for (int i = 0; i < n; ++i)
    if (out.Mbar(i) > 1.0) ++out.n1;
  out.n2 = n - out.n1;
  // Moduli sorted descending, so the expanding part is the leading block.
  for (int i = 0; i < out.n1; ++i)
    if (!(out.Mbar(i) > 1.0)) throw std::logic_error("expanding block not leading");
  std::vector<double> l1, l2;
  for (int i = 0; i < out.n1; ++i) l1.push_back(out.Mbar(i));
  for (int i = out.n1; i < n; ++i) l2.push_back(1.0 / out.Mbar(i));
  out.Mbar1 = DiagBlock::from_lambdas(std::move(l1));
  out.Mbar2 = DiagBlock::from_lambdas(std::move(l2));
  return out;
}

CaseLabel classify(const SpectralSplit& split) {
  if (split.n == 1) return CaseLabel::ScalarTree;
  if (split.d == 1) return CaseLabel::SolLike;
  if (split.n2 == 0) return CaseLabel::Expanding;
  return CaseLabel::Mixed;
}

AbsolutePower absolute_power(const SpectralSplit& split, const Rat& k) {
  Int p = numerator(k), q = denominator(k);  // q > 0, gcd(p, q) = 1
  AbsolutePower out;
  if (split.d == 1) {
    out.dk = 1;
  } else if (p < 0) {
    throw NonIntegralDeterminantPower("d^k < 1 for d > 1, k < 0");
  } else {
    if (p > 4096 || q > 4096) throw std::invalid_argument("absolute_power: exponent too large");
    Int dp = ipow(split.d, p.convert_to<std::uint64_t>());
    Int r;
    if (!exact_root(dp, q.convert_to<unsigned>(), r))
      throw NonIntegralDeterminantPower("d^k is not an integer");
    out.dk = r;
  }
  double kd = to_double(k);
  out.Mbar_k = Eigen::VectorXd(split.n);
  for (int i = 0; i < split.n; ++i) out.Mbar_k(i) = std::pow(split.Mbar(i), kd);
  return out;
}

std::vector<double> snowflake_exponents(const DiagBlock& block) {
  if (block.empty()) throw EmptyBlock("snowflake_exponents: empty block");
  std::vector<double> out;
  out.reserve(block.alphas.size());
  for (std::size_t i = 0; i < block.alphas.size(); ++i)
    out.push_back(i == 0 ? 1.0 : block.alphas[0] / block.alphas[i]);
  return out;  // alphas ascending => ratios descending, first exactly 1
}

std::vector<double> snowflake_exponents(const SpectralSplit& split, BlockSide side) {
  return snowflake_exponents(side == BlockSide::Expanding1 ? split.Mbar1 : split.Mbar2);
}

IMat parse_int_matrix(const std::string& text) {
  std::vector<std::vector<Int>> rows;
  std::vector<Int> cur;
  std::string num;
  int depth = 0;
  auto flush = [&]() {
    if (!num.empty()) {
      cur.push_back(Int(num));
      num.clear();
    }
  };
  for (char ch : text) {
    if (ch == '[') {
      ++depth;
    } else if (ch == ']') {
      flush();
      if (depth == 2 || (depth == 1 && rows.empty() && !cur.empty())) {
        if (!cur.empty()) rows.push_back(cur);
        cur.clear();
      }
      --depth;
    } else if (ch == ',') {
      flush();
    } else if (ch == '-' || (ch >= '0' && ch <= '9')) {
      num.push_back(ch);
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      throw std::invalid_argument("parse_int_matrix: bad character in " + text);
    }
  }
  flush();
  if (!cur.empty()) rows.push_back(cur);
  if (rows.empty()) throw std::invalid_argument("parse_int_matrix: empty matrix");
  IMat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::invalid_argument("parse_int_matrix: ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  }
  return m;
}

}  // namespace solvlab::spectral
