#pragma once

// Spectral analysis of integral matrices: eigenvalues, the absolute Jordan
// splitting M = S * Mbar * P * S^{-1} with Mbar positive diagonal and P
// orthogonal, expanding/contracting blocks, exact determinants, and rational
// powers of the diagonal part.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solvlab/exact.hpp"

namespace solvlab::spectral {

struct EigenvalueOnUnitCircle : std::runtime_error {
  explicit EigenvalueOnUnitCircle(const std::string& w) : std::runtime_error(w) {}
};
struct NotDiagonalizable : std::runtime_error {
  explicit NotDiagonalizable(const std::string& w) : std::runtime_error(w) {}
};
struct SingularMatrix : std::runtime_error {
  explicit SingularMatrix(const std::string& w) : std::runtime_error(w) {}
};
struct NonIntegralDeterminantPower : std::runtime_error {
  explicit NonIntegralDeterminantPower(const std::string& w) : std::runtime_error(w) {}
};
struct EmptyBlock : std::runtime_error {
  explicit EmptyBlock(const std::string& w) : std::runtime_error(w) {}
};

// One side of the splitting: positive diagonal entries (all > 1) in basis
// order, plus the distinct logarithms a_1 < ... < a_r with multiplicities.
// Values within 1e-9 of each other are merged into one alpha class.
struct DiagBlock {
  std::vector<double> lambdas;   // per coordinate, every entry > 1
  std::vector<double> alphas;    // distinct ln(lambda), ascending
  std::vector<int> alpha_dims;   // multiplicity of each alpha class
  std::vector<int> alpha_index;  // coordinate -> alpha class

  int dim() const { return static_cast<int>(lambdas.size()); }
  bool empty() const { return lambdas.empty(); }

  static DiagBlock from_lambdas(std::vector<double> ls);
};

enum class CaseLabel { SolLike, Expanding, Mixed, ScalarTree };

std::string to_string(CaseLabel c);

struct SpectralSplit {
  IMat M;
  int n = 0;
  std::vector<std::complex<double>> eigenvalues;  // sorted by modulus descending
  Eigen::VectorXd Mbar;                           // diagonal of the absolute form
  Eigen::MatrixXd S, Sinv, P;
  Int det = 0;  // exact, signed
  Int d = 0;    // |det M|
  int n1 = 0, n2 = 0;
  DiagBlock Mbar1;  // eigen-moduli > 1
  DiagBlock Mbar2;  // reciprocals of eigen-moduli < 1 (entries > 1)

  // Exact data, present when every eigenvalue is a (real) integer. The float
  // fields above are then derived from these, so both views agree exactly.
  bool exact = false;
  RMat Sx, Sxinv;               // rational change of basis
  std::vector<Int> mbar_exact;  // |lambda_i| per coordinate
  std::vector<int> p_sign;      // diagonal of P, entries +-1
};

// Throws EigenvalueOnUnitCircle / NotDiagonalizable / SingularMatrix.
SpectralSplit analyze(const IMat& M);

CaseLabel classify(const SpectralSplit& split);

struct AbsolutePower {
  Eigen::VectorXd Mbar_k;
  Int dk = 0;
};

// Entrywise rational power of Mbar; d^k must be an exact integer.
AbsolutePower absolute_power(const SpectralSplit& split, const Rat& k);

enum class BlockSide { Expanding1, Expanding2 };

// Ratios alpha_1/alpha_i, sorted descending, first entry exactly 1.
std::vector<double> snowflake_exponents(const SpectralSplit& split, BlockSide side);
std::vector<double> snowflake_exponents(const DiagBlock& block);

// Convenience: parse "[[2,1],[1,1]]"-style text into an integer matrix.
IMat parse_int_matrix(const std::string& text);

}  // namespace solvlab::spectral
