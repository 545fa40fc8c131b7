#pragma once

// Parabolic visual boundaries of the factor spaces and their metrics: digit
// expansions (Q_m with the valuation metric), block vectors (R^n with the
// powered-max metric D_Mbar), products R^n x Q_m, and the two boundaries of
// a horocyclic product, each reached by freezing a vertical geodesic.

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "solvlab/horoprod.hpp"
#include "solvlab/madic.hpp"
#include "solvlab/spaces.hpp"
#include "solvlab/spectral.hpp"
#include "solvlab/tree.hpp"

namespace solvlab::boundary {

struct BlockMismatch : std::runtime_error {
  explicit BlockMismatch(const std::string& w) : std::runtime_error(w) {}
};
struct NotComparable : std::runtime_error {
  explicit NotComparable(const std::string& w) : std::runtime_error(w) {}
};

// Coordinates grouped by ascending expansion exponent class.
struct BlockVector {
  std::vector<Eigen::VectorXd> blocks;

  static BlockVector from_flat(const spectral::DiagBlock& block, const Eigen::VectorXd& x);
  Eigen::VectorXd flat() const;
  int levels() const { return static_cast<int>(blocks.size()); }
};

// D_Mbar(v, w) = max_i ||dx_i||^{alpha_1/alpha_i}, the visual parabolic
// metric on the horospherical boundary of G_Mbar.
double dM_metric(const BlockVector& v, const BlockVector& w, const spectral::DiagBlock& block);
double dM_metric(const BlockVector& v, const BlockVector& w, const spectral::SpectralSplit& split,
                 spectral::BlockSide side);

struct ProductBoundaryPoint {
  BlockVector x;
  madic::MAdic y;
};

// max(D_Mbar on the block part, valuation metric on the digit part).
double product_metric(const ProductBoundaryPoint& p, const ProductBoundaryPoint& q,
                      const spectral::DiagBlock& block);

// Height at which two vertical geodesics of G_Mbar come within eps: the
// solution of ||Mbar^{-t}(v - w)|| = eps (the norm decreases in t).
double g_divergence_height(const Eigen::VectorXd& dv, const spectral::DiagBlock& block,
                           double eps);

// Visual metric a^{t0} with t0 the smallest height at which the two vertical
// geodesics are eps-close; equal geodesics give 0.
double visual_metric(const tree::TreeVertex& xi, const tree::TreeVertex& eta, double a,
                     double eps);
double visual_metric(const spaces::GRay& xi, const spaces::GRay& eta,
                     const spectral::DiagBlock& block, double a, double eps);
double visual_metric(const spaces::ZRay& xi, const spaces::ZRay& eta,
                     const spectral::DiagBlock& block, double a, double eps);

// A vertical geodesic of a horocyclic product is a pair of factor rays.
using FactorRay = std::variant<spaces::GRay, tree::TreeVertex, spaces::ZRay>;

struct ProductRay {
  FactorRay r1, r2;
};

// The vertical geodesic through a point, factorwise.
ProductRay vertical_ray_through(const horoprod::ModelSpace& space, const horoprod::HPoint& p);

// The boundary class of a vertical geodesic on the chosen side: freezing the
// other factor, this is just the side's factor ray data.
FactorRay horo_boundary_class(const ProductRay& l, int side);

// Side-2 boundary data of an xmbar model as a point of R^{n2} x Q_d.
ProductBoundaryPoint to_product_boundary(const spaces::ZRay& r,
                                         const spectral::DiagBlock& block);

}  // namespace solvlab::boundary
