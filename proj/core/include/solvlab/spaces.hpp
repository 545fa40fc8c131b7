#pragma once

// Height-function building blocks: homogeneous spaces G_Mbar (coordinates
// (v, t), horospherical metric ||Mbar^{-t} dv||, coarse length surrogate),
// millefeuille spaces Z_{Mbar,m} (tree fibered with G), horofunctions, and
// vertical-geodesic boundary data. The hyperbolic plane is G_{[e]}.

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "solvlab/spectral.hpp"
#include "solvlab/tree.hpp"

namespace solvlab::spaces {

using spectral::DiagBlock;
using tree::TreeVertex;

struct HeightMismatch : std::runtime_error {
  explicit HeightMismatch(const std::string& w) : std::runtime_error(w) {}
};
struct TruncationTooSmall : std::runtime_error {
  explicit TruncationTooSmall(const std::string& w) : std::runtime_error(w) {}
};

struct GPoint {
  double t = 0;
  Eigen::VectorXd v;

  GPoint() = default;
  GPoint(double height, Eigen::VectorXd coords) : t(height), v(std::move(coords)) {}
};

// Point of Z_{Mbar,m}: a tree vertex and a G-coordinate sharing one height
// (the tree height is the height of the point).
struct ZPoint {
  TreeVertex tv;
  Eigen::VectorXd v;

  int height() const { return tv.h; }
};

// Vertical-geodesic (boundary) data: the downward limit of the unique
// vertical line through a point.
struct GRay {
  Eigen::VectorXd v;
};
struct ZRay {
  TreeVertex through;  // digits below default to 0
  Eigen::VectorXd v;
};

// The hyperbolic plane as a one-dimensional block with lambda = e.
DiagBlock hyperbolic_plane_block();

// Euclidean norms of dv restricted to each alpha class of the block.
std::vector<double> block_norms(const DiagBlock& block, const Eigen::VectorXd& dv);

// ||Mbar^{-t}(v_p - v_q)|| at the common height; heights must agree to 1e-12.
double horospherical_distance(const GPoint& p, const GPoint& q, const Eigen::VectorXd& mbar_diag);
double horospherical_distance(const GPoint& p, const GPoint& q, const spectral::SpectralSplit& split);
double horospherical_distance(const GPoint& p, const GPoint& q, const DiagBlock& block);

// Coarse surrogate for the left-invariant metric: rise to the least height b
// at which the pair's horospherical separation is O(1), then descend.
double coarse_distance_G(const GPoint& p, const GPoint& q, const DiagBlock& block);

// Same shape for the millefeuille space: b also clears the tree merge height.
double coarse_distance_Z(const ZPoint& p, const ZPoint& q, const DiagBlock& block);

// Horofunctions d(x, l(T)) - T along a vertical ray, with stabilization check
// against T-1 (TruncationTooSmall when not yet stabilized).
double horofunction(const TreeVertex& x, const TreeVertex& ray_through, int T);
double horofunction(const GPoint& x, const GRay& ray, const DiagBlock& block, double T);
double horofunction(const ZPoint& x, const ZRay& ray, const DiagBlock& block, int T);

TreeVertex vertical_geodesic(const TreeVertex& x);
GRay vertical_geodesic(const GPoint& x);
ZRay vertical_geodesic(const ZPoint& x);

}  // namespace solvlab::spaces
