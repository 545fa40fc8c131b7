#include "solvlab/spaces.hpp"

#include <algorithm>
#include <cmath>

namespace solvlab::spaces {

namespace {

constexpr double kHeightTol = 1e-12;

// Least height b >= max(heights) at which the two vertical lines through the
// given G-coordinates come within O(1) horospherical distance.
double clearing_height(double t_p, double t_q, const Eigen::VectorXd& dv, const DiagBlock& block) {
  double b = std::max(t_p, t_q);
  auto norms = block_norms(block, dv);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] <= 0) continue;  // b_i = -infinity when the block difference vanishes
    b = std::max(b, std::log(norms[i]) / block.alphas[i]);
  }
  return b;
}

}  // namespace

DiagBlock hyperbolic_plane_block() {
  return DiagBlock::from_lambdas({std::exp(1.0)});
}

std::vector<double> block_norms(const DiagBlock& block, const Eigen::VectorXd& dv) {
  if (dv.size() != block.dim())
    throw std::invalid_argument("block_norms: vector does not match block dimension");
  std::vector<double> acc(block.alphas.size(), 0.0);
  for (int i = 0; i < dv.size(); ++i) acc[block.alpha_index[i]] += dv(i) * dv(i);
  for (auto& x : acc) x = std::sqrt(x);
  return acc;
}

double horospherical_distance(const GPoint& p, const GPoint& q, const Eigen::VectorXd& mbar_diag) {
  if (std::abs(p.t - q.t) > kHeightTol)
    throw HeightMismatch("horospherical_distance: points at different heights");
  if (p.v.size() != q.v.size() || p.v.size() != mbar_diag.size())
    throw std::invalid_argument("horospherical_distance: dimension mismatch");
  double acc = 0;
  for (int i = 0; i < p.v.size(); ++i) {
    double w = std::pow(mbar_diag(i), -p.t) * (p.v(i) - q.v(i));
    acc += w * w;
  }
  return std::sqrt(acc);
}

double horospherical_distance(const GPoint& p, const GPoint& q,
                              const spectral::SpectralSplit& split) {
  return horospherical_distance(p, q, split.Mbar);
}

double horospherical_distance(const GPoint& p, const GPoint& q, const DiagBlock& block) {
  Eigen::VectorXd diag(block.dim());
  for (int i = 0; i < block.dim(); ++i) diag(i) = block.lambdas[i];
  return horospherical_distance(p, q, diag);
}

double coarse_distance_G(const GPoint& p, const GPoint& q, const DiagBlock& block) {
  double b = clearing_height(p.t, q.t, p.v - q.v, block);
  return (b - p.t) + (b - q.t);
}

double coarse_distance_Z(const ZPoint& p, const ZPoint& q, const DiagBlock& block) {
  double b = clearing_height(p.height(), q.height(), p.v - q.v, block);
  b = std::max(b, static_cast<double>(tree::merge_height(p.tv, q.tv)));
  return (b - p.height()) + (b - q.height());
}

double horofunction(const TreeVertex& x, const TreeVertex& ray_through, int T) {
  auto value = [&](int tt) -> double {
    return static_cast<double>(tree::tree_distance(x, ray_through.on_line_at(tt))) - tt;
  };
  if (T <= x.h) throw TruncationTooSmall("horofunction: truncation below the point");
  double at_T = value(T), at_prev = value(T - 1);
  if (at_T != at_prev) throw TruncationTooSmall("horofunction: tree value not stabilized");
  return at_T;
}

double horofunction(const GPoint& x, const GRay& ray, const DiagBlock& block, double T) {
  auto value = [&](double tt) -> double {
    return coarse_distance_G(x, GPoint(tt, ray.v), block) - tt;
  };
  double at_T = value(T), at_prev = value(T - 1);
  if (std::abs(at_T - at_prev) > 1e-12)
    throw TruncationTooSmall("horofunction: G value not stabilized");
  return at_T;
}

double horofunction(const ZPoint& x, const ZRay& ray, const DiagBlock& block, int T) {
  auto value = [&](int tt) -> double {
    ZPoint on_ray{ray.through.on_line_at(tt), ray.v};
    return coarse_distance_Z(x, on_ray, block) - tt;
  };
  double at_T = value(T), at_prev = value(T - 1);
  if (std::abs(at_T - at_prev) > 1e-12)
    throw TruncationTooSmall("horofunction: Z value not stabilized");
  return at_T;
}

TreeVertex vertical_geodesic(const TreeVertex& x) { return x; }

GRay vertical_geodesic(const GPoint& x) { return GRay{x.v}; }

ZRay vertical_geodesic(const ZPoint& x) { return ZRay{x.tv, x.v}; }

}  // namespace solvlab::spaces
