#include "solvlab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace solvlab::boundary {

namespace {

// Highest edge index at which the vertical lines through u and v carry
// different digits; nullopt when the lines coincide.
std::optional<long long> line_divergence_index(const tree::TreeVertex& u,
                                               const tree::TreeVertex& v) {
  if (u.m != v.m) throw tree::BranchingMismatch("visual_metric: mixed branchings");
  long long top = std::max(u.h + static_cast<long long>(u.addr.size()),
                           v.h + static_cast<long long>(v.addr.size()));
  long long bottom = std::min(u.h, v.h);  // all line digits below are 0
  for (long long e = top; e > bottom; --e)
    if (u.digit_at_index(e) != v.digit_at_index(e)) return e;
  return std::nullopt;
}

tree::TreeVertex canonical_line(tree::TreeVertex v) {
  while (!v.addr.empty() && v.addr.front() == 0) v = v.parent();
  if (v.addr.empty()) return tree::TreeVertex(v.m, 0, {});
  return v;
}

}  // namespace

BlockVector BlockVector::from_flat(const spectral::DiagBlock& block, const Eigen::VectorXd& x) {
  if (x.size() != block.dim())
    throw BlockMismatch("BlockVector: flat vector does not match the block dimension");
  BlockVector out;
  out.blocks.resize(block.alphas.size());
  for (std::size_t c = 0; c < block.alphas.size(); ++c) {
    out.blocks[c].resize(block.alpha_dims[c]);
    int at = 0;
    for (int i = 0; i < block.dim(); ++i)
      if (block.alpha_index[i] == static_cast<int>(c)) out.blocks[c](at++) = x(i);
  }
  return out;
}

Eigen::VectorXd BlockVector::flat() const {
  int total = 0;
  for (const auto& b : blocks) total += static_cast<int>(b.size());
  Eigen::VectorXd out(total);
  int at = 0;
  for (const auto& b : blocks) {
    out.segment(at, b.size()) = b;
    at += static_cast<int>(b.size());
  }
  return out;
}

double dM_metric(const BlockVector& v, const BlockVector& w, const spectral::DiagBlock& block) {
  if (v.levels() != w.levels() ||
      v.levels() != static_cast<int>(block.alphas.size()))
    throw BlockMismatch("dM_metric: level counts disagree");
  double best = 0.0;
  for (int i = 0; i < v.levels(); ++i) {
    if (v.blocks[i].size() != w.blocks[i].size() ||
        v.blocks[i].size() != block.alpha_dims[static_cast<std::size_t>(i)])
      throw BlockMismatch("dM_metric: block dimensions disagree");
    double diff = (v.blocks[i] - w.blocks[i]).norm();
    best = std::max(best, std::pow(diff, block.alphas[0] / block.alphas[static_cast<std::size_t>(i)]));
  }
  return best;
}

double dM_metric(const BlockVector& v, const BlockVector& w, const spectral::SpectralSplit& split,
                 spectral::BlockSide side) {
  const spectral::DiagBlock& block =
      side == spectral::BlockSide::Expanding1 ? split.Mbar1 : split.Mbar2;
  if (block.empty()) throw spectral::EmptyBlock("dM_metric: chosen side has no block");
  return dM_metric(v, w, block);
}

double product_metric(const ProductBoundaryPoint& p, const ProductBoundaryPoint& q,
                      const spectral::DiagBlock& block) {
  return std::max(dM_metric(p.x, q.x, block), madic::madic_dist(p.y, q.y));
}

double g_divergence_height(const Eigen::VectorXd& dv, const spectral::DiagBlock& block,
                           double eps) {
  if (dv.size() != block.dim())
    throw BlockMismatch("g_divergence_height: dimension mismatch");
  const double norm0 = dv.norm();
  if (norm0 == 0.0) throw std::invalid_argument("g_divergence_height: zero difference");
  if (eps <= 0.0)
    throw NotComparable("g_divergence_height: continuous geodesics never touch at eps = 0");
  auto scaled_norm = [&](double t) {
    double acc = 0;
    for (int i = 0; i < dv.size(); ++i) {
      double w = std::pow(block.lambdas[static_cast<std::size_t>(i)], -t) * dv(i);
      acc += w * w;
    }
    return std::sqrt(acc);
  };
  // The scaled norm is strictly decreasing in t; bracket the crossing.
  double lo = std::log(norm0 / eps) / block.alphas.back() - 1.0;
  double hi = lo + 2.0;
  double step = 1.0;
  for (int guard = 0; scaled_norm(lo) < eps && guard < 200; ++guard) {
    lo -= step;
    step *= 2;
  }
  step = 1.0;
  for (int guard = 0; scaled_norm(hi) > eps && guard < 200; ++guard) {
    hi += step;
    step *= 2;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (scaled_norm(mid) > eps)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double visual_metric(const tree::TreeVertex& xi, const tree::TreeVertex& eta, double a,
                     double eps) {
  if (a <= 1.0) throw std::invalid_argument("visual_metric: base must exceed 1");
  if (eps < 0.0) throw std::invalid_argument("visual_metric: eps must be >= 0");
  auto e = line_divergence_index(xi, eta);
  if (!e) return 0.0;
  // Line vertices at height t sit at graph distance 2(e - t) for t <= e.
  long long t0 = static_cast<long long>(std::ceil(static_cast<double>(*e) - eps / 2.0));
  return std::pow(a, static_cast<double>(t0));
}

double visual_metric(const spaces::GRay& xi, const spaces::GRay& eta,
                     const spectral::DiagBlock& block, double a, double eps) {
  if (a <= 1.0) throw std::invalid_argument("visual_metric: base must exceed 1");
  Eigen::VectorXd dv = xi.v - eta.v;
  if (dv.norm() == 0.0) return 0.0;
  return std::pow(a, g_divergence_height(dv, block, eps));
}

double visual_metric(const spaces::ZRay& xi, const spaces::ZRay& eta,
                     const spectral::DiagBlock& block, double a, double eps) {
  if (a <= 1.0) throw std::invalid_argument("visual_metric: base must exceed 1");
  auto e = line_divergence_index(xi.through, eta.through);
  Eigen::VectorXd dv = xi.v - eta.v;
  const bool same_v = dv.norm() == 0.0;
  if (!e && same_v) return 0.0;
  double t0 = -std::numeric_limits<double>::infinity();
  if (e) t0 = std::ceil(static_cast<double>(*e) - eps / 2.0);
  if (!same_v) t0 = std::max(t0, g_divergence_height(dv, block, eps));
  return std::pow(a, t0);
}

ProductRay vertical_ray_through(const horoprod::ModelSpace& space, const horoprod::HPoint& p) {
  auto ray_of = [](const horoprod::FactorPoint& x) -> FactorRay {
    if (const auto* g = std::get_if<spaces::GPoint>(&x)) return spaces::vertical_geodesic(*g);
    if (const auto* t = std::get_if<tree::TreeVertex>(&x)) return spaces::vertical_geodesic(*t);
    return spaces::vertical_geodesic(std::get<spaces::ZPoint>(x));
  };
  (void)space;
  return ProductRay{ray_of(p.x1), ray_of(p.x2)};
}

FactorRay horo_boundary_class(const ProductRay& l, int side) {
  if (side != 1 && side != 2) throw std::invalid_argument("horo_boundary_class: side is 1 or 2");
  FactorRay r = side == 1 ? l.r1 : l.r2;
  if (auto* t = std::get_if<tree::TreeVertex>(&r)) return canonical_line(*t);
  if (auto* z = std::get_if<spaces::ZRay>(&r))
    return spaces::ZRay{canonical_line(z->through), z->v};
  return r;
}

ProductBoundaryPoint to_product_boundary(const spaces::ZRay& r,
                                         const spectral::DiagBlock& block) {
  return ProductBoundaryPoint{BlockVector::from_flat(block, r.v),
                              horoprod::vertex_to_madic(canonical_line(r.through))};
}

}  // namespace solvlab::boundary
