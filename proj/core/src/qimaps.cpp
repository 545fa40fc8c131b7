#include "solvlab/qimaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace solvlab::qimaps {

namespace {

constexpr double kTol = 1e-9;

struct PairSample {
  double d = 0;   // domain distance
  double df = 0;  // image distance
};

std::vector<PairSample> pair_table(const SampledMap& f) {
  if (f.size() < 2) throw std::invalid_argument("sampled map needs at least two samples");
  if (f.image.size() != f.domain.size())
    throw std::invalid_argument("sampled map: domain and image sizes differ");
  std::vector<PairSample> out;
  out.reserve(static_cast<std::size_t>(f.size()) * (f.size() - 1) / 2);
  for (int i = 0; i < f.size(); ++i)
    for (int j = i + 1; j < f.size(); ++j)
      out.push_back({f.domain_metric(f.domain[static_cast<std::size_t>(i)],
                                     f.domain[static_cast<std::size_t>(j)]),
                     f.codomain_metric(f.image[static_cast<std::size_t>(i)],
                                       f.image[static_cast<std::size_t>(j)])});
  return out;
}

// Extracts the class-diagonal sub-blocks of an orthogonal part laid out in
// ascending-class order; an empty matrix stands for the identity.
std::vector<Eigen::MatrixXd> class_blocks(const Eigen::MatrixXd& orthogonal,
                                          const spectral::DiagBlock& block) {
  std::vector<Eigen::MatrixXd> out;
  if (orthogonal.size() == 0) {
    for (int d : block.alpha_dims) out.push_back(Eigen::MatrixXd::Identity(d, d));
    return out;
  }
  if (orthogonal.rows() != block.dim() || orthogonal.cols() != block.dim())
    throw std::invalid_argument("orthogonal part does not match the block dimension");
  int at = 0;
  for (int d : block.alpha_dims) {
    Eigen::MatrixXd sub = orthogonal.block(at, at, d, d);
    if ((sub.transpose() * sub - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > kTol)
      throw std::invalid_argument("orthogonal part is not orthogonal on a class block");
    out.push_back(sub);
    at += d;
  }
  // Anything off the class diagonal must vanish.
  Eigen::MatrixXd recon = Eigen::MatrixXd::Zero(block.dim(), block.dim());
  at = 0;
  for (std::size_t c = 0; c < out.size(); ++c) {
    int d = block.alpha_dims[c];
    recon.block(at, at, d, d) = out[c];
    at += d;
  }
  if ((orthogonal - recon).cwiseAbs().maxCoeff() > kTol)
    throw std::invalid_argument("orthogonal part mixes expansion classes");
  return out;
}

Eigen::MatrixXd block_diag(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

Metric euclidean_metric() {
  return [](const Point& a, const Point& b) {
    return (std::get<Eigen::VectorXd>(a) - std::get<Eigen::VectorXd>(b)).norm();
  };
}

Metric tree_metric() {
  return [](const Point& a, const Point& b) {
    return static_cast<double>(
        tree::tree_distance(std::get<tree::TreeVertex>(a), std::get<tree::TreeVertex>(b)));
  };
}

Metric madic_metric() {
  return [](const Point& a, const Point& b) {
    return madic::madic_dist(std::get<madic::MAdic>(a), std::get<madic::MAdic>(b));
  };
}

QIFit estimate_qi_constants(const SampledMap& f) {
  auto pairs = pair_table(f);
  auto C_of = [&](double K) {
    double worst = 0;
    for (const auto& p : pairs) worst = std::max(worst, std::abs(p.df - K * p.d));
    return worst;
  };
  double rmax = 1.0;
  for (const auto& p : pairs)
    if (p.d > 0) rmax = std::max(rmax, p.df / p.d);

  // The objective is convex piecewise-linear in K; locate its minimum, then
  // walk to the leftmost K attaining it.
  double lo = 1.0, hi = rmax;
  for (int it = 0; it < 300 && hi - lo > 1e-14; ++it) {
    double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (C_of(m1) <= C_of(m2))
      hi = m2;
    else
      lo = m1;
  }
  double cmin = C_of(0.5 * (lo + hi));
  double left = 1.0, right = 0.5 * (lo + hi);
  if (C_of(left) > cmin + 1e-12) {
    while (right - left > 1e-12) {
      double mid = 0.5 * (left + right);
      if (C_of(mid) <= cmin + 1e-12)
        right = mid;
      else
        left = mid;
    }
  } else {
    right = left;
  }
  double K = right;
  // Prefer an exact sample ratio when one sits at the minimizer.
  bool snapped = false;
  double best_ratio = K;
  auto consider = [&](double r) {
    if (r < 1.0 || std::abs(r - K) > 1e-6) return;
    // A snapped ratio only improves by strictly decreasing, so equal or
    // larger candidates exit before the full deviation scan.
    if (snapped && r >= best_ratio) return;
    if (C_of(r) > cmin + 1e-12) return;
    snapped = true;
    best_ratio = r;
  };
  consider(1.0);
  for (const auto& p : pairs)
    if (p.d > 0) consider(p.df / p.d);
  if (snapped) K = best_ratio;

  double C = C_of(K);
  if (C < 1e-12) C = 0.0;

  // Coarse surjectivity: every declared codomain sample must be near the image.
  double defect = 0.0;
  for (const auto& b : f.codomain_ball) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : f.image) best = std::min(best, f.codomain_metric(b, y));
    defect = std::max(defect, best);
  }
  return {K, std::max(C, defect)};
}

QSFit quasi_similarity_constants(const SampledMap& f) {
  auto pairs = pair_table(f);
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  for (const auto& p : pairs) {
    if (p.d <= 0) throw DegenerateSamples("zero domain distance between samples");
    double r = p.df / p.d;
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  if (rmin <= 0) throw DegenerateSamples("a sample pair is collapsed by the map");
  return {std::sqrt(rmax / rmin), std::sqrt(rmax * rmin)};
}

double coarse_distance_maps(const SampledMap& f, const SampledMap& g) {
  if (f.size() != g.size()) throw DomainMismatch("maps are sampled on different ball sizes");
  double worst = 0.0;
  for (std::size_t i = 0; i < f.domain.size(); ++i) {
    if (f.domain_metric(f.domain[i], g.domain[i]) > 1e-12)
      throw DomainMismatch("maps are sampled at different domain points");
    worst = std::max(worst, f.codomain_metric(f.image[i], g.image[i]));
  }
  return worst;
}

double qi_tameness_probe(const std::vector<SampledMap>& family, const SampledMap& identity,
                         const QIFit& constants) {
  if (constants.K < 1.0 || constants.C < 0.0)
    throw std::invalid_argument("uniformity constants need K >= 1 and C >= 0");
  double worst = 0.0;
  for (const auto& f : family) {
    if (f.claimed != kIdentityEquivalent)
      throw PreconditionViolated("family member is not declared identity-equivalent: '" +
                                 f.claimed + "'");
    worst = std::max(worst, coarse_distance_maps(f, identity));
  }
  return worst;
}

boundary::BlockVector apply(const BoundarySimilarity& f, const spectral::DiagBlock& block,
                            const boundary::BlockVector& x) {
  if (x.levels() != static_cast<int>(block.alphas.size()))
    throw boundary::BlockMismatch("apply: point does not match the block");
  auto A = class_blocks(f.orthogonal, block);
  boundary::BlockVector out;
  out.blocks.resize(x.blocks.size());
  for (std::size_t c = 0; c < x.blocks.size(); ++c) {
    double scale = std::exp(block.alphas[c] * f.scale_exponent);
    out.blocks[c] = scale * (A[c] * x.blocks[c]);
    if (static_cast<int>(c) < f.translation.levels()) out.blocks[c] += f.translation.blocks[c];
  }
  return out;
}

madic::MAdic apply(const MadicSimilarity& f, const madic::MAdic& y) {
  madic::MAdic scaled = y.scaled_by(f.scale_exponent);
  return madic::add(scaled, f.translation);
}

BoundarySimilarity compose(const BoundarySimilarity& f, const BoundarySimilarity& g,
                           const spectral::DiagBlock& block) {
  auto Af = class_blocks(f.orthogonal, block);
  auto Ag = class_blocks(g.orthogonal, block);
  BoundarySimilarity out;
  out.scale_exponent = f.scale_exponent + g.scale_exponent;
  out.orthogonal = Eigen::MatrixXd::Zero(block.dim(), block.dim());
  int at = 0;
  for (std::size_t c = 0; c < Af.size(); ++c) {
    int d = block.alpha_dims[c];
    out.orthogonal.block(at, at, d, d) = Af[c] * Ag[c];
    at += d;
  }
  out.translation.blocks.resize(Af.size());
  for (std::size_t c = 0; c < Af.size(); ++c) {
    Eigen::VectorXd tg = c < static_cast<std::size_t>(g.translation.levels())
                             ? g.translation.blocks[c]
                             : Eigen::VectorXd::Zero(block.alpha_dims[c]).eval();
    Eigen::VectorXd tf = c < static_cast<std::size_t>(f.translation.levels())
                             ? f.translation.blocks[c]
                             : Eigen::VectorXd::Zero(block.alpha_dims[c]).eval();
    out.translation.blocks[c] = std::exp(block.alphas[c] * f.scale_exponent) * (Af[c] * tg) + tf;
  }
  if (f.madic_part && g.madic_part) {
    MadicSimilarity m;
    m.scale_exponent = f.madic_part->scale_exponent + g.madic_part->scale_exponent;
    m.translation = madic::add(g.madic_part->translation.scaled_by(f.madic_part->scale_exponent),
                               f.madic_part->translation);
    out.madic_part = m;
  } else if (f.madic_part || g.madic_part) {
    throw std::invalid_argument("compose: only one factor has a digit part");
  }
  return out;
}

BoundarySimilarity induced_boundary_map(const HeightSamples& heights,
                                        const SampledMap& boundary_samples, double a) {
  if (a <= 1.0) throw std::invalid_argument("induced_boundary_map: base must exceed 1");
  if (heights.displacements.empty())
    throw std::invalid_argument("induced_boundary_map: no height samples");
  if (heights.R < 0) throw std::invalid_argument("induced_boundary_map: negative slack");
  for (double disp : heights.displacements)
    if (std::abs(disp - heights.c) > heights.R + 1e-12)
      throw NotHeightRespecting("height displacement " + std::to_string(disp) +
                                " leaves the declared band around " + std::to_string(heights.c));
  QSFit fit = quasi_similarity_constants(boundary_samples);
  double lo = std::pow(a, heights.c - 2 * heights.R) * (1 - 1e-9);
  double hi = std::pow(a, heights.c + 2 * heights.R) * (1 + 1e-9);
  if (fit.s < lo || fit.s > hi)
    throw NotHeightRespecting("boundary scale " + std::to_string(fit.s) +
                              " is outside the height budget");
  BoundarySimilarity out;
  out.scale_exponent = std::log(fit.s) / std::log(a);
  return out;
}

std::optional<long long> uniform_iterate_check(double c1, double c2, double R,
                                               long long max_iter) {
  if (R <= 0) throw std::invalid_argument("uniform_iterate_check: R must be positive");
  double drift = c1 + c2;
  for (long long s = 1; s <= max_iter; ++s)
    if (std::abs(static_cast<double>(s) * drift) > 2 * R) return s;
  return std::nullopt;
}

std::optional<long long> uniform_iterate_check(const Rat& c1, const Rat& c2, const Rat& R,
                                               long long max_iter) {
  if (R <= 0) throw std::invalid_argument("uniform_iterate_check: R must be positive");
  Rat drift = c1 + c2;
  if (drift < 0) drift = -drift;
  if (drift == 0) return std::nullopt;
  for (long long s = 1; s <= max_iter; ++s)
    if (Rat(s) * drift > 2 * R) return s;
  return std::nullopt;
}

Eigen::MatrixXd real_matrix_power(const Eigen::MatrixXd& P, double s) {
  if (P.rows() != P.cols()) throw std::invalid_argument("real_matrix_power: square input only");
  if ((P.transpose() * P - Eigen::MatrixXd::Identity(P.rows(), P.cols()))
          .cwiseAbs()
          .maxCoeff() > kTol)
    throw std::invalid_argument("real_matrix_power: input is not orthogonal");
  Eigen::ComplexEigenSolver<Eigen::MatrixXd> es(P);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("real_matrix_power: eigendecomposition failed");
  Eigen::VectorXcd powered(P.rows());
  for (int i = 0; i < P.rows(); ++i)
    powered(i) = std::pow(es.eigenvalues()(i), std::complex<double>(s, 0));
  Eigen::MatrixXcd V = es.eigenvectors();
  return (V * powered.asDiagonal() * V.inverse()).real();
}

PsiValue psi(const StructuredBoundaryPair& g, const Eigen::MatrixXd& P) {
  if (std::abs(g.t1 + g.t2) > kTol)
    throw HeightMismatch("psi: height translations do not cancel");
  if (g.A1.rows() + g.A2.rows() != P.rows())
    throw std::invalid_argument("psi: orthogonal parts do not fill the matrix dimension");
  double t = 0.5 * (g.t1 - g.t2);
  PsiValue out;
  out.matrix = block_diag(g.A1, g.A2) * real_matrix_power(P, -t);
  out.unit = std::polar(1.0, 2.0 * M_PI * t);
  return out;
}

StructuredBoundaryPair compose(const StructuredBoundaryPair& g, const StructuredBoundaryPair& h,
                               const Eigen::MatrixXd& P) {
  StructuredBoundaryPair out;
  out.t1 = g.t1 + h.t1;
  out.t2 = g.t2 + h.t2;
  double t = 0.5 * (g.t1 - g.t2);
  Eigen::MatrixXd conj =
      real_matrix_power(P, -t) * block_diag(h.A1, h.A2) * real_matrix_power(P, t);
  Eigen::MatrixXd full = block_diag(g.A1, g.A2) * conj;
  int k = static_cast<int>(g.A1.rows());
  int l = static_cast<int>(g.A2.rows());
  if (k > 0 && l > 0 &&
      (full.topRightCorner(k, l).cwiseAbs().maxCoeff() > kTol ||
       full.bottomLeftCorner(l, k).cwiseAbs().maxCoeff() > kTol))
    throw std::invalid_argument("compose: product leaves the structured family");
  out.A1 = full.topLeftCorner(k, k);
  out.A2 = full.bottomRightCorner(l, l);
  return out;
}

double holder_defect(const LevelOffset& level, const std::vector<double>& samples) {
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      double lhs = std::abs(level.B(samples[i]) - level.B(samples[j]));
      double rhs = level.K * std::pow(std::abs(samples[i] - samples[j]), level.alpha);
      worst = std::max(worst, lhs - rhs);
    }
  return worst;
}

StraighteningReport straightening_bound(const LevelOffset& level, double xr, double eps,
                                        long long n) {
  if (n < 1) throw std::invalid_argument("straightening_bound: n must be >= 1");
  if (eps <= 0) throw std::invalid_argument("straightening_bound: eps must be positive");
  StraighteningReport out;
  out.bound = 2 * level.K * std::pow(eps, level.alpha) +
              (level.K / static_cast<double>(n)) * std::pow(std::abs(xr), level.alpha);
  out.empirical = std::abs(level.B(xr) - level.B(0.0));
  out.within = out.empirical <= out.bound + 1e-12;
  return out;
}

}  // namespace solvlab::qimaps
