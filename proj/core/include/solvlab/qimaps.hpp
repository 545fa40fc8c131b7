#pragma once

// Quasi-isometry machinery over finite samples: constant estimators, the
// structured similarity maps induced on parabolic boundaries by
// height-respecting maps, the iterate detector for incompatible height
// translations, the spiral invariant of straightened boundary maps, the
// straightening budget for level offsets, and coarse-convergence probes.

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "solvlab/boundary.hpp"
#include "solvlab/exact.hpp"
#include "solvlab/horoprod.hpp"
#include "solvlab/madic.hpp"
#include "solvlab/spectral.hpp"
#include "solvlab/tree.hpp"

namespace solvlab::qimaps {

struct DegenerateSamples : std::runtime_error {
  explicit DegenerateSamples(const std::string& w) : std::runtime_error(w) {}
};
struct NotHeightRespecting : std::runtime_error {
  explicit NotHeightRespecting(const std::string& w) : std::runtime_error(w) {}
};
struct HeightMismatch : std::runtime_error {
  explicit HeightMismatch(const std::string& w) : std::runtime_error(w) {}
};
struct DomainMismatch : std::runtime_error {
  explicit DomainMismatch(const std::string& w) : std::runtime_error(w) {}
};
struct PreconditionViolated : std::runtime_error {
  explicit PreconditionViolated(const std::string& w) : std::runtime_error(w) {}
};

// ---------------------------------------------------------------------------
// Sampled maps

using Point = std::variant<Eigen::VectorXd, tree::TreeVertex, madic::MAdic, horoprod::HPoint>;
using Metric = std::function<double(const Point&, const Point&)>;

Metric euclidean_metric();
Metric tree_metric();
Metric madic_metric();

// A map known only through its values on a finite sample ball, together with
// the metrics of both sides. `codomain_ball` optionally lists codomain
// samples used to measure the surjectivity defect.
struct SampledMap {
  std::vector<Point> domain;
  std::vector<Point> image;
  Metric domain_metric;
  Metric codomain_metric;
  std::vector<Point> codomain_ball;
  std::string claimed;  // declared equivalence class of the map

  int size() const { return static_cast<int>(domain.size()); }
};

// Tag declaring a family member to be at bounded distance from the identity.
inline constexpr const char* kIdentityEquivalent = "identity-equivalent";

struct QIFit {
  double K = 1;
  double C = 0;
};

// Fits the two-sided additive bound -C + K d(x,y) <= d(fx,fy) <= K d(x,y) + C
// over all sample pairs: K is chosen to minimize the needed C (leftmost
// minimizer of the convex Chebyshev objective), and the surjectivity defect
// against `codomain_ball` is folded into C.
QIFit estimate_qi_constants(const SampledMap& f);

struct QSFit {
  double K = 1;
  double s = 1;
};

// Multiplicative fit d(fx,fy) in [s/K, sK] * d(x,y): s is the geometric mean
// of the extreme image/domain distance ratios and K the square root of their
// spread.
QSFit quasi_similarity_constants(const SampledMap& f);

// Largest pointwise codomain distance between two maps sampled on the same
// domain ball.
double coarse_distance_maps(const SampledMap& f, const SampledMap& g);

// Empirical uniformity radius of a family of maps each declared equivalent to
// the identity: the largest coarse distance to `identity` over the family.
// Members not carrying the declared tag are rejected.
double qi_tameness_probe(const std::vector<SampledMap>& family, const SampledMap& identity,
                         const QIFit& constants);

// ---------------------------------------------------------------------------
// Structured boundary similarities

// Similarity of a digit boundary Q_m: y -> m^{scale_exponent} y + translation,
// which multiplies distances by m^{-scale_exponent}.
struct MadicSimilarity {
  long long scale_exponent = 0;
  madic::MAdic translation;
};

// Similarity of a block boundary (R^n, powered-max metric), optionally paired
// with a digit-side similarity: block i acts by e^{alpha_i c} A_i plus a
// translation, which scales the metric by a^c for the space's base a.
struct BoundarySimilarity {
  double scale_exponent = 0;          // c
  Eigen::MatrixXd orthogonal;         // block-diagonal orthogonal part
  boundary::BlockVector translation;  // additive part, grouped by class
  std::optional<MadicSimilarity> madic_part;
};

boundary::BlockVector apply(const BoundarySimilarity& f, const spectral::DiagBlock& block,
                            const boundary::BlockVector& x);
madic::MAdic apply(const MadicSimilarity& f, const madic::MAdic& y);

// Composition f after g. Scale exponents add, orthogonal parts multiply, and
// translations compose through f's linear part.
BoundarySimilarity compose(const BoundarySimilarity& f, const BoundarySimilarity& g,
                           const spectral::DiagBlock& block);

// Measured height behavior of a map: observed height displacements against a
// declared translation c with sampling slack R.
struct HeightSamples {
  double c = 0;
  double R = 0;
  std::vector<double> displacements;
};

// Builds the boundary similarity induced by a height-respecting map: checks
// the displacements stay within R of c, measures the quasi-similarity scale
// of the boundary samples, and requires it to match a^c within a^{2R}.
BoundarySimilarity induced_boundary_map(const HeightSamples& heights,
                                        const SampledMap& boundary_samples, double a);

// ---------------------------------------------------------------------------
// Height-translation compatibility

// Smallest iterate s <= max_iter at which translations by c1 and -c2 drift
// more than 2R apart, i.e. |s (c1 + c2)| > 2R; nullopt when none does.
std::optional<long long> uniform_iterate_check(double c1, double c2, double R,
                                               long long max_iter);
std::optional<long long> uniform_iterate_check(const Rat& c1, const Rat& c2, const Rat& R,
                                               long long max_iter);

// ---------------------------------------------------------------------------
// The spiral invariant of straightened maps

// A straightened boundary map: block-orthogonal parts on the two sides and
// opposite height translations t and -t.
struct StructuredBoundaryPair {
  Eigen::MatrixXd A1, A2;
  double t1 = 0, t2 = 0;
};

struct PsiValue {
  Eigen::MatrixXd matrix;
  std::complex<double> unit;
};

// Real power of an orthogonal matrix through its unitary eigendecomposition,
// principal branch.
Eigen::MatrixXd real_matrix_power(const Eigen::MatrixXd& P, double s);

// (blockdiag(A1, A2) P^{-t}, e^{2 pi i t}) with t = t1 = -t2.
PsiValue psi(const StructuredBoundaryPair& g, const Eigen::MatrixXd& P);

// Group law of straightened pairs: heights add and the second orthogonal part
// is conjugated through P before multiplying, which makes psi multiplicative.
StructuredBoundaryPair compose(const StructuredBoundaryPair& g,
                               const StructuredBoundaryPair& h, const Eigen::MatrixXd& P);

// ---------------------------------------------------------------------------
// Level offsets and the straightening budget

// One level of an almost-translation: an offset function of the next higher
// coordinate with a Holder bound |B(x) - B(y)| <= K |x - y|^alpha.
struct LevelOffset {
  std::function<double(double)> B;
  double K = 1;
  double alpha = 1;
};

struct AlmostTranslation {
  std::vector<LevelOffset> levels;
};

// Largest excess of |B(x) - B(y)| over K |x - y|^alpha on the sample points;
// nonpositive when the declared Holder data holds.
double holder_defect(const LevelOffset& level, const std::vector<double>& samples);

struct StraighteningReport {
  double bound = 0;      // 2 K eps^alpha + (K/n) |x_r|^alpha
  double empirical = 0;  // |B(x_r) - B(0)|
  bool within = true;
};

// Tests an offset function against the budget available to a straightened
// map: exceeding it certifies the offset cannot be flattened away.
StraighteningReport straightening_bound(const LevelOffset& level, double xr, double eps,
                                        long long n);

}  // namespace solvlab::qimaps
