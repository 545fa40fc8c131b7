#pragma once

// The finitely generated solvable groups behind the model spaces: exact
// normal forms (k, u) for the abelian-by-cyclic groups with presentation
//   < a, b_1..b_n | a b_j a^{-1} = translation by column j of M, [b_i,b_j] >,
// lamplighter wreath products F wr Z with F cyclic, word metrics by
// breadth-first search, the exact action on the regular tree T_{d+1} through
// coset normal forms, the isometric action on (v, t, y) model coordinates,
// relation verification, induced boundary similarities, and a greedy sampler
// for dense boundary translations.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solvlab/exact.hpp"
#include "solvlab/horoprod.hpp"
#include "solvlab/qimaps.hpp"
#include "solvlab/spectral.hpp"
#include "solvlab/tree.hpp"

namespace solvlab::groups {

struct RadiusExceeded : std::runtime_error {
  explicit RadiusExceeded(const std::string& w) : std::runtime_error(w) {}
};
struct DepthExceeded : std::runtime_error {
  explicit DepthExceeded(const std::string& w) : std::runtime_error(w) {}
};
struct RelationViolated : std::runtime_error {
  explicit RelationViolated(const std::string& w) : std::runtime_error(w) {}
};
struct SearchBudgetExceeded : std::runtime_error {
  explicit SearchBudgetExceeded(const std::string& w) : std::runtime_error(w) {}
};
struct MalformedWord : std::runtime_error {
  explicit MalformedWord(const std::string& w) : std::runtime_error(w) {}
};

// --- abelian-by-cyclic groups ----------------------------------------------

struct AbcGroup {
  IMat M;
  RMat Minv;  // exact rational inverse
  int n = 0;
  Int det = 0;

  // Throws spectral::SingularMatrix when det M = 0.
  static AbcGroup from_matrix(const IMat& M);
};

// Normal form (k, u): k is the a-exponent; u is an exact rational vector
// whose denominators divide a power of det M. The element equals a^k b^u.
struct AbcElement {
  long long k = 0;
  std::vector<Rat> u;

  friend bool operator==(const AbcElement& g, const AbcElement& h) {
    return g.k == h.k && g.u == h.u;
  }
  friend bool operator!=(const AbcElement& g, const AbcElement& h) { return !(g == h); }
};

AbcElement identity(const AbcGroup& G);
AbcElement gen_a(const AbcGroup& G, long long power = 1);
// j is 1-based; b_j^power translates u by power * e_j.
AbcElement gen_b(const AbcGroup& G, int j, long long power = 1);

// (k_g + k_h, M^{-k_h} u_g + u_h), exact.
AbcElement multiply(const AbcGroup& G, const AbcElement& g, const AbcElement& h);
AbcElement inverse(const AbcGroup& G, const AbcElement& g);

// Applies M^e to u exactly (e of either sign).
std::vector<Rat> matrix_power_apply(const AbcGroup& G, long long e, const std::vector<Rat>& u);

// Word syntax: whitespace-separated generators "a", "b" (alias of "b1"),
// "b2", ..., each optionally followed by ^<integer>: "a b a^-1 b2^3".
AbcElement evaluate_word(const AbcGroup& G, const std::string& word);

// Exact breadth-first word length over {a^{+-1}, b_j^{+-1}}; the radius cap
// must stay <= 12. Throws RadiusExceeded when g lies outside the ball.
int word_length(const AbcGroup& G, const AbcElement& g, int max_radius = 12);

// --- lamplighter groups F wr Z, F cyclic of order q -------------------------

struct LampGroup {
  int q = 2;  // |F|, at least 2
};

// pos is the lamplighter position; lamps maps positions to values in
// {1, .., q-1} (zero-valued entries are removed so the form is canonical).
struct LampElement {
  long long pos = 0;
  std::map<long long, int> lamps;

  friend bool operator==(const LampElement& g, const LampElement& h) {
    return g.pos == h.pos && g.lamps == h.lamps;
  }
  friend bool operator!=(const LampElement& g, const LampElement& h) { return !(g == h); }
};

LampElement identity(const LampGroup& G);
LampElement shift(const LampGroup& G, long long step = 1);
// Adjusts the lamp at the mover's current position by `amount` (mod q).
LampElement toggle(const LampGroup& G, int amount = 1);
LampElement multiply(const LampGroup& G, const LampElement& g, const LampElement& h);
LampElement inverse(const LampGroup& G, const LampElement& g);

// Word syntax: tokens "s" (shift) and "t" (toggle) with optional ^<integer>.
LampElement evaluate_word(const LampGroup& G, const std::string& word);

// Two standing generating sets: the shift plus the in-place toggle, or the
// "walking" set whose steps move one cell while adjusting the lamp on the
// crossed edge. The walking set makes the Cayley graph a Diestel-Leader
// graph DL(q, q).
enum class LampGenerators { ShiftAndToggle, WalkAdjust };

int word_length(const LampGroup& G, const LampElement& g, LampGenerators gens,
                int max_radius = 12);

// Closed-form length for the ShiftAndToggle set: each lit lamp costs
// min(value, q - value) toggles, plus the shortest walk from 0 through every
// lit position that ends at pos.
long long shift_toggle_length(const LampGroup& G, const LampElement& g);

// Closed-form length for the WalkAdjust set. Crossing the edge between cells
// x and x+1 (in either direction) can set the lamp at x to any value, so the
// length is the shortest walk from 0 to pos that crosses the edge above every
// lit cell: sweep one way across the needed interval, then the other.
long long walk_adjust_length(const LampGroup& G, const LampElement& g);

// The DL(q, q) vertex carrying g: the first tree records the lamps at
// positions below pos (nearest position first), the second tree the lamps at
// pos and above; tree heights are -pos and +pos. Walking generators move
// along single edges of DL(q, q).
horoprod::HPoint lamp_to_dl_point(const LampGroup& G, const LampElement& g);

// --- the action on the tree T_{d+1} ----------------------------------------

// Vertices of T_{d+1} are the cosets (k, u + Z^n) with u in Z^n[1/M]; the
// tree height is -k and a child step appends one digit below. Digits index
// the residue classes Z^n / M Z^n through the representative z with
// M^{-1} z in [0,1)^n, residue zero taking digit zero.
class BassSerreAction {
 public:
  // Throws spectral::SingularMatrix on det 0 and std::invalid_argument when
  // |det| exceeds the digit range (255).
  BassSerreAction(const IMat& M, int depth_bound = 24);

  int branching() const { return d_; }
  int depth_bound() const { return depth_; }
  const std::vector<std::vector<Int>>& residues() const { return residues_; }

  struct Coset {
    long long k = 0;
    std::vector<Rat> u;  // entries reduced to [0, 1)
  };

  Coset coset_of(const tree::TreeVertex& v) const;
  // Throws DepthExceeded when the digit expansion of u needs more than
  // depth_bound digits.
  tree::TreeVertex vertex_of(const Coset& c) const;

  tree::TreeVertex act(const AbcElement& g, const tree::TreeVertex& v) const;

  // Digits of the boundary translation induced by the vector u: the digit
  // sequence starts at expansion position -j where M^j u is integral, and is
  // truncated (exact flag cleared) when it does not terminate within
  // `window` digits.
  madic::MAdic boundary_translation(const std::vector<Rat>& u, int window = 48) const;

 private:
  std::vector<Int> canonical_residue(const std::vector<Int>& z) const;
  int digit_of(const std::vector<Int>& residue) const;

  IMat M_;
  RMat Minv_;
  int n_ = 0;
  int d_ = 0;
  int depth_ = 0;
  std::vector<std::vector<Int>> residues_;        // digit -> representative
  std::map<std::vector<Int>, int> digit_lookup_;  // representative -> digit
};

// --- the isometric action on model coordinates ------------------------------

struct ModelAction {
  spectral::SpectralSplit split;
  AbcGroup group;
  std::optional<BassSerreAction> tree_action;  // present when |det M| > 1

  static ModelAction build(const spectral::SpectralSplit& split, int depth_bound = 24);
};

// g = a^k b^u acts by (v, t, y) -> (A(v + S^{-1}u), t + k, tree action on y)
// with A = (Mbar P)^k. Throws horoprod::MalformedCoordinates on a
// non-integer height over a tree model and DepthExceeded from the tree part.
horoprod::XMbarCoords act_on_model(const ModelAction& action, const AbcElement& g,
                                   const horoprod::XMbarCoords& p);

// Affine data of the (v, t) part: v -> A v + w, t -> t + k.
struct GAffine {
  Eigen::MatrixXd A;
  Eigen::VectorXd w;
  long long k = 0;
};
GAffine g_affine(const spectral::SpectralSplit& split, const AbcGroup& G, const AbcElement& g);

// Exact affine data; requires split.exact.
struct GAffineExact {
  RMat A;
  std::vector<Rat> w;
  long long k = 0;
};
GAffineExact g_affine_exact(const spectral::SpectralSplit& split, const AbcGroup& G,
                            const AbcElement& g);

struct RelationReport {
  struct Entry {
    std::string relation;
    double deviation = 0;
  };
  std::vector<Entry> entries;
  double max_deviation = 0;
};

// Checks a b_j a^{-1} = the b-translation by column j of M and b_i b_j =
// b_j b_i, as maps: stepwise generator application against the one-shot
// normal form on every sample point, exact comparison of the affine data
// when the split is exact, and exact comparison on the tree coordinate.
// Throws RelationViolated (with a witness) past `tol`.
RelationReport verify_relations(const ModelAction& action,
                                const std::vector<horoprod::XMbarCoords>& samples,
                                double tol = 1e-9);

// The similarity induced by g on boundary side 1 or 2. Side 1 scales the
// expanding-block metric by exp(alpha_1 k); side 2 scales the contracting
// block by exp(-alpha k) and carries a digit similarity of scale exponent k
// when the model has a tree factor. `digit_window` truncates non-terminating
// digit translations.
qimaps::BoundarySimilarity boundary_action(const ModelAction& action, const AbcElement& g,
                                           int side, int digit_window = 48);

// --- dense boundary translations -------------------------------------------

struct ConjugatePick {
  long long t = 0;  // conjugating exponent: the conjugate a^{-t} b_j a^{t}
  int j = 1;        // which b generator, 1-based
  int power = 1;    // +-1
};

struct SamplerResult {
  AbcElement g;
  std::vector<ConjugatePick> picks;
  Eigen::VectorXd achieved;
  double error = 0;
};

// Greedy product of conjugates a^{-t} b_j a^{t} (each translating by
// S^{-1} M^{-t} e_j) approximating `target` on the chosen boundary within
// eps. Side 1 targets live in the expanding block; side 2 requires
// |det M| = 1. Throws SearchBudgetExceeded when the greedy residual stalls
// above eps.
SamplerResult dense_translation_sampler(const spectral::SpectralSplit& split, int side,
                                        const Eigen::VectorXd& target, double eps,
                                        int t_max = 40, int max_terms = 200);

}  // namespace solvlab::groups
