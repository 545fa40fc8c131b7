#pragma once

// Finite extensions H = Γ ⋊ F of a solvable base group Γ, the section
// p(γ, φ) = γ picking the Γ-coordinate, and the induced self-maps
// q_h(γ) = p(h γ) of Γ. The verification report measures, over a sampled
// set of h, how uniformly the q_h family behaves: shared quasi-isometry
// constants, exact agreement with left translation on Γ itself, bounded
// displacement for h in the identity coset {e} × F, and the defect of
// h ↦ q_h against composition.

#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "solvlab/groups.hpp"
#include "solvlab/qimaps.hpp"

namespace solvlab::furman {

using groups::RadiusExceeded;

struct MalformedEnvelope : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using BaseGroup = std::variant<groups::AbcGroup, groups::LampGroup>;
using BaseElement = std::variant<groups::AbcElement, groups::LampElement>;

// How the generator of the cyclic factor F acts on the base group.
// MirrorLamps is the position-reversing automorphism (pos, f) -> (-pos, f(-·))
// of a lamplighter, the canonical involution of F wr Z.
enum class Twist { None, MirrorLamps };

struct Envelope {
  BaseGroup base;
  int f_order = 1;
  Twist twist = Twist::None;

  // Direct product Γ × Z/f (trivial action); f = 1 gives Γ itself.
  static Envelope product(groups::AbcGroup base, int f_order);
  static Envelope product(groups::LampGroup base, int f_order);
  // (F wr Z) ⋊ Z/2 with the order-two factor acting by MirrorLamps.
  static Envelope lamp_mirror(groups::LampGroup base);
};

// h = (γ, φ) with φ in [0, f_order).
struct EnvElement {
  BaseElement gamma;
  int phi = 0;
};

bool base_equal(const BaseElement& a, const BaseElement& b);
BaseElement base_identity(const Envelope& env);
BaseElement base_multiply(const Envelope& env, const BaseElement& a, const BaseElement& b);
BaseElement base_inverse(const Envelope& env, const BaseElement& a);

// The twist generator applied phi times.
BaseElement twist_apply(const Envelope& env, int phi, const BaseElement& gamma);

EnvElement env_identity(const Envelope& env);
EnvElement embed(const Envelope& env, const BaseElement& gamma);
EnvElement env_multiply(const Envelope& env, const EnvElement& g, const EnvElement& h);
EnvElement env_inverse(const Envelope& env, const EnvElement& g);
bool env_equal(const EnvElement& a, const EnvElement& b);

// The section p(γ, φ) = γ; restricted to Γ it is the identity.
BaseElement section(const EnvElement& h);

// q_h(γ) = p(h γ), evaluated through the envelope multiplication.
BaseElement q_apply(const Envelope& env, const EnvElement& h, const BaseElement& gamma);

// Word lengths used throughout: abelian-by-cyclic groups count {a, b_j}
// letters, lamplighters the walking set (the Diestel-Leader graph metric).
long long base_length(const Envelope& env, const BaseElement& g, int max_radius = 12);

// The word-metric ball of Γ, in breadth-first order.
std::vector<BaseElement> gamma_ball(const Envelope& env, int radius);

// All h = (γ, φ) with |γ| <= gamma_radius, ordered by (|γ|, γ, φ).
std::vector<EnvElement> sampled_envelope(const Envelope& env, int gamma_radius = 2);

// The table γ -> q_h(γ) over the radius-R ball, as a sampled map whose
// points are indices into a shared element registry and whose metrics are
// the exact word metric of Γ. Distances reaching past 2R + 2 raise
// RadiusExceeded. The radius cap honors SOLVLAB_MAX_RADIUS (default 8).
qimaps::SampledMap q_map(const Envelope& env, const EnvElement& h, int radius);

struct SectionRow {
  std::string h;                   // label of the sampled envelope element
  long long gamma_length = 0;      // |γ| of h = (γ, φ)
  int phi = 0;
  double K = 1;                    // additive quasi-isometry fit of q_h
  double C = 0;
  long long displacement = 0;      // max over the ball of d(q_h(γ), γ)
  long long composition_defect = 0;
};

struct SectionReport {
  int radius = 0;
  std::vector<SectionRow> rows;
  double K = 1;                    // uniform constants: max over rows
  double C = 0;
  long long B = 0;                 // max displacement over h in {e} × F
  bool restriction_exact = false;  // q_γ equals left translation by γ
  double K_smaller = 1;            // the same uniform fit one radius down
  double C_smaller = 0;
  bool stable = true;              // grew by at most 1 from radius - 1
  std::string neighborhood_note;
};

// Builds every q_h table for the sampled envelope and aggregates the report:
// per-h quasi-isometry constants and displacement, the uniform (K, C), the
// identity-coset displacement bound B, exactness of the Γ-restriction, the
// worst defect of q_{h1 h2} against q_h1 ∘ q_h2 over sampled pairs, and a
// stability comparison against the same fit at radius - 1 (radius >= 5).
// Requires radius >= 4, capped like q_map.
SectionReport verify_section_maps(const Envelope& env, int radius);

std::string format_base(const BaseElement& g);
std::string format_env(const EnvElement& h);

}  // namespace solvlab::furman
