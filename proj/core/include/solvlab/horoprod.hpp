#pragma once

// Horocyclic products X1 x_h X2: pairs of points whose heights sum to zero,
// with the four standing model families
//   sol      : G_[e]   x_h G_[e]      (both factors hyperbolic planes)
//   dl(n,m)  : T_{n+1} x_h T_{m+1}    (biregular trees; a graph)
//   xn(n)    : G_[e]   x_h T_{n+1}
//   xmbar(M) : G_Mbar1 x_h Z_{Mbar2,d}  with d = |det M|,
// where the second factor degenerates to G_Mbar2 when d = 1 and to T_{d+1}
// when the contracting block is empty.

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "solvlab/madic.hpp"
#include "solvlab/spaces.hpp"
#include "solvlab/spectral.hpp"
#include "solvlab/tree.hpp"

namespace solvlab::horoprod {

struct HeightConstraintViolated : std::runtime_error {
  explicit HeightConstraintViolated(const std::string& w) : std::runtime_error(w) {}
};
struct MalformedCoordinates : std::runtime_error {
  explicit MalformedCoordinates(const std::string& w) : std::runtime_error(w) {}
};
struct RadiusExceeded : std::runtime_error {
  explicit RadiusExceeded(const std::string& w) : std::runtime_error(w) {}
};

enum class Kind { Sol, DL, Xn, XMbar };

std::string to_string(Kind k);

// A point of one factor: continuous (GPoint), tree vertex, or tree-with-
// continuous-part (ZPoint).
using FactorPoint = std::variant<spaces::GPoint, tree::TreeVertex, spaces::ZPoint>;

double factor_height(const FactorPoint& x);
bool factor_height_is_integral(const FactorPoint& x);

struct ModelSpace {
  Kind kind = Kind::Sol;
  int n = 0;  // dl: left branching; xn: tree branching
  int m = 0;  // dl: right branching
  std::optional<spectral::SpectralSplit> split;  // xmbar only

  static ModelSpace sol();
  static ModelSpace dl(int n, int m);
  static ModelSpace xn(int n);
  static ModelSpace xmbar(spectral::SpectralSplit s);

  // Tree branching of the second factor for xmbar (= |det M|); throws when
  // the model has no tree factor.
  int tree_branching() const;
  bool has_tree_factor() const;

  // Expansion blocks governing the continuous factor metrics.
  spectral::DiagBlock side1_block() const;
  spectral::DiagBlock side2_block() const;
};

// Parses "sol", "dl:2,2", "xn:3", "xmbar:[[2,0],[0,3]]".
ModelSpace parse_space(const std::string& text);

struct HPoint {
  FactorPoint x1, x2;
  double t = 0;  // cached height of x1
};

// Validates factor shapes against the model space and the height constraint
// h1 + h2 = 0 (exact for integer heights, 1e-12 for real ones).
HPoint make_point(const ModelSpace& space, const FactorPoint& x1, const FactorPoint& x2);

// (v, t, y) coordinates on xmbar models: v in the diagonal basis (leading
// expanding block, trailing contracting block), t the height of the first
// factor, y a base-d digit expansion fixing the tree coordinate, truncated
// at tree height -t (the tree height runs against t).
struct XMbarCoords {
  Eigen::VectorXd v;
  double t = 0;
  madic::MAdic y;
};

HPoint make_point(const ModelSpace& space, const XMbarCoords& c);
XMbarCoords extract_coords(const ModelSpace& space, const HPoint& p);

double height(const HPoint& p);

// Bridge between downward tree lines and digit expansions: the tree digit
// above height e-1 (edge index e) is the expansion digit at position -e.
tree::TreeVertex madic_to_vertex(const madic::MAdic& y, int height, int branching);
madic::MAdic vertex_to_madic(const tree::TreeVertex& v);

// Exact graph distance in dl(n,m): one edge moves both tree coordinates one
// step with opposite height increments. Bidirectional breadth-first search;
// RadiusExceeded past the cap (default 14, SOLVLAB_MAX_RADIUS overrides).
long long dl_distance(const ModelSpace& space, const HPoint& u, const HPoint& v,
                      int max_radius = -1);

// Factorwise coarse distance: continuous factors use the clearing-height
// surrogate, tree factors the graph metric; the two are summed.
double coarse_distance(const ModelSpace& space, const HPoint& u, const HPoint& v);

}  // namespace solvlab::horoprod
