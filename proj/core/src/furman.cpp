#include "solvlab/furman.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "solvlab/runtime.hpp"

namespace solvlab::furman {

namespace {

constexpr int kDefaultRadiusCap = 8;

const groups::AbcGroup* abc_group(const Envelope& env) {
  return std::get_if<groups::AbcGroup>(&env.base);
}

const groups::LampGroup* lamp_group(const Envelope& env) {
  return std::get_if<groups::LampGroup>(&env.base);
}

std::string base_key(const BaseElement& g) {
  std::ostringstream out;
  if (const auto* a = std::get_if<groups::AbcElement>(&g)) {
    out << a->k;
    for (const auto& r : a->u) out << '|' << r;
  } else {
    const auto& l = std::get<groups::LampElement>(g);
    out << l.pos;
    for (const auto& [i, c] : l.lamps) out << '|' << i << ':' << c;
  }
  return out.str();
}

std::vector<BaseElement> base_generators(const Envelope& env) {
  std::vector<BaseElement> gens;
  if (const auto* G = abc_group(env)) {
    gens.emplace_back(groups::gen_a(*G, 1));
    gens.emplace_back(groups::gen_a(*G, -1));
    for (int j = 1; j <= G->n; ++j) {
      gens.emplace_back(groups::gen_b(*G, j, 1));
      gens.emplace_back(groups::gen_b(*G, j, -1));
    }
    return gens;
  }
  const auto& L = *lamp_group(env);
  for (int c = 0; c < L.q; ++c) {
    groups::LampElement step;
    step.pos = 1;
    if (c != 0) step.lamps[0] = c;
    gens.emplace_back(step);
    gens.emplace_back(groups::inverse(L, step));
  }
  return gens;
}

// Breadth-first scan of the word-metric ball; `keep` sees each element once,
// in traversal order, together with its distance from the identity.
template <typename Keep>
void ball_scan(const Envelope& env, int radius, Keep&& keep) {
  const auto gens = base_generators(env);
  std::unordered_map<std::string, int> seen;
  std::vector<BaseElement> level = {base_identity(env)};
  seen.emplace(base_key(level.front()), 0);
  keep(level.front(), 0);
  for (int depth = 1; depth <= radius; ++depth) {
    std::vector<BaseElement> next;
    for (const auto& e : level)
      for (const auto& g : gens) {
        BaseElement p = base_multiply(env, e, g);
        std::string k = base_key(p);
        if (seen.count(k)) continue;
        seen.emplace(std::move(k), depth);
        keep(p, depth);
        next.push_back(std::move(p));
      }
    level = std::move(next);
  }
}

// Shared state behind one family of tables: the ball, an append-only element
// registry resolving sample indices, and the exact word-metric oracle.
struct Context {
  Envelope env;
  int radius = 0;
  int reach = 0;  // lengths the oracle can resolve
  std::vector<BaseElement> registry;
  std::unordered_map<std::string, int> slots;
  std::vector<int> ball_depths;  // parallel to the ball prefix of `registry`
  int ball_size = 0;
  std::unordered_map<std::string, long long> word_dist;  // abelian-by-cyclic only

  int intern(const BaseElement& g) {
    std::string k = base_key(g);
    auto it = slots.find(k);
    if (it != slots.end()) return it->second;
    int slot = static_cast<int>(registry.size());
    registry.push_back(g);
    slots.emplace(std::move(k), slot);
    return slot;
  }

  long long distance(const BaseElement& a, const BaseElement& b) const {
    if (base_equal(a, b)) return 0;
    BaseElement diff = base_multiply(env, base_inverse(env, a), b);
    if (const auto* L = lamp_group(env))
      return groups::walk_adjust_length(*L, std::get<groups::LampElement>(diff));
    auto it = word_dist.find(base_key(diff));
    if (it == word_dist.end())
      throw RadiusExceeded("envelope table: a distance reaches past length " +
                           std::to_string(reach));
    return it->second;
  }
};

std::shared_ptr<Context> make_context(const Envelope& env, int radius) {
  auto ctx = std::make_shared<Context>();
  ctx->env = env;
  ctx->radius = radius;
  ctx->reach = 2 * radius + 2;
  ball_scan(env, radius, [&](const BaseElement& g, int depth) {
    ctx->intern(g);
    ctx->ball_depths.push_back(depth);
  });
  ctx->ball_size = static_cast<int>(ctx->registry.size());
  if (abc_group(env) != nullptr)
    ball_scan(env, ctx->reach, [&](const BaseElement& g, int depth) {
      ctx->word_dist.emplace(base_key(g), depth);
    });
  return ctx;
}

qimaps::Metric registry_metric(std::shared_ptr<Context> ctx) {
  return [ctx](const qimaps::Point& x, const qimaps::Point& y) -> double {
    const auto& vx = std::get<Eigen::VectorXd>(x);
    const auto& vy = std::get<Eigen::VectorXd>(y);
    const auto slot = [&ctx](const Eigen::VectorXd& v) {
      if (v.size() != 1) throw std::invalid_argument("envelope table: malformed sample point");
      const long long i = std::llround(v(0));
      if (i < 0 || i >= static_cast<long long>(ctx->registry.size()))
        throw std::invalid_argument("envelope table: sample index out of range");
      return static_cast<std::size_t>(i);
    };
    return static_cast<double>(
        ctx->distance(ctx->registry[slot(vx)], ctx->registry[slot(vy)]));
  };
}

Eigen::VectorXd index_point(int slot) {
  Eigen::VectorXd v(1);
  v(0) = static_cast<double>(slot);
  return v;
}

qimaps::SampledMap build_table(std::shared_ptr<Context> ctx, const EnvElement& h) {
  qimaps::SampledMap out;
  out.domain_metric = registry_metric(ctx);
  out.codomain_metric = out.domain_metric;
  out.domain.reserve(static_cast<std::size_t>(ctx->ball_size));
  out.image.reserve(static_cast<std::size_t>(ctx->ball_size));
  for (int i = 0; i < ctx->ball_size; ++i) {
    const BaseElement gamma = ctx->registry[static_cast<std::size_t>(i)];
    out.domain.emplace_back(index_point(i));
    out.image.emplace_back(index_point(ctx->intern(q_apply(ctx->env, h, gamma))));
  }
  return out;
}

int check_phi(const Envelope& env, int phi) {
  const int n = env.f_order;
  return ((phi % n) + n) % n;
}

void check_same_kind(const Envelope& env, const BaseElement& g) {
  if (g.index() != env.base.index())
    throw MalformedEnvelope("element does not belong to the envelope's base group");
}

int checked_radius(int radius, int floor) {
  if (radius < floor)
    throw std::invalid_argument("envelope table: radius must be >= " + std::to_string(floor));
  const int cap = bfs_radius_cap(kDefaultRadiusCap);
  if (radius > cap)
    throw RadiusExceeded("envelope table: radius " + std::to_string(radius) +
                         " exceeds the cap " + std::to_string(cap));
  return radius;
}

SectionReport verify_impl(const Envelope& env, int radius, bool with_stability) {
  auto ctx = make_context(env, radius);
  const auto hs = sampled_envelope(env, 2);

  SectionReport report;
  report.radius = radius;
  report.neighborhood_note =
      "displacement bound taken over the identity coset {e} x F, the discrete "
      "stand-in for a compact identity neighborhood";

  const BaseElement e = base_identity(env);
  report.restriction_exact = true;
  for (const auto& h : hs) {
    SectionRow row;
    row.h = format_env(h);
    row.phi = h.phi;
    row.gamma_length = ctx->distance(e, section(h));

    auto table = build_table(ctx, h);
    auto fit = qimaps::estimate_qi_constants(table);
    row.K = fit.K;
    row.C = fit.C;

    for (int i = 0; i < ctx->ball_size; ++i) {
      const BaseElement gamma = ctx->registry[static_cast<std::size_t>(i)];
      row.displacement =
          std::max(row.displacement, ctx->distance(gamma, q_apply(env, h, gamma)));
    }

    if (h.phi == 0) {
      const BaseElement left = section(h);
      for (int i = 0; i < ctx->ball_size; ++i) {
        const BaseElement gamma = ctx->registry[static_cast<std::size_t>(i)];
        if (!base_equal(q_apply(env, h, gamma), base_multiply(env, left, gamma)))
          report.restriction_exact = false;
      }
    }

    report.rows.push_back(std::move(row));
  }

  // Defect of h -> q_h against composition: q_{h1 h2} versus q_h1 after q_h2.
  for (std::size_t i = 0; i < hs.size(); ++i) {
    long long worst = 0;
    for (const auto& h2 : hs) {
      const EnvElement joined = env_multiply(env, hs[i], h2);
      for (int s = 0; s < ctx->ball_size; ++s) {
        const BaseElement gamma = ctx->registry[static_cast<std::size_t>(s)];
        const BaseElement one = q_apply(env, joined, gamma);
        const BaseElement two = q_apply(env, hs[i], q_apply(env, h2, gamma));
        if (!base_equal(one, two)) worst = std::max(worst, ctx->distance(one, two));
      }
    }
    report.rows[i].composition_defect = worst;
  }

  for (const auto& row : report.rows) {
    report.K = std::max(report.K, row.K);
    report.C = std::max(report.C, row.C);
    if (row.gamma_length == 0) report.B = std::max(report.B, row.displacement);
  }

  if (with_stability && radius - 1 >= 4) {
    SectionReport smaller = verify_impl(env, radius - 1, false);
    report.K_smaller = smaller.K;
    report.C_smaller = smaller.C;
    report.stable =
        report.K <= smaller.K + 1 + 1e-9 && report.C <= smaller.C + 1 + 1e-9;
  } else {
    report.K_smaller = report.K;
    report.C_smaller = report.C;
    report.stable = true;
  }
  return report;
}

}  // namespace

Envelope Envelope::product(groups::AbcGroup base, int f_order) {
  if (f_order < 1) throw MalformedEnvelope("envelope: the finite factor needs order >= 1");
  Envelope env;
  env.base = std::move(base);
  env.f_order = f_order;
  env.twist = Twist::None;
  return env;
}

Envelope Envelope::product(groups::LampGroup base, int f_order) {
  if (f_order < 1) throw MalformedEnvelope("envelope: the finite factor needs order >= 1");
  if (base.q < 2) throw MalformedEnvelope("envelope: the lamp group order must be >= 2");
  Envelope env;
  env.base = base;
  env.f_order = f_order;
  env.twist = Twist::None;
  return env;
}

Envelope Envelope::lamp_mirror(groups::LampGroup base) {
  if (base.q < 2) throw MalformedEnvelope("envelope: the lamp group order must be >= 2");
  Envelope env;
  env.base = base;
  env.f_order = 2;
  env.twist = Twist::MirrorLamps;
  return env;
}

bool base_equal(const BaseElement& a, const BaseElement& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<groups::AbcElement>(&a))
    return *x == std::get<groups::AbcElement>(b);
  return std::get<groups::LampElement>(a) == std::get<groups::LampElement>(b);
}

BaseElement base_identity(const Envelope& env) {
  if (const auto* G = abc_group(env)) return groups::identity(*G);
  return groups::identity(*lamp_group(env));
}

BaseElement base_multiply(const Envelope& env, const BaseElement& a, const BaseElement& b) {
  check_same_kind(env, a);
  check_same_kind(env, b);
  if (const auto* G = abc_group(env))
    return groups::multiply(*G, std::get<groups::AbcElement>(a),
                            std::get<groups::AbcElement>(b));
  return groups::multiply(*lamp_group(env), std::get<groups::LampElement>(a),
                          std::get<groups::LampElement>(b));
}

BaseElement base_inverse(const Envelope& env, const BaseElement& a) {
  check_same_kind(env, a);
  if (const auto* G = abc_group(env))
    return groups::inverse(*G, std::get<groups::AbcElement>(a));
  return groups::inverse(*lamp_group(env), std::get<groups::LampElement>(a));
}

BaseElement twist_apply(const Envelope& env, int phi, const BaseElement& gamma) {
  check_same_kind(env, gamma);
  const int turns = check_phi(env, phi);
  if (env.twist == Twist::None || turns == 0) return gamma;
  if (lamp_group(env) == nullptr)
    throw MalformedEnvelope("envelope: the mirror twist needs a lamplighter base");
  // The mirror is an involution, so only the parity of phi matters.
  if (turns % 2 == 0) return gamma;
  const auto& g = std::get<groups::LampElement>(gamma);
  groups::LampElement out;
  out.pos = -g.pos;
  for (const auto& [i, c] : g.lamps) out.lamps[-i] = c;
  return BaseElement(std::move(out));
}

EnvElement env_identity(const Envelope& env) { return EnvElement{base_identity(env), 0}; }

EnvElement embed(const Envelope& env, const BaseElement& gamma) {
  check_same_kind(env, gamma);
  return EnvElement{gamma, 0};
}

EnvElement env_multiply(const Envelope& env, const EnvElement& g, const EnvElement& h) {
  EnvElement out;
  out.gamma = base_multiply(env, g.gamma, twist_apply(env, g.phi, h.gamma));
  out.phi = check_phi(env, g.phi + h.phi);
  return out;
}

EnvElement env_inverse(const Envelope& env, const EnvElement& g) {
  const int phi = check_phi(env, g.phi);
  EnvElement out;
  out.phi = check_phi(env, -phi);
  out.gamma = twist_apply(env, out.phi, base_inverse(env, g.gamma));
  return out;
}

bool env_equal(const EnvElement& a, const EnvElement& b) {
  return a.phi == b.phi && base_equal(a.gamma, b.gamma);
}

BaseElement section(const EnvElement& h) { return h.gamma; }

BaseElement q_apply(const Envelope& env, const EnvElement& h, const BaseElement& gamma) {
  return section(env_multiply(env, h, embed(env, gamma)));
}

long long base_length(const Envelope& env, const BaseElement& g, int max_radius) {
  check_same_kind(env, g);
  if (const auto* L = lamp_group(env))
    return groups::walk_adjust_length(*L, std::get<groups::LampElement>(g));
  return groups::word_length(*abc_group(env), std::get<groups::AbcElement>(g), max_radius);
}

std::vector<BaseElement> gamma_ball(const Envelope& env, int radius) {
  if (radius < 0) throw std::invalid_argument("gamma_ball: negative radius");
  std::vector<BaseElement> out;
  ball_scan(env, radius, [&out](const BaseElement& g, int) { out.push_back(g); });
  return out;
}

std::vector<EnvElement> sampled_envelope(const Envelope& env, int gamma_radius) {
  if (gamma_radius < 0) throw std::invalid_argument("sampled_envelope: negative radius");
  struct Entry {
    BaseElement g;
    int depth;
    std::string key;
  };
  std::vector<Entry> entries;
  ball_scan(env, gamma_radius, [&entries](const BaseElement& g, int depth) {
    entries.push_back(Entry{g, depth, base_key(g)});
  });
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.depth, a.key) < std::tie(b.depth, b.key);
  });
  std::vector<EnvElement> out;
  out.reserve(entries.size() * static_cast<std::size_t>(env.f_order));
  for (const auto& entry : entries)
    for (int phi = 0; phi < env.f_order; ++phi) out.push_back(EnvElement{entry.g, phi});
  return out;
}

qimaps::SampledMap q_map(const Envelope& env, const EnvElement& h, int radius) {
  checked_radius(radius, 1);
  check_same_kind(env, h.gamma);
  EnvElement use{h.gamma, check_phi(env, h.phi)};
  auto ctx = make_context(env, radius);
  return build_table(ctx, use);
}

SectionReport verify_section_maps(const Envelope& env, int radius) {
  checked_radius(radius, 4);
  return verify_impl(env, radius, true);
}

std::string format_base(const BaseElement& g) {
  std::ostringstream out;
  if (const auto* a = std::get_if<groups::AbcElement>(&g)) {
    out << "k=" << a->k << " u=";
    for (std::size_t i = 0; i < a->u.size(); ++i) out << (i ? "|" : "") << a->u[i];
  } else {
    const auto& l = std::get<groups::LampElement>(g);
    out << "pos=" << l.pos << " lamps=";
    if (l.lamps.empty()) out << '.';
    bool first = true;
    for (const auto& [i, c] : l.lamps) {
      out << (first ? "" : "+") << i << ':' << c;
      first = false;
    }
  }
  return out.str();
}

std::string format_env(const EnvElement& h) {
  return format_base(h.gamma) + " f^" + std::to_string(h.phi);
}

}  // namespace solvlab::furman
