// Command-line front end: one subcommand per module plus `run` for the
// reproducible experiment suites. Results are emitted as JSON or CSV to
// stdout or --out <path>; `--out json` / `--out csv` are accepted as
// format shortcuts. Exit codes: 0 success, 1 failed suite assertions,
// 2 usage or computation errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "solvlab/boundary.hpp"
#include "solvlab/experiment.hpp"
#include "solvlab/furman.hpp"
#include "solvlab/groups.hpp"
#include "solvlab/horoprod.hpp"
#include "solvlab/madic.hpp"
#include "solvlab/modelcount.hpp"
#include "solvlab/qimaps.hpp"
#include "solvlab/spaces.hpp"
#include "solvlab/spectral.hpp"
#include "solvlab/tree.hpp"

namespace {

using nlohmann::ordered_json;
using namespace solvlab;

struct OutputTarget {
  std::string path;  // empty or "-" means stdout
  experiment::OutputFormat format = experiment::OutputFormat::Json;
};

// `--out` carries either a destination path or a bare format name; an
// explicit `--format` always wins.
OutputTarget resolve_output(const std::string& out, const std::string& format,
                            experiment::OutputFormat fallback) {
  OutputTarget target;
  target.format = fallback;
  if (out == "json" || out == "csv") {
    target.format = experiment::parse_format(out);
  } else {
    target.path = out;
  }
  if (!format.empty()) target.format = experiment::parse_format(format);
  return target;
}

void emit(const std::string& text, const OutputTarget& target) {
  if (target.path.empty() || target.path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(target.path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file: " + target.path);
  file << text;
}

// Key/value pairs rendered as a JSON object or a two-column CSV table.
std::string render_record(const ordered_json& doc, experiment::OutputFormat format) {
  if (format == experiment::OutputFormat::Json) return doc.dump(2) + "\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& [key, value] : doc.items()) {
    std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    for (char& c : text)
      if (c == ',') c = ';';
    rows.push_back({key, text});
  }
  return experiment::render_csv({"field", "value"}, rows);
}

ordered_json block_json(const spectral::DiagBlock& block) {
  ordered_json doc;
  doc["lambdas"] = block.lambdas;
  doc["alphas"] = block.alphas;
  doc["alpha_dims"] = block.alpha_dims;
  return doc;
}

int cmd_spectral_analyze(const std::string& matrix, const OutputTarget& target) {
  const auto split = spectral::analyze(spectral::parse_int_matrix(matrix));
  ordered_json doc;
  doc["matrix"] = matrix;
  ordered_json eigs = ordered_json::array();
  for (const auto& z : split.eigenvalues) eigs.push_back({z.real(), z.imag()});
  doc["eigenvalues"] = std::move(eigs);
  doc["mbar"] = std::vector<double>(split.Mbar.data(), split.Mbar.data() + split.Mbar.size());
  doc["mbar1"] = block_json(split.Mbar1);
  doc["mbar2"] = block_json(split.Mbar2);
  doc["det"] = split.det.str();
  doc["d"] = split.d.str();
  doc["case"] = spectral::to_string(spectral::classify(split));
  ordered_json alphas;
  alphas["side1"] = split.Mbar1.empty()
                        ? std::vector<double>{}
                        : spectral::snowflake_exponents(split, spectral::BlockSide::Expanding1);
  alphas["side2"] = split.Mbar2.empty()
                        ? std::vector<double>{}
                        : spectral::snowflake_exponents(split, spectral::BlockSide::Expanding2);
  doc["alphas"] = std::move(alphas);
  emit(render_record(doc, target.format), target);
  return 0;
}

int cmd_space_dist(const std::string& kind, int m, const std::string& u, const std::string& v,
                   const OutputTarget& target) {
  if (kind != "tree")
    throw experiment::ConfigError("space dist: unsupported kind " + kind + " (expected tree)");
  const auto vu = tree::parse_vertex(u, m);
  const auto vv = tree::parse_vertex(v, m);
  ordered_json doc;
  doc["kind"] = kind;
  doc["m"] = m;
  doc["u"] = u;
  doc["v"] = v;
  doc["distance"] = tree::tree_distance(vu, vv);
  doc["merge_height"] = tree::merge_height(vu, vv);
  emit(render_record(doc, target.format), target);
  return 0;
}

int cmd_model_mk(const std::string& space_text, const OutputTarget& target) {
  const auto space = horoprod::parse_space(space_text);
  ordered_json doc;
  doc["space"] = space_text;
  doc["kind"] = horoprod::to_string(space.kind);
  if (space.kind == horoprod::Kind::DL) {
    doc["left_branching"] = space.n;
    doc["right_branching"] = space.m;
  }
  if (space.kind == horoprod::Kind::Xn) doc["branching"] = space.n;
  if (space.kind == horoprod::Kind::XMbar) {
    doc["case"] = spectral::to_string(spectral::classify(*space.split));
    doc["d"] = space.split->d.str();
  }
  if (space.has_tree_factor()) doc["tree_branching"] = space.tree_branching();
  const auto side1 = space.side1_block();
  const auto side2 = space.side2_block();
  doc["side1"] = block_json(side1);
  doc["side2"] = block_json(side2);
  emit(render_record(doc, target.format), target);
  return 0;
}

// DL point literal: two vertex literals joined by '/', e.g. '01@-2/1@2'.
horoprod::HPoint parse_dl_point(const horoprod::ModelSpace& space, const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos)
    throw experiment::ConfigError("model dist: point literal needs addr@h/addr@h, got " + text);
  const auto x1 = tree::parse_vertex(text.substr(0, slash), space.n);
  const auto x2 = tree::parse_vertex(text.substr(slash + 1), space.m);
  return horoprod::make_point(space, x1, x2);
}

int cmd_model_dist(const std::string& space_text, const std::string& u, const std::string& v,
                   int max_radius, const OutputTarget& target) {
  const auto space = horoprod::parse_space(space_text);
  if (space.kind != horoprod::Kind::DL)
    throw experiment::ConfigError("model dist: exact distances are defined for dl spaces only");
  const auto pu = parse_dl_point(space, u);
  const auto pv = parse_dl_point(space, v);
  ordered_json doc;
  doc["space"] = space_text;
  doc["u"] = u;
  doc["v"] = v;
  try {
    doc["distance"] = horoprod::dl_distance(space, pu, pv, max_radius);
    doc["method"] = "bfs";
  } catch (const horoprod::RadiusExceeded&) {
    doc["distance"] = horoprod::coarse_distance(space, pu, pv);
    doc["method"] = "coarse";
  }
  emit(render_record(doc, target.format), target);
  return 0;
}

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) vals.push_back(std::stod(item));
  if (vals.empty()) throw experiment::ConfigError("empty vector literal: " + text);
  Eigen::VectorXd v(static_cast<int>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<int>(i)) = vals[i];
  return v;
}

int cmd_boundary_dist(const std::string& kind, int m, const std::string& matrix, int side,
                      const std::string& x, const std::string& y, const OutputTarget& target) {
  ordered_json doc;
  doc["kind"] = kind;
  if (kind == "madic") {
    const auto px = madic::parse_madic(x, m);
    const auto py = madic::parse_madic(y, m);
    doc["m"] = m;
    doc["x"] = px.format();
    doc["y"] = py.format();
    doc["distance"] = madic::madic_dist(px, py);
  } else if (kind == "block") {
    const auto split = spectral::analyze(spectral::parse_int_matrix(matrix));
    const auto block = side == 1 ? split.Mbar1 : split.Mbar2;
    const auto bx = boundary::BlockVector::from_flat(block, parse_vector(x));
    const auto by = boundary::BlockVector::from_flat(block, parse_vector(y));
    doc["matrix"] = matrix;
    doc["side"] = side;
    doc["distance"] = boundary::dM_metric(bx, by, block);
  } else {
    throw experiment::ConfigError("boundary dist: unknown kind " + kind +
                                  " (expected madic or block)");
  }
  emit(render_record(doc, target.format), target);
  return 0;
}

int cmd_group_wordlen(const std::string& group, const std::string& word, int max_radius,
                      const OutputTarget& target) {
  const auto base = experiment::parse_base_group(group);
  ordered_json doc;
  doc["group"] = group;
  doc["word"] = word;
  if (const auto* G = std::get_if<groups::AbcGroup>(&base)) {
    const auto g = groups::evaluate_word(*G, word);
    doc["k"] = g.k;
    std::vector<std::string> u;
    for (const auto& r : g.u) u.push_back(r.str());
    doc["u"] = u;
    doc["length"] = groups::word_length(*G, g, max_radius);
  } else {
    const auto& L = std::get<groups::LampGroup>(base);
    const auto g = groups::evaluate_word(L, word);
    doc["pos"] = g.pos;
    ordered_json lamps = ordered_json::array();
    for (const auto& [i, c] : g.lamps) lamps.push_back({i, c});
    doc["lamps"] = std::move(lamps);
    doc["shift_toggle_length"] = groups::shift_toggle_length(L, g);
    doc["walk_adjust_length"] = groups::walk_adjust_length(L, g);
  }
  emit(render_record(doc, target.format), target);
  return 0;
}

int cmd_group_verify(const std::string& matrix, long long samples, std::uint64_t seed,
                     const OutputTarget& target) {
  experiment::ExperimentConfig config;
  config.suite = "relations";
  config.matrix = matrix;
  config.samples = samples;
  config.seed = seed;
  config.format = target.format;
  const auto result = experiment::run_suite(config);
  emit(result.table, target);
  if (!result.pass) {
    std::cerr << experiment::format_failure(*result.failure) << "\n";
    return 1;
  }
  return 0;
}

qimaps::SampledMap read_map_table(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw std::runtime_error("cannot open map table: " + path);
    in = &file;
  }
  ordered_json doc = ordered_json::parse(*in);
  if (!doc.contains("domain") || !doc.contains("image"))
    throw experiment::ConfigError("map table needs fields {domain, image}");
  qimaps::SampledMap map;
  const auto read_points = [](const ordered_json& arr) {
    std::vector<qimaps::Point> pts;
    for (const auto& entry : arr) {
      std::vector<double> vals = entry.get<std::vector<double>>();
      Eigen::VectorXd v(static_cast<int>(vals.size()));
      for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<int>(i)) = vals[i];
      pts.emplace_back(std::move(v));
    }
    return pts;
  };
  map.domain = read_points(doc["domain"]);
  map.image = read_points(doc["image"]);
  map.domain_metric = qimaps::euclidean_metric();
  map.codomain_metric = qimaps::euclidean_metric();
  return map;
}

int cmd_qi_fit(const std::string& map_path, const OutputTarget& target) {
  const auto map = read_map_table(map_path);
  const auto fit = qimaps::estimate_qi_constants(map);
  const auto qs = qimaps::quasi_similarity_constants(map);
  ordered_json doc;
  doc["samples"] = map.size();
  doc["K"] = fit.K;
  doc["C"] = fit.C;
  doc["qs_K"] = qs.K;
  doc["qs_s"] = qs.s;
  emit(render_record(doc, target.format), target);
  return 0;
}

int cmd_qi_iterate(double c1, double c2, double R, long long max_iter,
                   const OutputTarget& target) {
  const auto s = qimaps::uniform_iterate_check(c1, c2, R, max_iter);
  ordered_json doc;
  doc["c1"] = c1;
  doc["c2"] = c2;
  doc["R"] = R;
  doc["max_iter"] = max_iter;
  if (s)
    doc["first_drifting_iterate"] = *s;
  else
    doc["first_drifting_iterate"] = nullptr;
  doc["translations_compatible"] = !s.has_value();
  emit(render_record(doc, target.format), target);
  return 0;
}

int run_config(const experiment::ExperimentConfig& config, const OutputTarget& target) {
  const auto result = experiment::run_suite(config);
  emit(result.table, target);
  if (!result.pass) {
    std::cerr << experiment::format_failure(*result.failure) << "\n";
    return 1;
  }
  return 0;
}

int cmd_models_common_base(const std::string& m_text, const std::string& p_text,
                           const OutputTarget& target) {
  const Int m(m_text), p(p_text);
  const auto base = modelcount::common_base(m, p);
  ordered_json doc;
  doc["m"] = m.str();
  doc["p"] = p.str();
  if (base) {
    doc["root"] = base->root.str();
    doc["i"] = base->i;
    doc["j"] = base->j;
  } else {
    doc["common_base"] = nullptr;
  }
  emit(render_record(doc, target.format), target);
  return 0;
}

int cmd_models_exponents(long long d, long long kmax, const OutputTarget& target) {
  const auto ks = modelcount::admissible_exponents(d, kmax);
  ordered_json doc;
  doc["d"] = d;
  doc["kmax"] = kmax;
  doc["exponents"] = ks;
  emit(render_record(doc, target.format), target);
  return 0;
}

int cmd_models_identity(long long d, long long e, long long f, long long g,
                        const OutputTarget& target) {
  const auto verdict = modelcount::index_identity_check({d, e, f, g});
  ordered_json doc;
  doc["d"] = d;
  doc["e"] = e;
  doc["f"] = f;
  doc["g"] = g;
  doc["verdict"] =
      verdict == modelcount::IndexIdentity::Consistent ? "consistent" : "inconsistent";
  emit(render_record(doc, target.format), target);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solvlab: desk-scale computations on solvable groups and their model spaces"};
  app.require_subcommand(1);

  std::string out, format;
  std::string matrix = "[[2,1],[1,1]]";
  std::string kind = "tree", u, v, x, y, space_text = "dl:2,2";
  std::string group = "bs:1,2", word, extension = "flip", map_path = "-", suite;
  int m = 2, side = 1, radius = 5, max_radius = -1, word_cap = 12;
  long long samples = 10000, kmax = 5, d = 2, e = 1, f = 1, g = 1, max_iter = 1000;
  double c1 = 0, c2 = 0, R = 1;
  std::uint64_t seed = 1;

  const auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "Output path, '-' for stdout, or a bare format name");
    cmd->add_option("--format", format, "Output format: json or csv");
  };

  auto* spectral_cmd = app.add_subcommand("spectral", "Spectral splitting of an integer matrix");
  auto* analyze = spectral_cmd->add_subcommand("analyze", "Diagonalize and classify");
  analyze->add_option("--matrix", matrix, "Integer matrix, e.g. [[2,1],[1,1]]")->required();
  add_output(analyze);

  auto* space_cmd = app.add_subcommand("space", "Distances in single model spaces");
  auto* space_dist = space_cmd->add_subcommand("dist", "Distance between two points");
  space_dist->add_option("--kind", kind, "Space kind (tree)");
  space_dist->add_option("--m", m, "Tree branching");
  space_dist->add_option("--u", u, "First vertex, digits@height")->required();
  space_dist->add_option("--v", v, "Second vertex, digits@height")->required();
  add_output(space_dist);

  auto* model_cmd = app.add_subcommand("model", "Horospherical-product model spaces");
  auto* model_mk = model_cmd->add_subcommand("mk", "Parse and describe a model space");
  model_mk->add_option("--space", space_text, "sol | dl:n,m | xn:b | xmbar:[[..]]")->required();
  add_output(model_mk);
  auto* model_dist = model_cmd->add_subcommand("dist", "Graph distance in a dl space");
  model_dist->add_option("--space", space_text, "dl:n,m")->required();
  model_dist->add_option("--u", u, "Point, addr@h/addr@h")->required();
  model_dist->add_option("--v", v, "Point, addr@h/addr@h")->required();
  model_dist->add_option("--max-radius", max_radius, "Search cap; -1 uses the default");
  add_output(model_dist);

  auto* boundary_cmd = app.add_subcommand("boundary", "Boundary metrics");
  auto* boundary_dist = boundary_cmd->add_subcommand("dist", "Distance between boundary points");
  boundary_dist->add_option("--kind", kind, "madic or block")->required();
  boundary_dist->add_option("--m", m, "Digit base for madic literals");
  boundary_dist->add_option("--matrix", matrix, "Matrix for block boundaries");
  boundary_dist->add_option("--side", side, "Block side: 1 expanding, 2 contracting");
  boundary_dist->add_option("--x", x, "digits@val (madic) or comma floats (block)")->required();
  boundary_dist->add_option("--y", y, "Second point")->required();
  add_output(boundary_dist);

  auto* group_cmd = app.add_subcommand("group", "Finitely generated group computations");
  auto* wordlen = group_cmd->add_subcommand("wordlen", "Evaluate a word and report lengths");
  wordlen->add_option("--group", group, "bs:1,m | abc:[[..]] | ll:q")->required();
  wordlen->add_option("--word", word, "Whitespace-separated generators with ^<int>")->required();
  wordlen->add_option("--max-radius", word_cap, "Word-length search cap");
  add_output(wordlen);
  auto* verify = group_cmd->add_subcommand("verify", "Check defining relations on the model");
  verify->add_option("--matrix", matrix, "Integer matrix of the group")->required();
  verify->add_option("--samples", samples, "Sample points");
  verify->add_option("--seed", seed, "Sample seed");
  add_output(verify);

  auto* qi_cmd = app.add_subcommand("qi", "Quasi-isometry fits and compatibility checks");
  auto* fit = qi_cmd->add_subcommand("fit", "Fit constants to a sampled map table");
  fit->add_option("--map", map_path, "JSON file {domain:[[..]..], image:[[..]..]}; '-' = stdin");
  add_output(fit);
  auto* iterate = qi_cmd->add_subcommand("iterate", "Height-translation drift check");
  iterate->add_option("--c1", c1, "First translation length")->required();
  iterate->add_option("--c2", c2, "Second translation length")->required();
  iterate->add_option("--R", R, "Allowed displacement radius")->required();
  iterate->add_option("--max-iter", max_iter, "Iterates to scan");
  add_output(iterate);

  auto* furman_cmd = app.add_subcommand("furman", "Finite extensions and section maps");
  auto* furman_verify = furman_cmd->add_subcommand("verify", "Uniform section-map report");
  furman_verify->add_option("--group", group, "Base group: bs:1,m | abc:[[..]] | ll:q");
  furman_verify->add_option("--ext", extension, "trivial | product:<f> | flip");
  furman_verify->add_option("--radius", radius, "Sample-ball radius (>= 4)");
  add_output(furman_verify);

  auto* models_cmd = app.add_subcommand("models", "Commensuration arithmetic");
  auto* common_base = models_cmd->add_subcommand("common-base", "Shared primitive base of m, p");
  common_base->add_option("m", x, "First branching number")->required();
  common_base->add_option("p", y, "Second branching number")->required();
  add_output(common_base);
  auto* exponents = models_cmd->add_subcommand("exponents", "Integer exponents k with d^k in Z");
  exponents->add_option("--d", d, "Base, not a proper power")->required();
  exponents->add_option("--kmax", kmax, "Largest exponent to list");
  add_output(exponents);
  auto* identity = models_cmd->add_subcommand("identity", "Single-edge index identity d=e=f*g");
  identity->add_option("--d", d, "First edge index")->required();
  identity->add_option("--e", e, "Second edge index")->required();
  identity->add_option("--f", f, "First chain index")->required();
  identity->add_option("--g", g, "Second chain index")->required();
  add_output(identity);

  auto* run_cmd = app.add_subcommand("run", "Reproducible experiment suites");
  run_cmd->add_option("--suite", suite, "metric-axioms | relations | furman")->required();
  run_cmd->add_option("--matrix", matrix, "Matrix parameter");
  run_cmd->add_option("--m", m, "Branching parameter");
  run_cmd->add_option("--group", group, "Base group literal");
  run_cmd->add_option("--ext", extension, "Extension literal");
  run_cmd->add_option("--radius", radius, "Sample-ball radius");
  run_cmd->add_option("--samples", samples, "Sample count");
  run_cmd->add_option("--seed", seed, "Sampling seed");
  add_output(run_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed())
      return cmd_spectral_analyze(matrix,
                                  resolve_output(out, format, experiment::OutputFormat::Json));
    if (space_dist->parsed())
      return cmd_space_dist(kind, m, u, v,
                            resolve_output(out, format, experiment::OutputFormat::Json));
    if (model_mk->parsed())
      return cmd_model_mk(space_text, resolve_output(out, format, experiment::OutputFormat::Json));
    if (model_dist->parsed())
      return cmd_model_dist(space_text, u, v, max_radius,
                            resolve_output(out, format, experiment::OutputFormat::Json));
    if (boundary_dist->parsed())
      return cmd_boundary_dist(kind, m, matrix, side, x, y,
                               resolve_output(out, format, experiment::OutputFormat::Json));
    if (wordlen->parsed())
      return cmd_group_wordlen(group, word, word_cap,
                               resolve_output(out, format, experiment::OutputFormat::Json));
    if (verify->parsed())
      return cmd_group_verify(matrix, samples, seed,
                              resolve_output(out, format, experiment::OutputFormat::Csv));
    if (fit->parsed())
      return cmd_qi_fit(map_path, resolve_output(out, format, experiment::OutputFormat::Json));
    if (iterate->parsed())
      return cmd_qi_iterate(c1, c2, R, max_iter,
                            resolve_output(out, format, experiment::OutputFormat::Json));
    if (furman_verify->parsed()) {
      experiment::ExperimentConfig config;
      config.suite = "furman";
      config.group = group;
      config.extension = extension;
      config.radius = radius;
      const auto target = resolve_output(out, format, experiment::OutputFormat::Csv);
      config.format = target.format;
      return run_config(config, target);
    }
    if (common_base->parsed())
      return cmd_models_common_base(x, y,
                                    resolve_output(out, format, experiment::OutputFormat::Json));
    if (exponents->parsed())
      return cmd_models_exponents(d, kmax,
                                  resolve_output(out, format, experiment::OutputFormat::Json));
    if (identity->parsed())
      return cmd_models_identity(d, e, f, g,
                                 resolve_output(out, format, experiment::OutputFormat::Json));
    if (run_cmd->parsed()) {
      experiment::ExperimentConfig config;
      config.suite = suite;
      config.matrix = matrix;
      config.m = m;
      config.group = group;
      config.extension = extension;
      config.radius = radius;
      config.samples = samples;
      config.seed = seed;
      const auto target = resolve_output(out, format, experiment::OutputFormat::Csv);
      config.format = target.format;
      return run_config(config, target);
    }
    std::cerr << app.help() << "\n";
    return 2;
  } catch (const std::exception& err) {
    ordered_json record;
    record["error"] = err.what();
    std::cerr << record.dump() << "\n";
    return 2;
  }
}
