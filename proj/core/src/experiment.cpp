#include "solvlab/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "solvlab/boundary.hpp"
#include "solvlab/groups.hpp"
#include "solvlab/horoprod.hpp"
#include "solvlab/madic.hpp"
#include "solvlab/spectral.hpp"
#include "solvlab/tree.hpp"

namespace solvlab::experiment {

namespace {

using Rows = std::vector<std::vector<std::string>>;

std::string format_bool(bool b) { return b ? "1" : "0"; }

void check_csv_field(const std::string& field) {
  if (field.find(',') != std::string::npos || field.find('\n') != std::string::npos)
    throw std::invalid_argument("render_csv: field contains a separator: " + field);
}

// Renders the finished table in the configured format. Values are the
// already-canonical strings of the CSV cells, so both formats are
// byte-stable by construction.
std::string render_table(const ExperimentConfig& config, const std::vector<std::string>& columns,
                         const Rows& rows) {
  if (config.format == OutputFormat::Csv) return render_csv(columns, rows);
  nlohmann::ordered_json doc;
  doc["suite"] = config.suite;
  doc["seed"] = config.seed;
  doc["columns"] = columns;
  nlohmann::ordered_json out_rows = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row[i];
    out_rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(out_rows);
  return doc.dump(2) + "\n";
}

madic::MAdic random_exact_madic(int m, std::mt19937_64& rng) {
  std::uniform_int_distribution<long long> start(-4, 1);
  std::uniform_int_distribution<int> length(0, 6);
  std::uniform_int_distribution<int> digit(0, m - 1);
  std::vector<std::uint8_t> digits;
  const int len = length(rng);
  digits.reserve(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) digits.push_back(static_cast<std::uint8_t>(digit(rng)));
  return madic::MAdic(m, start(rng), std::move(digits), true);
}

SuiteResult metric_axioms_suite(const ExperimentConfig& config) {
  if (config.m < 2) throw ConfigError("metric-axioms: branching m must be >= 2");
  if (config.samples < 1) throw ConfigError("metric-axioms: need at least one sample");
  const auto split = spectral::analyze(spectral::parse_int_matrix(config.matrix));
  const auto block = split.Mbar1;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> real(-3.0, 3.0);
  const auto random_block_point = [&] {
    Eigen::VectorXd v(block.dim());
    for (int i = 0; i < block.dim(); ++i) v(i) = real(rng);
    return boundary::BlockVector::from_flat(block, v);
  };

  SuiteResult result;
  result.pass = true;
  result.columns = {"index",         "boundary",  "d_xy",     "d_yx", "d_yz",
                    "d_xz",          "zero_self", "symmetric", "triangle", "ok"};
  Rows rows;
  const std::string madic_tag = "madic:" + std::to_string(config.m);
  const std::string block_tag = "block:" + std::to_string(block.dim()) + "d";

  for (long long i = 0; i < config.samples; ++i) {
    double d_xy, d_yx, d_yz, d_xz, d_xx;
    std::string tag;
    double slack = 0;
    if (i % 2 == 0) {
      tag = madic_tag;
      const auto x = random_exact_madic(config.m, rng);
      const auto y = random_exact_madic(config.m, rng);
      const auto z = random_exact_madic(config.m, rng);
      d_xx = madic::madic_dist(x, x);
      d_xy = madic::madic_dist(x, y);
      d_yx = madic::madic_dist(y, x);
      d_yz = madic::madic_dist(y, z);
      d_xz = madic::madic_dist(x, z);
    } else {
      tag = block_tag;
      const auto x = random_block_point();
      const auto y = random_block_point();
      const auto z = random_block_point();
      d_xx = boundary::dM_metric(x, x, block);
      d_xy = boundary::dM_metric(x, y, block);
      d_yx = boundary::dM_metric(y, x, block);
      d_yz = boundary::dM_metric(y, z, block);
      d_xz = boundary::dM_metric(x, z, block);
      slack = 1e-12;
    }
    const bool zero_self = (d_xx == 0.0);
    const bool symmetric = (d_xy == d_yx);
    const bool triangle = d_xz <= d_xy + d_yz + slack;
    const bool ok = zero_self && symmetric && triangle;
    if (!ok && result.pass) {
      result.pass = false;
      std::ostringstream witness;
      witness << "triple " << i << " on " << tag << ": d_xy=" << format_double(d_xy)
              << " d_yx=" << format_double(d_yx) << " d_yz=" << format_double(d_yz)
              << " d_xz=" << format_double(d_xz) << " d_xx=" << format_double(d_xx);
      result.failure = FailureRecord{
          "boundary", i % 2 == 0 ? "madic_dist" : "dM_metric", witness.str()};
    }
    rows.push_back({std::to_string(i), tag, format_double(d_xy), format_double(d_yx),
                    format_double(d_yz), format_double(d_xz), format_bool(zero_self),
                    format_bool(symmetric), format_bool(triangle), format_bool(ok)});
  }
  result.table = render_table(config, result.columns, rows);
  return result;
}

// The seeded sample generator for model coordinates: a bounded continuous
// part, an integer height over tree models, and a short tree address.
horoprod::XMbarCoords random_coords(const spectral::SpectralSplit& split, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> real(-3.0, 3.0);
  std::uniform_int_distribution<int> height(-3, 3);
  horoprod::XMbarCoords c;
  c.v = Eigen::VectorXd(split.n);
  for (int i = 0; i < split.n; ++i) c.v(i) = real(rng);
  if (split.d > 1) {
    std::uniform_int_distribution<int> digit(0, static_cast<int>(split.d) - 1);
    std::uniform_int_distribution<int> length(0, 3);
    const int t = height(rng);
    c.t = t;
    std::vector<std::uint8_t> addr;
    const int len = length(rng);
    for (int i = 0; i < len; ++i) addr.push_back(static_cast<std::uint8_t>(digit(rng)));
    c.y = horoprod::vertex_to_madic(
        tree::TreeVertex(static_cast<int>(split.d), -t, std::move(addr)));
  } else {
    c.t = real(rng);
    c.y = madic::MAdic::zero(2);
  }
  return c;
}

SuiteResult relations_suite(const ExperimentConfig& config) {
  if (config.samples < 1) throw ConfigError("relations: need at least one sample");
  const auto split = spectral::analyze(spectral::parse_int_matrix(config.matrix));
  const auto action = groups::ModelAction::build(split);

  std::mt19937_64 rng(config.seed);
  std::vector<horoprod::XMbarCoords> points;
  const long long count = std::min<long long>(config.samples, 20000);
  points.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) points.push_back(random_coords(split, rng));

  SuiteResult result;
  result.columns = {"relation", "deviation", "ok"};
  constexpr double kTol = 1e-9;
  Rows rows;
  try {
    const auto report = groups::verify_relations(action, points, kTol);
    result.pass = true;
    for (const auto& entry : report.entries) {
      const bool ok = entry.deviation <= kTol;
      rows.push_back({entry.relation, format_double(entry.deviation), format_bool(ok)});
      if (!ok && result.pass) {
        result.pass = false;
        result.failure = FailureRecord{"groups", "verify_relations",
                                       entry.relation + " deviates by " +
                                           format_double(entry.deviation)};
      }
    }
    rows.push_back({"max", format_double(report.max_deviation),
                    format_bool(report.max_deviation <= kTol)});
  } catch (const groups::RelationViolated& err) {
    result.pass = false;
    result.failure = FailureRecord{"groups", "verify_relations", err.what()};
    rows.push_back({"violated", "inf", "0"});
  }
  result.table = render_table(config, result.columns, rows);
  return result;
}

SuiteResult furman_suite(const ExperimentConfig& config) {
  const auto env = parse_envelope(config.group, config.extension);
  const auto report = furman::verify_section_maps(env, config.radius);

  SuiteResult result;
  result.columns = {"h", "K", "C", "B", "composition_defect"};
  Rows rows;
  long long max_defect = 0;
  for (const auto& row : report.rows) {
    rows.push_back({row.h, format_double(row.K), format_double(row.C),
                    std::to_string(row.displacement), std::to_string(row.composition_defect)});
    max_defect = std::max(max_defect, row.composition_defect);
  }
  rows.push_back({"uniform", format_double(report.K), format_double(report.C),
                  std::to_string(report.B), std::to_string(max_defect)});

  result.pass = report.restriction_exact && report.stable;
  if (!result.pass) {
    std::string witness = !report.restriction_exact
                              ? std::string("restriction to the base group is not exact")
                              : "constants grew past the stability slack: K=" +
                                    format_double(report.K) + " vs " +
                                    format_double(report.K_smaller) +
                                    " C=" + format_double(report.C) + " vs " +
                                    format_double(report.C_smaller);
    result.failure = FailureRecord{"furman", "verify_section_maps", std::move(witness)};
  }
  result.table = render_table(config, result.columns, rows);
  return result;
}

}  // namespace

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw ConfigError("unknown output format: " + text + " (expected csv or json)");
}

std::string to_string(OutputFormat format) {
  return format == OutputFormat::Csv ? "csv" : "json";
}

std::string format_failure(const FailureRecord& record) {
  nlohmann::ordered_json doc;
  doc["module"] = record.module;
  doc["operation"] = record.operation;
  doc["witness"] = record.witness;
  return doc.dump();
}

SuiteResult run_suite(const ExperimentConfig& config) {
  if (config.suite == "metric-axioms") return metric_axioms_suite(config);
  if (config.suite == "relations") return relations_suite(config);
  if (config.suite == "furman") return furman_suite(config);
  throw ConfigError("unknown suite: " + config.suite +
                    " (expected metric-axioms, relations, or furman)");
}

furman::BaseGroup parse_base_group(const std::string& text) {
  if (text.rfind("bs:", 0) == 0) {
    const std::string rest = text.substr(3);
    const auto comma = rest.find(',');
    if (comma == std::string::npos || rest.substr(0, comma) != "1")
      throw ConfigError("group literal bs: expects bs:1,<m>");
    long long m = 0;
    try {
      m = std::stoll(rest.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("group literal bs: bad integer in " + text);
    }
    IMat M(1, 1);
    M(0, 0) = m;
    return groups::AbcGroup::from_matrix(M);
  }
  if (text.rfind("abc:", 0) == 0)
    return groups::AbcGroup::from_matrix(spectral::parse_int_matrix(text.substr(4)));
  if (text.rfind("ll:", 0) == 0) {
    int q = 0;
    try {
      q = std::stoi(text.substr(3));
    } catch (const std::exception&) {
      throw ConfigError("group literal ll: bad integer in " + text);
    }
    if (q < 2) throw ConfigError("group literal ll: lamp order must be >= 2");
    return groups::LampGroup{q};
  }
  throw ConfigError("unknown group literal: " + text + " (expected bs:1,m / abc:[[..]] / ll:q)");
}

furman::Envelope parse_envelope(const std::string& group, const std::string& extension) {
  auto base = parse_base_group(group);
  const auto product_of = [&](int f) {
    if (auto* abc = std::get_if<groups::AbcGroup>(&base))
      return furman::Envelope::product(*abc, f);
    return furman::Envelope::product(std::get<groups::LampGroup>(base), f);
  };
  if (extension == "trivial") return product_of(1);
  if (extension.rfind("product:", 0) == 0) {
    int f = 0;
    try {
      f = std::stoi(extension.substr(8));
    } catch (const std::exception&) {
      throw ConfigError("extension literal product: bad integer in " + extension);
    }
    if (f < 1) throw ConfigError("extension literal product: order must be >= 1");
    return product_of(f);
  }
  if (extension == "flip") {
    if (auto* lamp = std::get_if<groups::LampGroup>(&base))
      return furman::Envelope::lamp_mirror(*lamp);
    throw ConfigError("extension flip needs a lamplighter base group (ll:q)");
  }
  throw ConfigError("unknown extension literal: " + extension +
                    " (expected trivial / product:<f> / flip)");
}

std::string render_csv(const std::vector<std::string>& columns, const Rows& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    check_csv_field(columns[i]);
    out << (i ? "," : "") << columns[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("render_csv: row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      check_csv_field(row[i]);
      out << (i ? "," : "") << row[i];
    }
    out << '\n';
  }
  return out.str();
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

}  // namespace solvlab::experiment
