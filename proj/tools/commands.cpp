#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "log.hpp"
#include "stratree/glued.hpp"
#include "stratree/laplacian.hpp"
#include "stratree/nodal.hpp"

namespace stratree::cli {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string json_string(std::string_view s) { return "\"" + std::string(s) + "\""; }

std::string json_bool(bool b) { return b ? "true" : "false"; }

/// Objects are emitted one per line inside an array, keys in insertion order.
class Record {
 public:
  Record& add(std::string_view key, std::string value) {
    fields_.emplace_back(std::string(key), std::move(value));
    return *this;
  }
  std::string json() const {
    std::string s = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (i) s += ", ";
      s += json_string(fields_[i].first) + ": " + fields_[i].second;
    }
    return s + "}";
  }
  std::string csv_header() const {
    std::string s;
    for (std::size_t i = 0; i < fields_.size(); ++i) s += (i ? "," : "") + fields_[i].first;
    return s;
  }
  std::string csv_row() const {
    std::string s;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      std::string v = fields_[i].second;
      if (!v.empty() && v.front() == '"') v = v.substr(1, v.size() - 2);
      if (v.find(',') != std::string::npos) v = json_string(v);
      s += (i ? "," : "") + v;
    }
    return s;
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

void emit_records(std::ostream& out, const std::vector<Record>& records, Format format) {
  if (format == Format::csv) {
    if (!records.empty()) out << records.front().csv_header() << '\n';
    for (const auto& r : records) out << r.csv_row() << '\n';
    return;
  }
  out << "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) out << "  " << records[i].json() << (i + 1 < records.size() ? ",\n" : "\n");
  out << "]\n";
}

std::string json_array(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

std::string describe(const AnySpec& spec) {
  if (const auto* s = std::get_if<SymmetricTreeSpec>(&spec)) return s->to_string();
  const auto& g = std::get<GluedTreeSpec>(spec);
  return "left=" + g.left.to_string() + " right=" + g.right.to_string();
}

Count vertex_count(const AnySpec& spec) {
  return std::visit([](const auto& s) { return s.vertex_count(); }, spec);
}

RootedTree realize(const AnySpec& spec) {
  if (const auto* s = std::get_if<SymmetricTreeSpec>(&spec)) return TreeIndex(*s).to_rooted_tree();
  return realize_glued(std::get<GluedTreeSpec>(spec));
}

void check_cap(Count n, Count cap, std::string_view what) {
  if (n > cap)
    throw ResourceLimit(std::string(what) + " refused: " + to_string(n) + " vertices exceed cap " + to_string(cap));
}

// ---------------------------------------------------------------------------

int cmd_spectrum(const RunConfig& config, const AnySpec& spec, std::ostream& out, std::ostream& err) {
  std::vector<Record> records;
  Count total = 0;
  if (const auto* s = std::get_if<SymmetricTreeSpec>(&spec)) {
    const auto lines = decompose_spectrum(*s, config.jobs);
    total = total_multiplicity(lines);
    for (const auto& line : lines)
      records.push_back(Record()
                            .add("lambda", num(line.lambda))
                            .add("multiplicity", to_string(line.multiplicity))
                            .add("origin_level", std::to_string(line.origin_level))
                            .add("position", std::to_string(line.position))
                            .add("rojo_level", std::to_string(s->levels() - line.origin_level)));
  } else {
    const auto& g = std::get<GluedTreeSpec>(spec);
    const auto lines = glued_spectrum(g, config.jobs);
    total = total_multiplicity(lines);
    for (const auto& line : lines) {
      int dim = g.left.levels() + g.right.levels() - 1;
      if (line.side == Side::left) dim = g.left.levels() - line.origin_level;
      if (line.side == Side::right) dim = g.right.levels() - line.origin_level;
      records.push_back(Record()
                            .add("lambda", num(line.lambda))
                            .add("multiplicity", to_string(line.multiplicity))
                            .add("origin_level", std::to_string(line.origin_level))
                            .add("position", std::to_string(line.position))
                            .add("rojo_level", std::to_string(dim))
                            .add("origin_side", json_string(to_string(line.side))));
    }
  }
  log(LogLevel::info, err, describe(spec) + ": total multiplicity " + to_string(total));

  if (config.mtx_path) {
    std::ofstream mtx(*config.mtx_path);
    if (!mtx) throw InvalidSpec("cannot open " + *config.mtx_path);
    write_matrix_market(mtx, assemble(realize(spec)));
  }
  emit_records(out, records, config.format);
  return kOk;
}

// ---------------------------------------------------------------------------

struct BasisView {
  Vertex vertices = 0;
  std::vector<int> levels;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<Record> meta;  // per-vector descriptive fields
  std::vector<bool> stratified_whole;
  double max_residual = 0;
};

BasisView basis_view(const RunConfig& config, const AnySpec& spec) {
  BasisView view;
  auto describe_pair = [](const EigenPair& p) {
    return Record()
        .add("lambda", num(p.lambda))
        .add("origin_level", std::to_string(p.origin_level))
        .add("construction", json_string(to_string(p.construction)))
        .add("residual", num(p.residual));
  };
  if (const auto* s = std::get_if<SymmetricTreeSpec>(&spec)) {
    const auto basis = full_eigenbasis(*s, config.basis_cap);
    const TreeIndex index(*s);
    view.vertices = basis.vertex_count;
    for (Vertex v = 0; v < index.vertex_count(); ++v) view.levels.push_back(index.level_of(v));
    view.values = basis.values();
    view.vectors = basis.vectors();
    view.max_residual = basis.max_residual();
    for (const auto& p : basis.pairs) {
      view.meta.push_back(describe_pair(p));
      view.stratified_whole.push_back(p.construction == Construction::stratified);
    }
  } else {
    const auto& g = std::get<GluedTreeSpec>(spec);
    const auto basis = glued_eigenbasis(g, config.basis_cap);
    view.vertices = basis.vertex_count;
    view.levels = glued_signed_levels(g);
    view.values = basis.values();
    view.vectors = basis.vectors();
    view.max_residual = basis.max_residual();
    for (const auto& p : basis.pairs) {
      view.meta.push_back(describe_pair(p.pair).add("origin_side", json_string(to_string(p.side))));
      view.stratified_whole.push_back(p.side == Side::stratified);
    }
  }
  return view;
}

int cmd_eigvecs(const RunConfig& config, const AnySpec& spec, std::ostream& out, std::ostream& err) {
  const BasisView view = basis_view(config, spec);
  log(LogLevel::info, err, describe(spec) + ": max residual " + num(view.max_residual));
  if (config.format == Format::csv) {
    std::string header = view.meta.empty() ? "" : view.meta.front().csv_header();
    for (Vertex v = 0; v < view.vertices; ++v) header += ",v" + std::to_string(v);
    out << header << '\n';
    for (std::size_t i = 0; i < view.meta.size(); ++i) {
      out << view.meta[i].csv_row();
      const auto col = view.vectors.col(static_cast<Eigen::Index>(i));
      for (Vertex v = 0; v < view.vertices; ++v) out << ',' << num(col[v]);
      out << '\n';
    }
    return kOk;
  }
  out << "{\n  \"vertices\": " << view.vertices << ",\n  \"levels\": [";
  for (std::size_t i = 0; i < view.levels.size(); ++i) out << (i ? ", " : "") << view.levels[i];
  out << "],\n  \"vectors\": [\n";
  for (std::size_t i = 0; i < view.meta.size(); ++i) {
    Record r = view.meta[i];
    r.add("values", json_array(view.vectors.col(static_cast<Eigen::Index>(i))));
    out << "    " << r.json() << (i + 1 < view.meta.size() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_nodal(const RunConfig& config, const AnySpec& spec, std::ostream& out, std::ostream&) {
  const BasisView view = basis_view(config, spec);
  const RootedTree tree = realize(spec);
  const NodalOptions options{config.tol, 0.0};
  const auto courant = courant_check(tree, view.values, view.vectors, options);
  const auto zero_free = zero_free_check(tree, view.values, view.vectors, options);

  std::vector<Record> records;
  bool all = true;
  for (std::size_t i = 0; i < courant.size(); ++i) {
    const bool pass = courant[i].pass && zero_free[i].pass;
    all = all && pass;
    records.push_back(Record()
                          .add("lambda", num(courant[i].lambda))
                          .add("position", std::to_string(courant[i].position))
                          .add("multiplicity", std::to_string(courant[i].multiplicity))
                          .add("sign_graphs", std::to_string(courant[i].sign_graphs))
                          .add("bound", std::to_string(courant[i].bound))
                          .add("zero_free", json_bool(zero_free[i].applicable))
                          .add("pass", json_bool(pass)));
  }
  emit_records(out, records, config.format);
  return all ? kOk : kVerificationFailed;
}

// ---------------------------------------------------------------------------

struct Check {
  std::string name;
  bool pass = true;
  double max_deviation = 0;
};

double max_abs_diff(const std::vector<double>& a, const Eigen::VectorXd& b) {
  if (static_cast<Eigen::Index>(a.size()) != b.size()) return INFINITY;
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[static_cast<Eigen::Index>(i)]));
  return worst;
}

void nodal_checks(const RunConfig& config, const RootedTree& tree, const DenseEigen<double>& oracle,
                  const BasisView& view, std::vector<Check>& checks) {
  const NodalOptions oracle_opts{1e-8, 1e-9};
  Check courant{"courant_bound"}, zero_free{"zero_free_exact_count"};
  for (const auto& r : courant_check(tree, oracle.values, oracle.vectors, oracle_opts)) {
    courant.pass = courant.pass && r.pass;
    courant.max_deviation = std::max(courant.max_deviation, static_cast<double>(std::max<std::int64_t>(0, r.sign_graphs - r.bound)));
  }
  for (const auto& r : zero_free_check(tree, oracle.values, oracle.vectors, oracle_opts)) {
    zero_free.pass = zero_free.pass && r.pass;
    if (r.applicable)
      zero_free.max_deviation = std::max(zero_free.max_deviation, std::abs(static_cast<double>(r.sign_graphs - r.position)));
  }
  checks.push_back(courant);
  checks.push_back(zero_free);

  // Common zeros of each eigenspace of the constructed basis, and their
  // stability under random recombination.
  std::mt19937_64 rng(config.seed);
  Check recombination{"vanishing_recombination"}, structure{"vanishing_structure"};
  const auto clusters = cluster_sorted(view.values, 1e-8);
  for (std::size_t i = 0; i < clusters.size();) {
    const auto start = static_cast<Eigen::Index>(i);
    const Eigen::Index size = clusters[i].size;
    const Eigen::MatrixXd space = view.vectors.middleCols(start, size);
    const auto zeros = common_vanishing(space);
    for (int trial = 0; trial < 5; ++trial)
      recombination.pass = recombination.pass && common_vanishing(random_recombination(space, rng)) == zeros;
    const auto vs = vanishing_structure(tree, view.values[start], space);
    structure.pass = structure.pass && vs.pass;
    i += static_cast<std::size_t>(size);
  }
  checks.push_back(recombination);
  checks.push_back(structure);
}

int cmd_verify(const RunConfig& config, const AnySpec& spec, std::ostream& out, std::ostream& err) {
  const Count n = vertex_count(spec);
  check_cap(n, static_cast<Count>(config.oracle_cap), "dense oracle");
  check_cap(n, static_cast<Count>(config.basis_cap), "eigenbasis");
  const RootedTree tree = realize(spec);
  const auto oracle = dense_eigen(Eigen::MatrixXd(assemble(tree)), config.oracle_cap);
  const BasisView view = basis_view(config, spec);
  std::vector<Check> checks;

  std::vector<double> expanded;
  if (const auto* s = std::get_if<SymmetricTreeSpec>(&spec)) {
    const auto counting = counting_identity(*s);
    checks.push_back({"counting_identity", counting.lhs == counting.vertex_count, 0.0});
    const auto lines = decompose_spectrum(*s, config.jobs);
    checks.push_back({"total_multiplicity", total_multiplicity(lines) == n, 0.0});
    expanded = expand_spectrum(lines);

    Check lower{"multiplicity_lower_bound"};
    const auto pop = s->populations();
    for (const auto& line : lines) {
      if (line.origin_level == 0) continue;
      Eigen::Index seen = 0;
      for (Eigen::Index i = 0; i < oracle.values.size(); ++i) seen += std::abs(oracle.values[i] - line.lambda) <= config.tol;
      const Count need = pop[line.origin_level] - pop[line.origin_level - 1];
      if (static_cast<Count>(seen) < need) {
        lower.pass = false;
        lower.max_deviation = std::max(lower.max_deviation, static_cast<double>(need - static_cast<Count>(seen)));
      }
    }
    checks.push_back(lower);
  } else {
    const auto lines = glued_spectrum(std::get<GluedTreeSpec>(spec), config.jobs);
    checks.push_back({"total_multiplicity", total_multiplicity(lines) == n, 0.0});
    expanded = expand_spectrum(lines);
  }
  const double deviation = max_abs_diff(expanded, oracle.values);
  checks.push_back({"oracle_equivalence", deviation <= config.tol, deviation});

  checks.push_back({"eigenbasis_size", view.values.size() == static_cast<Eigen::Index>(n), 0.0});
  checks.push_back({"eigenbasis_residual", view.max_residual <= 1e-9, view.max_residual});
  const Eigen::Index rank = gram_schmidt_rank(view.vectors);
  checks.push_back({"eigenbasis_rank", rank == static_cast<Eigen::Index>(n), static_cast<double>(static_cast<Eigen::Index>(n) - rank)});

  Check strat{"stratification"};
  for (std::size_t i = 0; i < view.stratified_whole.size(); ++i) {
    if (!view.stratified_whole[i]) continue;
    std::map<int, double> first;
    const auto col = view.vectors.col(static_cast<Eigen::Index>(i));
    for (Vertex v = 0; v < view.vertices; ++v) {
      auto [it, inserted] = first.emplace(view.levels[static_cast<std::size_t>(v)], col[v]);
      if (!inserted && it->second != col[v]) {
        strat.pass = false;
        strat.max_deviation = std::max(strat.max_deviation, std::abs(it->second - col[v]));
      }
    }
  }
  checks.push_back(strat);

  nodal_checks(config, tree, oracle, view, checks);

  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  log(LogLevel::info, err, describe(spec) + (all ? ": all checks pass" : ": verification failed"));

  if (config.format == Format::csv) {
    out << "name,pass,max_deviation\n";
    for (const auto& c : checks) out << c.name << ',' << json_bool(c.pass) << ',' << num(c.max_deviation) << '\n';
  } else {
    out << "{\n  \"spec\": " << json_string(describe(spec)) << ",\n  \"vertices\": " << to_string(n)
        << ",\n  \"pass\": " << json_bool(all) << ",\n  \"checks\": [\n";
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& c = checks[i];
      out << "    " << Record().add("name", json_string(c.name)).add("pass", json_bool(c.pass)).add("max_deviation", num(c.max_deviation)).json()
          << (i + 1 < checks.size() ? ",\n" : "\n");
    }
    out << "  ]\n}\n";
  }
  return all ? kOk : kVerificationFailed;
}

// ---------------------------------------------------------------------------

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  using Clock = std::chrono::steady_clock;
  std::vector<SymmetricTreeSpec> specs;
  if (config.spec_path || !config.children) {
    const AnySpec any = load_spec(config);
    if (!std::holds_alternative<SymmetricTreeSpec>(any)) throw InvalidSpec("bench takes symmetric tree specs");
    specs.push_back(std::get<SymmetricTreeSpec>(any));
  } else {
    const auto pattern = parse_children(*config.children);
    if (config.levels.empty()) specs.emplace_back(pattern);
    for (int k : config.levels) specs.push_back(SymmetricTreeSpec::cycled(pattern, k));
  }

  std::vector<Record> records;
  for (const auto& spec : specs) {
    const auto t0 = Clock::now();
    const auto lines = decompose_spectrum(spec, config.jobs);
    const double decompose_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    const Count n = spec.vertex_count();

    std::string dense = json_string("skipped(cap)");
    if (n <= static_cast<Count>(config.oracle_cap)) {
      const auto t1 = Clock::now();
      const Eigen::MatrixXd m(assemble(TreeIndex(spec)));
      (void)dense_eigen(m, config.oracle_cap);
      dense = num(std::chrono::duration<double, std::milli>(Clock::now() - t1).count());
    }
    log(LogLevel::debug, err, spec.to_string() + " decomposed in " + num(decompose_ms) + " ms");
    records.push_back(Record()
                          .add("children", json_string(spec.to_string()))
                          .add("levels", std::to_string(spec.levels()))
                          .add("vertices", to_string(n))
                          .add("decompose_ms", num(decompose_ms))
                          .add("dense_ms", dense)
                          .add("total_multiplicity", to_string(total_multiplicity(lines))));
  }
  emit_records(out, records, config.format);
  return kOk;
}

void validate(const RunConfig& config) {
  if (!(config.tol > 0)) throw InvalidSpec("--tol must be positive");
  if (config.oracle_cap < 1) throw InvalidSpec("--oracle-cap must be at least 1");
  if (config.basis_cap < 1) throw InvalidSpec("--basis-cap must be at least 1");
  if (config.jobs < 1) throw InvalidSpec("--jobs must be at least 1");
  for (int k : config.levels)
    if (k < 1) throw InvalidSpec("--levels values must be at least 1");
}

}  // namespace

std::vector<std::uint32_t> parse_children(const std::string& text) {
  std::vector<std::uint32_t> out;
  if (text.find_first_not_of(" \t") == std::string::npos) return out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto b = token.find_first_not_of(" \t");
    const auto e = token.find_last_not_of(" \t");
    if (b == std::string::npos) throw InvalidSpec("empty entry in children list");
    token = token.substr(b, e - b + 1);
    if (token.find_first_not_of("0123456789") != std::string::npos || token.size() > 9)
      throw InvalidSpec("children entries must be non-negative integers: '" + token + "'");
    out.push_back(static_cast<std::uint32_t>(std::stoul(token)));
  }
  return out;
}

AnySpec parse_spec_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("malformed spec JSON: ") + e.what());
  }
  auto read = [](const nlohmann::json& arr, std::string_view field) {
    if (!arr.is_array()) throw InvalidSpec("field '" + std::string(field) + "' must be an array");
    std::vector<std::uint32_t> out;
    for (const auto& v : arr) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 0xffffffffULL)
        throw InvalidSpec("field '" + std::string(field) + "' must hold non-negative integers");
      out.push_back(v.get<std::uint32_t>());
    }
    return SymmetricTreeSpec(std::move(out));
  };
  if (!doc.is_object()) throw InvalidSpec("spec must be a JSON object");
  if (doc.contains("children")) {
    if (doc.contains("left") || doc.contains("right")) throw InvalidSpec("spec mixes 'children' with 'left'/'right'");
    return read(doc["children"], "children");
  }
  if (doc.contains("left") && doc.contains("right"))
    return GluedTreeSpec{read(doc["left"], "left"), read(doc["right"], "right")};
  throw InvalidSpec("spec needs 'children' or both 'left' and 'right'");
}

AnySpec load_spec(const RunConfig& config) {
  if (config.spec_path && config.children) throw InvalidSpec("give either --children or --spec, not both");
  if (config.spec_path) {
    std::ifstream in(*config.spec_path);
    if (!in) throw InvalidSpec("cannot read spec file " + *config.spec_path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec_json(buf.str());
  }
  if (!config.children) throw InvalidSpec("missing --children or --spec");
  const auto pattern = parse_children(*config.children);
  if (config.levels.size() > 1) throw InvalidSpec("--levels takes a single value outside bench");
  if (config.levels.size() == 1) return SymmetricTreeSpec::cycled(pattern, config.levels.front());
  return SymmetricTreeSpec(pattern);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    if (config.command == "bench") return cmd_bench(config, out, err);
    const AnySpec spec = load_spec(config);
    log(LogLevel::debug, err, config.command + " " + describe(spec));
    if (config.command == "spectrum") return cmd_spectrum(config, spec, out, err);
    if (config.command == "eigvecs") return cmd_eigvecs(config, spec, out, err);
    if (config.command == "nodal") return cmd_nodal(config, spec, out, err);
    if (config.command == "verify") return cmd_verify(config, spec, out, err);
    throw InvalidSpec("unknown command '" + config.command + "'");
  } catch (const InvalidSpec& e) {
    log(LogLevel::error, err, e.what());
    return kInputError;
  } catch (const ResourceLimit& e) {
    log(LogLevel::error, err, e.what());
    return kResourceError;
  }
}

}  // namespace stratree::cli
