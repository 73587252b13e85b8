#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "robustrank/edge_list_io.hpp"
#include "robustrank/errors.hpp"
#include "robustrank/graph_matrix.hpp"
#include "robustrank/models.hpp"
#include "robustrank/norms.hpp"
#include "robustrank/perturbation.hpp"
#include "robustrank/solvers.hpp"

namespace robustrank::cli {
namespace {

using json = nlohmann::json;

constexpr double kPagerankTol = 1e-12;
constexpr double kAveragedTol = 1e-6;

const std::vector<std::string> kSolvers = {"pagerank", "power-avg", "algorithm1", "robust-exact"};

struct Failure {
  int code;
  std::string message;
};

struct Options {
  std::string command;
  std::string input;
  std::string model;
  std::size_t side = 0;
  std::string solver = "algorithm1";
  std::vector<std::string> solvers;
  double epsilon = 1.0;
  std::vector<double> suggest;
  std::string pair = "l2l2";
  std::string col_budget;
  double alpha = 0.85;
  std::optional<double> tol;
  std::size_t max_iter = 100000;
  std::size_t top_k = 0;
  std::uint64_t seed = 0;
  std::string format = "csv";
  bool diagonal = false;
  bool last_row = false;
  std::string set = "xif";
  std::size_t samples = 1000;
  std::string x_solver = "robust-exact";
  std::size_t max_shrink = 60;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

NormPair parse_pair(const std::string& s) {
  if (s == "l1g1") return NormPair::l1_g1;
  if (s == "l2g2") return NormPair::l2_g2;
  return NormPair::l2_l2;
}

PerturbationSet parse_set(const std::string& s) {
  if (s == "xi1") return PerturbationSet::xi1;
  if (s == "xi2") return PerturbationSet::xi2;
  return PerturbationSet::xi_f;
}

// ---------------------------------------------------------------------------
// setup

struct Graph {
  SparseStochasticMatrix p;
  std::optional<GridModelSpec> grid;
};

Graph load_graph(const Options& o) {
  if (o.input.empty() == o.model.empty()) {
    throw Failure{invalid_config, "exactly one of --input or --model is required"};
  }
  if (!o.model.empty()) {
    if (o.side == 0) throw Failure{invalid_config, "--model requires --n"};
    GridModelSpec spec{o.side, o.model == "model1" ? GridVariant::model1 : GridVariant::model2};
    try {
      spec.validate();
    } catch (const InputError& e) {
      throw Failure{invalid_config, e.what()};
    }
    return {generate(spec), spec};
  }
  try {
    return {from_edge_list(read_edge_list(o.input)), std::nullopt};
  } catch (const std::exception& e) {
    throw Failure{unreadable_input, e.what()};
  }
}

UncertaintySpec make_spec(const Options& o, const SparseStochasticMatrix& p, NormPair pair) {
  try {
    double eps = o.epsilon;
    if (!o.suggest.empty()) eps = suggest_epsilon(static_cast<double>(p.size()), o.suggest[0], o.suggest[1]);
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("--epsilon must be finite and > 0");
    const std::string& b = o.col_budget;
    if (b.empty()) return UncertaintySpec::uniform(eps, p.size(), pair);
    if (b == "inv-degree") return UncertaintySpec::inverse_degree(eps, p, pair);
    if (b.rfind("uniform:", 0) == 0) {
      std::size_t used = 0;
      const std::string value = b.substr(8);
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size()) throw InputError("bad --col-budget value: " + b);
      return UncertaintySpec::uniform(eps, p.size(), pair, v);
    }
    throw InputError("--col-budget must be uniform:<v> or inv-degree");
  } catch (const InputError& e) {
    throw Failure{invalid_config, e.what()};
  }
}

void check_solver_settings(const Options& o, const std::vector<std::string>& names) {
  auto bad = [](const std::string& m) { throw Failure{invalid_config, m}; };
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) bad("--alpha must lie in (0, 1)");
  if (o.tol && !(*o.tol > 0.0)) bad("--tol must be > 0");
  if (o.max_iter < 1) bad("--max-iter must be >= 1");
  for (const auto& s : names) {
    if (s == "power-avg" && std::ceil(2.0 / o.tol.value_or(kAveragedTol)) > 1e9) {
      bad("--tol too small for power-avg (more than 1e9 averaged terms)");
    }
  }
}

// ---------------------------------------------------------------------------
// solvers

struct Result {
  std::string solver;
  ScoreVector x;
  std::optional<SolveReport> report;
};

Result run_solver(const std::string& name, const SparseStochasticMatrix& p, const UncertaintySpec& spec,
                  const Options& o) {
  if (name == "pagerank") {
    SolveReport r = pagerank(p, o.alpha, o.tol.value_or(kPagerankTol), o.max_iter);
    return {name, r.final, std::move(r)};
  }
  if (name == "power-avg") return {name, dominant_eigenvector(p, o.tol.value_or(kAveragedTol)), std::nullopt};
  if (name == "algorithm1") {
    Algorithm1Options opt;
    opt.max_iter = o.max_iter;
    SolveReport r = algorithm1(p, spec, opt);
    return {name, r.final, std::move(r)};
  }
  SolverConfig cfg;
  cfg.max_iter = o.max_iter;
  SolveReport r = mirror_descent_minimize(p, spec, cfg);
  return {name, r.final, std::move(r)};
}

json config_json(const Options& o, const Graph& g, const UncertaintySpec& spec) {
  json c;
  c["command"] = o.command;
  if (g.grid) {
    c["model"] = to_string(g.grid->variant);
    c["n"] = g.grid->side;
  } else {
    c["input"] = o.input;
  }
  c["nodes"] = g.p.size();
  c["epsilon"] = spec.epsilon();
  c["pair"] = to_string(spec.pair());
  c["col_budget"] = o.col_budget.empty() ? "uniform" : o.col_budget;
  c["alpha"] = o.alpha;
  if (o.tol) c["tol"] = *o.tol;
  c["max_iter"] = o.max_iter;
  c["seed"] = o.seed;
  return c;
}

json history_json(const SolveReport& r) {
  json h = json::array();
  for (const auto& rec : r.phi_history) h.push_back({{"iteration", rec.iteration}, {"phi", rec.phi}});
  return h;
}

json objective_json(const ObjectiveValue& v) {
  return {{"residual", v.residual_term}, {"penalty", v.penalty_term}, {"total", v.total}};
}

std::vector<std::size_t> ranking(const ScoreVector& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  return idx;
}

// ---------------------------------------------------------------------------
// commands

int cmd_rank(const Options& o, std::ostream& out) {
  const Graph g = load_graph(o);
  const UncertaintySpec spec = make_spec(o, g.p, parse_pair(o.pair));
  check_solver_settings(o, {o.solver});
  const Result r = run_solver(o.solver, g.p, spec, o);
  const ObjectiveValue value = phi(g.p, r.x.values(), spec);

  std::vector<std::size_t> rows = ranking(r.x);
  if (o.top_k == 0 || o.top_k >= rows.size()) {
    std::sort(rows.begin(), rows.end());
  } else {
    rows.resize(o.top_k);
  }

  if (o.format == "json") {
    json j;
    j["config"] = config_json(o, g, spec);
    j["config"]["solver"] = o.solver;
    if (o.top_k) j["config"]["top_k"] = o.top_k;
    j["scores"] = r.x.vector();
    if (o.top_k) {
      json top = json::array();
      for (std::size_t i : rows) top.push_back({{"node", i}, {"score", r.x[i]}});
      j["top"] = top;
    }
    j["objective"] = objective_json(value);
    if (r.report) {
      j["phi_history"] = history_json(*r.report);
      j["stop_reason"] = to_string(r.report->stop_reason);
      j["iterations"] = r.report->iterations_used;
    }
    out << j.dump(2) << '\n';
    return ok;
  }

  out << "node," << o.solver << '\n';
  for (std::size_t i : rows) out << i << ',' << num(r.x[i]) << '\n';
  out << "# phi," << num(value.total) << '\n';
  if (r.report) {
    out << "# stop_reason," << to_string(r.report->stop_reason) << '\n';
    out << "# iterations," << r.report->iterations_used << '\n';
  }
  return ok;
}

int cmd_compare(const Options& o, std::ostream& out) {
  if (o.solvers.size() < 2) throw Failure{invalid_config, "compare needs at least two --solvers"};
  if (std::set<std::string>(o.solvers.begin(), o.solvers.end()).size() != o.solvers.size()) {
    throw Failure{invalid_config, "--solvers lists a solver twice"};
  }
  const Graph g = load_graph(o);
  if ((o.diagonal || o.last_row) && !g.grid) {
    throw Failure{invalid_config, "--diagonal/--last-row need a grid --model"};
  }
  const UncertaintySpec spec = make_spec(o, g.p, parse_pair(o.pair));
  check_solver_settings(o, o.solvers);

  std::vector<Result> results;
  std::vector<double> objectives;
  for (const auto& s : o.solvers) {
    results.push_back(run_solver(s, g.p, spec, o));
    objectives.push_back(phi(g.p, results.back().x.values(), spec).total);
  }
  struct Distance {
    std::size_t a, b;
    double value;
  };
  std::vector<Distance> distances;
  for (std::size_t a = 0; a < results.size(); ++a) {
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      double d = 0.0;
      for (std::size_t i = 0; i < g.p.size(); ++i) d += std::abs(results[a].x[i] - results[b].x[i]);
      distances.push_back({a, b, d});
    }
  }

  std::string key = "node";
  std::vector<std::vector<double>> columns;
  for (const auto& r : results) {
    if (o.diagonal) {
      key = "i";
      columns.push_back(diagonal(r.x.values(), g.grid->side));
    } else if (o.last_row) {
      key = "j";
      columns.push_back(last_row(r.x.values(), g.grid->side));
    } else {
      columns.push_back(r.x.vector());
    }
  }
  const std::size_t first_label = (o.diagonal || o.last_row) ? 1 : 0;

  if (o.format == "json") {
    json j;
    j["config"] = config_json(o, g, spec);
    j["config"]["solvers"] = o.solvers;
    if (o.diagonal) j["config"]["series"] = "diagonal";
    if (o.last_row) j["config"]["series"] = "last_row";
    json scores;
    json obj;
    for (std::size_t s = 0; s < results.size(); ++s) {
      scores[o.solvers[s]] = columns[s];
      obj[o.solvers[s]] = objectives[s];
    }
    j["scores"] = scores;
    j["objective"] = obj;
    json d = json::array();
    for (const auto& dist : distances) {
      d.push_back({{"a", o.solvers[dist.a]}, {"b", o.solvers[dist.b]}, {"l1", dist.value}});
    }
    j["l1_distance"] = d;
    out << j.dump(2) << '\n';
    return ok;
  }

  out << key;
  for (const auto& s : o.solvers) out << ',' << s;
  out << '\n';
  for (std::size_t i = 0; i < columns[0].size(); ++i) {
    out << i + first_label;
    for (const auto& c : columns) out << ',' << num(c[i]);
    out << '\n';
  }
  for (std::size_t s = 0; s < results.size(); ++s) out << "# phi," << o.solvers[s] << ',' << num(objectives[s]) << '\n';
  for (const auto& d : distances) {
    out << "# l1," << o.solvers[d.a] << ',' << o.solvers[d.b] << ',' << num(d.value) << '\n';
  }
  return ok;
}

int cmd_stress(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.samples < 1) throw Failure{invalid_config, "--samples must be >= 1"};
  const Graph g = load_graph(o);
  const PerturbationSet set = parse_set(o.set);
  const UncertaintySpec spec = make_spec(o, g.p, bounding_pair(set));
  check_solver_settings(o, {o.x_solver});
  const Result r = run_solver(o.x_solver, g.p, spec, o);

  LowerBoundOptions opt;
  opt.sampler.max_halvings = o.max_shrink;
  const LowerBoundReport rep = empirical_phi_lower_bound(g.p, r.x.values(), spec, set, o.samples, o.seed, opt);

  if (o.format == "json") {
    json j;
    j["config"] = config_json(o, g, spec);
    j["config"]["set"] = to_string(set);
    j["config"]["samples"] = o.samples;
    j["config"]["x_solver"] = o.x_solver;
    j["config"]["max_shrink"] = o.max_shrink;
    j["scores"] = r.x.vector();
    j["nominal_residual"] = rep.nominal_residual;
    j["max_realized"] = rep.lower_bound;
    j["upper_bound"] = rep.upper_bound;
    j["stochastic_samples"] = rep.stochastic_samples;
    j["bound_holds"] = rep.bound_holds;
    out << j.dump(2) << '\n';
  } else {
    out << "key,value\n";
    out << "set," << to_string(set) << '\n';
    out << "pair," << to_string(spec.pair()) << '\n';
    out << "x_solver," << o.x_solver << '\n';
    out << "samples," << rep.samples << '\n';
    out << "stochastic_samples," << rep.stochastic_samples << '\n';
    out << "nominal_residual," << num(rep.nominal_residual) << '\n';
    out << "max_realized," << num(rep.lower_bound) << '\n';
    out << "upper_bound," << num(rep.upper_bound) << '\n';
    out << "bound_holds," << (rep.bound_holds ? "true" : "false") << '\n';
  }
  if (!rep.bound_holds) {
    err << "error: sampled residual " << num(rep.lower_bound) << " exceeds the bound " << num(rep.upper_bound)
        << '\n';
    return solver_failure;
  }
  return ok;
}

int cmd_generate(const Options& o, std::ostream& out) {
  if (o.model.empty() || o.side == 0) throw Failure{invalid_config, "generate needs --model and --n"};
  GridModelSpec spec{o.side, o.model == "model1" ? GridVariant::model1 : GridVariant::model2};
  try {
    spec.validate();
  } catch (const InputError& e) {
    throw Failure{invalid_config, e.what()};
  }
  out << "# " << to_string(spec.variant) << ", n = " << spec.side << ", node (i, j) has id (i - 1) n + (j - 1)\n";
  write_edge_list(out, generate_edges(spec));
  return ok;
}

// ---------------------------------------------------------------------------
// argument parsing

void add_source(CLI::App* app, Options& o) {
  app->add_option("--input", o.input, "Edge-list file");
  app->add_option("--model", o.model, "Synthetic grid graph")->check(CLI::IsMember({"model1", "model2"}));
  app->add_option("--n", o.side, "Grid side length (N = n^2 nodes)");
}

void add_uncertainty(CLI::App* app, Options& o, bool with_pair) {
  auto* eps = app->add_option("--epsilon", o.epsilon, "Total perturbation budget")->capture_default_str();
  app->add_option("--suggest-epsilon", o.suggest, "Set epsilon to sqrt(q N) / m")
      ->expected(2)
      ->type_name("Q M")
      ->excludes(eps);
  if (with_pair) {
    app->add_option("--pair", o.pair, "Norm pair")->check(CLI::IsMember({"l1g1", "l2g2", "l2l2"}))->capture_default_str();
  }
  app->add_option("--col-budget", o.col_budget, "Column budgets: uniform:<v> or inv-degree (default eps/N)");
}

void add_solver_settings(CLI::App* app, Options& o) {
  app->add_option("--alpha", o.alpha, "PageRank damping")->capture_default_str();
  app->add_option("--tol", o.tol, "Stopping tolerance (pagerank 1e-12, power-avg 1e-6 by default)");
  app->add_option("--max-iter", o.max_iter, "Iteration cap")->capture_default_str();
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

int dispatch(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.command == "rank") return cmd_rank(o, out);
  if (o.command == "compare") return cmd_compare(o, out);
  if (o.command == "stress") return cmd_stress(o, out, err);
  return cmd_generate(o, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Robust dominant eigenvectors of link matrices", "robustrank"};
  app.require_subcommand(1);

  auto* rank = app.add_subcommand("rank", "Score the nodes of one graph");
  add_source(rank, o);
  add_uncertainty(rank, o, true);
  add_solver_settings(rank, o);
  rank->add_option("--solver", o.solver)->check(CLI::IsMember(kSolvers))->capture_default_str();
  rank->add_option("--top-k", o.top_k, "Print only the k highest scores");
  rank->add_option("--seed", o.seed)->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Run several solvers on one graph");
  add_source(compare, o);
  add_uncertainty(compare, o, true);
  add_solver_settings(compare, o);
  compare->add_option("--solvers", o.solvers)->check(CLI::IsMember(kSolvers))->required()->delimiter(',');
  auto* diag = compare->add_flag("--diagonal", o.diagonal, "Emit the x_ii series of a grid model");
  compare->add_flag("--last-row", o.last_row, "Emit the x_nj series of a grid model")->excludes(diag);
  compare->add_option("--seed", o.seed)->capture_default_str();

  auto* stress = app.add_subcommand("stress", "Sample perturbations and check the upper bound");
  add_source(stress, o);
  add_uncertainty(stress, o, false);
  add_solver_settings(stress, o);
  stress->add_option("--set", o.set, "Perturbation set")->check(CLI::IsMember({"xi1", "xi2", "xif"}))->capture_default_str();
  stress->add_option("--samples", o.samples)->capture_default_str();
  stress->add_option("--x-solver", o.x_solver, "Solver producing x")->check(CLI::IsMember(kSolvers))->capture_default_str();
  stress->add_option("--max-shrink", o.max_shrink, "Halvings allowed to reach P + xi >= 0")->capture_default_str();
  stress->add_option("--seed", o.seed)->capture_default_str();

  auto* gen = app.add_subcommand("generate", "Write a grid model as an edge list");
  gen->add_option("--model", o.model)->check(CLI::IsMember({"model1", "model2"}))->required();
  gen->add_option("--n", o.side)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : invalid_config;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    return dispatch(o, out, err);
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return infeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return solver_failure;
  }
}

}  // namespace robustrank::cli
