#include "mwt/cli.hpp"

#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mwt/constants.hpp"
#include "mwt/decomposition.hpp"
#include "mwt/error.hpp"
#include "mwt/extremal.hpp"
#include "mwt/io.hpp"
#include "mwt/linear.hpp"
#include "mwt/maximal.hpp"
#include "mwt/report.hpp"
#include "mwt/sparse.hpp"

namespace mwt {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string input;
  std::string out_dir = ".";
  std::string scope = "dyadic";
  int nu = 2;
  double rho = 2.0;
  double D = 0.0;
  double t = 0.0;
  double q = 2.0;
  std::uint64_t seed = 0;
  std::string strategy = "indicators";
  int starts = 64;
  int steps = 200;
  double base = 0.0;
  double lambda = 2.0;
  std::string R = "root";
  std::int64_t budget = kDefaultBudget;
  bool diagnostic = false;
  std::string mode = "eligibility";
  double candidate = 0.0;
  bool bruteforce = false;
  std::string objective = "gap";
  std::string profile;
  int iterations = 100;
  int population = 8;
  double mutation = 0.3;
  double rh_cap = 1e6;
  double tolerance = 1e-9;

  CLI::Option* D_opt = nullptr;
  CLI::Option* t_opt = nullptr;
  CLI::Option* base_opt = nullptr;
  CLI::Option* candidate_opt = nullptr;
};

struct Outcome {
  json parameters;
  json report;
  bool passed = true;
  json certificate;  // written when !passed
  std::vector<std::pair<std::string, std::string>> extra_files;
};

struct Loaded {
  WeightSystem ws;
  std::vector<std::vector<double>> f;
  std::string digest;
};

Loaded load(const Options& o) {
  if (o.input.empty()) throw ValidationError("input", "--input is required");
  LoadedInput li = read_weight_file(o.input);
  Loaded out;
  out.ws = build_system(li.input, o.nu);
  out.f = li.input.f;
  out.digest = fnv1a_hex(li.bytes);
  return out;
}

std::optional<double> doubling_override(const Options& o, int d, int nu) {
  if (o.D_opt->count() && o.t_opt->count()) throw ValidationError("D", "give --D or --t, not both");
  if (o.D_opt->count()) return o.D;
  if (o.t_opt->count()) return doubling_from_t(d, nu, o.t);
  return std::nullopt;
}

double resolved_D(const Options& o, const WeightSystem& ws) {
  const auto D = doubling_override(o, ws.grid.d, ws.grid.nu);
  return D ? *D : default_doubling(ws.grid.d, ws.grid.nu, ws.exponents);
}

json base_parameters(const Options& o, const WeightSystem& ws) {
  return {{"nu", ws.grid.nu},
          {"d", ws.grid.d},
          {"L_max", ws.grid.max_level},
          {"resolution", ws.grid.resolution()},
          {"p", ws.exponents.components()},
          {"budget", o.budget}};
}

NormSearchOptions search_options(const Options& o) {
  NormSearchOptions s;
  s.strategy = parse_strategy(o.strategy);
  s.seed = o.seed;
  s.starts = o.starts;
  s.steps = o.steps;
  return s;
}

Outcome cmd_constants(const Options& o, Loaded& in) {
  ConstantsOptions co;
  co.scope = parse_scope(o.scope);
  co.rho = o.rho;
  co.D = resolved_D(o, in.ws);
  co.search = search_options(o);
  co.budget = o.budget;
  const ConstantsReport r = compute_constants(in.ws, co);
  Outcome out;
  out.parameters = base_parameters(o, in.ws);
  out.parameters.update({{"scope", to_string(co.scope)},
                         {"rho", number_json(co.rho)},
                         {"D", number_json(*co.D)},
                         {"seed", o.seed},
                         {"strategy", to_string(co.search.strategy)},
                         {"starts", co.search.starts},
                         {"steps", co.search.steps}});
  out.report = r.to_json(in.ws.grid);
  out.passed = r.passed();
  if (!out.passed) {
    out.certificate["failed_checks"] = json::array();
    for (const Check& c : r.checks)
      if (!c.holds) out.certificate["failed_checks"].push_back(c.to_json());
  }
  return out;
}

Outcome cmd_maximal(const Options& o, Loaded& in) {
  const Scope scope = parse_scope(o.scope);
  const GridConfig& g = in.ws.grid;
  const auto inputs = weighted_inputs(in.ws, in.f);
  MaximalField field;
  if (scope == Scope::dyadic)
    field = dyadic_maximal(g, inputs, false);
  else if (o.bruteforce)
    field = general_maximal_bruteforce(g, inputs, o.budget);
  else
    field = general_maximal(g, inputs);

  Outcome out;
  out.parameters = base_parameters(o, in.ws);
  out.parameters.update({{"scope", to_string(scope)}, {"bruteforce", o.bruteforce}, {"test_functions", !in.f.empty()}});
  std::size_t arg = 0;
  for (std::size_t x = 0; x < field.values.size(); ++x)
    if (field.values[x] > field.values[arg]) arg = x;
  json& r = out.report;
  r["scope"] = field.scope;
  r["energy"] = number_json(field_energy(field.values, in.ws.omega, in.ws.exponents.p()));
  r["max"] = number_json(field.values.empty() ? 0.0 : field.values[arg]);
  r["argmax"] = arg;
  r["field"] = json::array();
  for (double v : field.values) r["field"].push_back(number_json(v));
  if (scope == Scope::general && g.shifted) {
    const ShiftedBoundReport sb = shifted_bound_check(g, inputs, o.budget);
    r["shifted_bound"] = sb.to_json();
    out.passed = sb.holds;
    if (!sb.holds) out.certificate = {{"shifted_bound", sb.to_json()}};
  }
  out.extra_files.emplace_back("maximal.csv", cell_csv(g, {"field"}, {std::span<const double>(field.values)}));
  return out;
}

Outcome cmd_sparse(const Options& o, Loaded& in) {
  std::optional<double> base;
  if (o.base_opt->count()) base = o.base;
  Outcome out;
  out.parameters = base_parameters(o, in.ws);
  out.parameters.update({{"base", number_json(base ? *base : default_base(in.ws.grid.d, in.ws.grid.nu, in.ws.m()))},
                         {"lambda", number_json(o.lambda)},
                         {"test_functions", !in.f.empty()}});
  const SparseFamily fam = build_sparse(in.ws, in.f, base);
  const SparseInvariants inv = check_invariants(in.ws.grid, fam);
  const DominationReport dom = domination_check(in.ws, in.f, fam);
  const auto coeffs = coefficients(in.ws, fam);
  const CarlesonReport carl = carleson_check(in.ws, coeffs, in.f, o.lambda);
  out.report = {{"family", fam.to_json(in.ws.grid)},
                {"invariants", inv.to_json()},
                {"domination", dom.to_json()},
                {"carleson", carl.to_json(in.ws.grid)}};
  out.report["coefficients"] = json::array();
  for (const auto& c : coeffs)
    out.report["coefficients"].push_back({{"k", c.k}, {"j", c.j}, {"value", number_json(c.value)}});
  out.passed = inv.all() && dom.holds && carl.holds && carl.scaling_holds;
  if (!out.passed) {
    if (!inv.all()) out.certificate["invariants"] = inv.to_json();
    if (!dom.holds) out.certificate["domination"] = dom.to_json();
    if (!carl.holds || !carl.scaling_holds) out.certificate["carleson"] = carl.to_json(in.ws.grid);
  }
  return out;
}

std::optional<Cube> parse_root(const std::string& text, const GridConfig& g, bool& all) {
  all = false;
  if (text == "root") return std::nullopt;
  if (text == "all") {
    all = true;
    return std::nullopt;
  }
  // level:o_0,o_1,...
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("R", "expected root, all or level:o0,o1,...");
  std::vector<int> offset;
  int level = 0;
  try {
    level = std::stoi(text.substr(0, colon));
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) offset.push_back(std::stoi(item));
  } catch (const std::exception&) {
    throw ValidationError("R", "expected root, all or level:o0,o1,...");
  }
  if (static_cast<int>(offset.size()) != g.d) throw ValidationError("R", "offset needs d entries");
  if (level < 0 || level > g.max_level) throw ValidationError("R", "level out of range");
  const int count = g.resolution() / g.side_at(level);
  for (int x : offset)
    if (x < 0 || x >= count) throw ValidationError("R", "offset outside the domain");
  return grid_cube(g, GridId::standard(), level, offset);
}

Outcome cmd_verify_theorem(const Options& o, Loaded& in) {
  TheoremOptions to;
  to.q = o.q;
  to.rho = o.rho;
  if (o.D_opt->count()) to.D = o.D;
  if (o.t_opt->count()) to.t = o.t;
  to.diagnostic = o.diagnostic;
  to.mode = parse_top_mode(o.mode);
  if (o.candidate_opt->count()) to.candidate = o.candidate;
  to.root = parse_root(o.R, in.ws.grid, to.all_roots);
  to.f = in.f;
  const TheoremReport rep = verify_theorem(in.ws, to);
  Outcome out;
  out.parameters = base_parameters(o, in.ws);
  out.parameters.update({{"rho", number_json(rep.params.rho)},
                         {"D", number_json(rep.params.D)},
                         {"t", number_json(rep.params.t)},
                         {"k", rep.params.k},
                         {"q", number_json(rep.params.q)},
                         {"scope", "dyadic"},
                         {"R", o.R},
                         {"mode", to_string(to.mode)},
                         {"diagnostic", to.diagnostic},
                         {"test_functions", !in.f.empty()}});
  if (to.candidate) out.parameters["candidate"] = number_json(*to.candidate);
  out.report = rep.to_json(in.ws.grid);
  out.passed = rep.passed();
  if (!out.passed) {
    out.certificate["parameters"] = rep.params.to_json();
    out.certificate["roots"] = json::array();
    for (const auto& r : rep.roots) {
      if (r.emptiness.empty && r.bounds.passed()) continue;
      out.certificate["roots"].push_back({{"root", cube_json(in.ws.grid, r.partition.root)},
                                          {"emptiness", r.emptiness.to_json()},
                                          {"bounds", r.bounds.to_json()}});
    }
  }
  return out;
}

Outcome cmd_search(const Options& o, Loaded& in) {
  SearchConfig cfg;
  cfg.seed = o.seed;
  cfg.population = o.population;
  cfg.iterations = o.iterations;
  cfg.mutation = o.mutation;
  cfg.objective = parse_objective(o.objective);
  cfg.rh_cap = o.rh_cap;
  cfg.constants.scope = parse_scope(o.scope);
  cfg.constants.rho = o.rho;
  cfg.constants.D = resolved_D(o, in.ws);
  cfg.constants.search = search_options(o);
  cfg.constants.budget = o.budget;
  WeightSystem start = in.ws;
  if (!o.profile.empty()) start = random_system(o.seed, in.ws.grid, in.ws.exponents, parse_profile(o.profile));
  const SearchResult res = ascend(start, cfg);
  Outcome out;
  out.parameters = base_parameters(o, in.ws);
  out.parameters.update({{"seed", o.seed},
                         {"scope", to_string(cfg.constants.scope)},
                         {"rho", number_json(cfg.constants.rho)},
                         {"D", number_json(*cfg.constants.D)},
                         {"objective", to_string(cfg.objective)},
                         {"iterations", cfg.iterations},
                         {"population", cfg.population},
                         {"mutation", number_json(cfg.mutation)},
                         {"rh_cap", number_json(cfg.rh_cap)},
                         {"profile", o.profile.empty() ? "input" : o.profile},
                         {"strategy", to_string(cfg.constants.search.strategy)}});
  out.report = res.to_json(cfg);
  out.extra_files.emplace_back("trace.csv", res.trace_csv());
  out.extra_files.emplace_back("best_weights.json", canonical_dump(weight_input_json(to_input(res.best))));
  out.extra_files.emplace_back("best_weights.csv", weights_csv(res.best));
  return out;
}

Outcome cmd_reduce(const Options& o, Loaded& in) {
  ReductionOptions ro;
  ro.scope = parse_scope(o.scope);
  ro.rho = o.rho;
  ro.D = resolved_D(o, in.ws);
  ro.seed = o.seed;
  ro.tolerance = o.tolerance;
  const ReductionReport r = reduce_linear(in.ws, ro);
  Outcome out;
  out.parameters = base_parameters(o, in.ws);
  out.parameters.update({{"scope", to_string(ro.scope)},
                         {"rho", number_json(ro.rho)},
                         {"D", number_json(*ro.D)},
                         {"seed", o.seed},
                         {"tolerance", number_json(ro.tolerance)}});
  out.report = r.to_json();
  out.passed = r.passed();
  if (!out.passed) {
    out.certificate["failed_checks"] = json::array();
    for (const auto& c : r.checks)
      if (!c.holds) out.certificate["failed_checks"].push_back(c.to_json());
  }
  return out;
}

void write_outputs(const fs::path& dir, const std::string& name, const RunManifest& m, const Outcome& res) {
  fs::create_directories(dir);
  write_file(dir / (name + ".json"), canonical_dump({{"manifest", m.to_json()}, {"report", res.report}}));
  for (const auto& [file, text] : res.extra_files) write_file(dir / file, text);
}

void write_certificate(const fs::path& dir, const RunManifest& m, const json& certificate) {
  fs::create_directories(dir);
  write_file(dir / "certificate.json", canonical_dump({{"manifest", m.to_json()}, {"certificate", certificate}}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilinear maximal function weight constants, sparse families and decomposition checks", "mwt"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "weight file (JSON)");
    sub->add_option("--out-dir", o.out_dir, "directory for reports")->capture_default_str();
    sub->add_option("--nu", o.nu, "grid base when the file has none")->capture_default_str();
    sub->add_option("--budget", o.budget, "brute-force work limit")->capture_default_str();
  };
  auto doubling = [&](CLI::App* sub) {
    sub->add_option("--rho", o.rho, "parent dilation")->capture_default_str();
    o.D_opt = sub->add_option("--D", o.D, "doubling parameter");
    o.t_opt = sub->add_option("--t", o.t, "doubling exponent, D = nu^(d t)");
  };

  CLI::App* constants = app.add_subcommand("constants", "weight constants and the inequality chain");
  common(constants);
  doubling(constants);
  constants->add_option("--scope", o.scope, "dyadic or general")->capture_default_str();
  constants->add_option("--strategy", o.strategy, "indicators, random or ascent")->capture_default_str();
  constants->add_option("--seed", o.seed, "search seed")->capture_default_str();
  constants->add_option("--starts", o.starts, "random or ascent starts")->capture_default_str();
  constants->add_option("--steps", o.steps, "ascent steps per start")->capture_default_str();

  CLI::App* maximal = app.add_subcommand("maximal", "maximal function field");
  common(maximal);
  maximal->add_option("--scope", o.scope, "dyadic or general")->capture_default_str();
  maximal->add_flag("--bruteforce", o.bruteforce, "general scope by direct enumeration");

  CLI::App* sparse = app.add_subcommand("sparse", "sparse family, domination and Carleson checks");
  common(sparse);
  o.base_opt = sparse->add_option("--base", o.base, "threshold ratio (default 2^m nu^(dm))");
  sparse->add_option("--lambda", o.lambda, "scaling check factor")->capture_default_str();

  CLI::App* theorem = app.add_subcommand("verify-theorem", "four-collection decomposition under R");
  common(theorem);
  doubling(theorem);
  theorem->add_option("--q", o.q, "phi exponent")->capture_default_str();
  theorem->add_option("--R", o.R, "root, all, or level:o0,o1,...")->capture_default_str();
  theorem->add_flag("--diagnostic", o.diagnostic, "allow D below the admissible range");
  theorem->add_option("--mode", o.mode, "eligibility or numeric")->capture_default_str();
  o.candidate_opt = theorem->add_option("--candidate", o.candidate, "testing bound for numeric mode");

  CLI::App* search = app.add_subcommand("search-extremal", "elitist search for large constant gaps");
  common(search);
  doubling(search);
  search->add_option("--scope", o.scope, "scope of the evaluated constants")->capture_default_str();
  search->add_option("--strategy", o.strategy, "norm_lower strategy")->capture_default_str();
  search->add_option("--seed", o.seed, "search seed")->capture_default_str();
  search->add_option("--objective", o.objective, "certificate, gap or rh-stress")->capture_default_str();
  search->add_option("--profile", o.profile, "random start on the input grid: uniform, lognormal, spiky, power");
  search->add_option("--iterations", o.iterations, "generations")->capture_default_str();
  search->add_option("--population", o.population, "candidates per generation")->capture_default_str();
  search->add_option("--mutation", o.mutation, "log-scale mutation size")->capture_default_str();
  search->add_option("--rh-cap", o.rh_cap, "rh-stress objective is capped at this value")->capture_default_str();
  search->add_option("--starts", o.starts, "norm_lower starts")->capture_default_str();
  search->add_option("--steps", o.steps, "norm_lower ascent steps")->capture_default_str();

  CLI::App* reduce = app.add_subcommand("reduce-linear", "equal-weight reduction identities");
  common(reduce);
  doubling(reduce);
  reduce->add_option("--scope", o.scope, "dyadic or general")->capture_default_str();
  reduce->add_option("--seed", o.seed, "norm search seed")->capture_default_str();
  reduce->add_option("--tolerance", o.tolerance, "relative tolerance of the identities")->capture_default_str();

  std::vector<std::string> argv_store{"mwt"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  // Each subcommand registered its own option pointers; rebind to the chosen one.
  if (chosen->get_option_no_throw("--D")) {
    o.D_opt = chosen->get_option("--D");
    o.t_opt = chosen->get_option("--t");
  }
  const std::string name = chosen->get_name();
  RunManifest manifest;
  manifest.command = name;
  manifest.input = o.input;
  try {
    Loaded in = load(o);
    manifest.input_digest = in.digest;
    manifest.timestamp = reproducible_timestamp();
    Outcome res;
    try {
      if (name == "constants")
        res = cmd_constants(o, in);
      else if (name == "maximal")
        res = cmd_maximal(o, in);
      else if (name == "sparse")
        res = cmd_sparse(o, in);
      else if (name == "verify-theorem")
        res = cmd_verify_theorem(o, in);
      else if (name == "search-extremal")
        res = cmd_search(o, in);
      else
        res = cmd_reduce(o, in);
    } catch (const VerificationFailure& e) {
      manifest.parameters = base_parameters(o, in.ws);
      write_certificate(o.out_dir, manifest, {{"error", e.what()}, {"detail", e.detail()}});
      err << name << ": verification failed: " << e.what() << '\n';
      return 1;
    }
    manifest.parameters = res.parameters;
    write_outputs(o.out_dir, name, manifest, res);
    if (!res.passed) {
      write_certificate(o.out_dir, manifest, res.certificate);
      out << name << ": FAILED (certificate: " << (fs::path(o.out_dir) / "certificate.json").string() << ")\n";
      return 1;
    }
    out << name << ": passed (report: " << (fs::path(o.out_dir) / (name + ".json")).string() << ")\n";
    return 0;
  } catch (const ValidationError& e) {
    err << name << ": invalid input: " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << name << ": domain error: " << e.what() << '\n';
  } catch (const BudgetError& e) {
    err << name << ": refused: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << name << ": cannot write output: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    err << name << ": " << e.what() << '\n';
  }
  return 2;
}

}  // namespace mwt
