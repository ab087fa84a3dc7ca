#include "l1pca/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "l1pca/data.hpp"
#include "l1pca/eval.hpp"
#include "l1pca/linalg.hpp"
#include "l1pca/random.hpp"
#include "l1pca/solvers.hpp"
#include "l1pca/verify.hpp"

namespace l1pca {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kConfig, std::string("--") + what + ": invalid number '" + tok + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::kConfig, std::string("--") + what + ": empty list");
  return out;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

// Appends flags from a JSON config object for every key not already given.
void merge_config(std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return;
  std::ifstream f(*path);
  if (!f) throw Error(ErrorKind::kIo, "cannot open config '" + *path + "'");
  json cfg;
  try {
    f >> cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, "config '" + *path + "': " + e.what());
  }
  if (!cfg.is_object()) throw Error(ErrorKind::kConfig, "config must be a JSON object");
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  auto scalar = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt17(v.get<double>());
    throw Error(ErrorKind::kConfig, "unsupported config value " + v.dump());
  };
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
      args.push_back(flag);
      args.push_back(joined);
    } else {
      args.push_back(flag);
      args.push_back(scalar(value));
    }
  }
}

json to_json(const CriticalityReport& r) {
  return {{"h_residual", r.h_residual},
          {"gen_eq_residual", r.gen_eq_residual},
          {"alpha_condition_threshold", r.alpha_condition_threshold},
          {"alpha_star_used", r.alpha_star_used},
          {"certified_critical_for_l1", r.certified_critical_for_l1},
          {"vacuous", r.vacuous},
          {"l1_residual", r.l1_residual}};
}

json to_json(const AuditReport& a) {
  return {{"name", "decrease_and_error_audit"},
          {"kappa1", a.kappa1},
          {"kappa2", a.kappa2},
          {"samples", a.steps},
          {"decrease_violations", a.decrease_violations},
          {"error_violations", a.error_violations},
          {"violations", a.decrease_violations + a.error_violations},
          {"worst_decrease_slack", a.worst_decrease_slack},
          {"worst_error_slack", a.worst_error_slack},
          {"pass", a.pass}};
}

json to_json(const TheoremBounds& b) {
  return {{"alpha_star", b.alpha_star}, {"alpha_sup", b.alpha_sup}, {"beta_star", b.beta_star},
          {"beta_sup", b.beta_sup},     {"gamma_star", b.gamma_star}, {"x_norm", b.x_norm}};
}

json ratio_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- shared solver flags ---------------------------------------------------

struct SolverFlags {
  std::string method = "pame";
  // synthetic-experiment step sizes
  std::string alpha = "1e-5";
  std::string beta = "1e3";
  std::string gamma;
  std::optional<double> alpha_star;
  std::optional<double> beta_star;
  double tol = 1e-8;
  Index max_iter = 1000;
  std::uint64_t seed = 0;
  bool theorem_mode = false;

  void add(CLI::App* app, bool with_method) {
    if (with_method) app->add_option("--method", method, "pame|pam|fpm|pdcae|ipalm|gipalm");
    app->add_option("--alpha", alpha, "P-block step size (value or comma list)");
    app->add_option("--beta", beta, "Q-block step size (value or comma list)");
    app->add_option("--gamma", gamma, "extrapolation (value or comma list); method default if unset");
    app->add_option("--alpha-star", alpha_star, "lower alpha bound");
    app->add_option("--beta-star", beta_star, "beta_* for the potential");
    app->add_option("--tol", tol, "termination threshold on ||C^{k+1} - C^k||");
    app->add_option("--max-iter", max_iter, "iteration cap");
    app->add_option("--seed", seed, "start-point seed");
    app->add_flag("--theorem-mode", theorem_mode, "enforce the step-size and extrapolation bounds");
  }

  SolverConfig config(Method m) const {
    SolverConfig c;
    c.method = m;
    c.alpha = Schedule(parse_list(alpha, "alpha"));
    c.beta = Schedule(parse_list(beta, "beta"));
    if (!gamma.empty()) {
      c.gamma = Schedule(parse_list(gamma, "gamma"));
    } else if (m == Method::kPAMe && !theorem_mode) {
      c.gamma = 1.0;  // outside the guaranteed range, fast in practice
    }
    c.alpha_star = alpha_star;
    c.beta_star = beta_star;
    c.tol = tol;
    c.max_iter = max_iter;
    c.seed = seed;
    c.theorem_mode = theorem_mode;
    c.record_audit = theorem_mode;
    return c;
  }
};

ProblemInstance load_instance(const std::string& path, Index k) {
  std::vector<long long> labels;
  DataMatrix x = read_matrix_auto(path, &labels);
  ProblemInstance inst{std::move(x), k, std::nullopt};
  if (!labels.empty()) inst.labels = std::move(labels);
  inst.validate();
  return inst;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + dir + "': " + ec.message());
}

Matrix random_with_singular_values(Index d, Index k, const std::vector<double>& s, Philox& rng) {
  const auto r = static_cast<Index>(s.size());
  const Matrix u = polar_factor(gaussian_matrix(d, r, rng));
  const Matrix v = polar_factor(gaussian_matrix(k, r, rng));
  Matrix us = u;
  for (Index j = 0; j < r; ++j)
    for (double& e : us.col(j)) e *= s[static_cast<std::size_t>(j)];
  return matmul_nt(us, v);
}

// ---- generate --------------------------------------------------------------

struct GenerateCmd {
  FixedEffectSpec spec;
  std::string out_dir;
  std::string format = "dense";

  int run(std::ostream& out) const {
    if (format != "dense" && format != "sparse") throw Error(ErrorKind::kConfig, "--format must be dense or sparse");
    const auto inst = gen_fixed_effect(spec);
    ensure_dir(out_dir);
    const fs::path dir(out_dir);
    std::string x_path;
    if (format == "dense") {
      x_path = (dir / "X.bin").string();
      write_dense(x_path, inst.x);
    } else {
      x_path = (dir / "X.svm").string();
      write_sparse_labeled(x_path, SparseMatrix::from_dense(inst.x),
                           std::vector<long long>(static_cast<std::size_t>(spec.n), 0));
    }
    const std::string u_path = (dir / "U.bin").string();
    write_dense(u_path, inst.u);
    json j{{"schema_version", kSchemaVersion},
           {"command", "generate"},
           {"n", spec.n},
           {"d", spec.d},
           {"K", spec.k},
           {"sigma", spec.sigma},
           {"seed", spec.seed},
           {"format", format},
           {"files", {{"X", x_path}, {"U", u_path}}},
           {"x_frobenius_norm", frobenius_norm(inst.x)}};
    out << j.dump(2) << '\n';
    return kExitOk;
  }
};

// ---- solve -----------------------------------------------------------------

json solve_summary(const ProblemInstance& inst, const SolveResult& r, double alpha_star) {
  json j{{"method", std::string(to_string(r.method))},
         {"converged", r.converged},
         {"termination", std::string(to_string(r.termination))},
         {"iterations", r.iterations},
         {"objective_l1", objective_l1(inst.x, r.q_final)},
         {"h_value", r.trace.back().h_value},
         {"stiefel_residual", stiefel_residual(r.q_final)}};
  if (!inst.x.is_zero()) j["tev"] = tev(inst.x, r.q_final);
  j["criticality"] = to_json(criticality_report(inst.x, r.p_final, r.q_final, alpha_star));
  return j;
}

struct SolveCmd {
  SolverFlags flags;
  std::string input;
  std::string out_dir;
  Index k = 1;

  int run(std::ostream& out) const {
    const Method m = parse_method(flags.method);
    const SolverConfig cfg = flags.config(m);
    cfg.validate();
    const ProblemInstance inst = load_instance(input, k);
    const StartPoint start = make_start(inst, flags.seed);
    const SolveResult r = solve(inst, cfg, start.p, start.q);

    const double alpha_star = cfg.alpha_star.value_or(cfg.alpha.min());
    json j{{"schema_version", kSchemaVersion}, {"command", "solve"}, {"input", input}, {"K", k}};
    j.update(solve_summary(inst, r, alpha_star));
    if (r.bounds) {
      j["theorem_bounds"] = to_json(*r.bounds);
      j["audit"] = to_json(decrease_and_error_audit(r));
    }
    if (!out_dir.empty()) {
      ensure_dir(out_dir);
      const fs::path dir(out_dir);
      write_trace(r.trace, (dir / "trace.csv").string(), TraceFormat::kCsv);
      write_dense((dir / "Q.bin").string(), r.q_final);
      j["files"] = {{"trace", (dir / "trace.csv").string()}, {"Q", (dir / "Q.bin").string()},
                    {"result", (dir / "result.json").string()}};
      std::ofstream f(dir / "result.json");
      if (!f) throw Error(ErrorKind::kIo, "cannot write result.json");
      f << j.dump(2) << '\n';
    }
    out << j.dump(2) << '\n';
    return r.converged ? kExitOk : kExitNotConverged;
  }
};

// ---- compare ---------------------------------------------------------------

struct CompareCmd {
  SolverFlags flags;
  std::string methods = "fpm,gipalm,ipalm,pam,pame,pdcae";
  std::string pdcae_beta = "1";
  std::string input;
  std::string out_path;
  Index k = 1;

  int run(std::ostream& out) const {
    auto names = split_names(methods);
    std::sort(names.begin(), names.end());
    std::vector<SolverConfig> cfgs;
    for (const auto& n : names) {
      const Method m = parse_method(n);
      cfgs.push_back(flags.config(m));
      if (m == Method::kPDCAe) cfgs.back().beta = Schedule(parse_list(pdcae_beta, "pdcae-beta"));
    }
    const ProblemInstance inst = load_instance(input, k);
    const auto entries = run_comparison(inst, cfgs, flags.seed);
    const std::vector<double> sigma = inst.x.is_zero() ? std::vector<double>{} : singular_values(inst.x.to_dense());

    std::ostringstream csv;
    csv << "method,iterations,objective_l1,tev,converged,error\n";
    for (const auto& e : entries) {
      csv << to_string(e.config.method) << ',';
      if (e.result) {
        const auto& r = *e.result;
        csv << r.iterations << ',' << fmt17(objective_l1(inst.x, r.q_final)) << ','
            << (sigma.empty() ? std::string("nan") : fmt17(tev(inst.x, r.q_final, sigma))) << ','
            << (r.converged ? "true" : "false") << ",\n";
      } else {
        std::string msg = e.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        csv << ",,,false," << msg << '\n';
      }
    }
    if (!out_path.empty()) {
      std::ofstream f(out_path);
      if (!f) throw Error(ErrorKind::kIo, "cannot write '" + out_path + "'");
      f << csv.str();
    }
    out << csv.str();
    return kExitOk;
  }
};

// ---- verify ----------------------------------------------------------------

struct VerifyCmd {
  std::string suite;
  Index samples = 0;  // 0 means the suite default
  std::uint64_t seed = 0;
  Index n = 3;
  Index d = 0;
  Index k = 0;
  Index rank = 0;
  double sigma = 0.5;
  double radius = 1.0;
  std::string radii = "0.3,0.1,0.03,0.01";
  Index restarts = 20;
  Index instances = 1;
  SolverFlags flags;
  bool steps_given = false;
  bool gamma_given = false;

  int run(std::ostream& out) const {
    json j{{"schema_version", kSchemaVersion}, {"command", "verify"}, {"suite", suite}, {"seed", seed}};
    bool pass = false;
    if (suite == "sandwich") {
      const Index s = samples > 0 ? samples : 1000;
      const auto rep = sandwich_probe({2, 5, 20}, {1, 2, 5}, s, seed);
      pass = rep.violations == 0;
      j["report"] = {{"name", "sandwich"},
                     {"parameters", {{"d", {2, 5, 20}}, {"K", {1, 2, 5}}, {"rel_tol", 1e-12}}},
                     {"samples", rep.samples},
                     {"violations", rep.violations},
                     {"min_lower_ratio", ratio_or_null(rep.worst_lower_ratio)},
                     {"max_upper_ratio", rep.worst_upper_ratio},
                     {"pass", pass}};
    } else if (suite == "critical-sets") {
      const Index dd = d > 0 ? d : 1;
      const Index kk = k > 0 ? k : 1;
      const Index rr = rank > 0 ? rank : kk;
      if (kk > dd || rr > kk) throw Error(ErrorKind::kConfig, "critical-sets: need rank <= K <= d");
      Philox rng(seed, 0xC5);
      std::vector<double> s;
      for (Index i = 0; i < rr; ++i) s.push_back(static_cast<double>(rr - i) + rng.uniform());
      const Matrix a = random_with_singular_values(dd, kk, s, rng);
      std::vector<double> q(static_cast<std::size_t>(rr), 1.0);
      std::vector<double> qp = q;
      qp[0] = -1.0;
      const Index ns = samples > 0 ? samples : 100;
      const auto rep = critical_set_separation_probe(a, q, qp, ns, seed);
      pass = rep.min_distance >= 2.0 - 1e-9;
      j["report"] = {{"name", "critical_set_separation"},
                     {"parameters", {{"d", dd}, {"K", kk}, {"rank", rr}}},
                     {"samples", rep.samples},
                     {"min_distance", rep.min_distance},
                     {"violations", pass ? 0 : 1},
                     {"pass", pass}};
    } else if (suite == "error-bound") {
      const Index dd = d > 0 ? d : 2;
      const Index kk = k > 0 ? k : (d > 0 ? 1 : 2);
      Philox rng(seed, 0xEB);
      std::vector<double> s;
      for (Index i = 0; i < kk; ++i) s.push_back(static_cast<double>(kk - i) + 0.5 * rng.uniform());
      const Matrix a = random_with_singular_values(dd, kk, s, rng);
      const std::vector<double> q(static_cast<std::size_t>(kk), 1.0);
      const Index ns = samples > 0 ? samples : 1000;
      const auto rep = error_bound_probe(a, q, ns, radius, seed);
      pass = rep.pass;
      j["report"] = {{"name", "error_bound"},
                     {"parameters", {{"d", dd}, {"K", kk}, {"radius", radius}}},
                     {"samples", rep.accepted},
                     {"attempts", rep.attempts},
                     {"worst_ratio", rep.worst_ratio},
                     {"kappa", rep.kappa},
                     {"violations", rep.violations},
                     {"pass", pass}};
    } else if (suite == "kl" || suite == "oracle") {
      const Index dd = d > 0 ? d : 4;
      const Index kk = k > 0 ? k : 2;
      json runs = json::array();
      pass = true;
      for (Index t = 0; t < instances; ++t) {
        Philox rng(seed, 0x0AC1E000ULL + static_cast<std::uint64_t>(t));
        const ProblemInstance inst{DataMatrix(gaussian_matrix(dd, n, rng)), kk, std::nullopt};
        inst.validate();
        const OracleResult orc = enumerate_oracle(inst.x, kk);
        json rj{{"instance", t}, {"oracle_value", orc.value}};
        if (suite == "oracle") {
          SolverConfig cfg = flags.config(Method::kPAMe);
          double best = -1.0;
          double worst_h = 0.0;
          for (Index r = 0; r < restarts; ++r) {
            const StartPoint sp = make_start(inst, seed * 1000003ULL + static_cast<std::uint64_t>(r));
            const SolveResult res = solve(inst, cfg, sp.p, sp.q);
            best = std::max(best, objective_l1(inst.x, res.q_final));
            worst_h = std::max(worst_h, subgrad_dist_h(inst.x, res.p_final, res.q_final));
          }
          const bool dominance = orc.value >= best - 1e-10;
          const bool critical = worst_h <= 1e-6;
          rj["best_solver_value"] = best;
          rj["matches_oracle"] = std::abs(orc.value - best) <= 1e-8;
          rj["max_h_residual"] = worst_h;
          rj["oracle_dominance"] = dominance;
          rj["criticality"] = critical;
          pass = pass && dominance && critical;
        } else {
          const Index ns = samples > 0 ? samples : 1000;
          const auto res = kl_ratio_probe(inst.x, orc.q, parse_list(radii, "radii"), ns, seed);
          double lo = std::numeric_limits<double>::infinity();
          double hi = 0.0;
          json per = json::array();
          bool ok = true;
          for (const auto& r : res) {
            per.push_back({{"radius", r.radius},
                           {"min_ratio", ratio_or_null(r.min_ratio)},
                           {"used", r.used},
                           {"skipped", r.skipped},
                           {"flagged", r.flagged},
                           {"all_skipped", r.all_skipped}});
            if (r.all_skipped || !(r.min_ratio > 0.0)) ok = false;
            lo = std::min(lo, r.min_ratio);
            hi = std::max(hi, r.min_ratio);
          }
          ok = ok && std::isfinite(hi) && hi < 10.0 * lo;
          rj["radii"] = per;
          rj["pass"] = ok;
          pass = pass && ok;
        }
        runs.push_back(rj);
      }
      j["parameters"] = {{"n", n}, {"d", dd}, {"K", kk}, {"instances", instances}, {"restarts", restarts}};
      j["report"] = {{"name", suite}, {"runs", runs}, {"pass", pass}};
    } else if (suite == "audit") {
      const FixedEffectSpec spec{n > 3 ? n : 500, d > 0 ? d : 200, k > 0 ? k : 10, sigma, seed};
      const auto gen = gen_fixed_effect(spec);
      const ProblemInstance inst{DataMatrix(gen.x), spec.k, std::nullopt};
      SolverFlags audit_flags = flags;
      if (!steps_given) {
        audit_flags.alpha = "1";
        audit_flags.beta = "2000";
        audit_flags.tol = 1e-9;
      }
      if (!gamma_given) audit_flags.gamma.clear();
      audit_flags.theorem_mode = true;
      SolverConfig cfg = audit_flags.config(Method::kPAMe);
      cfg.record_audit = true;
      if (!cfg.gamma) {
        SolverConfig probe = cfg;
        const TheoremBounds b = check_theorem_mode(inst, probe);
        cfg.gamma = Schedule(0.9 * b.gamma_star);
      }
      const StartPoint sp = make_start(inst, seed);
      const SolveResult r = solve(inst, cfg, sp.p, sp.q);
      const auto rep = decrease_and_error_audit(r);
      pass = rep.pass;
      j["parameters"] = {{"n", spec.n}, {"d", spec.d}, {"K", spec.k}, {"sigma", spec.sigma},
                         {"gamma", cfg.gamma->at(0)}, {"iterations", r.iterations}};
      j["theorem_bounds"] = to_json(*r.bounds);
      j["report"] = to_json(rep);
    } else {
      throw Error(ErrorKind::kConfig, "unknown suite '" + suite + "'");
    }
    j["pass"] = pass;
    out << j.dump(2) << '\n';
    return pass ? kExitOk : kExitCheckFailed;
  }
};

// ---- cluster ---------------------------------------------------------------

struct ClusterCmd {
  SolverFlags flags;
  std::string input;
  Index k = 0;
  bool auto_k = false;
  double threshold = 0.8;
  Index restarts = 10;
  Index clusters = 0;

  int run(std::ostream& out) const {
    const auto ds = read_sparse_labeled(input);
    if (ds.labels.empty()) throw Error(ErrorKind::kPrecondition, "cluster: input has no labels");
    const DataMatrix x(ds.x);
    Index kk = k;
    if (auto_k) kk = choose_K_by_variance(x, threshold);
    if (kk < 1) throw Error(ErrorKind::kConfig, "cluster: give --K or --auto-K");
    const ProblemInstance inst{x, kk, ds.labels};
    inst.validate();
    const Method m = parse_method(flags.method);
    const SolverConfig cfg = flags.config(m);
    const StartPoint sp = make_start(inst, flags.seed);
    const SolveResult r = solve(inst, cfg, sp.p, sp.q);

    std::vector<long long> sorted = ds.labels;
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = static_cast<Index>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    const Index nc = clusters > 0 ? clusters : distinct;
    const auto rep = kmeans_accuracy(x, r.q_final, ds.labels, nc, restarts, flags.seed);
    json j{{"schema_version", kSchemaVersion},
           {"command", "cluster"},
           {"input", input},
           {"method", std::string(to_string(m))},
           {"K", kk},
           {"auto_K", auto_k},
           {"clusters", nc},
           {"solver_converged", r.converged},
           {"iterations", r.iterations},
           {"accuracy", rep.accuracy},
           {"degenerate", rep.degenerate},
           {"inertia", rep.inertia}};
    if (!x.is_zero()) j["tev"] = tev(x, r.q_final);
    out << j.dump(2) << '\n';
    return kExitOk;
  }
};

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDiverged:
    case ErrorKind::kDegenerateUpdate:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"L1-norm PCA solvers and verification tools", "l1pca"};
  app.require_subcommand(1);

  GenerateCmd gen;
  auto* g = app.add_subcommand("generate", "write a synthetic fixed-effect instance");
  g->add_option("--n", gen.spec.n, "samples")->required();
  g->add_option("--d", gen.spec.d, "features")->required();
  g->add_option("--K", gen.spec.k, "subspace dimension")->required();
  g->add_option("--sigma", gen.spec.sigma, "noise standard deviation")->required();
  g->add_option("--seed", gen.spec.seed, "seed");
  g->add_option("--out", gen.out_dir, "output directory")->required();
  g->add_option("--format", gen.format, "dense|sparse");

  SolveCmd sol;
  auto* s = app.add_subcommand("solve", "run one solver");
  sol.flags.add(s, true);
  s->add_option("--input", sol.input, "data file (dense binary or sparse text)")->required();
  s->add_option("--K", sol.k, "subspace dimension")->required();
  s->add_option("--out", sol.out_dir, "output directory for trace.csv, Q.bin, result.json");

  CompareCmd cmp;
  auto* c = app.add_subcommand("compare", "run several solvers from one start point");
  cmp.flags.add(c, false);
  c->add_option("--methods", cmp.methods, "comma-separated method names");
  c->add_option("--pdcae-beta", cmp.pdcae_beta, "Q-block step size for pdcae");
  c->add_option("--input", cmp.input, "data file")->required();
  c->add_option("--K", cmp.k, "subspace dimension")->required();
  c->add_option("--out", cmp.out_path, "CSV output path");

  VerifyCmd ver;
  auto* v = app.add_subcommand("verify", "numerical checks of the theory");
  v->add_option("--suite", ver.suite, "sandwich|critical-sets|error-bound|kl|audit|oracle")->required();
  v->add_option("--samples", ver.samples, "sample count");
  v->add_option("--n", ver.n, "samples per instance");
  v->add_option("--d", ver.d, "dimension");
  v->add_option("--K", ver.k, "subspace dimension");
  v->add_option("--rank", ver.rank, "rank of A (critical-sets)");
  v->add_option("--sigma", ver.sigma, "noise level (audit)");
  v->add_option("--radius", ver.radius, "sampling radius (error-bound)");
  v->add_option("--radii", ver.radii, "comma-separated radii (kl)");
  v->add_option("--restarts", ver.restarts, "solver restarts (oracle)");
  v->add_option("--instances", ver.instances, "instance count (kl, oracle)");
  ver.flags.alpha = "1e-3";
  ver.flags.beta = "1";
  ver.flags.gamma = "0.5";
  ver.flags.tol = 1e-10;
  ver.flags.max_iter = 5000;
  ver.flags.add(v, false);
  // --seed is shared between the probe and the solver flags.
  v->get_option("--seed")->each([&ver](const std::string& val) { ver.seed = std::stoull(val); });

  ClusterCmd cl;
  auto* k = app.add_subcommand("cluster", "solve, project, and cluster a labeled dataset");
  // real-data step sizes and tolerance
  cl.flags.alpha = "1e-6";
  cl.flags.beta = "20";
  cl.flags.tol = 1e-6;
  cl.flags.add(k, true);
  k->add_option("--input", cl.input, "labeled sparse text file")->required();
  k->add_option("--K", cl.k, "subspace dimension");
  k->add_flag("--auto-K", cl.auto_k, "choose K by explained variance");
  k->add_option("--threshold", cl.threshold, "variance threshold for --auto-K");
  k->add_option("--restarts", cl.restarts, "k-means restarts");
  k->add_option("--clusters", cl.clusters, "cluster count (default: distinct labels)");

  try {
    merge_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }

  try {
    if (g->parsed()) return gen.run(out);
    if (s->parsed()) return sol.run(out);
    if (c->parsed()) return cmp.run(out);
    if (v->parsed()) {
      ver.steps_given = v->count("--alpha") + v->count("--beta") > 0;
      ver.gamma_given = v->count("--gamma") > 0;
      return ver.run(out);
    }
    if (k->parsed()) return cl.run(out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace l1pca
