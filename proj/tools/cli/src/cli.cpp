#include "srcd_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "srcd/cdcore.hpp"
#include "srcd/diffusion.hpp"
#include "srcd/error.hpp"
#include "srcd/invariants.hpp"
#include "srcd/rng.hpp"
#include "srcd/spectral.hpp"
#include "srcd/structure_io.hpp"

#ifndef SRCD_VERSION
#define SRCD_VERSION "0.0.0"
#endif

namespace srcd::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Options {
  std::string structure;
  std::string example;
  std::string ell = "0.1,1,10";
  std::string c = "auto";
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  bool json = false;
  bool text = false;
  std::string out;
  // simulate
  double t = 1.0;
  int steps = 100;
  std::size_t paths = 1000;
  std::string function = "auto";
  std::string csv;
  std::size_t csv_paths = 10;
  int record_stride = 0;
  // oracle / spectral
  std::string jmax;
};

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::bad_param, msg); }

double parse_number(const std::string& tok) {
  if (tok == "inf" || tok == "infinity") return kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != tok.size()) bad("'" + tok + "' is not a number");
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  if (out.empty()) bad("empty list");
  return out;
}

std::vector<double> parse_ells(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s)) {
    const double v = parse_number(tok);
    if (!(v > 0.0) || std::isinf(v)) bad("ell values must be positive and finite");
    out.push_back(v);
  }
  return out;
}

// two_j from "5/2", "2.5" or "3"
int parse_two_j(const std::string& s) {
  double v = 0.0;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const double num = parse_number(s.substr(0, slash)), den = parse_number(s.substr(slash + 1));
    if (den != 2.0 && den != 1.0) bad("jmax must be a half-integer");
    v = num / den;
  } else {
    v = parse_number(s);
  }
  const double twice = 2.0 * v;
  if (!(twice >= 0.0) || twice != std::floor(twice) || twice > 1000.0) bad("jmax must be a half-integer");
  return static_cast<int>(twice);
}

std::string format_j(int two_j) { return two_j % 2 ? std::to_string(two_j) + "/2" : std::to_string(two_j / 2); }

LieSRStructure load(const Options& o) {
  if (o.structure.empty() == o.example.empty()) bad("give exactly one of --structure PATH or --example NAME");
  if (!o.structure.empty()) return parse_structure_file(o.structure);
  return build_example(o.example);
}

struct Prepared {
  LieSRStructure input;
  LieSRStructure frame;  // adapted orthonormal frame (of the normalized structure if requested)
  ConnectionData conn;
  CDConstants k;
  std::optional<double> vertical_scale;
};

Prepared prepare(const LieSRStructure& s, bool normalize) {
  std::optional<double> scale;
  LieSRStructure base = s;
  if (normalize) {
    const ConnectionData c0 = compute_connection(adapted_orthonormal_frame(s));
    const double M_R = curvature_constants(c0).M_R;
    base = normalize_vertical(s, c0);
    scale = 1.0 / (M_R * M_R);
  }
  LieSRStructure frame = adapted_orthonormal_frame(base);
  ConnectionData conn = compute_connection(frame);
  CDConstants k = cd_constants(conn);
  return {s, std::move(frame), std::move(conn), std::move(k), scale};
}

Json structure_json(const LieSRStructure& s) {
  const GrowthFlag g = growth_flag(s);
  Json j;
  j["name"] = s.name();
  j["n"] = s.n();
  j["nu"] = s.nu();
  j["growth"] = g.dims;
  j["step"] = g.step ? Json(*g.step) : Json(nullptr);
  j["bracket_generating"] = g.bracket_generating;
  return j;
}

Json constants_json(const CDConstants& k) {
  Json j;
  j["M_R"] = num(k.M_R);
  j["m_R"] = num(k.m_R);
  j["rho_H"] = num(k.rho_H);
  j["M_HV"] = num(k.M_HV, "unbounded");
  j["M_nabla_v"] = num(k.M_nabla_v);
  j["rho_delta_v"] = num(k.rho_delta_v, "-inf");
  return j;
}

Json head(const std::string& command, const Options& o, const Prepared& p) {
  Json j;
  j["tool"] = "srcd";
  j["version"] = SRCD_VERSION;
  j["command"] = command;
  j["seed"] = o.seed;
  j["structure"] = structure_json(p.input);
  if (p.vertical_scale) j["vertical_scale"] = num(*p.vertical_scale);
  j["constants"] = constants_json(p.k);
  return j;
}

Json params_json(const CDParams& p) {
  Json j;
  j["n"] = num(p.n_dim);
  j["c"] = num(p.c);
  j["rho1"] = num(p.rho1);
  j["rho20"] = num(p.rho20);
  j["rho21"] = num(p.rho21);
  return j;
}

struct AutoC {
  double c;
  std::string source;
};

AutoC auto_c(const CDConstants& k) {
  if (!k.M_HV) throw Error(Errc::unbounded_constant, "M_HV is unbounded");
  if (*k.M_HV + k.M_nabla_v <= kZeroConstant) return {kInf, "infinite"};
  try {
    return {gap_bound_prop41(k).c_opt, "prop41_optimum"};
  } catch (const Error& e) {
    if (e.code() != Errc::non_positive_rho20) throw;
  }
  return {1.0, "default"};
}

std::vector<double> parse_cs(const std::string& s, const CDConstants& k, Json& report) {
  std::vector<double> out;
  for (const auto& tok : split(s)) {
    if (tok == "auto") {
      const AutoC a = auto_c(k);
      report["c_auto"] = Json{{"c", num(a.c)}, {"source", a.source}};
      out.push_back(a.c);
    } else {
      const double v = parse_number(tok);
      if (!(v > 0.0)) bad("c values must be positive");
      out.push_back(v);
    }
  }
  return out;
}

int cmd_analyze(const Options& o, Json& rep) {
  const LieSRStructure s = load(o);
  const Prepared p = prepare(s, false);
  rep = head("analyze", o, p);
  const ValidationReport vr = validate_structure(s);
  Json checks = Json::array();
  for (const auto& c : vr.checks)
    checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"residual", num(c.residual)}});
  rep["validation"] = checks;

  Json props;
  props["normalized"] = std::abs(p.k.M_R - 1.0) <= 1e-9;
  props["metric_preserving"] = metric_preserving(p.conn);
  props["vertical_integrable"] = vertical_integrable(p.conn);
  props["parallel_vertical_metric"] = parallel_vertical_metric(p.conn);
  const CounterRng rng(o.seed);
  double tr = 0.0;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd v(p.frame.dim());
    for (int a = 0; a < v.size(); ++a) v[a] = rng.normal(t, a);
    tr = std::max(tr, std::abs(co_curvature_trace(p.conn, v)));
  }
  props["co_curvature_trace_max"] = num(tr);
  try {
    props["privileged_b"] = num(privileged_step2(s).b);
  } catch (const Error&) {
    props["privileged_b"] = nullptr;
  }
  rep["properties"] = props;

  Json tensors;
  const int n = p.frame.n(), nu = p.frame.nu();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.k.ric_h.topLeftCorner(n, n), Eigen::EigenvaluesOnly);
  tensors["ric_h_horizontal_eigenvalues"] = vector(es.eigenvalues());
  tensors["ric_h"] = matrix(p.k.ric_h);
  tensors["ric_hv"] = matrix(p.k.ric_hv);
  tensors["delta_vstar"] = matrix(p.conn.delta_vstar);
  tensors["drift"] = vector(p.conn.drift);
  tensors["mean_curvature"] = vector(p.conn.N);
  Json R = Json::array();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int t = 0; t < nu; ++t)
        if (std::abs(p.conn.R(i, j, t)) > 1e-15) R.push_back(Json{{"i", i}, {"j", j}, {"s", t}, {"value", num(p.conn.R(i, j, t))}});
  tensors["ehresmann_curvature"] = R;
  rep["tensors"] = tensors;
  return kExitOk;
}

int cmd_cd(const Options& o, Json& rep) {
  const Prepared p = prepare(load(o), true);
  rep = head("cd", o, p);
  const auto ells = parse_ells(o.ell);
  const auto cs = parse_cs(o.c, p.k, rep);
  Json grid = Json::array();
  for (double c : cs) {
    const CDParams params = cd_parameters(p.k, c);
    for (double ell : ells) {
      const CDCoefficients co = coefficients_at(params, ell);
      Json e = params_json(params);
      e["ell"] = num(ell);
      e["coef_lf2"] = num(co.lf);
      e["coef_gamma_h"] = num(co.gamma_h);
      e["coef_gamma_v"] = num(co.gamma_v);
      grid.push_back(e);
    }
  }
  rep["cd"] = grid;
  return kExitOk;
}

int cmd_verify(const Options& o, Json& rep) {
  const Prepared p = prepare(load(o), true);
  rep = head("verify", o, p);
  const auto ells = parse_ells(o.ell);
  const auto cs = parse_cs(o.c, p.k, rep);
  std::vector<CDCase> cases;
  for (double c : cs) {
    const CDParams params = cd_parameters(p.k, c);
    for (double ell : ells) cases.push_back({params, ell});
  }
  VerificationOptions vo;
  vo.samples = o.samples;
  vo.seed = o.seed;
  vo.tol = o.tol;
  vo.double_gamma = true;
  const VerificationRun run = run_verification(p.conn, p.k, cases, vo);
  Json v;
  v["samples"] = o.samples;
  v["tol"] = num(o.tol);
  Json jc = Json::array();
  double min_margin = kInf;
  for (const auto& sm : run.cases) {
    Json e = params_json(sm.cd_case.params);
    e["ell"] = num(sm.cd_case.ell);
    e["min_relative_margin"] = num(sm.min_relative_margin);
    e["worst_index"] = sm.worst_index;
    e["min_relative_double_gamma"] = sm.min_relative_double_gamma ? num(*sm.min_relative_double_gamma) : Json(nullptr);
    e["passed"] = sm.passed;
    min_margin = std::min(min_margin, sm.min_relative_margin);
    jc.push_back(e);
  }
  v["cases"] = jc;
  v["min_relative_margin"] = num(min_margin);
  v["max_condition_b"] = run.max_condition_b ? num(*run.max_condition_b) : Json(nullptr);
  v["passed"] = run.passed;
  rep["verification"] = v;
  return run.passed ? kExitOk : kExitVerification;
}

Json bound_json(GapSource src, const std::function<GapBound()>& f) {
  Json j;
  j["source"] = std::string(gap_source_name(src));
  try {
    const GapBound g = f();
    j["bound"] = num(g.bound);
    j["k2"] = num(g.k2);
    j["c_opt"] = num(g.c_opt);
    if (g.kappa) j["kappa"] = num(*g.kappa);
    if (g.b) j["b"] = num(*g.b);
  } catch (const Error& e) {
    if (error_class(e.code()) != ErrorClass::input) throw;
    j["error"] = e.what();
  }
  return j;
}

Json oracle_json(const OracleResult& r, std::size_t max_eigs) {
  Json j;
  j["factors"] = r.factors;
  j["jmax"] = format_j(r.two_jmax);
  j["gap"] = num(r.gap);
  Json ev = Json::array();
  for (std::size_t i = 0; i < std::min(max_eigs, r.eigenvalues.size()); ++i) ev.push_back(num(r.eigenvalues[i]));
  j["lowest_eigenvalues"] = ev;
  return j;
}

int cmd_spectral(const Options& o, Json& rep) {
  const LieSRStructure s = load(o);
  const Prepared p = prepare(s, true);
  rep = head("spectral", o, p);
  Json bounds = Json::array();
  bounds.push_back(bound_json(GapSource::prop41, [&] { return gap_bound_prop41(p.k); }));
  bounds.push_back(bound_json(GapSource::kappa_corollary, [&] { return gap_bound_kappa(p.k); }));
  bounds.push_back(bound_json(GapSource::step2_privileged, [&] { return gap_bound_step2(s); }));
  rep["bounds"] = bounds;

  int code = kExitOk;
  Json oracle;
  try {
    const int two_j = o.jmax.empty() ? default_two_jmax(p.frame) : parse_two_j(o.jmax);
    const OracleResult r = irrep_spectrum_oracle(p.frame, p.conn, two_j);
    oracle = oracle_json(r, 8);
    bool sound = true;
    for (const auto& b : bounds)
      if (b.contains("bound")) sound = sound && b["bound"].get<double>() <= r.gap + 1e-8;
    oracle["bounds_below_gap"] = sound;
    if (!sound) code = kExitVerification;
  } catch (const Error& e) {
    if (e.code() != Errc::unsupported_algebra) throw;
    oracle = Json{{"available", false}, {"reason", e.what()}};
  }
  rep["oracle"] = oracle;
  return code;
}

int cmd_simulate(const Options& o, Json& rep) {
  const LieSRStructure s = load(o);
  const Prepared p = prepare(s, false);
  rep = head("simulate", o, p);
  if (!p.frame.realization()) throw Error(Errc::no_realization, "'" + s.name() + "' has no matrix realization");
  const MatrixRealization& real = *p.frame.realization();
  const int dim = real.realified_dim();
  std::string fname = o.function;
  if (fname == "auto") fname = (real.field == Field::real && dim >= 3) ? "x2y2" : "coef00";
  const PolynomialFunction f = PolynomialFunction::named(fname, dim);

  SimConfig cfg;
  cfg.t_final = o.t;
  cfg.steps = o.steps;
  cfg.paths = o.paths;
  cfg.seed = o.seed;
  cfg.record_stride = o.record_stride;
  Json jc;
  jc["t"] = num(o.t);
  jc["steps"] = o.steps;
  jc["paths"] = o.paths;
  jc["function"] = fname;
  jc["scheme"] = "lie_euler";
  rep["simulation"] = jc;

  const Eigen::MatrixXd g0 = Eigen::MatrixXd::Identity(dim, dim);
  const MCEstimate est = estimate_expectation(p.frame, p.conn, cfg, f, g0, false);
  const double f0 = f(g0), lf0 = exact_sublaplacian(p.frame, p.conn, f, g0);
  rep["expectation"] = Json{{"mean", num(est.mean)},
                            {"std_error", num(est.std_error)},
                            {"f0", num(f0)},
                            {"sublaplacian_f0", num(lf0)},
                            {"first_order_prediction", num(f0 + 0.5 * o.t * lf0)}};

  const ConsistencyReport cr = generator_consistency(p.frame, p.conn, cfg, f, g0);
  Json pts = Json::array();
  for (const auto& pt : cr.points)
    pts.push_back(Json{{"t", num(pt.t)},
                       {"mean", num(pt.mean)},
                       {"std_error", num(pt.std_error)},
                       {"residual", num(pt.residual)},
                       {"resolved", pt.resolved}});
  rep["consistency"] = Json{{"points", pts},
                            {"sublaplacian2_f0", num(cr.l2f0)},
                            {"exponent", num(cr.exponent)},
                            {"t2_coef", num(cr.t2_coef)},
                            {"model_deviation", num(cr.model_deviation)},
                            {"vanishing_remainder", cr.vanishing_remainder},
                            {"passed", cr.passed}};

  if (!o.csv.empty()) {
    SimConfig c2 = cfg;
    c2.paths = std::min(o.csv_paths, cfg.paths);
    const PathSample ps = simulate_paths(p.frame, p.conn, c2, g0);
    std::ofstream os(o.csv);
    if (!os) bad("cannot write '" + o.csv + "'");
    write_paths_csv(os, ps, c2.paths);
    Json jcsv{{"path", o.csv}, {"paths", c2.paths}, {"records_per_path", ps.times.size()}};
    if (compact_realization(p.frame)) jcsv["max_group_defect"] = num(ps.max_group_defect);
    rep["csv"] = jcsv;
  }
  return cr.passed ? kExitOk : kExitVerification;
}

int cmd_oracle(const Options& o, Json& rep) {
  const Prepared p = prepare(load(o), false);
  rep = head("oracle", o, p);
  const int two_j = o.jmax.empty() ? default_two_jmax(p.frame) : parse_two_j(o.jmax);
  const OracleResult r = irrep_spectrum_oracle(p.frame, p.conn, two_j);
  Json j = oracle_json(r, 20);
  Json blocks = Json::array();
  for (const auto& b : r.blocks) {
    Json e;
    e["j1"] = format_j(b.two_j1);
    if (b.two_j2 >= 0) e["j2"] = format_j(b.two_j2);
    Json ev = Json::array();
    for (double x : b.eigenvalues) ev.push_back(num(x));
    e["eigenvalues"] = ev;
    blocks.push_back(e);
  }
  j["blocks"] = blocks;
  rep["oracle"] = j;
  return kExitOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--structure", o.structure, "structure JSON file");
  sub->add_option("--example", o.example, "catalog example, NAME or NAME:key=value,...");
  sub->add_option("--ell", o.ell, "comma-separated ell values");
  sub->add_option("--c", o.c, "comma-separated c values, 'inf' or 'auto'");
  sub->add_option("--samples", o.samples, "random jets for verify");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--tol", o.tol, "relative tolerance");
  auto* js = sub->add_flag("--json", o.json, "JSON output (default)");
  auto* tx = sub->add_flag("--text", o.text, "text output");
  js->excludes(tx);
  sub->add_option("--out", o.out, "write the report to this file");
}

}  // namespace

std::string constants_block(const Json& report) {
  return report.contains("constants") ? dump_canonical(report["constants"]) : std::string();
}

RunResult run(const std::vector<std::string>& args) {
  RunResult res;
  Options o;
  CLI::App app{"srcd: sub-Riemannian curvature-dimension toolkit"};
  app.require_subcommand(1);
  auto* analyze = app.add_subcommand("analyze", "constants and tensors of a structure");
  auto* cd = app.add_subcommand("cd", "CD parameters over a (c, ell) grid");
  auto* verify = app.add_subcommand("verify", "jet-level verification of the CD inequality");
  auto* spectral = app.add_subcommand("spectral", "spectral-gap lower bounds and oracle comparison");
  auto* simulate = app.add_subcommand("simulate", "diffusion simulation and generator consistency");
  auto* oracle = app.add_subcommand("oracle", "irreducible-representation eigenvalue table");
  for (auto* sub : {analyze, cd, verify, spectral, simulate, oracle}) add_common(sub, o);
  simulate->add_option("--t", o.t, "final time");
  simulate->add_option("--steps", o.steps, "steps per path");
  simulate->add_option("--paths", o.paths, "number of paths");
  simulate->add_option("--function", o.function, "test function (x, y, z, x2y2, x4, z2, coef00, entry:r,c)");
  simulate->add_option("--csv", o.csv, "write sample paths to this CSV file");
  simulate->add_option("--csv-paths", o.csv_paths, "paths written to the CSV file");
  simulate->add_option("--record-stride", o.record_stride, "record every k-th step in the CSV (0: endpoints)");
  for (auto* sub : {spectral, oracle}) sub->add_option("--jmax", o.jmax, "largest spin per factor, e.g. 5/2");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    res.out = app.help();
    res.exit_code = kExitOk;
    return res;
  } catch (const CLI::ParseError& e) {
    res.err = std::string("srcd: ") + e.what() + "\n";
    res.exit_code = kExitInput;
    return res;
  }

  Json rep;
  try {
    if (analyze->parsed())
      res.exit_code = cmd_analyze(o, rep);
    else if (cd->parsed())
      res.exit_code = cmd_cd(o, rep);
    else if (verify->parsed())
      res.exit_code = cmd_verify(o, rep);
    else if (spectral->parsed())
      res.exit_code = cmd_spectral(o, rep);
    else if (simulate->parsed())
      res.exit_code = cmd_simulate(o, rep);
    else
      res.exit_code = cmd_oracle(o, rep);
  } catch (const Error& e) {
    res.err = std::string("srcd: ") + e.what() + "\n";
    switch (error_class(e.code())) {
      case ErrorClass::input: res.exit_code = kExitInput; break;
      case ErrorClass::verification: res.exit_code = kExitVerification; break;
      case ErrorClass::internal: res.exit_code = kExitInternal; break;
    }
    return res;
  } catch (const std::exception& e) {
    res.err = std::string("srcd: internal error: ") + e.what() + "\n";
    res.exit_code = kExitInternal;
    return res;
  }
  rep["exit_code"] = res.exit_code;
  res.report = rep;
  const std::string rendered = o.text ? dump_text(rep) : dump_canonical(rep);
  if (o.out.empty()) {
    res.out = rendered;
  } else {
    std::ofstream os(o.out, std::ios::binary);
    if (!os) {
      res.err = "srcd: BadParam: cannot write '" + o.out + "'\n";
      res.exit_code = kExitInput;
      return res;
    }
    os << rendered;
  }
  return res;
}

}  // namespace srcd::cli
