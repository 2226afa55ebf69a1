#include "fracopt/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fracopt/errors.hpp"
#include "fracopt/generators.hpp"
#include "fracopt/io.hpp"

namespace fracopt {

namespace {

struct Options {
  std::string file;
  std::string arith = "rational";
  double eps = 1e-9;
  std::string method = "lookahead";
  std::string trace;
  std::string report;
  std::size_t max_iters = 0;
  bool recover_finite = false;
};

struct GenOptions {
  std::string kind;
  std::uint64_t seed = 1;
  std::string out;
};

// What a solver run looked like, for reports and comparisons.
struct Summary {
  std::string verdict;
  std::vector<std::size_t> phase_nodes;
  std::vector<std::size_t> phase_iterations;
  std::size_t oracle_calls = 0;
  std::optional<std::size_t> sfm_calls;
  double wall_ms = 0;

  std::size_t total_iterations() const {
    std::size_t t = 0;
    for (auto k : phase_iterations) t += k;
    return t;
  }
};

class Failure : public Error {
 public:
  using Error::Error;
};

NewtonConfig make_config(const Options& o, Method m) {
  NewtonConfig cfg;
  cfg.method = m;
  if (o.max_iters) cfg.max_iters = o.max_iters;
  cfg.tol = Tolerance{o.eps, o.eps};
  return cfg;
}

Method parse_method(const std::string& s) { return s == "standard" ? Method::Standard : Method::LookAhead; }

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure("cannot open " + path);
  return in;
}

template <Scalar S>
void add_phases(Summary& s, const std::vector<PhaseRecord<S>>& phases) {
  for (const auto& p : phases) {
    s.phase_nodes.push_back(p.node);
    s.phase_iterations.push_back(p.trace.size());
    s.oracle_calls += p.oracle_calls;
  }
}

template <Scalar S>
void write_phase_traces(const std::string& path, const std::vector<PhaseRecord<S>>& phases) {
  if (path.empty()) return;
  std::ofstream os(path);
  bool header = true;
  for (const auto& p : phases) {
    if (!p.ran_newton) continue;
    if (header) os << "i,delta,f,g,lookahead_attempted,lookahead_success\n";
    os << "# phase " << p.node << '\n';
    write_trace_csv(os, p.trace, false);
    header = false;
  }
}

template <Scalar S>
void write_single_trace(const std::string& path, const NewtonTrace<S>& trace) {
  if (path.empty()) return;
  std::ofstream os(path);
  write_trace_csv(os, trace, true);
}

void write_report(const std::string& path, const Options& o, const std::string& solver, const Summary& s) {
  if (path.empty()) return;
  nlohmann::json j;
  j["instance"] = o.file;
  j["solver"] = solver;
  j["arith"] = o.arith;
  j["method"] = o.method;
  j["verdict"] = s.verdict;
  j["phase_nodes"] = s.phase_nodes;
  j["phase_iterations"] = s.phase_iterations;
  j["iterations"] = s.total_iterations();
  j["oracle_calls"] = s.oracle_calls;
  if (s.sfm_calls) j["sfm_calls"] = *s.sfm_calls;
  j["wall_ms"] = s.wall_ms;
  j["trace"] = o.trace;
  std::ofstream os(path);
  os << j.dump(2) << '\n';
}

template <Scalar S>
void print_evidence(std::ostream& out, const InfeasibilityEvidence<S>& ev, std::optional<NodeId> phase) {
  out << "evidence " << evidence_kind(ev) << '\n';
  if (phase) out << "phase " << *phase << '\n';
  out << "reversed " << (ev.in_reversed_system ? 1 : 0) << '\n';
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ViolatedAfterGrapevine<S>>) {
          out << "arc " << k.arc << '\n';
          if (k.cycle) out << "cycle " << walk_string(*k.cycle) << '\n';
          if (k.path) out << "path " << walk_string(*k.path) << '\n';
          if (k.end_label) out << "end_label " << format_scalar(*k.end_label) << '\n';
        } else if constexpr (std::is_same_v<K, NonContractingPath<S>>) {
          out << "node " << k.node << '\n';
          out << "path " << walk_string(k.path) << '\n';
          out << "delta " << format_scalar(k.delta) << '\n';
        } else if constexpr (std::is_same_v<K, NewtonNoRoot<S>>) {
          out << "delta " << format_scalar(k.witness.witness_delta) << '\n';
          if (k.cycle) out << "cycle " << walk_string(*k.cycle) << '\n';
          if (k.path) out << "path " << walk_string(*k.path) << '\n';
          if (k.end_label) out << "end_label " << format_scalar(*k.end_label) << '\n';
        } else {
          out << "cycle " << walk_string(k.cycle) << '\n';
        }
      },
      ev.kind);
  if (!ev.certificate) return;
  if (const auto* c = std::get_if<NegativeUnitGainCycle>(&*ev.certificate)) {
    out << "certificate negative_unit_gain_cycle\n";
    out << "certificate_cycle " << walk_string(c->cycle) << '\n';
  } else {
    const auto& b = std::get<NegativeBicycle>(*ev.certificate);
    out << "certificate negative_bicycle\n";
    out << "certificate_generating " << walk_string(b.generating) << '\n';
    out << "certificate_connector " << walk_string(b.connector) << '\n';
    out << "certificate_absorbing " << walk_string(b.absorbing) << '\n';
  }
}

template <Scalar S>
void revalidate_evidence(const M2vpiSystem<S>& sys, const InfeasibilityEvidence<S>& ev, const Tolerance& tol) {
  if (std::string why = check_evidence(sys, ev, tol); !why.empty()) {
    throw Failure("certificate failed re-validation: " + why);
  }
}

template <Scalar S>
int emit_m2vpi(const M2vpiSystem<S>& sys, const Options& o, Method m, std::ostream& out, Summary& s) {
  const NewtonConfig cfg = make_config(o, m);
  if (o.recover_finite) {
    RecoveryOutcome<S> r = recover_finite_solution(sys, cfg);
    if (r.feasible()) {
      Labels<S> y;
      for (const auto& v : r.point()) y.emplace_back(v);
      if (!satisfies(sys, y, cfg.tol)) throw Failure("solution failed re-validation");
      s.verdict = "feasible";
      out << "FEASIBLE\n";
      out << "y " << labels_string(y) << '\n';
      out << "fixed_coordinates " << r.fixed_coordinates << '\n';
      return kExitSolved;
    }
    const auto& inf = std::get<Infeasible<S>>(r.result);
    revalidate_evidence(sys, inf.evidence, cfg.tol);
    s.verdict = "infeasible";
    out << "INFEASIBLE\n";
    print_evidence(out, inf.evidence, inf.phase);
    return kExitInfeasible;
  }
  SolveOutcome<S> r = solve_m2vpi(sys, cfg);
  add_phases(s, r.phases);
  add_phases(s, r.reverse_phases);
  write_phase_traces(o.trace, r.phases);
  if (r.feasible()) {
    if (!satisfies(sys, r.labels(), cfg.tol)) throw Failure("solution failed re-validation");
    s.verdict = "feasible";
    out << "FEASIBLE\n";
    out << "y " << labels_string(r.labels()) << '\n';
  } else {
    revalidate_evidence(sys, r.infeasible().evidence, cfg.tol);
    s.verdict = "infeasible";
    out << "INFEASIBLE\n";
    print_evidence(out, r.infeasible().evidence, r.infeasible().phase);
  }
  out << "phases " << s.phase_iterations.size() << '\n';
  out << "iterations " << s.total_iterations() << '\n';
  return r.feasible() ? kExitSolved : kExitInfeasible;
}

template <Scalar S>
int emit_2vpi(const Tvpi2System<S>& sys, const Options& o, Method m, std::ostream& out, Summary& s) {
  const NewtonConfig cfg = make_config(o, m);
  std::optional<Reduction<S>> red;
  try {
    red = reduce_2vpi(sys);
  } catch (const InfeasibleTrivialRow& e) {
    s.verdict = "infeasible";
    out << "INFEASIBLE\nevidence trivial_row\nreason " << e.what() << '\n';
    return kExitInfeasible;
  }
  RecoveryOutcome<S> r = recover_finite_solution(red->system, cfg);
  if (r.feasible()) {
    std::vector<S> x = red->back_map(r.point());
    if (!satisfies(sys, x, cfg.tol)) throw Failure("solution failed re-validation");
    s.verdict = "feasible";
    out << "FEASIBLE\nx";
    for (const auto& v : x) out << ' ' << format_scalar(v);
    out << '\n';
    return kExitSolved;
  }
  const auto& inf = std::get<Infeasible<S>>(r.result);
  revalidate_evidence(red->system, inf.evidence, cfg.tol);
  s.verdict = "infeasible";
  out << "INFEASIBLE\n";
  out << "reduced_system_nodes " << red->system.node_count() << '\n';
  print_evidence(out, inf.evidence, inf.phase);
  return kExitInfeasible;
}

template <Scalar S>
int emit_dmdp(const GainGraph<S>& g, const Options& o, Method m, std::ostream& out, Summary& s) {
  const NewtonConfig cfg = make_config(o, m);
  DmdpOutcome<S> r = solve_dmdp(DmdpInstance<S>::make(g), cfg);
  add_phases(s, r.phases);
  write_phase_traces(o.trace, r.phases);
  if (!r.feasible()) {
    WalkValue<S> w = walk_eval(g, r.cycle());
    if (walk_end(g, r.cycle()) != r.cycle().start || r.cycle().empty() || sign(w.gamma - S(1), cfg.tol) != Sign::Zero ||
        sign(w.cost, cfg.tol) != Sign::Neg) {
      throw Failure("certificate failed re-validation");
    }
    s.verdict = "infeasible";
    out << "INFEASIBLE\nevidence negative_unit_gain_cycle\ncycle " << walk_string(r.cycle()) << '\n';
    return kExitInfeasible;
  }
  const auto& sol = r.solution();
  if (!satisfies(g, sol.values, cfg.tol)) throw Failure("values failed re-validation");
  auto eval = evaluate_policy(g, sol.policy, cfg.tol);
  Compare<S> cmp{cfg.tol};
  bool match = eval.has_value();
  for (std::size_t v = 0; match && v < g.node_count(); ++v) {
    const auto &a = (*eval)[v], &b = sol.values[v];
    match = a.is_finite() == b.is_finite() && (!a.is_finite() || cmp.eq(a.value(), b.value()));
  }
  if (!match) throw Failure("policy value does not match the reported values");
  s.verdict = "feasible";
  out << "FEASIBLE\n";
  out << "y " << labels_string(sol.values) << '\n';
  out << "policy:";
  for (ArcId e : sol.policy.choice) out << ' ' << e;
  out << '\n';
  out << "iterations " << s.total_iterations() << '\n';
  return kExitSolved;
}

template <Scalar S>
int emit_sfm(const SfmInstance<S>& inst, const Options& o, Method m, std::ostream& out, Summary& s) {
  const NewtonConfig cfg = make_config(o, m);
  ParamSfmResult<S> r = parametric_sfm(*inst.h, inst.a, cfg);
  write_single_trace(o.trace, r.trace);
  const std::size_t n = inst.h->ground_size();
  S aw = set_weight(inst.a, r.witness);
  SfmMinimum<S> at = sfm_minimize(*inst.h, inst.a, r.delta_star, cfg.tol);
  if (sign(aw, cfg.tol) != Sign::Pos || sign(inst.h->eval(r.witness) - r.delta_star * aw, cfg.tol) != Sign::Zero ||
      sign(at.value, cfg.tol) != Sign::Zero) {
    throw Failure("result failed re-validation");
  }
  s.verdict = "solved";
  s.phase_iterations = {r.iterations};
  s.oracle_calls = r.sfm_calls;
  s.sfm_calls = r.sfm_calls;
  out << "delta_star " << format_scalar(r.delta_star) << '\n';
  out << "witness " << set_string(r.witness, n) << '\n';
  out << "iterations " << r.iterations << '\n';
  out << "sfm_calls " << r.sfm_calls << '\n';
  return kExitSolved;
}

template <Scalar S>
int emit_min_ratio(const MinRatioInstance<S>& inst, const Options& o, Method m, std::ostream& out, Summary& s) {
  const NewtonConfig cfg = make_config(o, m);
  ExplicitDomainOracle<S> oracle(inst.m, inst.domain);
  MinRatioResult<S> r = min_ratio(inst.c, inst.d, oracle, cfg);
  write_single_trace(o.trace, r.trace);
  std::span<const S> c(inst.c), d(inst.d);
  Compare<S> cmp{cfg.tol};
  bool ok = std::find(inst.domain.begin(), inst.domain.end(), r.witness) != inst.domain.end() &&
            cmp.eq(dot(c, r.witness), r.delta_star * dot(d, r.witness));
  for (const auto& x : inst.domain) ok = ok && cmp.ge(dot(c, x) - r.delta_star * dot(d, x), S(0));
  if (!ok) throw Failure("result failed re-validation");
  s.verdict = "solved";
  s.phase_iterations = {r.iterations};
  s.oracle_calls = r.oracle_calls;
  out << "delta_star " << format_scalar(r.delta_star) << '\n';
  out << "witness " << point_string(r.witness) << '\n';
  out << "iterations " << r.iterations << '\n';
  out << "oracle_calls " << r.oracle_calls << '\n';
  return kExitSolved;
}

// Parses the instance once and runs the chosen solver in the chosen method.
template <Scalar S>
int solve_kind(const std::string& kind, const Options& o, Method m, std::ostream& out, Summary& s) {
  std::ifstream in = open_input(o.file);
  auto start = std::chrono::steady_clock::now();
  int code = kExitError;
  if (kind == "m2vpi") {
    code = emit_m2vpi(read_m2vpi<S>(in), o, m, out, s);
  } else if (kind == "2vpi") {
    code = emit_2vpi(read_2vpi<S>(in), o, m, out, s);
  } else if (kind == "dmdp") {
    code = emit_dmdp(read_dmdp<S>(in), o, m, out, s);
  } else if (kind == "sfm") {
    code = emit_sfm(read_sfm<S>(in), o, m, out, s);
  } else if (kind == "min-ratio") {
    code = emit_min_ratio(read_min_ratio<S>(in), o, m, out, s);
  } else {
    throw Failure("unknown instance kind '" + kind + "'");
  }
  s.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return code;
}

int solve(const std::string& kind, const Options& o, std::ostream& out) {
  Summary s;
  const Method m = parse_method(o.method);
  int code = o.arith == "float" ? solve_kind<double>(kind, o, m, out, s) : solve_kind<Rational>(kind, o, m, out, s);
  write_report(o.report, o, kind, s);
  return code;
}

int compare(const std::string& kind, const Options& o, std::ostream& out) {
  nlohmann::json j;
  j["instance"] = o.file;
  j["solver"] = kind;
  j["arith"] = o.arith;
  std::ostringstream sink;
  std::optional<int> code;
  for (Method m : {Method::Standard, Method::LookAhead}) {
    Options om = o;
    om.trace.clear();
    Summary s;
    int c = o.arith == "float" ? solve_kind<double>(kind, om, m, sink, s) : solve_kind<Rational>(kind, om, m, sink, s);
    if (code && *code != c) throw Failure("methods disagree on the verdict");
    code = c;
    nlohmann::json r;
    r["verdict"] = s.verdict;
    r["phase_nodes"] = s.phase_nodes;
    r["phase_iterations"] = s.phase_iterations;
    r["iterations"] = s.total_iterations();
    r["oracle_calls"] = s.oracle_calls;
    r["wall_ms"] = s.wall_ms;
    j[method_name(m)] = r;
  }
  auto st = j[method_name(Method::Standard)]["iterations"].get<std::size_t>();
  auto la = j[method_name(Method::LookAhead)]["iterations"].get<std::size_t>();
  j["iteration_ratio"] = la == 0 ? 1.0 : static_cast<double>(st) / static_cast<double>(la);
  const std::string text = j.dump(2);
  if (o.report.empty()) {
    out << text << '\n';
  } else {
    std::ofstream(o.report) << text << '\n';
  }
  return *code;
}

int generate(const GenOptions& g, std::ostream& out) {
  std::uint64_t seed = g.seed;
  if (const char* env = std::getenv("NEWTON_FRAC_SEED")) {
    try {
      seed = std::stoull(env);
    } catch (const std::exception&) {
      throw Failure("NEWTON_FRAC_SEED is not an unsigned integer");
    }
  }
  Rng rng(seed);
  std::ostringstream os;
  if (g.kind == "m2vpi") {
    write_m2vpi(os, random_m2vpi<Rational>(rng));
  } else if (g.kind == "2vpi") {
    write_2vpi(os, random_2vpi<Rational>(rng));
  } else if (g.kind == "dmdp") {
    write_dmdp(os, random_dmdp<Rational>(rng));
  } else if (g.kind == "sfm") {
    write_sfm(os, random_sfm<Rational>(rng));
  } else if (g.kind == "min-ratio") {
    write_min_ratio(os, random_min_ratio<Rational>(rng));
  } else {
    throw Failure("unknown instance kind '" + g.kind + "'");
  }
  if (g.out.empty()) {
    out << os.str();
  } else {
    std::ofstream(g.out) << os.str();
  }
  return kExitSolved;
}

void add_solver_options(CLI::App* sub, Options& o) {
  sub->add_option("file", o.file, "instance file")->required();
  sub->add_option("--arith", o.arith, "rational or float")->check(CLI::IsMember({"rational", "float"}));
  sub->add_option("--eps", o.eps, "float tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--method", o.method, "lookahead or standard")->check(CLI::IsMember({"lookahead", "standard"}));
  sub->add_option("--trace", o.trace, "write the Newton trace as CSV");
  sub->add_option("--max-iters", o.max_iters, "Newton iteration cap per phase");
  sub->add_option("--report", o.report, "write a JSON run report");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Newton-Dinkelbach solvers for fractional and parametric problems", "newton-frac"};
  app.require_subcommand(1);
  Options o;
  GenOptions g;
  std::string compare_kind;
  const std::pair<const char*, const char*> solvers[] = {{"solve-m2vpi", "m2vpi"},
                                                         {"solve-2vpi", "2vpi"},
                                                         {"solve-dmdp", "dmdp"},
                                                         {"solve-sfm", "sfm"},
                                                         {"min-ratio", "min-ratio"}};
  std::vector<std::pair<CLI::App*, std::string>> solver_cmds;
  for (const auto& [name, kind] : solvers) {
    CLI::App* sub = app.add_subcommand(name, std::string("solve a ") + kind + " instance");
    add_solver_options(sub, o);
    if (std::string(kind) == "m2vpi") sub->add_flag("--recover-finite", o.recover_finite, "print a finite solution");
    solver_cmds.emplace_back(sub, kind);
  }
  CLI::App* cmp = app.add_subcommand("compare", "run both Newton variants and report iteration counts");
  cmp->add_option("kind", compare_kind, "m2vpi, 2vpi, dmdp, sfm or min-ratio")
      ->required()
      ->check(CLI::IsMember({"m2vpi", "2vpi", "dmdp", "sfm", "min-ratio"}));
  add_solver_options(cmp, o);
  CLI::App* gen = app.add_subcommand("gen", "emit a random instance");
  gen->add_option("kind", g.kind, "m2vpi, 2vpi, dmdp, sfm or min-ratio")
      ->required()
      ->check(CLI::IsMember({"m2vpi", "2vpi", "dmdp", "sfm", "min-ratio"}));
  gen->add_option("--seed", g.seed, "generator seed (NEWTON_FRAC_SEED overrides)");
  gen->add_option("--out", g.out, "output path instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitSolved : kExitError;
  }

  try {
    if (gen->parsed()) return generate(g, out);
    if (cmp->parsed()) return compare(compare_kind, o, out);
    for (const auto& [sub, kind] : solver_cmds) {
      if (sub->parsed()) return solve(kind, o, out);
    }
  } catch (const ParseError& e) {
    err << "parse error: " << o.file << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace fracopt
