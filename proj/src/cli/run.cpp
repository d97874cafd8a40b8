#include "orlicz/cli/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "orlicz/errors.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/serialize.hpp"

namespace orlicz::cli {

using nlohmann::json;

namespace {

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

std::string cell(double v) { return format_double(v); }
std::string cell(bool v) { return v ? "true" : "false"; }
std::string cell(int v) { return std::to_string(v); }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const DomainEvaluationError*>(&e)) return "domain-evaluation";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const PoleProximityError*>(&e)) return "pole-proximity";
  if (dynamic_cast<const OverflowError*>(&e)) return "overflow";
  if (dynamic_cast<const RangeError*>(&e)) return "range";
  if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
  if (dynamic_cast<const ConstructionError*>(&e)) return "construction";
  if (dynamic_cast<const SummabilityError*>(&e)) return "summability";
  if (dynamic_cast<const DegenerateInputError*>(&e)) return "degenerate-input";
  if (dynamic_cast<const RejectedInputError*>(&e)) return "rejected-input";
  return "internal";
}

json constants_block(const PhiSpec& phi) {
  const OrliczN n = construct_N(phi);
  const EquivalenceConstants ec = equivalence_constants(n);
  return json{{"phi", phi.name()},
              {"c1", num(n.c1)},
              {"c2", num(n.c2)},
              {"c3", num(ec.c3)},
              {"c4", num(ec.c4())},
              {"log_c4", num(ec.log_c4)},
              {"log_c4_displayed_series", num(ec.log_c4_displayed)},
              {"k0", num(ec.k0)},
              {"h_star_right_slope_at_1", num(ec.h_star_right_slope)},
              {"k4", num(k_constant(4.0))},
              {"psi4", num(psi(phi, 4.0))}};
}

json norm_params(const NormSpec& s) {
  json p = json::object();
  switch (s.kind) {
    case NormSpec::Kind::lp: p["p"] = num(s.p); break;
    case NormSpec::Kind::lorentz:
      p["p"] = num(s.p);
      p["b"] = s.b.coupled ? json("p") : num(s.b.b);
      break;
    case NormSpec::Kind::weighted_lorentz:
      p["b"] = s.b.coupled ? json("p") : num(s.b.b);
      break;
    case NormSpec::Kind::v: p["r"] = s.r; break;
    default: break;
  }
  if (s.phi) p["phi"] = s.phi->name();
  return p;
}

FunctionRep generated(const ExperimentConfig& cfg) {
  const std::uint64_t seed = cfg.seed.value_or(0);
  switch (cfg.generator) {
    case Generator::polynomial: return random_family(FamilyKind::polynomial, cfg.generator_degree, seed);
    case Generator::trig: return random_family(FamilyKind::trig, cfg.generator_degree, seed);
    case Generator::rational: return random_family(FamilyKind::rational, cfg.generator_degree, seed);
    case Generator::gap: return random_family(FamilyKind::gap, cfg.generator_degree, seed);
    case Generator::none: break;
  }
  throw RangeError("no function given");
}

void run_norm(const ExperimentConfig& cfg, ReportEnvelope& env) {
  const FunctionRep f = cfg.function ? *cfg.function : generated(cfg);
  const NormResult r = evaluate_norm(as_evaluable(f), domain_of(f), cfg.norm, cfg.quadrature);
  const std::string text = serialize(f);
  env.results = json{{"function", text},
                     {"domain", domain_of(f).name()},
                     {"norm_kind", cfg.norm.kind_name()},
                     {"norm", cfg.norm.describe()},
                     {"parameters", norm_params(cfg.norm)},
                     {"value", num(r.value)},
                     {"inner_maximizer_p", num(r.maximizer_p)},
                     {"tolerance_met", r.tolerance_met}};
  env.csv.rows.push_back({text, cfg.norm.kind_name(), norm_params(cfg.norm).dump(), cell(r.value),
                          cell(r.maximizer_p), cell(r.tolerance_met)});
  if (!r.tolerance_met) {
    env.exit_code = kExitError;
    env.messages.push_back("norm evaluation did not meet its tolerance");
  }
}

void run_transform(const ExperimentConfig& cfg, ReportEnvelope& env) {
  const PhiSpec& phi = *cfg.phi;
  const MembershipReport mem = phi_membership_check(phi);
  env.results["membership"] = json{{"monotone", mem.monotone},
                                   {"convex", mem.convex},
                                   {"summable", mem.summable},
                                   {"passed", mem.passed},
                                   {"partial_sum", num(mem.partial_sum)},
                                   {"worst_tail_ratio", num(mem.worst_tail_ratio)},
                                   {"notes", mem.notes}};
  if (!mem.passed) {
    env.exit_code = kExitViolation;
    env.messages.push_back("phi fails the admissibility check");
    return;
  }
  env.constants = constants_block(phi);
  const bool closed = phi.family() == PhiSpec::Family::power_log && phi.r() == 0.0;
  const double m = phi.m();
  double worst = 0.0;
  json rows = json::array();
  for (double p : geometric_grid(1.0, 1024.0, 8)) {
    const double hs = young_fenchel(phi, p);
    const double ps = std::exp(hs / p);
    double cf = std::numeric_limits<double>::quiet_NaN(), rel = cf;
    if (closed) {
      cf = std::pow(p / m, 1.0 / m) * std::exp(-1.0 / m);
      rel = relative_difference(ps, cf);
      if (p >= std::max(1.0, m / 2.0)) worst = std::max(worst, rel);
    }
    rows.push_back(json{{"p", p}, {"h_star", num(hs)}, {"psi", num(ps)}, {"psi_closed_form", num(cf)},
                        {"relative_error", num(rel)}});
    env.csv.rows.push_back({cell(p), cell(hs), cell(ps), cell(cf), cell(rel)});
  }
  env.results["conjugate"] = rows;
  std::vector<double> ys;
  for (int i = 0; i <= 20; ++i) ys.push_back(-2.0 + 0.25 * i);
  const FenchelMoreauReport fm = fenchel_moreau_check(phi, ys);
  env.results["fenchel_moreau"] = json{{"max_relative_deviation", num(fm.max_relative_deviation)},
                                       {"worst_y", num(fm.worst_y)},
                                       {"y_range", json::array({-2.0, 3.0})}};
  if (closed) env.results["closed_form_max_relative_error"] = num(worst);
  if (closed && worst > 1e-6) {
    env.exit_code = kExitViolation;
    env.messages.push_back("numeric psi deviates from the closed form by more than 1e-6");
  }
  if (fm.max_relative_deviation > 1e-5) {
    env.exit_code = kExitViolation;
    env.messages.push_back("Fenchel-Moreau round trip deviates by more than 1e-5");
  }
}

void run_sweep(const ExperimentConfig& cfg, ReportEnvelope& env) {
  SweepOptions opt;
  opt.family = cfg.sweep_family;
  opt.n_min = cfg.n_min;
  opt.n_max = cfg.n_max;
  opt.norm = cfg.norm;
  opt.seed = cfg.seed.value_or(0);
  opt.bound_scale = cfg.bound_scale;
  opt.cfg = cfg.quadrature;
  const RatioReport rep = markov_sweep(opt);
  if (cfg.norm.phi) env.constants = constants_block(*cfg.norm.phi);
  env.constants["k4"] = num(rep.k4);
  if (rep.bound_kind == "markov_lp") env.constants["kp"] = num(rep.kp);

  const std::string phi_name = cfg.norm.phi ? cfg.norm.phi->name() : "none";
  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back(json{{"n", e.n},
                           {"ratio", num(e.ratio)},
                           {"bound", num(e.bound)},
                           {"log_bound", num(e.log_bound)},
                           {"margin", num(e.margin)}});
    env.csv.rows.push_back({rep.family, phi_name, cell(e.n), cell(e.ratio), cell(e.bound),
                            cell(e.margin), cell(rep.fit.slope)});
  }
  env.results = json{{"family", rep.family},
                     {"norm", rep.norm},
                     {"norm_kind", cfg.norm.kind_name()},
                     {"parameters", norm_params(cfg.norm)},
                     {"bound_kind", rep.bound_kind},
                     {"bound_scale", num(cfg.bound_scale)},
                     {"entries", entries},
                     {"slope", num(rep.fit.slope)},
                     {"slope_ci95", json::array({num(rep.fit.ci_low), num(rep.fit.ci_high)})},
                     {"slope_points", rep.fit.points},
                     {"c5_estimate", num(rep.c5_estimate)},
                     {"violations", rep.violations}};
  if (!rep.bound_holds()) {
    env.exit_code = kExitViolation;
    env.messages.push_back("Markov bound violated at " + std::to_string(rep.violations.size()) +
                           " degree(s)");
  }
}

void run_equivalence(const ExperimentConfig& cfg, ReportEnvelope& env) {
  const BandReport rep = band_check(default_corpus(cfg.corpus_seed), *cfg.phi, cfg.quadrature);
  env.constants = constants_block(*cfg.phi);
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back(json{{"member", r.member},
                        {"b_norm", num(r.b)},
                        {"g_norm", num(r.g)},
                        {"b_over_g", num(r.b / r.g)},
                        {"lower_ok", r.lower_ok},
                        {"upper_ok", r.upper_ok}});
    env.csv.rows.push_back({rep.phi, r.member, cell(r.b), cell(r.g), cell(r.b / r.g),
                            cell(r.lower_ok), cell(r.upper_ok)});
  }
  env.results = json{{"phi", rep.phi},
                     {"corpus_size", rep.rows.size()},
                     {"rows", rows},
                     {"lower_violations", rep.lower_violations},
                     {"upper_violations", rep.upper_violations},
                     {"e2_substitution", rep.e2_substitution},
                     {"violations_after_substitution", rep.violations_after_substitution},
                     {"min_b_over_g", num(rep.min_b_over_g)},
                     {"max_b_over_g", num(rep.max_b_over_g)},
                     {"passed", rep.passed()}};
  if (rep.e2_substitution)
    env.messages.push_back("upper band used e^2 * C4 in place of C4");
  if (!rep.passed()) {
    env.exit_code = kExitViolation;
    env.messages.push_back("equivalence band violated");
  }
}

void run_rational(const ExperimentConfig& cfg, ReportEnvelope& env) {
  std::vector<std::pair<std::string, Rational>> qs;
  if (cfg.function || cfg.generator != Generator::none) {
    const FunctionRep f = cfg.function ? *cfg.function : generated(cfg);
    if (const auto* p = std::get_if<Polynomial>(&f))
      qs.emplace_back(serialize(f), Rational(*p, Polynomial::constant(1.0)));
    else if (const auto* r = std::get_if<Rational>(&f))
      qs.emplace_back(serialize(f), *r);
    else
      throw RangeError("rational check needs a rational or polynomial function");
  } else {
    for (double a : cfg.rational_a) {
      Rational q(Polynomial::constant(1.0), Polynomial({a, 0.0, 1.0}));
      qs.emplace_back(serialize(q), q);
    }
  }
  if (cfg.phi && cfg.rational_mode == "orlicz") env.constants = constants_block(*cfg.phi);
  env.constants["d"] = json::object();
  for (int r : cfg.rational_r) env.constants["d"][std::to_string(r)] = num(d_constant(r));

  json checks = json::array();
  for (const auto& [name, q] : qs) {
    const PoleCheck pc = check_no_poles(q);
    if (!pc.pole_free) {
      env.results["pole_check"] = json{{"function", name},
                                       {"pole_free", false},
                                       {"witness", num(pc.witness)},
                                       {"min_abs_denominator", num(pc.min_abs_denominator)},
                                       {"certified_lower_bound", num(pc.certified_lower_bound)},
                                       {"threshold", num(pc.threshold)}};
      env.results["error"] = json{{"type", "rejected-input"},
                                  {"message", "denominator vanishes or nearly vanishes on [-1, 1]"}};
      env.exit_code = kExitError;
      env.messages.push_back("rational function rejected: pole near x = " + format_double(pc.witness));
      return;
    }
    for (int r : cfg.rational_r) {
      const InequalityCheck c = cfg.rational_mode == "orlicz"
                                    ? rational_orlicz_check(q, *cfg.phi, r, cfg.quadrature)
                                    : lp_rational_check(q, cfg.rational_p, r, cfg.quadrature);
      checks.push_back(json{{"function", name},
                            {"r", r},
                            {"lhs", num(c.lhs)},
                            {"rhs", num(c.rhs)},
                            {"log_lhs", num(c.log_lhs)},
                            {"log_rhs", num(c.log_rhs)},
                            {"margin", num(c.margin)},
                            {"holds", c.holds}});
      env.csv.rows.push_back({name, cell(r), cell(c.lhs), cell(c.rhs), cell(c.log_lhs),
                              cell(c.log_rhs), cell(c.margin), cell(c.holds)});
      if (!c.holds) {
        env.exit_code = kExitViolation;
        env.messages.push_back("rational inequality violated for " + name + ", r = " + std::to_string(r));
      }
    }
  }
  env.results["mode"] = cfg.rational_mode;
  if (cfg.rational_mode == "lp") env.results["p"] = num(cfg.rational_p);
  env.results["checks"] = checks;
}

void run_tail(const ExperimentConfig& cfg, ReportEnvelope& env) {
  json cases = json::array();
  for (double s : cfg.tail_s)
    for (int r : cfg.tail_r) {
      const TailReport t = tail_check(s, r, cfg.tail_m, cfg.tail_u_max, cfg.quadrature);
      json grid = json::array();
      for (std::size_t i = 0; i < t.u.size(); ++i) {
        grid.push_back(json{{"u", num(t.u[i])},
                            {"measured", num(t.measured[i])},
                            {"model", num(t.model[i])},
                            {"chebyshev_bound", num(t.chebyshev[i])}});
        env.csv.rows.push_back({cell(s), cell(r), cell(t.u[i]), cell(t.measured[i]), cell(t.model[i]),
                                cell(t.prefactor), cell(t.chebyshev[i])});
      }
      json beta = json::array();
      for (std::size_t i = 0; i < t.beta.size(); ++i)
        beta.push_back(json{{"beta", num(t.beta[i])}, {"norm", num(t.beta_norm[i])}});
      cases.push_back(json{{"s", num(s)},
                           {"r", r},
                           {"m", num(t.m)},
                           {"function", serialize(EndpointSingularity{r * s, 1.0})},
                           {"v_norm", num(t.v_norm)},
                           {"prefactor", num(t.prefactor)},
                           {"max_violation", num(t.max_violation)},
                           {"violations", t.violations},
                           {"chebyshev_violations", t.chebyshev_violations},
                           {"grid", grid},
                           {"converse",
                            json{{"phi_m", num(t.converse_phi_m)},
                                 {"v_norm", num(t.converse_v_norm)},
                                 {"converged", t.converse_converged},
                                 {"beta_model_prefactor", num(t.beta_model_prefactor)},
                                 {"beta_norms", beta}}}});
      if (t.violations > 0 || t.chebyshev_violations > 0 || !std::isfinite(t.prefactor)) {
        env.exit_code = kExitViolation;
        env.messages.push_back("tail bound violated for s = " + format_double(s) + ", r = " + std::to_string(r));
      }
      if (!t.converse_converged) {
        env.exit_code = kExitViolation;
        env.messages.push_back("converse V-norm scan diverged for s = " + format_double(s) +
                               ", r = " + std::to_string(r));
      }
    }
  env.results["cases"] = cases;
  env.results["u_range"] = json::array({3.0, num(cfg.tail_u_max)});
}

void run_extremal(const ExperimentConfig& cfg, ReportEnvelope& env) {
  const ExtremalResult r = extremal_search(cfg.norm, cfg.extremal_n, cfg.extremal_restarts,
                                           cfg.seed.value_or(0), cfg.extremal_sweeps, cfg.quadrature);
  double bound = std::numeric_limits<double>::quiet_NaN(), log_bound = bound;
  if (cfg.norm.kind == NormSpec::Kind::orlicz && cfg.norm.phi) {
    env.constants = constants_block(*cfg.norm.phi);
    const EquivalenceConstants ec = equivalence_constants(construct_N(*cfg.norm.phi));
    log_bound = 2.0 * std::log(static_cast<double>(cfg.extremal_n)) + std::log(k_constant(4.0)) +
                std::log(std::max(1.0, psi(*cfg.norm.phi, 4.0))) + ec.log_c4 + std::log(ec.c3);
    bound = log_bound > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(log_bound);
  }
  const std::string poly = serialize(r.best);
  env.results = json{{"n", cfg.extremal_n},
                     {"norm", cfg.norm.describe()},
                     {"restarts", cfg.extremal_restarts},
                     {"sweeps", cfg.extremal_sweeps},
                     {"ratio", num(r.ratio)},
                     {"jacobi_ratio", num(r.jacobi_ratio)},
                     {"bound", num(bound)},
                     {"log_bound", num(log_bound)},
                     {"best", poly},
                     {"evaluations", r.evaluations}};
  env.csv.rows.push_back({cell(cfg.extremal_n), cfg.norm.describe(), cell(r.ratio), cell(r.jacobi_ratio),
                          cell(bound), poly});
  if (!std::isnan(log_bound) && std::log(r.ratio) > log_bound) {
    env.exit_code = kExitViolation;
    env.messages.push_back("extremal ratio exceeds the B(phi) Markov bound");
  }
}

}  // namespace

const std::vector<std::string>& csv_header(Command c) {
  static const std::map<Command, std::vector<std::string>> headers{
      {Command::norm, {"function", "norm_kind", "parameters", "value", "inner_maximizer_p", "tolerance_met"}},
      {Command::transform, {"p", "h_star", "psi", "psi_closed_form", "relative_error"}},
      {Command::markov_sweep, {"family", "phi", "n", "ratio", "bound", "margin", "slope"}},
      {Command::equivalence, {"phi", "member", "b_norm", "g_norm", "b_over_g", "lower_ok", "upper_ok"}},
      {Command::rational, {"function", "r", "lhs", "rhs", "log_lhs", "log_rhs", "margin", "holds"}},
      {Command::tail, {"s", "r", "u", "measured", "model", "prefactor", "chebyshev_bound"}},
      {Command::extremal, {"n", "norm", "ratio", "jacobi_ratio", "bound", "best"}},
  };
  return headers.at(c);
}

ReportEnvelope run(const ExperimentConfig& cfg) {
  ReportEnvelope env;
  env.command = command_name(cfg.command);
  env.timestamp = utc_now();
  for (const auto& [k, v] : cfg.echo) env.config[k] = v;
  env.csv.header = csv_header(cfg.command);
  try {
    switch (cfg.command) {
      case Command::norm: run_norm(cfg, env); break;
      case Command::transform: run_transform(cfg, env); break;
      case Command::markov_sweep: run_sweep(cfg, env); break;
      case Command::equivalence: run_equivalence(cfg, env); break;
      case Command::rational: run_rational(cfg, env); break;
      case Command::tail: run_tail(cfg, env); break;
      case Command::extremal: run_extremal(cfg, env); break;
    }
  } catch (const std::exception& e) {
    json err{{"type", error_type(e)}, {"message", e.what()}};
    if (const auto* d = dynamic_cast<const DomainEvaluationError*>(&e)) err["abscissa"] = num(d->abscissa());
    if (const auto* p = dynamic_cast<const PoleProximityError*>(&e)) err["abscissa"] = num(p->abscissa());
    if (const auto* c = dynamic_cast<const ConvergenceError*>(&e)) {
      err["estimate"] = num(c->estimate());
      err["error_bound"] = num(c->error_bound());
    }
    env.results["error"] = err;
    env.exit_code = kExitError;
    env.messages.push_back(command_name(cfg.command) + " failed: " + e.what());
  }
  return env;
}

std::string render_csv(const CsvTable& table) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += quote(cells[i]);
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

std::string render_json(const ReportEnvelope& env, bool include_timestamp) {
  json doc{{"schema_version", kSchemaVersion},
           {"tool", "orlicz-harness"},
           {"tool_version", kToolVersion},
           {"command", env.command},
           {"config", env.config},
           {"constants", env.constants},
           {"results", env.results},
           {"exit_code", env.exit_code},
           {"messages", env.messages}};
  if (include_timestamp) doc["timestamp"] = env.timestamp;
  return doc.dump(2) + "\n";
}

void emit(const ReportEnvelope& env, OutputFormat format, const std::string& path) {
  auto write = [](const std::string& target, const std::string& data) {
    if (target.empty() || target == "-") {
      std::cout << data;
      return;
    }
    std::ofstream out(target, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + target + "' for writing");
    out << data;
    if (!out) throw std::runtime_error("write to '" + target + "' failed");
  };
  if (format == OutputFormat::csv) {
    write(path, render_csv(env.csv));
  } else if (format == OutputFormat::json) {
    write(path, render_json(env));
  } else if (path.empty() || path == "-") {
    write(path, render_csv(env.csv));
    write(path, render_json(env));
  } else {
    std::filesystem::path p(path);
    write(std::filesystem::path(p).replace_extension(".csv").string(), render_csv(env.csv));
    write(std::filesystem::path(p).replace_extension(".json").string(), render_json(env));
  }
}

}  // namespace orlicz::cli
