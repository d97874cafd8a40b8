#include "orlicz/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "orlicz/errors.hpp"
#include "orlicz/serialize.hpp"

namespace orlicz::cli {

namespace {

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"", {"command", "seed", "format", "out"}},
      {"phi", {"family", "m", "r", "nu", "table"}},
      {"function", {"f", "generator", "degree"}},
      {"norm", {"kind", "p", "b", "r"}},
      {"sweep", {"family", "n_range", "bound_scale"}},
      {"rational", {"mode", "a", "r", "p"}},
      {"tail", {"s", "r", "m", "u_max"}},
      {"extremal", {"n", "restarts", "sweeps"}},
      {"equivalence", {"corpus_seed"}},
      {"tolerances",
       {"rel_tol", "max_depth", "max_panels", "nodes_per_panel", "root_tol", "distribution_panels",
        "sup_samples", "exec"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct Entry {
  std::string value;
  int line = 0;
};

std::string qualified(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

std::string closest(const std::string& key, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& c : candidates) {
    const std::size_t d = edit_distance(key, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best_d <= std::max<std::size_t>(2, key.size() / 3) ? best : std::string{};
}

long long parse_integer(const std::string& s) {
  const double v = parse_double(s);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw RangeError("expected an integer, got '" + s + "'");
  return static_cast<long long>(v);
}

std::uint64_t parse_u64(const std::string& s) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  std::istringstream is(t);
  if (t.empty() || t[0] == '-' || !(is >> v) || !is.eof())
    throw RangeError("expected an unsigned 64-bit integer, got '" + t + "'");
  return v;
}

PhiSpec load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RangeError("cannot open phi table '" + path + "'");
  std::vector<double> z, phi;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream is(t);
    double a = 0, b = 0;
    char extra = 0;
    if (!(is >> a >> b) || (is >> extra))
      throw RangeError("phi table '" + path + "' line " + std::to_string(no) + ": expected 'z phi'");
    z.push_back(a);
    phi.push_back(b);
  }
  return PhiSpec::tabulated(std::move(z), std::move(phi));
}

}  // namespace

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string command_name(Command c) {
  switch (c) {
    case Command::norm: return "norm";
    case Command::transform: return "transform";
    case Command::markov_sweep: return "markov-sweep";
    case Command::equivalence: return "equivalence";
    case Command::rational: return "rational";
    case Command::tail: return "tail";
    case Command::extremal: return "extremal";
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& s) {
  for (Command c : {Command::norm, Command::transform, Command::markov_sweep, Command::equivalence,
                    Command::rational, Command::tail, Command::extremal})
    if (command_name(c) == s) return c;
  return std::nullopt;
}

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::both: return "both";
  }
  return "?";
}

std::optional<OutputFormat> parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  if (s == "both") return OutputFormat::both;
  return std::nullopt;
}

ParseResult parse_config(const std::string& text, const std::string& base_dir,
                         const Overrides& overrides) {
  ParseResult result;
  auto& errors = result.errors;
  std::map<std::string, Entry> entries;  // qualified key -> value
  std::set<std::string> sections_seen;

  // Pass 1: syntax and key names.
  {
    std::istringstream in(text);
    std::string raw, section;
    int no = 0;
    while (std::getline(in, raw)) {
      ++no;
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#' || line[0] == ';') continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          errors.push_back({no, "malformed section header '" + line + "'"});
          continue;
        }
        section = trim(line.substr(1, line.size() - 2));
        if (!schema().count(section) || section.empty()) {
          std::vector<std::string> names;
          for (const auto& [k, v] : schema())
            if (!k.empty()) names.push_back(k);
          const std::string hint = closest(section, names);
          errors.push_back({no, "unknown section [" + section + "]" +
                                    (hint.empty() ? "" : "; did you mean [" + hint + "]?")});
        }
        sections_seen.insert(section);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        errors.push_back({no, "expected 'key = value', got '" + line + "'"});
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      const auto sec = schema().find(section);
      if (sec == schema().end()) continue;  // already reported
      const auto& keys = sec->second;
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        std::string hint = closest(key, keys);
        std::string where = section.empty() ? "at top level" : "in [" + section + "]";
        errors.push_back({no, "unknown key '" + key + "' " + where +
                                  (hint.empty() ? "" : "; did you mean '" + hint + "'?")});
        continue;
      }
      const std::string q = qualified(section, key);
      if (entries.count(q)) {
        errors.push_back({no, "duplicate key '" + q + "' (first set on line " +
                                  std::to_string(entries[q].line) + ")"});
        continue;
      }
      if (value.empty()) {
        errors.push_back({no, "empty value for '" + q + "'"});
        continue;
      }
      entries[q] = {value, no};
    }
  }

  ExperimentConfig cfg;
  auto& echo = cfg.echo;

  // Typed access; conversion errors are recorded against the entry's line.
  auto get = [&](const std::string& q) -> const Entry* {
    const auto it = entries.find(q);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto with = [&](const std::string& q, const std::function<void(const std::string&)>& apply) {
    const Entry* e = get(q);
    if (!e) return false;
    try {
      apply(e->value);
    } catch (const std::exception& ex) {
      errors.push_back({e->line, "'" + q + "': " + ex.what()});
    }
    return true;
  };
  auto number = [&](const std::string& q, double& target, const std::function<bool(double)>& ok,
                    const char* requirement) {
    with(q, [&](const std::string& v) {
      const double d = parse_double(v);
      if (!ok(d)) throw RangeError(std::string("must be ") + requirement);
      target = d;
    });
    echo[q] = format_double(target);
  };
  auto integer = [&](const std::string& q, int& target, long long lo, const char* requirement) {
    with(q, [&](const std::string& v) {
      const long long d = parse_integer(v);
      if (d < lo) throw RangeError(std::string("must be ") + requirement);
      target = static_cast<int>(d);
    });
    echo[q] = std::to_string(target);
  };
  auto positive = [](double d) { return d > 0.0 && std::isfinite(d); };

  // Top level.
  bool have_command = false;
  if (!with("command", [&](const std::string& v) {
        const auto c = parse_command(v);
        if (!c)
          throw RangeError("unknown command '" + v +
                           "' (norm, transform, markov-sweep, equivalence, rational, tail, extremal)");
        cfg.command = *c;
        have_command = true;
      }))
    errors.push_back({0, "missing required key 'command'"});
  echo["command"] = command_name(cfg.command);
  with("seed", [&](const std::string& v) { cfg.seed = parse_u64(v); });
  with("format", [&](const std::string& v) {
    const auto f = parse_format(v);
    if (!f) throw RangeError("format must be csv, json or both");
    cfg.format = *f;
  });
  with("out", [&](const std::string& v) { cfg.out_path = v; });
  if (overrides.seed) cfg.seed = overrides.seed;
  if (overrides.format) cfg.format = *overrides.format;
  if (overrides.out_path) cfg.out_path = *overrides.out_path;
  echo["format"] = format_name(cfg.format);
  if (cfg.seed) echo["seed"] = std::to_string(*cfg.seed);

  // [phi]
  if (sections_seen.count("phi")) {
    std::string family = "power-log";
    with("phi.family", [&](const std::string& v) {
      if (v != "power-log" && v != "log-power" && v != "tabulated")
        throw RangeError("phi family must be power-log, log-power or tabulated");
      family = v;
    });
    echo["phi.family"] = family;
    double m = 2.0, r = 0.0, nu = 1.0;
    try {
      if (family == "power-log") {
        number("phi.m", m, positive, "positive");
        number("phi.r", r, [](double d) { return std::isfinite(d); }, "finite");
        cfg.phi = PhiSpec::power_log(m, r);
      } else if (family == "log-power") {
        number("phi.nu", nu, [](double d) { return d > 0.0 && std::isfinite(d); }, "positive");
        cfg.phi = PhiSpec::log_power(nu);
      } else {
        const Entry* e = get("phi.table");
        if (!e) {
          errors.push_back({0, "tabulated phi needs 'table' in [phi]"});
        } else {
          std::filesystem::path p(e->value);
          if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
          if (!std::filesystem::exists(p))
            errors.push_back({e->line, "phi table file '" + p.string() + "' does not exist"});
          else
            with("phi.table", [&](const std::string&) { cfg.phi = load_table(p.string()); });
          echo["phi.table"] = e->value;
        }
      }
    } catch (const std::exception& ex) {
      errors.push_back({0, std::string("phi: ") + ex.what()});
    }
  }

  // [function]
  with("function.f", [&](const std::string& v) {
    cfg.function = parse_function(v);
    cfg.function_text = serialize(*cfg.function);
  });
  if (cfg.function) echo["function.f"] = cfg.function_text;
  with("function.generator", [&](const std::string& v) {
    if (v == "polynomial") cfg.generator = Generator::polynomial;
    else if (v == "trig") cfg.generator = Generator::trig;
    else if (v == "rational") cfg.generator = Generator::rational;
    else if (v == "gap") cfg.generator = Generator::gap;
    else throw RangeError("generator must be polynomial, trig, rational or gap");
  });
  if (cfg.generator != Generator::none) {
    integer("function.degree", cfg.generator_degree, 0, ">= 0");
    echo["function.generator"] = get("function.generator")->value;
    if (cfg.function) errors.push_back({get("function.generator")->line, "give either 'f' or 'generator', not both"});
  }

  // [norm]
  {
    std::string kind = cfg.phi ? "orlicz" : "lp";
    with("norm.kind", [&](const std::string& v) {
      static const std::set<std::string> kinds{"lp", "orlicz", "g", "lorentz", "weighted-lorentz", "v"};
      if (!kinds.count(v)) throw RangeError("norm kind must be lp, orlicz, g, lorentz, weighted-lorentz or v");
      kind = v;
    });
    echo["norm.kind"] = kind;
    double p = 2.0;
    LorentzIndex b = LorentzIndex::fixed(2.0);
    int r = 1;
    if (kind == "lp" || kind == "lorentz")
      number("norm.p", p, kind == "lp" ? std::function<bool(double)>(positive)
                                       : std::function<bool(double)>([](double d) { return d >= 1.0 && std::isfinite(d); }),
             kind == "lp" ? "positive" : ">= 1");
    if (kind == "lorentz" || kind == "weighted-lorentz") {
      with("norm.b", [&](const std::string& v) {
        if (v == "p") {
          b = LorentzIndex::coupled_to_p();
          return;
        }
        const double d = parse_double(v);
        if (!(d >= 1.0)) throw RangeError("b must be >= 1, inf, or p");
        b = LorentzIndex::fixed(d);
      });
      echo["norm.b"] = b.coupled ? "p" : format_double(b.b);
    }
    if (kind == "v") integer("norm.r", r, 1, ">= 1");
    const bool needs_phi = kind != "lp" && kind != "lorentz";
    const bool norm_used = cfg.command == Command::norm || cfg.command == Command::markov_sweep ||
                           cfg.command == Command::extremal;
    if (needs_phi && !cfg.phi && norm_used && !sections_seen.count("phi"))
      errors.push_back({get("norm.kind") ? get("norm.kind")->line : 0,
                        "norm kind '" + kind + "' needs a [phi] section"});
    if (kind == "lp") cfg.norm = NormSpec::lp(p);
    else if (kind == "lorentz") {
      cfg.norm = NormSpec::lorentz(p, b.b);
      cfg.norm.b = b;
    }
    else if (cfg.phi) {
      if (kind == "orlicz") cfg.norm = NormSpec::orlicz(*cfg.phi);
      else if (kind == "g") cfg.norm = NormSpec::g(*cfg.phi);
      else if (kind == "weighted-lorentz") cfg.norm = NormSpec::weighted_lorentz(*cfg.phi, b);
      else cfg.norm = NormSpec::v(*cfg.phi, r);
    }
  }

  // [sweep]
  with("sweep.family", [&](const std::string& v) {
    if (v == "jacobi22") cfg.sweep_family = SweepFamily::jacobi22;
    else if (v == "chebyshev") cfg.sweep_family = SweepFamily::chebyshev;
    else if (v == "random-poly") cfg.sweep_family = SweepFamily::random_poly;
    else throw RangeError("sweep family must be jacobi22, chebyshev or random-poly");
  });
  with("sweep.n_range", [&](const std::string& v) {
    const auto dots = v.find("..");
    if (dots == std::string::npos) throw RangeError("n_range must look like 2..40");
    const long long a = parse_integer(v.substr(0, dots)), b = parse_integer(v.substr(dots + 2));
    if (a < 0 || b < a || b > 200) throw RangeError("n_range needs 0 <= a <= b <= 200");
    cfg.n_min = static_cast<int>(a);
    cfg.n_max = static_cast<int>(b);
  });
  number("sweep.bound_scale", cfg.bound_scale, positive, "positive");
  if (cfg.command == Command::markov_sweep) {
    echo["sweep.family"] = sweep_family_name(cfg.sweep_family);
    echo["sweep.n_range"] = std::to_string(cfg.n_min) + ".." + std::to_string(cfg.n_max);
  } else {
    echo.erase("sweep.bound_scale");
  }

  // [rational]
  if (cfg.command == Command::rational) {
    with("rational.mode", [&](const std::string& v) {
      if (v != "orlicz" && v != "lp") throw RangeError("rational mode must be orlicz or lp");
      cfg.rational_mode = v;
    });
    echo["rational.mode"] = cfg.rational_mode;
    with("rational.a", [&](const std::string& v) {
      cfg.rational_a = parse_double_list(v);
      for (double a : cfg.rational_a)
        if (!(a > 0.0)) throw RangeError("every a must be positive (1/(x^2+a) is pole-free then)");
    });
    with("rational.r", [&](const std::string& v) {
      cfg.rational_r.clear();
      for (double d : parse_double_list(v)) {
        if (d < 1 || d != std::floor(d)) throw RangeError("every r must be an integer >= 1");
        cfg.rational_r.push_back(static_cast<int>(d));
      }
    });
    number("rational.p", cfg.rational_p, [](double d) { return d >= 4.0 && std::isfinite(d); }, ">= 4");
    std::string a, r;
    for (double v : cfg.rational_a) a += (a.empty() ? "" : ", ") + format_double(v);
    for (int v : cfg.rational_r) r += (r.empty() ? "" : ", ") + std::to_string(v);
    if (!cfg.function && cfg.generator == Generator::none) echo["rational.a"] = a;
    echo["rational.r"] = r;
    if (cfg.rational_mode != "lp") echo.erase("rational.p");
  }

  // [tail]
  if (cfg.command == Command::tail) {
    with("tail.s", [&](const std::string& v) {
      cfg.tail_s = parse_double_list(v);
      for (double s : cfg.tail_s)
        if (!(s > 0.0 && s < 1.0)) throw RangeError("every s must lie in (0, 1)");
    });
    with("tail.r", [&](const std::string& v) {
      cfg.tail_r.clear();
      for (double d : parse_double_list(v)) {
        if (d < 1 || d != std::floor(d)) throw RangeError("every r must be an integer >= 1");
        cfg.tail_r.push_back(static_cast<int>(d));
      }
    });
    number("tail.m", cfg.tail_m, positive, "positive");
    number("tail.u_max", cfg.tail_u_max, [](double d) { return d > 3.0 && std::isfinite(d); }, "> 3");
    std::string s, r;
    for (double v : cfg.tail_s) s += (s.empty() ? "" : ", ") + format_double(v);
    for (int v : cfg.tail_r) r += (r.empty() ? "" : ", ") + std::to_string(v);
    echo["tail.s"] = s;
    echo["tail.r"] = r;
  } else {
    echo.erase("tail.m");
    echo.erase("tail.u_max");
  }

  // [extremal]
  if (cfg.command == Command::extremal) {
    integer("extremal.n", cfg.extremal_n, 1, ">= 1");
    integer("extremal.restarts", cfg.extremal_restarts, 1, ">= 1");
    integer("extremal.sweeps", cfg.extremal_sweeps, 1, ">= 1");
  }

  // [equivalence]
  if (cfg.command == Command::equivalence) {
    with("equivalence.corpus_seed", [&](const std::string& v) { cfg.corpus_seed = parse_u64(v); });
    echo["equivalence.corpus_seed"] = std::to_string(cfg.corpus_seed);
  }

  // [tolerances]
  {
    auto& q = cfg.quadrature;
    number("tolerances.rel_tol", q.rel_tol, [](double d) { return d > 0.0 && d < 1.0; }, "in (0, 1)");
    integer("tolerances.max_depth", q.max_depth, 1, ">= 1");
    int panels = static_cast<int>(q.max_panels), nodes = q.nodes_per_panel;
    integer("tolerances.max_panels", panels, 1, ">= 1");
    integer("tolerances.nodes_per_panel", nodes, 2, ">= 2");
    q.max_panels = static_cast<std::size_t>(panels);
    q.nodes_per_panel = nodes;
    number("tolerances.root_tol", q.root_tol, positive, "positive");
    int dist = static_cast<int>(q.distribution_panels), sup = static_cast<int>(q.sup_samples);
    integer("tolerances.distribution_panels", dist, 16, ">= 16");
    integer("tolerances.sup_samples", sup, 16, ">= 16");
    q.distribution_panels = static_cast<std::size_t>(dist);
    q.sup_samples = static_cast<std::size_t>(sup);
    std::string exec = "parallel";
    with("tolerances.exec", [&](const std::string& v) {
      if (v != "serial" && v != "parallel") throw RangeError("exec must be serial or parallel");
      exec = v;
    });
    q.exec = exec == "serial" ? Exec::serial : Exec::parallel;
    echo["tolerances.exec"] = exec;
  }

  // Cross-key requirements.
  if (have_command) {
    const bool phi_needed = cfg.command == Command::transform || cfg.command == Command::equivalence ||
                            (cfg.command == Command::rational && cfg.rational_mode == "orlicz");
    if (phi_needed && !sections_seen.count("phi"))
      errors.push_back({0, "command '" + command_name(cfg.command) + "' needs a [phi] section"});
    if (cfg.command == Command::norm && !cfg.function && cfg.generator == Generator::none &&
        !get("function.f"))
      errors.push_back({0, "command 'norm' needs 'f' or 'generator' in [function]"});
    const bool uses_generator =
        (cfg.generator != Generator::none &&
         (cfg.command == Command::norm || cfg.command == Command::rational)) ||
        (cfg.command == Command::markov_sweep && cfg.sweep_family == SweepFamily::random_poly) ||
        (cfg.command == Command::extremal && cfg.extremal_restarts > 1);
    if (uses_generator && !cfg.seed)
      errors.push_back({0, "a seed is required when a random generator is used (top-level 'seed' or --seed)"});
    if (cfg.command == Command::rational && cfg.function &&
        !std::holds_alternative<Rational>(*cfg.function) && !std::holds_alternative<Polynomial>(*cfg.function))
      errors.push_back({get("function.f")->line, "command 'rational' needs a rational[...] or poly[...] function"});
  }
  if (!cfg.out_path.empty()) echo["out"] = cfg.out_path;

  std::stable_sort(errors.begin(), errors.end(),
                   [](const ConfigError& a, const ConfigError& b) { return a.line < b.line; });
  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

}  // namespace orlicz::cli
