#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "orlicz/cli/config.hpp"
#include "orlicz/cli/run.hpp"
#include "orlicz/serialize.hpp"

using namespace orlicz;
using namespace orlicz::cli;

namespace {

const char* kNormConfig = R"(command = norm
[phi]
family = power-log
m = 2
r = 0
[function]
f = poly[-1, 0, 2]
[norm]
kind = orlicz
)";

ExperimentConfig must_parse(const std::string& text) {
  ParseResult r = parse_config(text);
  for (const auto& e : r.errors) MESSAGE("line " << e.line << ": " << e.message);
  REQUIRE(r.ok());
  return *r.config;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("minimal norm request parses") {
  const ExperimentConfig c = must_parse(kNormConfig);
  CHECK(c.command == Command::norm);
  REQUIRE(c.phi.has_value());
  CHECK(c.phi->m() == 2.0);
  REQUIRE(c.function.has_value());
  CHECK(std::get<Polynomial>(*c.function).coefficients() == std::vector<double>{-1.0, 0.0, 2.0});
  CHECK(c.norm.kind == NormSpec::Kind::orlicz);
}

TEST_CASE("misspelled key is reported with line and suggestion") {
  const ParseResult r = parse_config("command = markov-sweep\n[sweep]\nfamly = jacobi22\nn_range = 2..x\n"
                                     "[tolerances]\nrel_tol = -1\n");
  CHECK_FALSE(r.ok());
  REQUIRE(r.errors.size() == 3);
  CHECK(r.errors[0].line == 3);
  CHECK(r.errors[0].message.find("did you mean 'family'") != std::string::npos);
  CHECK(r.errors[1].line == 4);
  CHECK(r.errors[2].line == 6);
}

TEST_CASE("other parse errors") {
  CHECK_FALSE(parse_config("[phi]\nfamily = power-log\n").ok());  // missing command
  const ParseResult gen = parse_config("command = norm\n[function]\ngenerator = polynomial\ndegree = 4\n");
  REQUIRE_FALSE(gen.ok());
  bool mentions_seed = false;
  for (const auto& e : gen.errors) mentions_seed |= e.message.find("seed") != std::string::npos;
  CHECK(mentions_seed);
  CHECK(parse_config("command = norm\nseed = 3\n[function]\ngenerator = polynomial\ndegree = 4\n").ok());
  Overrides o;
  o.seed = 3;
  CHECK(parse_config("command = norm\n[function]\ngenerator = polynomial\ndegree = 4\n", ".", o).ok());
  const ParseResult file = parse_config("command = norm\n[phi]\ntable = /nonexistent/phi.csv\n");
  CHECK_FALSE(file.ok());
  const ParseResult num = parse_config("command = norm\n[function]\nf = poly[1]\n[norm]\nkind = lp\np = 1e\n");
  REQUIRE(num.errors.size() == 1);
  CHECK(num.errors[0].line == 6);
  CHECK(edit_distance("famly", "family") == 1);
  CHECK(edit_distance("", "abc") == 3);
}

TEST_CASE("sweep config echoes defaults") {
  const ExperimentConfig c = must_parse("command = markov-sweep\nseed = 7\n[phi]\nfamily = power-log\nm = 2\n"
                                        "[sweep]\nfamily = jacobi22\nn_range = 2..40\n");
  CHECK(c.n_min == 2);
  CHECK(c.n_max == 40);
  CHECK(c.seed == std::optional<std::uint64_t>(7));
  CHECK(c.echo.at("tolerances.rel_tol") == "1e-10");
  CHECK(c.echo.at("tolerances.max_depth") == "50");
  CHECK(c.echo.count("tolerances.exec") == 1);
}

TEST_CASE("echo is sufficient to re-run") {
  const ExperimentConfig c = must_parse(kNormConfig);
  std::map<std::string, std::map<std::string, std::string>> sections;
  for (const auto& [k, v] : c.echo) {
    const auto dot = k.find('.');
    if (dot == std::string::npos)
      sections[""][k] = v;
    else
      sections[k.substr(0, dot)][k.substr(dot + 1)] = v;
  }
  std::string text;
  for (const auto& [sec, kv] : sections) {
    if (!sec.empty()) text += "[" + sec + "]\n";
    for (const auto& [k, v] : kv) text += k + " = " + v + "\n";
  }
  const ExperimentConfig again = must_parse(text);
  CHECK(again.echo == c.echo);
  CHECK(render_json(run(again), false) == render_json(run(c), false));
}

TEST_CASE("norm run and deterministic emission") {
  const ExperimentConfig c = must_parse(kNormConfig);
  const ReportEnvelope a = run(c);
  const ReportEnvelope b = run(c);
  CHECK(a.exit_code == kExitOk);
  CHECK(a.results.at("value").get<double>() == doctest::Approx(1.4210803670811).epsilon(1e-10));
  CHECK(render_json(a, false) == render_json(b, false));
  CHECK(render_csv(a.csv) == render_csv(b.csv));
  CHECK(render_json(a, false).find("timestamp") == std::string::npos);
  CHECK(render_json(a, true).find("timestamp") != std::string::npos);

  // JSON round trip keeps every double exactly
  const std::string text = render_json(a, false);
  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j.at("results").at("value").get<double>() == a.results.at("value").get<double>());
  CHECK(j.dump(2) == text.substr(0, text.find_last_not_of('\n') + 1));

  // 17 significant digits in CSV
  const std::string csv = render_csv(a.csv);
  const double v = a.results.at("value").get<double>();
  CHECK(csv.find("," + format_double(v) + ",nan,true\n") != std::string::npos);
  CHECK(format_double(v).size() >= 17);
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("CSV headers follow the documented schema") {
  using H = std::vector<std::string>;
  CHECK(csv_header(Command::norm) == H{"function", "norm_kind", "parameters", "value", "inner_maximizer_p", "tolerance_met"});
  CHECK(csv_header(Command::transform) == H{"p", "h_star", "psi", "psi_closed_form", "relative_error"});
  CHECK(csv_header(Command::markov_sweep) == H{"family", "phi", "n", "ratio", "bound", "margin", "slope"});
  CHECK(csv_header(Command::equivalence) == H{"phi", "member", "b_norm", "g_norm", "b_over_g", "lower_ok", "upper_ok"});
  CHECK(csv_header(Command::rational) == H{"function", "r", "lhs", "rhs", "log_lhs", "log_rhs", "margin", "holds"});
  CHECK(csv_header(Command::tail) == H{"s", "r", "u", "measured", "model", "prefactor", "chebyshev_bound"});
  CHECK(csv_header(Command::extremal) == H{"n", "norm", "ratio", "jacobi_ratio", "bound", "best"});
  const ReportEnvelope env = run(must_parse(kNormConfig));
  CHECK(first_line(render_csv(env.csv)) == "function,norm_kind,parameters,value,inner_maximizer_p,tolerance_met");
}

TEST_CASE("CSV quoting") {
  CsvTable t{{"a", "b"}, {{"x, y", "say \"hi\""}}};
  CHECK(render_csv(t) == "a,b\n\"x, y\",\"say \"\"hi\"\"\"\n");
}

TEST_CASE("exit-code contract") {
  const std::string sweep = "command = markov-sweep\n[norm]\nkind = lp\np = 4\n[sweep]\nfamily = chebyshev\nn_range = 2..8\n";
  const ReportEnvelope pass = run(must_parse(sweep));
  CHECK(pass.exit_code == kExitOk);
  CHECK(pass.csv.rows.size() == 7);
  const ReportEnvelope violated = run(must_parse(sweep + "bound_scale = 0.05\n"));
  CHECK(violated.exit_code == kExitViolation);

  const ReportEnvelope poled =
      run(must_parse("command = rational\n[phi]\nfamily = power-log\nm = 2\n[function]\nf = rational[num: 1; den: -0.25, 0, 1]\n"));
  CHECK(poled.exit_code == kExitError);
  REQUIRE(poled.results.contains("pole_check"));
  CHECK(std::abs(std::abs(poled.results.at("pole_check").at("witness").get<double>()) - 0.5) < 1e-3);

  const ReportEnvelope bad_norm = run(must_parse("command = norm\n[function]\nf = poly[0]\n[norm]\nkind = lp\np = 2\n"));
  CHECK(bad_norm.exit_code == kExitOk);
  CHECK(bad_norm.results.at("value").get<double>() == 0.0);
}

TEST_CASE("emit writes files") {
  const auto dir = std::filesystem::temp_directory_path() / "orlicz_cli_test";
  std::filesystem::create_directories(dir);
  const ReportEnvelope env = run(must_parse(kNormConfig));
  emit(env, OutputFormat::both, (dir / "out.txt").string());
  CHECK(slurp(dir / "out.csv") == render_csv(env.csv));
  const std::string json = slurp(dir / "out.json");
  CHECK(nlohmann::json::parse(json).at("command") == "norm");
  emit(env, OutputFormat::csv, (dir / "again.csv").string());
  CHECK(slurp(dir / "again.csv") == slurp(dir / "out.csv"));
  CHECK_THROWS_AS(emit(env, OutputFormat::csv, "/nonexistent-dir/x.csv"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("shipped example configs parse") {
  const std::filesystem::path dir = ORLICZ_CONFIG_DIR;
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".ini") continue;
    INFO(entry.path().string());
    const ParseResult r = parse_config(slurp(entry.path()), dir.string());
    for (const auto& e : r.errors) MESSAGE("line " << e.line << ": " << e.message);
    CHECK(r.ok());
    ++count;
  }
  CHECK(count >= 7);
}
