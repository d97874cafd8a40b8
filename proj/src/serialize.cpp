#include "orlicz/serialize.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

std::string strip_parens(const std::string& s) {
  const std::string t = trim(s);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')')
    throw RangeError("expected a parenthesized tuple, got '" + t + "'");
  return t.substr(1, t.size() - 2);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw RangeError("malformed number '" + t + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& text, char sep) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, sep)) out.push_back(parse_double(item));
  return out;
}

std::string serialize(const FunctionRep& rep) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Polynomial>) {
          if (f.has_chebyshev()) return "cheb[" + join(f.chebyshev()) + "]";
          return "poly[" + join(f.coefficients()) + "]";
        } else if constexpr (std::is_same_v<T, TrigPolynomial>) {
          std::vector<double> b(f.sin_coefficients().begin() + (f.sin_coefficients().empty() ? 0 : 1),
                                f.sin_coefficients().end());
          return "trig[" + join(f.cos_coefficients()) + "; " + join(b) + "]";
        } else if constexpr (std::is_same_v<T, Rational>) {
          return "rational[num: " + join(f.numerator().coefficients()) +
                 "; den: " + join(f.denominator_base().coefficients()) +
                 "; power: " + std::to_string(f.denominator_power()) + "]";
        } else if constexpr (std::is_same_v<T, Gap> || std::is_same_v<T, GapDerivative>) {
          const Gap& g = [&]() -> const Gap& {
            if constexpr (std::is_same_v<T, Gap>) return f;
            else return f.base;
          }();
          std::string out = std::is_same_v<T, Gap> ? "gap[" : "gap'[";
          for (std::size_t i = 0; i < g.factors().size(); ++i) {
            const auto& fac = g.factors()[i];
            if (i) out += "; ";
            out += "(" + format_double(fac.root.real()) + ", " + format_double(fac.root.imag()) +
                   ", " + format_double(fac.exponent) + ")";
          }
          return out + "]";
        } else if constexpr (std::is_same_v<T, Sampled>) {
          std::string out = "sampled[";
          for (std::size_t i = 0; i < f.xs.size(); ++i) {
            if (i) out += "; ";
            out += "(" + format_double(f.xs[i]) + ", " + format_double(f.vs[i]) + ")";
          }
          return out + "]";
        } else {
          return "singular[" + format_double(f.exponent) + ", " + format_double(f.scale) + "]";
        }
      },
      rep);
}

FunctionRep parse_function(const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('[');
  if (open == std::string::npos || t.back() != ']')
    throw RangeError("function must look like kind[...], got '" + t + "'");
  const std::string kind = trim(t.substr(0, open));
  const std::string body = t.substr(open + 1, t.size() - open - 2);

  if (kind == "poly") return Polynomial(parse_double_list(body));
  if (kind == "cheb") return Polynomial::from_chebyshev(parse_double_list(body));
  if (kind == "trig") {
    const auto parts = split(body, ';');
    if (parts.size() != 2) throw RangeError("trig[...] needs 'a0, ..., an; b1, ..., bn'");
    std::vector<double> b{0.0};
    for (double v : parse_double_list(parts[1])) b.push_back(v);
    return TrigPolynomial(parse_double_list(parts[0]), std::move(b));
  }
  if (kind == "rational") {
    std::vector<double> num, den{1.0};
    int power = 1;
    bool has_num = false;
    for (const auto& part : split(body, ';')) {
      const auto colon = part.find(':');
      if (colon == std::string::npos) throw RangeError("rational field '" + part + "' lacks ':'");
      const std::string key = trim(part.substr(0, colon)), val = part.substr(colon + 1);
      if (key == "num") {
        num = parse_double_list(val);
        has_num = true;
      } else if (key == "den") {
        den = parse_double_list(val);
      } else if (key == "power") {
        const double p = parse_double(val);
        if (p < 1 || p != std::floor(p)) throw RangeError("rational power must be a positive integer");
        power = static_cast<int>(p);
      } else {
        throw RangeError("unknown rational field '" + key + "'");
      }
    }
    if (!has_num) throw RangeError("rational[...] needs a 'num:' field");
    return Rational(Polynomial(num), Polynomial(den), power);
  }
  if (kind == "gap" || kind == "gap'") {
    std::vector<GapFactor> factors;
    if (!trim(body).empty())
      for (const auto& item : split(body, ';')) {
        const auto v = parse_double_list(strip_parens(item));
        if (v.size() != 3) throw RangeError("gap factor needs (a, b, r)");
        factors.push_back({{v[0], v[1]}, v[2]});
      }
    Gap g(std::move(factors));
    if (kind == "gap'") return GapDerivative{std::move(g)};
    return g;
  }
  if (kind == "sampled") {
    Sampled s;
    for (const auto& item : split(body, ';')) {
      const auto v = parse_double_list(strip_parens(item));
      if (v.size() != 2) throw RangeError("sampled point needs (x, v)");
      if (!s.xs.empty() && !(v[0] > s.xs.back()))
        throw RangeError("sampled abscissae must be strictly increasing");
      s.xs.push_back(v[0]);
      s.vs.push_back(v[1]);
    }
    if (s.xs.size() < 2) throw RangeError("sampled[...] needs at least two points");
    return s;
  }
  if (kind == "singular") {
    const auto v = parse_double_list(body);
    if (v.size() != 2) throw RangeError("singular[...] needs 'exponent, scale'");
    return EndpointSingularity{v[0], v[1]};
  }
  throw RangeError("unknown function kind '" + kind + "'");
}

}  // namespace orlicz
