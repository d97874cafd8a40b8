#pragma once

// Text form of function representations, used in config files and reports.
//
//   poly[c0, c1, ...]                      monomial coefficients, lowest first
//   cheb[c0, c1, ...]                      Chebyshev coefficients
//   trig[a0, a1, ..., an; b1, ..., bn]     cos / sin coefficients
//   rational[num: c0, ...; den: c0, ...; power: k]
//   gap[(a, b, r); (a, b, r); ...]         prod |x - (a + ib)|^r
//   sampled[(x, v); (x, v); ...]           piecewise linear on [-1, 1]
//   singular[exponent, scale]              scale (1 - x)^-exponent
//
// Numbers are written with 17 significant digits, so parse(serialize(f))
// reproduces f exactly.

#include <string>
#include <vector>

#include "orlicz/convex_transform.hpp"
#include "orlicz/function_model.hpp"

namespace orlicz {

std::string format_double(double v);
std::string serialize(const FunctionRep& rep);
// Throws RangeError describing the first problem.
FunctionRep parse_function(const std::string& text);

double parse_double(const std::string& text);
std::vector<double> parse_double_list(const std::string& text, char sep = ',');

}  // namespace orlicz
