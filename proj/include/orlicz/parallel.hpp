#pragma once

// Data-parallel kernels. Every kernel has an OpenMP path and a serial
// reference path; both write results by index, so their outputs are
// bit-identical and independent of thread count or scheduling.

#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace orlicz {

using Evaluable = std::function<double(double)>;

enum class Exec { serial, parallel };

namespace kernels {

inline int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs body(i) for i in [0, n). Exceptions thrown inside the parallel region
// are captured per index and the lowest-index one is rethrown afterwards.
template <class Body>
void for_each_index(std::size_t n, Body&& body, Exec exec = Exec::parallel) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <class Fn>
auto map_indexed(std::size_t n, Fn&& fn, Exec exec = Exec::parallel) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  for_each_index(n, [&](std::size_t i) { out[i] = fn(i); }, exec);
  return out;
}

template <class Fn>
std::vector<double> map_grid(std::span<const double> xs, Fn&& fn, Exec exec = Exec::parallel) {
  return map_indexed(xs.size(), [&](std::size_t i) { return fn(xs[i]); }, exec);
}

// Uniform grid a + i*(b-a)/panels, i = 0..panels (endpoints included exactly).
std::vector<double> uniform_grid(double a, double b, std::size_t panels);

// f evaluated on uniform_grid(a, b, panels).
std::vector<double> sample(const Evaluable& f, double a, double b, std::size_t panels,
                           Exec exec = Exec::parallel);

}  // namespace kernels
}  // namespace orlicz
