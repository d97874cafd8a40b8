// Wall-clock comparison of the serial reference path and the OpenMP path of
// the data-parallel kernels. Also confirms that both produce identical output.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "orlicz/harness.hpp"
#include "orlicz/parallel.hpp"

using namespace orlicz;

namespace {

template <class Fn>
double seconds(Fn&& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

struct Case {
  std::string name;
  int reps;
  std::function<double(Exec)> run;  // returns a checksum
};

QuadratureConfig with(Exec e) {
  QuadratureConfig c;
  c.exec = e;
  return c;
}

}  // namespace

int main() {
  const PhiSpec phi = PhiSpec::power_log(2.0, 0.0);
  const FunctionRep q = random_family(FamilyKind::polynomial, 20, 11);
  const auto corpus = default_corpus();
  const std::vector<CorpusMember> slice(corpus.begin(), corpus.begin() + 12);

  const std::vector<Case> cases = {
      {"sample 1e6 points", 5,
       [](Exec e) {
         const auto v = kernels::sample([](double x) { return std::sin(40.0 * x) * std::exp(x); }, -1, 1, 1000000, e);
         return v[123457];
       }},
      {"conjugate cache, 64/decade", 5,
       [&](Exec e) { return ConjugateCache(phi, 1.0, 1024.0, 64, e).h_star().back(); }},
      {"layer-cake table, degree 20", 5,
       [&](Exec e) { return LorentzTable(DistributionProfile(as_evaluable(q), Domain::interval()), e).norm(2.0, 3.0); }},
      {"Markov sweep P_n^(2,2), n = 2..24, B(phi)", 1,
       [&](Exec e) {
         SweepOptions opt;
         opt.n_max = 24;
         opt.norm = NormSpec::orlicz(phi);
         opt.cfg = with(e);
         return markov_sweep(opt).fit.slope;
       }},
      {"B/G band, 12 members", 1,
       [&](Exec e) { return band_check(slice, phi, with(e)).max_b_over_g; }},
  };

  std::printf("threads: %d\n", kernels::max_threads());
  std::printf("%-44s %12s %12s %9s %s\n", "kernel", "serial [s]", "parallel [s]", "speedup", "identical");
  for (const auto& c : cases) {
    double a = 0.0, b = 0.0;
    const double ts = seconds([&] { a = c.run(Exec::serial); }, c.reps);
    const double tp = seconds([&] { b = c.run(Exec::parallel); }, c.reps);
    std::printf("%-44s %12.4f %12.4f %9.2f %s\n", c.name.c_str(), ts, tp, ts / tp, a == b ? "yes" : "NO");
  }
}
