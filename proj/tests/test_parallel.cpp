#include <doctest.h>

#include <stdexcept>

#include "orlicz/harness.hpp"
#include "orlicz/parallel.hpp"

using namespace orlicz;

TEST_CASE("kernels: lowest-index exception is rethrown") {
  auto body = [](std::size_t i) {
    if (i == 7 || i == 3) throw std::runtime_error("index " + std::to_string(i));
  };
  for (Exec e : {Exec::serial, Exec::parallel}) {
    try {
      kernels::for_each_index(20, body, e);
      FAIL("no exception");
    } catch (const std::runtime_error& err) {
      CHECK(std::string(err.what()) == "index 3");
    }
  }
}

TEST_CASE("serial and parallel paths agree bit for bit") {
  const PhiSpec phi = PhiSpec::power_log(2.0, 0.0);
  const ConjugateCache cs(phi, 1.0, 1024.0, 64, Exec::serial), cp(phi, 1.0, 1024.0, 64, Exec::parallel);
  CHECK(cs.h_star() == cp.h_star());

  const FunctionRep q = random_family(FamilyKind::polynomial, 12, 5);
  const DistributionProfile prof(as_evaluable(q), Domain::interval());
  const LorentzTable ts(prof, Exec::serial), tp(prof, Exec::parallel);
  for (double p : {1.0, 2.5})
    for (double b : {1.0, 3.0, kInfiniteIndex}) CHECK(ts.norm(p, b) == tp.norm(p, b));

  SweepOptions opt;
  opt.n_max = 12;
  opt.norm = NormSpec::orlicz(phi);
  opt.cfg.exec = Exec::serial;
  const RatioReport rs = markov_sweep(opt);
  opt.cfg.exec = Exec::parallel;
  const RatioReport rp = markov_sweep(opt);
  REQUIRE(rs.entries.size() == rp.entries.size());
  for (std::size_t i = 0; i < rs.entries.size(); ++i) {
    CHECK(rs.entries[i].n == rp.entries[i].n);
    CHECK(rs.entries[i].ratio == rp.entries[i].ratio);
  }
  CHECK(rs.fit.slope == rp.fit.slope);

  const auto corpus = default_corpus();
  const std::vector<CorpusMember> few(corpus.begin() + 28, corpus.begin() + 34);
  QuadratureConfig serial;
  serial.exec = Exec::serial;
  const BandReport bs = band_check(few, phi, serial), bp = band_check(few, phi);
  for (std::size_t i = 0; i < few.size(); ++i) {
    CHECK(bs.rows[i].member == bp.rows[i].member);
    CHECK(bs.rows[i].b == bp.rows[i].b);
    CHECK(bs.rows[i].g == bp.rows[i].g);
  }
}
