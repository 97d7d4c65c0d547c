// Wall-clock comparison of the serial reference kernels against their
// OpenMP trial-parallel versions. Outputs are asserted identical before
// timing is reported, so a speedup can never come from a divergence.

#include <chrono>
#include <cstdio>

#include "edm/denseam.hpp"
#include "edm/experiments.hpp"
#include "edm/oscillator.hpp"
#include "edm/parallel.hpp"

using namespace edm;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double time_run(F&& f) {
  auto t0 = Clock::now();
  f();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-26s serial %7.3fs | parallel %7.3fs | speedup %5.2fx | identical %s\n", name,
              serial, parallel, serial / parallel, identical ? "yes" : "NO");
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", max_threads());

  {
    double rs = 0, rp = 0;
    Rng a(1), b(1);
    double ts = time_run([&] {
      rs = denseam::estimate_bit_error(150, 40, denseam::Separation::power(2), 20000, a,
                                       Exec::Serial);
    });
    double tp = time_run([&] {
      rp = denseam::estimate_bit_error(150, 40, denseam::Separation::power(2), 20000, b,
                                       Exec::Parallel);
    });
    report("bit-error monte carlo", ts, tp, rs == rp);
  }

  {
    Rng graph_rng(5);
    oscillator::IsingInstance inst = oscillator::erdos_renyi_instance(14, 0.5, graph_rng);
    auto schedule = oscillator::linear_ramp_schedule(30.0, 30, 1.0);
    flows::IntegratorConfig cfg;
    cfg.dt = 0.05;
    cfg.equilibrium_tol = 1e-7;
    oscillator::OimResult rs, rp;
    Rng a(2), b(2);
    double ts = time_run([&] { rs = oscillator::oim_solve(inst, schedule, 64, a, cfg, Exec::Serial); });
    double tp = time_run([&] { rp = oscillator::oim_solve(inst, schedule, 64, b, cfg, Exec::Parallel); });
    report("oim restarts", ts, tp, rs.h == rp.h && rs.sigma == rp.sigma);
  }

  {
    std::vector<int> ks{10, 20, 30, 40, 50};
    experiments::CrossoverResult rs, rp;
    double ts = time_run(
        [&] { rs = experiments::bit_error_crossover(200, ks, 2, 200, 0.01, 9, Exec::Serial); });
    double tp = time_run(
        [&] { rp = experiments::bit_error_crossover(200, ks, 2, 200, 0.01, 9, Exec::Parallel); });
    bool same = rs.rates == rp.rates;
    report("capacity crossover", ts, tp, same);
  }
  return 0;
}
