// Timing comparison between the serial reference kernels and the OpenMP paths,
// plus the Monte Carlo trial loop at one and many threads.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fbmc/experiments.hpp"
#include "fbmc/rng.hpp"

using clk = std::chrono::steady_clock;

namespace {

double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clk::now();
        fn();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

}  // namespace

int main() {
    using namespace fbmc;
#ifdef _OPENMP
    std::printf("OpenMP: %d thread(s) on %d processor(s)\n", omp_get_max_threads(),
                omp_get_num_procs());
#else
    std::printf("OpenMP disabled\n");
#endif
    const int M = 256, Nsym = 48;
    const PrototypeFilter filter = PrototypeFilter::phydyas(M, 4);

    SubstreamRng rng(33, {0xbe9cULL});
    arma::mat d(M, Nsym);
    for (auto& v : d) v = rng.uniform_pm1();
    const OqamGrid grid{d};

    const double t_synth_s = time_best_of(3, [&] { synthesize(grid, filter, Execution::serial); });
    const double t_synth_p = time_best_of(3, [&] { synthesize(grid, filter, Execution::parallel); });
    const arma::cx_vec x = synthesize(grid, filter);
    const double t_ana_s =
        time_best_of(3, [&] { analyze(x, filter, Nsym, true, Execution::serial); });
    const double t_ana_p =
        time_best_of(3, [&] { analyze(x, filter, Nsym, true, Execution::parallel); });

    const arma::cx_vec xs = synthesize(grid, filter, Execution::serial);
    const arma::cx_mat ys = analyze(x, filter, Nsym, true, Execution::serial).samples;
    const arma::cx_mat yp = analyze(x, filter, Nsym, true, Execution::parallel).samples;
    const bool synth_match = arma::approx_equal(xs, x, "absdiff", 0.0);
    const bool ana_match = arma::approx_equal(ys, yp, "absdiff", 0.0);

    std::printf("kernel            serial [ms]  parallel [ms]  speedup  bit-identical\n");
    std::printf("synthesize %14.2f %14.2f %8.2f  %s\n", 1e3 * t_synth_s, 1e3 * t_synth_p,
                t_synth_s / t_synth_p, synth_match ? "yes" : "NO");
    std::printf("analyze    %14.2f %14.2f %8.2f  %s\n", 1e3 * t_ana_s, 1e3 * t_ana_p,
                t_ana_s / t_ana_p, ana_match ? "yes" : "NO");

    // Monte Carlo trial loop
    std::vector<PdpModel> pdps;
    for (int k = 0; k < 4; ++k) pdps.push_back(PdpModel::exponential((k + 1) / 20.0, 16));
    const PrototypeFilter f128 = PrototypeFilter::phydyas(128, 4);
    LinkSimulator sim(f128, pdps, 0, 32, 9, true);
    const int trials = 64;

#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    const auto t0 = clk::now();
    const SinrEstimate e1 = sim.run_trials(CombinerKind::zf, 128, 0.1, trials, 99);
    const double t_tr_s = seconds_since(t0);
#ifdef _OPENMP
    omp_set_num_threads(max_threads);
#endif
    const auto t1 = clk::now();
    const SinrEstimate eN = sim.run_trials(CombinerKind::zf, 128, 0.1, trials, 99);
    const double t_tr_p = seconds_since(t1);
    std::printf("mc trials  %14.2f %14.2f %8.2f  %s\n", 1e3 * t_tr_s, 1e3 * t_tr_p,
                t_tr_s / t_tr_p, e1.sinr_db() == eN.sinr_db() ? "yes" : "NO");
    return 0;
}
