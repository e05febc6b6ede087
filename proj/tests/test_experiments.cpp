#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fbmc/experiments.hpp"
#include "fbmc/rng.hpp"

using namespace fbmc;

TEST_CASE("config JSON round trip and validation") {
    ExperimentConfig cfg;
    cfg.apply_quick();
    cfg.seed = 99;
    cfg.combiners = {CombinerKind::zf};
    const auto j = cfg.to_json();
    const auto back = ExperimentConfig::from_json(j);
    CHECK(back.M == cfg.M);
    CHECK(back.K == cfg.K);
    CHECK(back.seed == cfg.seed);
    CHECK(back.combiners.size() == 1);
    CHECK(back.combiners[0] == CombinerKind::zf);

    ExperimentConfig bad = cfg;
    bad.M = 7;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.N_list = {2};  // below K+1 with ZF requested
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.L_eq = 8;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("flat channels, ZF, no equalizer: classic (N-K)/noise") {
    const auto f = PrototypeFilter::phydyas(32, 4);
    std::vector<PdpModel> flat;
    for (int k = 0; k < 2; ++k) flat.push_back(PdpModel(arma::vec{1.0}));
    LinkSimulator sim(f, flat, 0, 8, 1, /*equalized=*/false);
    const double nv = 0.1;
    const auto est = sim.run_trials(CombinerKind::zf, 16, nv, 400, 5);
    const double expect_db = 10.0 * std::log10((16.0 - 2.0) / nv);
    CHECK(std::abs(est.sinr_db() - expect_db) < 0.25);
    CHECK(est.multiuser_interference < 1e-20);  // exact null at the bin
}

TEST_CASE("coefficient-level and waveform-level SINR agree (noise-convention oracle)") {
    // small reference config: M=32, K=2, N=4, 200 symbols
    const int M = 32, K = 2, N = 4, Nsym = 200, trials = 24;
    const auto f = PrototypeFilter::phydyas(M, 4);
    std::vector<PdpModel> pdps;
    for (int k = 0; k < K; ++k) pdps.push_back(PdpModel::exponential((k + 1) / 20.0, 6));
    const double nv = std::pow(10.0, -1.0);  // SNR 10 dB

    for (const bool equalized : {false, true}) {
        LinkSimulator sim(f, pdps, 0, M / 4, 9, equalized);
        for (auto kind : {CombinerKind::mrc, CombinerKind::zf}) {
            double coeff_sig = 0, coeff_den = 0, wave_sig = 0, wave_den = 0;
            for (int t = 0; t < trials; ++t) {
                const std::uint64_t ts = derive_seed(500 + (equalized ? 1 : 0), {(std::uint64_t)t});
                const auto c = sim.coefficient_trial(kind, N, nv, ts);
                const auto w = sim.waveform_trial(kind, N, nv, ts, Nsym);
                coeff_sig += c.signal;
                coeff_den += c.self_interference + c.multiuser_interference + c.noise;
                wave_sig += w.signal;
                wave_den += w.self_interference + w.multiuser_interference + w.noise;
            }
            const double diff =
                10.0 * std::log10((coeff_sig / coeff_den) / (wave_sig / wave_den));
            INFO("kind=", std::string(to_string(kind)), " equalized=", equalized,
                 " diff=", diff);
            CHECK(std::abs(diff) < 0.3);
        }
    }
}

TEST_CASE("receiver chains: full-rate and symbol-rate equalizers are equivalent") {
    const auto f = PrototypeFilter::phydyas(64, 4);
    std::vector<PdpModel> pdps = {PdpModel::exponential(0.05, 8), PdpModel::exponential(0.1, 8)};
    const auto cmp = compare_receiver_chains(f, pdps, CombinerKind::mrc, 4, 0.1, 13, 417, 120, 3);
    CHECK(cmp.max_rel_error < 1e-2);
    CHECK(std::abs(cmp.sinr_full_db - cmp.sinr_low_db) < 0.2);
}

TEST_CASE("ofdm baseline") {
    std::vector<PdpModel> pdps = {PdpModel::exponential(0.05, 8), PdpModel::exponential(0.1, 8)};
    SUBCASE("ZF reaches the flat-fading closed form for any PDP") {
        const double nv = 0.1;
        const auto est = ofdm_baseline(pdps, 64, 7, CombinerKind::zf, 16, nv, 0, 16, 600, 9);
        CHECK(std::abs(est.sinr_db() - 10.0 * std::log10(14.0 / nv)) < 0.25);
    }
    SUBCASE("CP shorter than the channel is rejected") {
        CHECK_THROWS_AS(ofdm_baseline(pdps, 64, 4, CombinerKind::zf, 16, 0.1, 0, 16, 10, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("standard error shrinks with the trial count") {
    const auto f = PrototypeFilter::phydyas(64, 4);
    std::vector<PdpModel> pdps = {PdpModel::exponential(0.05, 8), PdpModel::exponential(0.1, 8)};
    LinkSimulator sim(f, pdps, 0, 16, 9, true);
    const auto a = sim.run_trials(CombinerKind::mrc, 32, 0.1, 60, 11);
    const auto b = sim.run_trials(CombinerKind::mrc, 32, 0.1, 240, 11);
    CHECK(b.stderr_db < 0.7 * a.stderr_db);  // expect ~1/2
}

TEST_CASE("reproducibility: bit-identical CSV across runs and thread counts") {
    ExperimentConfig cfg;
    cfg.apply_quick();
    cfg.M = 64;
    cfg.L_h = 8;
    cfg.K = 2;
    cfg.N_list = {16};
    cfg.num_trials = 24;
    cfg.combiners = {CombinerKind::mrc, CombinerKind::zf};
    cfg.seed = 2718;

    const std::string a = run_theory_vs_sim(cfg).csv;
    const std::string b = run_theory_vs_sim(cfg).csv;
    CHECK(a == b);
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const std::string c = run_theory_vs_sim(cfg).csv;
    omp_set_num_threads(saved);
    CHECK(a == c);
#endif
    CHECK(a.rfind("N,combiner,equalizer,", 0) == 0);
}

TEST_CASE("saturation run produces the documented CSV schema") {
    ExperimentConfig cfg;
    cfg.apply_quick();
    cfg.M = 64;
    cfg.L_h = 8;
    cfg.K = 2;
    cfg.N_list = {16, 32};
    cfg.num_trials = 8;
    cfg.combiners = {CombinerKind::mrc};
    const auto rep = run_saturation(cfg);
    CHECK(rep.csv.rfind("N,combiner,sinr_db,saturation_bound_db\n", 0) == 0);
    // one line per (N, combiner) plus header
    CHECK(std::count(rep.csv.begin(), rep.csv.end(), '\n') == 3);
    CHECK(rep.json["rows"].size() == 2);
    CHECK(rep.json["seed"] == cfg.seed);
}
