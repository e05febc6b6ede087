// fbmc-lab: FBMC/OQAM massive-MIMO uplink SINR experiments.
//
// Subcommands map to the standard experiment set: saturation (SINR ceiling vs
// antenna count), theory-vs-sim (closed forms vs Monte Carlo), snr-sweep (FBMC
// vs CP-OFDM baseline), spacing-sweep (SINR vs subcarrier spacing), flattening
// (equivalent channel response), selftest (quick invariant checks).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fbmc/experiments.hpp"
#include "fbmc/rng.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string csv_path;
    std::string json_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quick = false;
    int trials = 0;
    int threads = 0;
};

fbmc::ExperimentConfig load_config(const CommonOpts& opts, const std::string& experiment) {
    fbmc::ExperimentConfig cfg;
    if (experiment == "spacing-sweep") {
        cfg.snr_db_list = {0.0};
        cfg.N_list = {128};
        cfg.L_eq = 21;
    } else if (experiment == "snr-sweep") {
        cfg.N_list = {100};
    } else if (experiment == "flattening") {
        cfg.N_list = {16, 64, 256};
        cfg.snr_db_list = {10.0};
    } else if (experiment == "saturation") {
        cfg.N_list = {32, 64, 128, 256, 512, 1024, 2048};
        cfg.snr_db_list = {10.0};
    } else if (experiment == "theory-vs-sim") {
        cfg.N_list = {32, 64, 128, 256};
        cfg.snr_db_list = {10.0};
    }
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw std::invalid_argument("cannot open config file: " + opts.config_path);
        nlohmann::json j;
        in >> j;
        cfg = fbmc::ExperimentConfig::from_json(j);
    }
    if (opts.quick) cfg.apply_quick();
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.trials > 0) cfg.num_trials = opts.trials;
    cfg.experiment = experiment;
    cfg.validate();
    return cfg;
}

void write_report(const fbmc::RunReport& rep, const CommonOpts& opts,
                  const std::string& experiment) {
    const std::string csv_path = opts.csv_path.empty() ? experiment + ".csv" : opts.csv_path;
    const std::string json_path = opts.json_path.empty() ? experiment + ".json" : opts.json_path;
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + csv_path);
        out << rep.csv;
    }
    {
        std::ofstream out(json_path);
        if (!out) throw std::runtime_error("cannot write " + json_path);
        out << rep.json.dump(2) << '\n';
    }
    std::cout << rep.csv;
    std::cerr << "wrote " << csv_path << " and " << json_path << "\n";
}

int run_selftest(const CommonOpts& opts) {
    using namespace fbmc;
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    const PrototypeFilter filter = PrototypeFilter::phydyas(64, 4);
    check("phydyas nyquist deviation < 1e-3", filter.nyquist_deviation() < 1e-3);
    check("phydyas orthogonality budget < 2e-3", filter.ortho_deviation() < 2e-3);

    // round trip on a random grid
    SubstreamRng rng(opts.seed_set ? opts.seed : 1, {0x5e1fULL});
    arma::mat d(64, 12);
    for (auto& v : d) v = rng.uniform_pm1();
    const auto y = analyze(synthesize(OqamGrid{d}, filter), filter, 12);
    const double rec = arma::abs(arma::real(y.samples) - d).max();
    check("real-orthogonality round trip", rec <= filter.ortho_deviation() * arma::abs(d).max());

    // flat-channel ZF closed form
    const std::vector<PdpModel> flat = {PdpModel::exponential(0.0, 1),
                                        PdpModel::exponential(0.0, 1)};
    LinkSimulator sim(filter, flat, 0, 16, 1, false);
    const SinrEstimate est = sim.run_trials(CombinerKind::zf, 16, 0.1, 200, 7);
    const double expect = 10.0 * std::log10((16 - 2) / 0.1);
    check("flat-channel ZF == (N-K)/noise within 0.3 dB",
          std::abs(est.sinr_db() - expect) < 0.3);

    // mean-channel identity through the psi operator
    const PdpModel pdp = PdpModel::exponential(0.05, 8);
    const auto analysis = modified_analysis_filter(pdp, filter, 16);
    const PsiOperator psi = build_psi(filter, analysis, 16, 0, 8);
    const std::complex<double> ip = arma::cdot(psi.psi, pdp.modulated(16, 64));
    check("psi identity (signal point)", std::abs(ip - 1.0) < 1e-3);

    // reproducibility across thread counts
    ExperimentConfig cfg;
    cfg.apply_quick();
    cfg.M = 64;
    cfg.L_h = 8;
    cfg.num_trials = 20;
    cfg.N_list = {16};
    cfg.combiners = {CombinerKind::mrc};
    cfg.seed = opts.seed_set ? opts.seed : 1;
#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    const std::string csv1 = run_theory_vs_sim(cfg).csv;
#ifdef _OPENMP
    omp_set_num_threads(4);
#endif
    const std::string csv2 = run_theory_vs_sim(cfg).csv;
    check("bit-identical CSV across thread counts", csv1 == csv2);

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FBMC/OQAM massive-MIMO uplink SINR laboratory"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "JSON config file");
    app.add_option("--csv", opts.csv_path, "CSV output path (default <experiment>.csv)");
    app.add_option("--json", opts.json_path, "JSON report path (default <experiment>.json)");
    auto* seed_opt = app.add_option("--seed", opts.seed, "master seed (default 1)");
    app.add_flag("--quick", opts.quick, "desk-scale defaults (M=128, K=4, L_h=16, 200 trials)");
    app.add_option("--trials", opts.trials, "override trial count");
    app.add_option("--threads", opts.threads, "OpenMP thread count (0 = runtime default)");

    app.add_subcommand("saturation", "SINR ceiling vs antenna count, equalizer off");
    app.add_subcommand("theory-vs-sim", "closed-form SINR vs Monte Carlo, equalizer on");
    app.add_subcommand("snr-sweep", "FBMC vs CP-OFDM baseline across input SNR");
    app.add_subcommand("spacing-sweep", "SINR vs subcarrier spacing 1/M");
    app.add_subcommand("flattening", "equivalent channel response across the subcarrier band");
    app.add_subcommand("selftest", "quick invariant checks");
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad arguments are config errors
    }
    opts.seed_set = seed_opt->count() > 0;

#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        if (sub == "selftest") return run_selftest(opts);
        const fbmc::ExperimentConfig cfg = load_config(opts, sub);
        fbmc::RunReport rep;
        if (sub == "saturation")
            rep = fbmc::run_saturation(cfg);
        else if (sub == "theory-vs-sim")
            rep = fbmc::run_theory_vs_sim(cfg);
        else if (sub == "snr-sweep")
            rep = fbmc::run_snr_sweep(cfg);
        else if (sub == "spacing-sweep")
            rep = fbmc::run_spacing_sweep(cfg);
        else if (sub == "flattening")
            rep = fbmc::run_flattening(cfg);
        write_report(rep, opts, sub);
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
