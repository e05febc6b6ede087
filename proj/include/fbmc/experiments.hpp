#ifndef FBMC_EXPERIMENTS_HPP
#define FBMC_EXPERIMENTS_HPP

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fbmc/channel.hpp"
#include "fbmc/combining.hpp"
#include "fbmc/equalizer.hpp"
#include "fbmc/filter_bank.hpp"
#include "fbmc/prototype_filter.hpp"
#include "fbmc/theory.hpp"

namespace fbmc {

struct ExperimentConfig {
    int M = 512;
    int kappa = 4;
    int K = 10;
    int L_h = 50;
    std::vector<int> N_list = {32, 64, 128, 256, 512, 1024};
    std::vector<double> snr_db_list = {-10, -5, 0, 5, 10, 15, 20, 25, 30, 35, 40};
    std::vector<int> M_list = {};  // spacing sweep; empty -> derived from L_h
    double alpha_step = 0.05;      // alpha_k = (k+1) * alpha_step
    int L_eq = 9;
    int num_trials = 2000;
    int num_data_symbols = 200;
    std::uint64_t seed = 1;
    std::vector<CombinerKind> combiners = {CombinerKind::mrc, CombinerKind::zf,
                                           CombinerKind::mmse};
    bool equalizer = true;
    int target_terminal = 0;
    int target_subcarrier = -1;  // -1 -> M/4
    std::string experiment;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Desk-scale defaults: M=128, K=4, L_h=16, 200 trials, N up to 256.
    void apply_quick();
    void validate() const;

    int target_m(int M_val) const { return target_subcarrier >= 0 ? target_subcarrier : M_val / 4; }
    std::vector<PdpModel> make_pdps() const;
};

/// Per-(k, m) averaged linear power decomposition with trial bookkeeping.
struct SinrEstimate {
    double signal = 0.0, self_interference = 0.0, multiuser_interference = 0.0, noise = 0.0;
    double mean_trial_db = 0.0;  // per-trial dB mean, reported for transparency
    double stderr_db = 0.0;      // standard error of the per-trial dB values
    int trials = 0;
    int zf_retries = 0;

    double sinr_linear() const {
        return signal / (self_interference + multiuser_interference + noise);
    }
    double sinr_db() const { return 10.0 * std::log10(sinr_linear()); }
};

/// One channel realization's power decomposition at the target (k, m).
struct TrialPowers {
    double signal = 0.0, self_interference = 0.0, multiuser_interference = 0.0, noise = 0.0;
    int zf_retries = 0;
};

/**
 * Coefficient-level Monte Carlo link for one (filter, PDPs, target) setup.
 * Per-realization interference coefficients are computed by direct convolution
 * of the combined channel with the filter cascade (independent of the psi-based
 * closed forms), then the symbol-rate equalizer, phase compensation, and real
 * part, following the post-combining receiver chain.
 */
class LinkSimulator {
  public:
    LinkSimulator(const PrototypeFilter& filter, std::vector<PdpModel> pdps, int target_terminal,
                  int target_subcarrier, int L_eq, bool equalized);

    /// Draws one ChannelSet (substreams from trial_seed) and measures the powers.
    TrialPowers coefficient_trial(CombinerKind kind, int num_antennas, double noise_var,
                                  std::uint64_t trial_seed) const;

    /// Full synthesize -> uplink -> analyze -> combine -> equalize chain with
    /// known data; the waveform-level oracle for the coefficient path.
    TrialPowers waveform_trial(CombinerKind kind, int num_antennas, double noise_var,
                               std::uint64_t trial_seed, int num_symbols) const;

    /// Trials in parallel with per-trial substreams; deterministic reduction.
    SinrEstimate run_trials(CombinerKind kind, int num_antennas, double noise_var, int num_trials,
                            std::uint64_t seed) const;

    const PrototypeFilter& filter() const { return filter_; }
    const std::vector<PdpModel>& pdps() const { return pdps_; }
    const LowRateEqualizer* equalizer() const {
        return equalized_ ? &equalizers_[target_terminal_] : nullptr;
    }
    bool equalized() const { return equalized_; }
    int target_terminal() const { return target_terminal_; }
    int target_subcarrier() const { return m_; }

  private:
    arma::cx_mat combined_channels(const ChannelSet& ch, const arma::cx_vec& w) const;
    TrialPowers coefficients_from_channels(const arma::cx_mat& g, const arma::cx_vec& w,
                                           double noise_var) const;

    PrototypeFilter filter_;
    std::vector<PdpModel> pdps_;
    std::vector<LowRateEqualizer> equalizers_;
    int target_terminal_ = 0;
    int m_ = 0;
    bool equalized_ = true;
    double eta_ = 1.0;
    std::vector<int> neighbours_;
    std::vector<arma::cx_vec> synth_filters_;  // f_{m'} for each neighbour
    arma::cx_vec analysis_conj_rev_;           // conj(reverse(f_m))
};

/// Equivalence check between the per-antenna full-rate equalizer chain and the
/// post-combining symbol-rate chain on one realization.
struct ChainComparison {
    double max_rel_error = 0.0;  // per-symbol |full - low| / rms|full|
    double sinr_full_db = 0.0;
    double sinr_low_db = 0.0;
};

ChainComparison compare_receiver_chains(const PrototypeFilter& filter,
                                        const std::vector<PdpModel>& pdps, CombinerKind kind,
                                        int num_antennas, double noise_var, int L_eq, int L_eq_hi,
                                        int num_symbols, std::uint64_t seed);

/// CP-OFDM Monte Carlo baseline: per-subcarrier flat model after CP removal.
SinrEstimate ofdm_baseline(const std::vector<PdpModel>& pdps, int M, int cp_len,
                           CombinerKind kind, int num_antennas, double noise_var,
                           int target_terminal, int target_subcarrier, int num_trials,
                           std::uint64_t seed);

struct RunReport {
    std::string csv;      // deterministic: bit-identical for identical config+seed
    nlohmann::json json;  // config echo, structured rows, seed, wall-clock
};

RunReport run_saturation(const ExperimentConfig& cfg);
RunReport run_theory_vs_sim(const ExperimentConfig& cfg);
RunReport run_snr_sweep(const ExperimentConfig& cfg);
RunReport run_spacing_sweep(const ExperimentConfig& cfg);
RunReport run_flattening(const ExperimentConfig& cfg);

/// Formats a double with six significant digits (CSV contract).
std::string format_field(double v);

}  // namespace fbmc

#endif
