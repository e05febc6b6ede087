#ifndef FBMC_THEORY_HPP
#define FBMC_THEORY_HPP

#include <armadillo>
#include <optional>
#include <vector>

#include "fbmc/channel.hpp"
#include "fbmc/combining.hpp"
#include "fbmc/equalizer.hpp"
#include "fbmc/prototype_filter.hpp"

namespace fbmc {

/// Equivalent symbol-rate channel g_{mm'}[n] between subcarriers m' and m.
struct EquivChannel {
    arma::cx_vec g;   // g[i] is the response at lag dn = dn_min + i
    int dn_min = 0;
    int m = 0, mp = 0;

    std::complex<double> at(int dn) const {
        const long i = dn - dn_min;
        if (i < 0 || i >= static_cast<long>(g.n_elem)) return {0.0, 0.0};
        return g[i];
    }
    int dn_max() const { return dn_min + static_cast<int>(g.n_elem) - 1; }
};

/// Asymptotic equivalent channel (f_{m'} conv p_{k,m} conv analysis)[nM/2].
/// equalized=true uses the deconvolution-built modified analysis filter, which
/// restores (f_{m'} conv conj(f_m)[-.]) up to the design residual.
EquivChannel equiv_channel_asymptotic(const PdpModel& pdp, const PrototypeFilter& filter, int m,
                                      int mp, bool equalized);

struct SinrValue {
    double signal_power = 0.0;
    double self_interference = 0.0;
    double multiuser_interference = 0.0;
    double noise_power = 0.0;

    double interference_plus_noise() const {
        return self_interference + multiuser_interference + noise_power;
    }
    double sinr_linear() const { return signal_power / interference_plus_noise(); }
    double sinr_db() const { return 10.0 * std::log10(sinr_linear()); }
};

/// Deterministic asymptotic saturation level: no noise or multiuser terms.
SinrValue saturation_sinr(const PdpModel& pdp, const PrototypeFilter& filter, int m);

/**
 * psi_{mm',nn'}: the deterministic part of the interference coefficient,
 * psi^H = e^{j(theta_{m',n'}-theta_{m,n})} e_{nn'}^T Ftilde_{k,m} F_{m'},
 * realized through the Toeplitz structure without materializing the matrices.
 * Coefficients follow as psi^H g with g the combined channel vector.
 */
struct PsiOperator {
    arma::cx_vec psi;  // length L_h column; coefficient = psi^H g
    int m = 0, mp = 0, dn = 0;
};

/// Throws std::out_of_range when the selector row L_f + dn*M/2 leaves the support.
PsiOperator build_psi(const PrototypeFilter& filter, const ModifiedAnalysisFilter& analysis,
                      int mp, int dn, int channel_length);

/// First/second order statistics of g_m^{k,k'} for MRC (W = H/N) and ZF.
struct GStats {
    arma::cx_vec mean;        // mu
    arma::cx_mat cov;         // Gamma
    arma::cx_mat pseudo_cov;  // K
    arma::mat real_cov;       // C, stacked [Re; Im] covariance (2L_h x 2L_h)
};

GStats g_stats(const std::vector<PdpModel>& pdps, CombinerKind kind, int m, int M, int k, int kp,
               int num_antennas);

/**
 * Precomputed psi table for one (pdps, filter, m, k); reusable across the
 * N and noise sweeps. equalized=false bypasses the PDP equalizer (psi built on
 * the plain analysis filter), in which case the closed forms reproduce the
 * saturation ratio as N grows.
 *
 * lowrate_for_noise supplies the deployed symbol-rate equalizer whose noise
 * bandwidth enters the noise term as sigma^2 * eta; null means eta = 1.
 */
class InterferenceTable {
  public:
    InterferenceTable(const std::vector<PdpModel>& pdps, const PrototypeFilter& filter,
                      int subcarrier, int terminal, bool equalized,
                      const LowRateEqualizer* lowrate_for_noise);

    SinrValue mrc_sinr(int num_antennas, double noise_var) const;
    SinrValue zf_sinr(int num_antennas, double noise_var) const;

    double eta() const { return eta_; }

  private:
    struct Entry {
        bool is_signal = false;
        double mean_re2 = 0.0;        // Re^2{psi^H p_{k,m}}
        arma::vec tr_d;               // per terminal: psi'^T D_{p_k'} psi' = 0.5 sum p|psi|^2
        double tr_p_k = 0.0;          // 0.5 Re{(psi^H p_{k,m})^2}
        arma::vec tr_pt;              // per terminal: 0.5 |psi^H p_{k',m}|^2
    };
    std::vector<Entry> entries_;
    int terminal_ = 0;
    int num_terminals_ = 0;
    double eta_ = 1.0;
};

/// Closed-form MRC SINR, generalized with the mean terms kept (see InterferenceTable).
SinrValue mrc_sinr_theory(const std::vector<PdpModel>& pdps, const PrototypeFilter& filter,
                          const LowRateEqualizer* equalizer, int m, int k, int num_antennas,
                          double noise_var, bool equalized = true);

/// Closed-form ZF SINR; requires num_antennas >= K+1.
SinrValue zf_sinr_theory(const std::vector<PdpModel>& pdps, const PrototypeFilter& filter,
                         const LowRateEqualizer* equalizer, int m, int k, int num_antennas,
                         double noise_var, bool equalized = true);

/// C_m^{k,k}(omega) = sum_i conj(W^{i,k}) H_{i,k}(omega); equalized divides by
/// P_{k,m}(omega). omega_grid holds absolute frequencies around subcarrier m.
arma::cx_vec flattening_response(const ChannelSet& ch, const Combiner& w, const PdpModel& pdp,
                                 int terminal, int num_subcarriers, const arma::vec& omega_grid,
                                 bool equalized);

/// Physical neighbour subcarriers {m-dm..m+dm} mod M, deduplicated, m first.
std::vector<int> neighbour_subcarriers(int M, int m, int dm_max);

/// Noise bandwidth of the deployed equalizer at subcarrier m:
/// eta = sum_{j,j'} c_j c_{j'} e^{j pi m (j-j')} q[(j-j') M/2].
double noise_bandwidth_factor(const LowRateEqualizer& eq, const PrototypeFilter& filter,
                              int subcarrier);

}  // namespace fbmc

#endif
