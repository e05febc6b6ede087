#ifndef FBMC_EQUALIZER_HPP
#define FBMC_EQUALIZER_HPP

#include <armadillo>
#include <iosfwd>

#include "fbmc/channel.hpp"
#include "fbmc/prototype_filter.hpp"

namespace fbmc {

/**
 * Post-combining symbol-rate PDP equalizer phi~_k[n], applied as the
 * kernel phi~[n] e^{j pi m n} on the combined, not-yet-phase-compensated stream).
 *
 * Real taps, odd length, indexed n = -h..h (taps[h] is the centre tap), so
 * applying it introduces no group delay.
 *
 * Designed by weighted least squares against 1/P_k(2 omega / M) over the
 * decimated band, weighted by the analysis-filter cascade energy
 * |F(2 omega / M)|^4 (only the band that survives the filtering matters).
 * inband_residual is max |Phi~ P - 1| over the core band where
 * |F| >= 0.5 |F|_max; weighted_rms_residual is the cascade-weighted rms.
 */
struct LowRateEqualizer {
    arma::vec taps;
    int terminal = 0;
    double inband_residual = 0.0;
    double weighted_rms_residual = 0.0;

    int half_width() const { return (static_cast<int>(taps.n_elem) - 1) / 2; }
};

/// Per-antenna full-rate PDP equalizer phi_{k,m}[l], taps indexed l = -h..h.
struct FullRateEqualizer {
    arma::cx_vec taps;
    int terminal = 0;
    int subcarrier = 0;
    double inband_residual = 0.0;
    double weighted_rms_residual = 0.0;

    int half_width() const { return (static_cast<int>(taps.n_elem) - 1) / 2; }
};

/**
 * Combined analysis filter f~_{k,m} with f_m = f~_{k,m} conv conj(p_{k,m})[-.],
 * built by least-squares deconvolution. Stored causal with length L_f - L_h + 1;
 * the implicit L_h - 1 sample advance is absorbed by the psi-operator selector.
 */
struct ModifiedAnalysisFilter {
    arma::cx_vec taps;
    int terminal = 0;
    int subcarrier = 0;
    double deconv_residual = 0.0;  // ||f~ conv conj(p)[-.]  -  f_m||_2
};

LowRateEqualizer design_lowrate(const PdpModel& pdp, const PrototypeFilter& filter, int num_taps,
                                int terminal = 0);

/// Throws numerical_error if the in-band design acceptance (residual < 1e-3) fails.
FullRateEqualizer design_fullrate(const PdpModel& pdp, const PrototypeFilter& filter,
                                  int subcarrier, int num_taps, int terminal = 0);

ModifiedAnalysisFilter modified_analysis_filter(const PdpModel& pdp, const PrototypeFilter& filter,
                                                int subcarrier, int terminal = 0);

/// Bypass variant: f~ = f_m itself (no equalization), for saturation analysis.
ModifiedAnalysisFilter identity_analysis_filter(const PrototypeFilter& filter, int subcarrier);

/// output[n] = sum_j taps[j] e^{j pi m j} stream[n - j]; same length as input,
/// zero-padded edges, no group delay (centered taps).
arma::cx_vec equalize_stream(const arma::cx_vec& stream, const LowRateEqualizer& eq,
                             int subcarrier);

/// Decimated-sinc cross-check oracle: phi~[n] = (phi conv sinc(2l/M)) decimated by M/2,
/// with a truncated sinc of half-width sinc_halfwidth*M samples (raised-cosine
/// taper over the outer 10%). Requires a baseband (m = 0) full-rate equalizer.
LowRateEqualizer lowrate_from_fullrate(const FullRateEqualizer& eq, const PrototypeFilter& filter,
                                       int sinc_halfwidth);

/// Tap exchange as JSON arrays of [re, im] pairs (regression fixtures).
void save_taps_json(const LowRateEqualizer& eq, std::ostream& os);
LowRateEqualizer load_taps_json(std::istream& is);

}  // namespace fbmc

#endif
