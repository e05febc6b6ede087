#ifndef FBMC_CHANNEL_HPP
#define FBMC_CHANNEL_HPP

#include <armadillo>
#include <complex>
#include <cstdint>
#include <vector>

namespace fbmc {

/**
 * Normalized power delay profile p[l]: nonnegative taps, unit sum.
 */
class PdpModel {
  public:
    explicit PdpModel(arma::vec taps);

    /// p[l] = e^{-alpha l} / sum, l = 0..L_h-1.
    static PdpModel exponential(double alpha, int length);

    const arma::vec& taps() const { return taps_; }
    int length() const { return static_cast<int>(taps_.n_elem); }

    /// p_{k,m}[l] = p[l] e^{j 2 pi l m / M}
    arma::cx_vec modulated(int subcarrier, int num_subcarriers) const;

    /// P(omega) = sum_l p[l] e^{-j omega l}
    std::complex<double> dtft(double omega) const;

    /// P[m]: M-point DFT bin, P[m] = sum_l p[l] e^{-j 2 pi m l / M}
    std::complex<double> dft_bin(int m, int num_subcarriers) const;

  private:
    arma::vec taps_;
};

/**
 * One realization of the multiuser channel: taps(i, k, l) = h_{i,k}[l] for
 * antenna i, terminal k, delay l, plus the receiver noise variance.
 */
struct ChannelSet {
    arma::cx_cube taps;  // N x K x L_h
    double noise_var = 0.0;

    int num_antennas() const { return static_cast<int>(taps.n_rows); }
    int num_terminals() const { return static_cast<int>(taps.n_cols); }
    int channel_length() const { return static_cast<int>(taps.n_slices); }

    /// h_{i,k} as a length-L_h vector.
    arma::cx_vec impulse_response(int antenna, int terminal) const;
};

/// Channel matrix at the centre of subcarrier m: H_m^{i,k} = sum_l h_{i,k}[l] e^{-j2pi ml/M}.
struct FreqResponse {
    arma::cx_mat coeffs;  // N x K
    int subcarrier = 0;
};

/// i.i.d. CN(0, p_k[l]) taps, one substream per (antenna, terminal); deterministic in seed.
ChannelSet draw_channels(const std::vector<PdpModel>& pdps, int num_antennas, std::uint64_t seed,
                         double noise_var = 0.0);

FreqResponse freq_response(const ChannelSet& ch, int subcarrier, int num_subcarriers);

/// y_i = sum_k x_k conv h_{i,k} + nu_i, nu i.i.d. CN(0, noise_var);
/// output length = input length + L_h - 1.
std::vector<arma::cx_vec> apply_uplink(const std::vector<arma::cx_vec>& signals,
                                       const ChannelSet& ch, std::uint64_t seed);

/// \hat p_k[l] = (1/N) sum_i |h_{i,k}[l]|^2, renormalized to unit sum.
PdpModel estimate_pdp(const ChannelSet& ch, int terminal);

}  // namespace fbmc

#endif
