#include "fbmc/channel.hpp"

#include <stdexcept>

#include "fbmc/rng.hpp"

namespace fbmc {

PdpModel::PdpModel(arma::vec taps) : taps_(std::move(taps)) {
    if (taps_.n_elem == 0) throw std::invalid_argument("PdpModel: empty tap vector");
    if (taps_.min() < 0.0) throw std::invalid_argument("PdpModel: taps must be nonnegative");
    const double s = arma::accu(taps_);
    if (s <= 0.0) throw std::invalid_argument("PdpModel: taps must not all be zero");
    taps_ /= s;
}

PdpModel PdpModel::exponential(double alpha, int length) {
    if (length < 1) throw std::invalid_argument("exp_pdp: length must be >= 1");
    if (alpha < 0.0) throw std::invalid_argument("exp_pdp: decay factor must be >= 0");
    arma::vec p(length);
    for (int l = 0; l < length; ++l) p[l] = std::exp(-alpha * l);
    return PdpModel(std::move(p));
}

arma::cx_vec PdpModel::modulated(int subcarrier, int num_subcarriers) const {
    arma::cx_vec pm(taps_.n_elem);
    const double w = 2.0 * arma::datum::pi * subcarrier / num_subcarriers;
    for (arma::uword l = 0; l < taps_.n_elem; ++l)
        pm[l] = taps_[l] * std::polar(1.0, w * static_cast<double>(l));
    return pm;
}

std::complex<double> PdpModel::dtft(double omega) const {
    std::complex<double> acc(0.0, 0.0);
    for (arma::uword l = 0; l < taps_.n_elem; ++l)
        acc += taps_[l] * std::polar(1.0, -omega * static_cast<double>(l));
    return acc;
}

std::complex<double> PdpModel::dft_bin(int m, int num_subcarriers) const {
    return dtft(2.0 * arma::datum::pi * m / num_subcarriers);
}

arma::cx_vec ChannelSet::impulse_response(int antenna, int terminal) const {
    arma::cx_vec h(taps.n_slices);
    for (arma::uword l = 0; l < taps.n_slices; ++l) h[l] = taps(antenna, terminal, l);
    return h;
}

ChannelSet draw_channels(const std::vector<PdpModel>& pdps, int num_antennas, std::uint64_t seed,
                         double noise_var) {
    if (pdps.empty()) throw std::invalid_argument("draw_channels: need at least one PDP");
    if (num_antennas < 1) throw std::invalid_argument("draw_channels: need at least one antenna");
    const int K = static_cast<int>(pdps.size());
    const int Lh = pdps[0].length();
    for (const auto& p : pdps)
        if (p.length() != Lh) throw std::invalid_argument("draw_channels: PDP length mismatch");

    ChannelSet ch;
    ch.taps.set_size(num_antennas, K, Lh);
    ch.noise_var = noise_var;
#pragma omp parallel for schedule(static) collapse(2)
    for (int i = 0; i < num_antennas; ++i) {
        for (int k = 0; k < K; ++k) {
            SubstreamRng rng(seed, {0x6368616eULL, static_cast<std::uint64_t>(i),
                                    static_cast<std::uint64_t>(k)});
            for (int l = 0; l < Lh; ++l)
                ch.taps(i, k, l) = rng.cgauss(pdps[k].taps()[l]);
        }
    }
    return ch;
}

FreqResponse freq_response(const ChannelSet& ch, int subcarrier, int num_subcarriers) {
    const int N = ch.num_antennas();
    const int K = ch.num_terminals();
    const int Lh = ch.channel_length();
    arma::cx_vec twiddle(Lh);
    const double w = 2.0 * arma::datum::pi * subcarrier / num_subcarriers;
    for (int l = 0; l < Lh; ++l) twiddle[l] = std::polar(1.0, -w * l);

    arma::cx_mat H(N, K, arma::fill::zeros);
    for (int l = 0; l < Lh; ++l)
        H += ch.taps.slice(l) * twiddle[l];
    return FreqResponse{std::move(H), subcarrier};
}

std::vector<arma::cx_vec> apply_uplink(const std::vector<arma::cx_vec>& signals,
                                       const ChannelSet& ch, std::uint64_t seed) {
    const int K = ch.num_terminals();
    if (static_cast<int>(signals.size()) != K)
        throw std::invalid_argument("apply_uplink: signal count must equal terminal count");
    const arma::uword len = signals[0].n_elem;
    for (const auto& s : signals)
        if (s.n_elem != len) throw std::invalid_argument("apply_uplink: signal length mismatch");

    const int N = ch.num_antennas();
    const arma::uword out_len = len + ch.channel_length() - 1;
    std::vector<arma::cx_vec> out(N);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i) {
        arma::cx_vec y(out_len, arma::fill::zeros);
        for (int k = 0; k < K; ++k)
            y += arma::conv(signals[k], ch.impulse_response(i, k));
        if (ch.noise_var > 0.0) {
            SubstreamRng rng(seed, {0x6e6f697365ULL, static_cast<std::uint64_t>(i)});
            for (arma::uword l = 0; l < out_len; ++l) y[l] += rng.cgauss(ch.noise_var);
        }
        out[i] = std::move(y);
    }
    return out;
}

PdpModel estimate_pdp(const ChannelSet& ch, int terminal) {
    const int N = ch.num_antennas();
    const int Lh = ch.channel_length();
    arma::vec p(Lh, arma::fill::zeros);
    for (int i = 0; i < N; ++i)
        for (int l = 0; l < Lh; ++l)
            p[l] += std::norm(ch.taps(i, terminal, l));
    return PdpModel(p / N);
}

}  // namespace fbmc
