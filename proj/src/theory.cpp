#include "fbmc/theory.hpp"

#include <set>
#include <stdexcept>

#include "fbmc/dsp.hpp"

namespace fbmc {

namespace {

// theta_{m',n'} - theta_{m,n} for dn = n - n'; physical subcarrier indices.
std::complex<double> phase_delta(int m, int mp, int dn) {
    return std::polar(1.0, 0.5 * arma::datum::pi * static_cast<double>((mp - m) - dn));
}

// Cascade synth-filter * channel * analysis-filter as causal arrays; true lag t
// maps to index t + L_f - 1 regardless of whether the analysis taps are the
// plain filter (length L_f) or the deconvolution filter (length L_f - L_h + 1,
// implicit L_h - 1 advance).
arma::cx_vec cascade(const arma::cx_vec& synth, const arma::cx_vec& channel,
                     const arma::cx_vec& analysis_causal) {
    arma::cx_vec x = arma::conv(synth, channel);
    arma::cx_vec y = arma::conv(x, arma::conj(arma::reverse(analysis_causal)));
    return y;
}

}  // namespace

std::vector<int> neighbour_subcarriers(int M, int m, int dm_max) {
    std::vector<int> out;
    std::set<int> seen;
    for (int dm = 0; dm <= dm_max; ++dm) {
        for (int s : {dm, -dm}) {
            const int mp = ((m + s) % M + M) % M;
            if (seen.insert(mp).second) out.push_back(mp);
            if (dm == 0) break;
        }
    }
    return out;
}

EquivChannel equiv_channel_asymptotic(const PdpModel& pdp, const PrototypeFilter& filter, int m,
                                      int mp, bool equalized) {
    const int M = filter.num_subcarriers();
    const int L = filter.length();
    const int step = M / 2;
    const arma::cx_vec p_m = pdp.modulated(m, M);
    const arma::cx_vec analysis =
        equalized ? modified_analysis_filter(pdp, filter, m).taps : filter.modulated(m);
    const arma::cx_vec z = cascade(filter.modulated(mp), p_m, analysis);

    EquivChannel out;
    out.m = m;
    out.mp = mp;
    const long n_idx = static_cast<long>(z.n_elem);
    const int dn_lo = -static_cast<int>((L - 1) / step);
    const int dn_hi = static_cast<int>((n_idx - 1 - (L - 1)) / step);
    out.dn_min = dn_lo;
    out.g.set_size(dn_hi - dn_lo + 1);
    for (int dn = dn_lo; dn <= dn_hi; ++dn)
        out.g[dn - dn_lo] = z[static_cast<long>(dn) * step + L - 1];
    return out;
}

SinrValue saturation_sinr(const PdpModel& pdp, const PrototypeFilter& filter, int m) {
    const int M = filter.num_subcarriers();
    SinrValue v;
    for (int mp : neighbour_subcarriers(M, m, 2)) {
        const EquivChannel ec = equiv_channel_asymptotic(pdp, filter, m, mp, false);
        for (int dn = ec.dn_min; dn <= ec.dn_max(); ++dn) {
            const double r = std::real(ec.at(dn) * phase_delta(m, mp, dn));
            if (mp == m && dn == 0)
                v.signal_power = r * r;
            else
                v.self_interference += r * r;
        }
    }
    return v;
}

PsiOperator build_psi(const PrototypeFilter& filter, const ModifiedAnalysisFilter& analysis,
                      int mp, int dn, int channel_length) {
    const int L = filter.length();
    const int M = filter.num_subcarriers();
    const int Lh = channel_length;
    const int Lft = static_cast<int>(analysis.taps.n_elem);
    const int ncols = L + Lh - 1;
    const int nrows = Lft + ncols - 1;
    const int row = (L - 1) + dn * (M / 2);
    if (row < 0 || row >= nrows)
        throw std::out_of_range("build_psi: selector row outside the cascade support");

    const arma::cx_vec fmp = filter.modulated(mp);
    const int m = analysis.subcarrier;
    PsiOperator out;
    out.m = m;
    out.mp = mp;
    out.dn = dn;
    out.psi.set_size(Lh);
    // psi^H[j] = e^{j d_theta} sum_c conj(ftilde[Lft-1-row+c]) f_{m'}[c - j]
    const std::complex<double> ph = phase_delta(m, mp, dn);
    for (int j = 0; j < Lh; ++j) {
        std::complex<double> acc(0.0, 0.0);
        const int c_lo = std::max({j, row - Lft + 1});
        const int c_hi = std::min({ncols - 1, row, j + L - 1});
        for (int c = c_lo; c <= c_hi; ++c)
            acc += std::conj(analysis.taps[Lft - 1 - row + c]) * fmp[c - j];
        out.psi[j] = std::conj(ph * acc);
    }
    return out;
}

GStats g_stats(const std::vector<PdpModel>& pdps, CombinerKind kind, int m, int M, int k, int kp,
               int num_antennas) {
    const int K = static_cast<int>(pdps.size());
    const int Lh = pdps[0].length();
    const arma::cx_vec p_km = pdps[k].modulated(m, M);
    const arma::cx_vec p_kpm = pdps[kp].modulated(m, M);
    const arma::vec& p_kp = pdps[kp].taps();
    const double delta = (k == kp) ? 1.0 : 0.0;

    GStats st;
    st.mean = delta * p_km;
    switch (kind) {
        case CombinerKind::mrc:
            st.cov = arma::diagmat(arma::conv_to<arma::cx_vec>::from(p_kp)) / num_antennas;
            st.pseudo_cov = delta * (p_km * p_km.st()) / num_antennas;
            break;
        case CombinerKind::zf: {
            if (num_antennas < K + 1)
                throw std::domain_error("g_stats: ZF statistics need N >= K+1");
            st.cov = (arma::diagmat(arma::conv_to<arma::cx_vec>::from(p_kp)) -
                      p_kpm * p_kpm.t()) /
                     (num_antennas - K);
            st.pseudo_cov.zeros(Lh, Lh);
            break;
        }
        case CombinerKind::mmse:
            throw std::invalid_argument("g_stats: no closed form for MMSE");
    }

    // [Re; Im] stacking: C = 0.5 [[Re{G+K}, Im{K-G}], [Im{G+K}, Re{G-K}]]
    st.real_cov.set_size(2 * Lh, 2 * Lh);
    st.real_cov.submat(0, 0, Lh - 1, Lh - 1) = 0.5 * arma::real(st.cov + st.pseudo_cov);
    st.real_cov.submat(0, Lh, Lh - 1, 2 * Lh - 1) = 0.5 * arma::imag(st.pseudo_cov - st.cov);
    st.real_cov.submat(Lh, 0, 2 * Lh - 1, Lh - 1) = 0.5 * arma::imag(st.cov + st.pseudo_cov);
    st.real_cov.submat(Lh, Lh, 2 * Lh - 1, 2 * Lh - 1) = 0.5 * arma::real(st.cov - st.pseudo_cov);
    return st;
}

double noise_bandwidth_factor(const LowRateEqualizer& eq, const PrototypeFilter& filter,
                              int subcarrier) {
    const int h = eq.half_width();
    const int step = filter.num_subcarriers() / 2;
    double eta = 0.0;
    for (int j = -h; j <= h; ++j)
        for (int jp = -h; jp <= h; ++jp)
            eta += eq.taps[j + h] * eq.taps[jp + h] *
                   std::cos(arma::datum::pi * subcarrier * (j - jp)) *
                   filter.q_at(static_cast<long>(j - jp) * step);
    return eta;
}

InterferenceTable::InterferenceTable(const std::vector<PdpModel>& pdps,
                                     const PrototypeFilter& filter, int subcarrier, int terminal,
                                     bool equalized, const LowRateEqualizer* lowrate_for_noise) {
    const int M = filter.num_subcarriers();
    const int L = filter.length();
    const int step = M / 2;
    const int K = static_cast<int>(pdps.size());
    const int Lh = pdps[terminal].length();
    terminal_ = terminal;
    num_terminals_ = K;
    eta_ = lowrate_for_noise ? noise_bandwidth_factor(*lowrate_for_noise, filter, subcarrier) : 1.0;

    const ModifiedAnalysisFilter analysis =
        equalized ? modified_analysis_filter(pdps[terminal], filter, subcarrier, terminal)
                  : identity_analysis_filter(filter, subcarrier);
    const int Lft = static_cast<int>(analysis.taps.n_elem);
    const int nrows = Lft + (L + Lh - 1) - 1;
    const int dn_lo = -static_cast<int>((L - 1) / step);
    const int dn_hi = static_cast<int>((nrows - 1 - (L - 1)) / step);

    std::vector<arma::cx_vec> p_mods(K);
    for (int kp = 0; kp < K; ++kp) p_mods[kp] = pdps[kp].modulated(subcarrier, M);

    for (int mp : neighbour_subcarriers(M, subcarrier, 2)) {
        for (int dn = dn_lo; dn <= dn_hi; ++dn) {
            const PsiOperator psi = build_psi(filter, analysis, mp, dn, Lh);
            Entry e;
            e.is_signal = (mp == subcarrier && dn == 0);
            e.tr_d.set_size(K);
            e.tr_pt.set_size(K);
            for (int kp = 0; kp < K; ++kp) {
                double trd = 0.0;
                for (int l = 0; l < Lh; ++l)
                    trd += pdps[kp].taps()[l] * std::norm(psi.psi[l]);
                e.tr_d[kp] = 0.5 * trd;
                const std::complex<double> ip = arma::cdot(psi.psi, p_mods[kp]);  // psi^H p
                e.tr_pt[kp] = 0.5 * std::norm(ip);
                if (kp == terminal) {
                    e.mean_re2 = std::real(ip) * std::real(ip);
                    e.tr_p_k = 0.5 * std::real(ip * ip);
                }
            }
            entries_.push_back(std::move(e));
        }
    }
}

SinrValue InterferenceTable::mrc_sinr(int num_antennas, double noise_var) const {
    const double N = num_antennas;
    SinrValue v;
    v.noise_power = noise_var * eta_;
    for (const auto& e : entries_) {
        const double self_fluct = e.tr_d[terminal_] + e.tr_p_k;
        if (e.is_signal) {
            v.signal_power = N * e.mean_re2 + self_fluct;
        } else {
            v.self_interference += self_fluct + N * e.mean_re2;
        }
        for (int kp = 0; kp < num_terminals_; ++kp)
            if (kp != terminal_) v.multiuser_interference += e.tr_d[kp];
    }
    return v;
}

SinrValue InterferenceTable::zf_sinr(int num_antennas, double noise_var) const {
    if (num_antennas <= num_terminals_)
        throw std::domain_error("zf_sinr: requires N >= K+1");
    const double NK = num_antennas - num_terminals_;
    SinrValue v;
    v.noise_power = noise_var * eta_;
    for (const auto& e : entries_) {
        if (e.is_signal) {
            v.signal_power = NK * e.mean_re2;
            continue;
        }
        v.self_interference += e.tr_d[terminal_] - e.tr_pt[terminal_] + NK * e.mean_re2;
        for (int kp = 0; kp < num_terminals_; ++kp)
            if (kp != terminal_) v.multiuser_interference += e.tr_d[kp] - e.tr_pt[kp];
    }
    return v;
}

SinrValue mrc_sinr_theory(const std::vector<PdpModel>& pdps, const PrototypeFilter& filter,
                          const LowRateEqualizer* equalizer, int m, int k, int num_antennas,
                          double noise_var, bool equalized) {
    InterferenceTable table(pdps, filter, m, k, equalized, equalizer);
    return table.mrc_sinr(num_antennas, noise_var);
}

SinrValue zf_sinr_theory(const std::vector<PdpModel>& pdps, const PrototypeFilter& filter,
                         const LowRateEqualizer* equalizer, int m, int k, int num_antennas,
                         double noise_var, bool equalized) {
    InterferenceTable table(pdps, filter, m, k, equalized, equalizer);
    return table.zf_sinr(num_antennas, noise_var);
}

arma::cx_vec flattening_response(const ChannelSet& ch, const Combiner& w, const PdpModel& pdp,
                                 int terminal, int num_subcarriers, const arma::vec& omega_grid,
                                 bool equalized) {
    const int N = ch.num_antennas();
    const int m = w.subcarrier;
    arma::cx_vec out(omega_grid.n_elem, arma::fill::zeros);
    for (int i = 0; i < N; ++i) {
        const arma::cx_vec h = ch.impulse_response(i, terminal);
        const std::complex<double> wc = std::conj(w.weights(i, terminal));
        for (arma::uword g = 0; g < omega_grid.n_elem; ++g)
            out[g] += wc * dtft(h, omega_grid[g]);
    }
    if (equalized) {
        const double wm = 2.0 * arma::datum::pi * m / num_subcarriers;
        for (arma::uword g = 0; g < omega_grid.n_elem; ++g)
            out[g] /= pdp.dtft(omega_grid[g] - wm);
    }
    return out;
}

}  // namespace fbmc
