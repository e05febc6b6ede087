#include "fbmc/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fbmc/rng.hpp"

namespace fbmc {

namespace {

constexpr std::uint64_t kTagChannel = 0x6368;
constexpr std::uint64_t kTagNoise = 0x6e6f;
constexpr std::uint64_t kTagData = 0xda7a;
constexpr std::uint64_t kTagTrial = 0x7472;
constexpr std::uint64_t kTagPoint = 0x7074;
constexpr int kMaxZfRetries = 8;

std::complex<double> phase_delta(int m, int mp, int dn) {
    return std::polar(1.0, 0.5 * arma::datum::pi * static_cast<double>((mp - m) - dn));
}

double db(double x) { return 10.0 * std::log10(x); }

}  // namespace

std::string format_field(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// config

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.M = j.value("M", c.M);
    c.kappa = j.value("kappa", c.kappa);
    c.K = j.value("K", c.K);
    c.L_h = j.value("L_h", c.L_h);
    if (j.contains("N_list")) c.N_list = j.at("N_list").get<std::vector<int>>();
    if (j.contains("snr_db_list")) c.snr_db_list = j.at("snr_db_list").get<std::vector<double>>();
    if (j.contains("M_list")) c.M_list = j.at("M_list").get<std::vector<int>>();
    c.alpha_step = j.value("alpha_step", c.alpha_step);
    c.L_eq = j.value("L_eq", c.L_eq);
    c.num_trials = j.value("num_trials", c.num_trials);
    c.num_data_symbols = j.value("num_data_symbols", c.num_data_symbols);
    c.seed = j.value("seed", c.seed);
    if (j.contains("combiners")) {
        c.combiners.clear();
        for (const auto& s : j.at("combiners")) c.combiners.push_back(combiner_from_string(s));
    }
    c.equalizer = j.value("equalizer", c.equalizer);
    c.target_terminal = j.value("target_terminal", c.target_terminal);
    c.target_subcarrier = j.value("target_subcarrier", c.target_subcarrier);
    c.experiment = j.value("experiment", c.experiment);
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["M"] = M;
    j["kappa"] = kappa;
    j["K"] = K;
    j["L_h"] = L_h;
    j["N_list"] = N_list;
    j["snr_db_list"] = snr_db_list;
    j["M_list"] = M_list;
    j["alpha_step"] = alpha_step;
    j["L_eq"] = L_eq;
    j["num_trials"] = num_trials;
    j["num_data_symbols"] = num_data_symbols;
    j["seed"] = seed;
    auto& arr = j["combiners"] = nlohmann::json::array();
    for (auto k : combiners) arr.push_back(to_string(k));
    j["equalizer"] = equalizer;
    j["target_terminal"] = target_terminal;
    j["target_subcarrier"] = target_subcarrier;
    j["experiment"] = experiment;
    return j;
}

void ExperimentConfig::apply_quick() {
    M = 128;
    K = 4;
    L_h = 16;
    num_trials = 200;
    num_data_symbols = 100;
}

void ExperimentConfig::validate() const {
    if (M < 4 || M % 2 != 0) throw std::invalid_argument("config: M must be even and >= 4");
    if (kappa < 2 || kappa > 4) throw std::invalid_argument("config: kappa must be in {2,3,4}");
    if (K < 1) throw std::invalid_argument("config: K must be >= 1");
    if (L_h < 1) throw std::invalid_argument("config: L_h must be >= 1");
    if (L_eq < 1 || L_eq % 2 == 0) throw std::invalid_argument("config: L_eq must be odd");
    if (num_trials < 1) throw std::invalid_argument("config: num_trials must be >= 1");
    if (N_list.empty()) throw std::invalid_argument("config: N_list must not be empty");
    if (target_terminal < 0 || target_terminal >= K)
        throw std::invalid_argument("config: target_terminal out of range");
    const bool has_zf = std::find(combiners.begin(), combiners.end(), CombinerKind::zf) !=
                        combiners.end();
    if (has_zf)
        for (int n : N_list)
            if (n < K + 1) throw std::invalid_argument("config: ZF needs N >= K+1");
    for (int n : N_list)
        if (n < 1) throw std::invalid_argument("config: N values must be positive");
    if (alpha_step <= 0) throw std::invalid_argument("config: alpha_step must be positive");
}

std::vector<PdpModel> ExperimentConfig::make_pdps() const {
    std::vector<PdpModel> out;
    out.reserve(K);
    for (int k = 0; k < K; ++k) out.push_back(PdpModel::exponential((k + 1) * alpha_step, L_h));
    return out;
}

// ---------------------------------------------------------------------------
// LinkSimulator

LinkSimulator::LinkSimulator(const PrototypeFilter& filter, std::vector<PdpModel> pdps,
                             int target_terminal, int target_subcarrier, int L_eq, bool equalized)
    : filter_(filter),
      pdps_(std::move(pdps)),
      target_terminal_(target_terminal),
      m_(target_subcarrier),
      equalized_(equalized) {
    if (equalized_) {
        for (int k = 0; k < static_cast<int>(pdps_.size()); ++k)
            equalizers_.push_back(design_lowrate(pdps_[k], filter_, L_eq, k));
        eta_ = noise_bandwidth_factor(equalizers_[target_terminal_], filter_, m_);
    }
    neighbours_ = neighbour_subcarriers(filter_.num_subcarriers(), m_, 2);
    for (int mp : neighbours_) synth_filters_.push_back(filter_.modulated(mp));
    analysis_conj_rev_ = arma::conj(arma::reverse(filter_.modulated(m_)));
}

arma::cx_mat LinkSimulator::combined_channels(const ChannelSet& ch, const arma::cx_vec& w) const {
    const int K = ch.num_terminals();
    const int Lh = ch.channel_length();
    arma::cx_mat g(K, Lh);
    for (int l = 0; l < Lh; ++l)
        g.col(l) = (w.t() * ch.taps.slice(l)).st();  // sum_i conj(w_i) h_{i,k'}[l]
    return g;
}

TrialPowers LinkSimulator::coefficients_from_channels(const arma::cx_mat& g, const arma::cx_vec& w,
                                                      double noise_var) const {
    const int L = filter_.length();
    const int M = filter_.num_subcarriers();
    const int step = M / 2;
    const int K = static_cast<int>(g.n_rows);
    const int h = equalized_ ? equalizers_[target_terminal_].half_width() : 0;

    arma::cx_vec kernel;
    if (equalized_) {
        const arma::vec& taps = equalizers_[target_terminal_].taps;
        kernel.set_size(2 * h + 1);
        for (int j = -h; j <= h; ++j)
            kernel[j + h] = taps[j + h] * std::polar(1.0, arma::datum::pi * m_ * j);
    }

    TrialPowers out;
    for (int kp = 0; kp < K; ++kp) {
        const arma::cx_vec gk = g.row(kp).st();
        for (std::size_t im = 0; im < neighbours_.size(); ++im) {
            const int mp = neighbours_[im];
            // analysis stage evaluated only at the decimated lattice: the full
            // cascade z = conv(conv(f_{m'}, g), conj(rev f_m)) is needed at
            // ~2 kappa + L_eq points, not along its whole support
            const arma::cx_vec c1 = arma::conv(synth_filters_[im], gk);
            const long c1len = static_cast<long>(c1.n_elem);
            const long zlen = c1len + L - 1;
            const int dn_lo = -static_cast<int>((L - 1) / step);
            const int dn_hi = static_cast<int>((zlen - 1 - (L - 1)) / step);
            arma::cx_vec raw(dn_hi - dn_lo + 1, arma::fill::zeros);
            for (int dn = dn_lo; dn <= dn_hi; ++dn) {
                const long idx = static_cast<long>(dn) * step + L - 1;
                const long v0 = std::max<long>(0, idx - L + 1);
                const long v1 = std::min(c1len - 1, idx);
                std::complex<double> acc(0.0, 0.0);
                for (long v = v0; v <= v1; ++v) acc += c1[v] * analysis_conj_rev_[idx - v];
                raw[dn - dn_lo] = acc;
            }
            auto raw_at = [&](int dn) -> std::complex<double> {
                if (dn < dn_lo || dn > dn_hi) return {0.0, 0.0};
                return raw[dn - dn_lo];
            };
            for (int dn = dn_lo - h; dn <= dn_hi + h; ++dn) {
                std::complex<double> val;
                if (equalized_) {
                    for (int j = -h; j <= h; ++j) val += kernel[j + h] * raw_at(dn - j);
                } else {
                    val = raw_at(dn);
                }
                const double r = std::real(val * phase_delta(m_, mp, dn));
                if (kp == target_terminal_ && mp == m_ && dn == 0)
                    out.signal = r * r;
                else if (kp == target_terminal_)
                    out.self_interference += r * r;
                else
                    out.multiuser_interference += r * r;
            }
        }
    }
    out.noise = noise_var * std::real(arma::cdot(w, w)) * (equalized_ ? eta_ : 1.0);
    return out;
}

TrialPowers LinkSimulator::coefficient_trial(CombinerKind kind, int num_antennas, double noise_var,
                                             std::uint64_t trial_seed) const {
    const int M = filter_.num_subcarriers();
    int retries = 0;
    while (true) {
        // first attempt shares the channel substream with waveform_trial so the
        // two measurement paths see identical realizations
        const std::uint64_t ch_seed =
            retries == 0 ? derive_seed(trial_seed, {kTagChannel})
                         : derive_seed(trial_seed, {kTagChannel, static_cast<std::uint64_t>(retries)});
        const ChannelSet ch = draw_channels(pdps_, num_antennas, ch_seed, noise_var);
        const FreqResponse H = freq_response(ch, m_, M);
        try {
            const Combiner comb = build_combiner(H, kind, noise_var);
            const arma::cx_vec w = comb.column(target_terminal_);
            TrialPowers p = coefficients_from_channels(combined_channels(ch, w), w, noise_var);
            p.zf_retries = retries;
            return p;
        } catch (const numerical_error&) {
            if (++retries > kMaxZfRetries) throw;
        }
    }
}

TrialPowers LinkSimulator::waveform_trial(CombinerKind kind, int num_antennas, double noise_var,
                                          std::uint64_t trial_seed, int num_symbols) const {
    const int M = filter_.num_subcarriers();
    const int K = static_cast<int>(pdps_.size());
    const int k = target_terminal_;
    const double amp = 1.0 / std::sqrt(2.0);  // E[d^2] = 1/2 so that E|x|^2 = 1

    std::vector<arma::cx_vec> tx(K);
    std::vector<arma::mat> data(K);
    for (int kk = 0; kk < K; ++kk) {
        SubstreamRng rng(trial_seed, {kTagData, static_cast<std::uint64_t>(kk)});
        arma::mat d(M, num_symbols);
        for (int n = 0; n < num_symbols; ++n)
            for (int m = 0; m < M; ++m) d(m, n) = (rng.uniform() < 0.5 ? -amp : amp);
        data[kk] = d;
        tx[kk] = synthesize(OqamGrid{d}, filter_);
    }

    const ChannelSet ch =
        draw_channels(pdps_, num_antennas, derive_seed(trial_seed, {kTagChannel}), noise_var);
    const auto rx = apply_uplink(tx, ch, derive_seed(trial_seed, {kTagNoise}));

    std::vector<ComplexGrid> grids(num_antennas);
    for (int i = 0; i < num_antennas; ++i)
        grids[i] = analyze(rx[i], filter_, num_symbols, /*compensate_phase=*/false);

    const FreqResponse H = freq_response(ch, m_, M);
    const Combiner comb = build_combiner(H, kind, noise_var);
    const arma::cx_mat streams = combine(comb, grids);

    arma::cx_vec stream = streams.row(k).st();
    if (equalized_) stream = equalize_stream(stream, equalizers_[k], m_);

    const int h = equalized_ ? equalizers_[k].half_width() : 0;
    const int edge = 2 * filter_.overlap_factor() + h + 2;
    if (num_symbols <= 2 * edge)
        throw std::invalid_argument("waveform_trial: too few symbols for the interior window");

    double num = 0.0, den = 0.0;
    arma::vec dhat(num_symbols);
    for (int n = 0; n < num_symbols; ++n) {
        const double theta = 0.5 * arma::datum::pi * (m_ + n);
        dhat[n] = std::real(stream[n] * std::polar(1.0, -theta));
    }
    for (int n = edge; n < num_symbols - edge; ++n) {
        num += dhat[n] * data[k](m_, n);
        den += data[k](m_, n) * data[k](m_, n);
    }
    const double gain = num / den;
    double err = 0.0;
    int cnt = 0;
    for (int n = edge; n < num_symbols - edge; ++n) {
        const double e = dhat[n] - gain * data[k](m_, n);
        err += e * e;
        ++cnt;
    }
    TrialPowers p;
    p.signal = gain * gain * (den / cnt);
    p.self_interference = err / cnt;  // interference + noise, not separable at waveform level
    return p;
}

SinrEstimate LinkSimulator::run_trials(CombinerKind kind, int num_antennas, double noise_var,
                                       int num_trials, std::uint64_t seed) const {
    std::vector<TrialPowers> slots(num_trials);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < num_trials; ++t)
        slots[t] = coefficient_trial(kind, num_antennas, noise_var,
                                     derive_seed(seed, {kTagTrial, static_cast<std::uint64_t>(t)}));

    SinrEstimate est;
    est.trials = num_trials;
    double sum_db = 0.0, sum_db2 = 0.0;
    for (const auto& p : slots) {
        est.signal += p.signal;
        est.self_interference += p.self_interference;
        est.multiuser_interference += p.multiuser_interference;
        est.noise += p.noise;
        est.zf_retries += p.zf_retries;
        const double d = db(p.signal / (p.self_interference + p.multiuser_interference + p.noise));
        sum_db += d;
        sum_db2 += d * d;
    }
    est.signal /= num_trials;
    est.self_interference /= num_trials;
    est.multiuser_interference /= num_trials;
    est.noise /= num_trials;
    est.mean_trial_db = sum_db / num_trials;
    const double var = std::max(0.0, sum_db2 / num_trials - est.mean_trial_db * est.mean_trial_db);
    est.stderr_db = std::sqrt(var / std::max(1, num_trials - 1));
    return est;
}

// ---------------------------------------------------------------------------
// receiver chain comparison (full-rate vs symbol-rate equalizer placement)

ChainComparison compare_receiver_chains(const PrototypeFilter& filter,
                                        const std::vector<PdpModel>& pdps, CombinerKind kind,
                                        int num_antennas, double noise_var, int L_eq, int L_eq_hi,
                                        int num_symbols, std::uint64_t seed) {
    const int M = filter.num_subcarriers();
    const int L = filter.length();
    const int step = M / 2;
    const int K = static_cast<int>(pdps.size());
    const int k = 0;
    const int m = M / 4;
    const double amp = 1.0 / std::sqrt(2.0);

    std::vector<arma::cx_vec> tx(K);
    std::vector<arma::mat> data(K);
    for (int kk = 0; kk < K; ++kk) {
        SubstreamRng rng(seed, {kTagData, static_cast<std::uint64_t>(kk)});
        arma::mat d(M, num_symbols);
        for (int n = 0; n < num_symbols; ++n)
            for (int mm = 0; mm < M; ++mm) d(mm, n) = (rng.uniform() < 0.5 ? -amp : amp);
        data[kk] = d;
        tx[kk] = synthesize(OqamGrid{d}, filter);
    }
    const ChannelSet ch =
        draw_channels(pdps, num_antennas, derive_seed(seed, {kTagChannel}), noise_var);
    const auto rx = apply_uplink(tx, ch, derive_seed(seed, {kTagNoise}));

    const FreqResponse H = freq_response(ch, m, M);
    const Combiner comb = build_combiner(H, kind, noise_var);
    const arma::cx_vec w = comb.column(k);

    // symbol-rate chain: equalize after analysis and combining
    std::vector<ComplexGrid> grids(num_antennas);
    for (int i = 0; i < num_antennas; ++i)
        grids[i] = analyze(rx[i], filter, num_symbols, /*compensate_phase=*/false);
    const arma::cx_mat streams = combine(comb, grids);
    const LowRateEqualizer low = design_lowrate(pdps[k], filter, L_eq, k);
    arma::cx_vec z_low = equalize_stream(streams.row(k).st(), low, m);

    // full-rate chain: matched filter + per-terminal
    // full-rate equalizer before decimation; combining commutes with filtering.
    const FullRateEqualizer full = design_fullrate(pdps[k], filter, m, L_eq_hi, k);
    const arma::cx_vec fm_rev = arma::conj(arma::reverse(filter.modulated(m)));
    arma::cx_vec s;
    for (int i = 0; i < num_antennas; ++i) {
        const arma::cx_vec u = arma::conv(rx[i], fm_rev);
        if (i == 0)
            s = std::conj(w[0]) * u;
        else
            s += std::conj(w[i]) * u;
    }
    const arma::cx_vec e = arma::conv(s, full.taps);
    const int h_hi = full.half_width();
    arma::cx_vec z_full(num_symbols);
    for (int n = 0; n < num_symbols; ++n)
        z_full[n] = e[static_cast<long>(n) * step + (L - 1) + h_hi];

    // compare post-phase-compensation complex symbols on the interior
    const int edge = 2 * filter.overlap_factor() + low.half_width() + 2;
    ChainComparison out;
    double rms = 0.0;
    int cnt = 0;
    for (int n = edge; n < num_symbols - edge; ++n) {
        rms += std::norm(z_full[n]);
        ++cnt;
    }
    rms = std::sqrt(rms / cnt);
    arma::vec dhat_full(num_symbols), dhat_low(num_symbols);
    for (int n = 0; n < num_symbols; ++n) {
        const std::complex<double> ph = std::polar(1.0, -0.5 * arma::datum::pi * (m + n));
        dhat_full[n] = std::real(z_full[n] * ph);
        dhat_low[n] = std::real(z_low[n] * ph);
        if (n >= edge && n < num_symbols - edge)
            out.max_rel_error =
                std::max(out.max_rel_error, std::abs(z_full[n] - z_low[n]) / rms);
    }

    auto ls_sinr = [&](const arma::vec& dhat) {
        double num = 0.0, den = 0.0;
        for (int n = edge; n < num_symbols - edge; ++n) {
            num += dhat[n] * data[k](m, n);
            den += data[k](m, n) * data[k](m, n);
        }
        const double gain = num / den;
        double err = 0.0;
        int c2 = 0;
        for (int n = edge; n < num_symbols - edge; ++n) {
            const double ee = dhat[n] - gain * data[k](m, n);
            err += ee * ee;
            ++c2;
        }
        return db(gain * gain * (den / c2) / (err / c2));
    };
    out.sinr_full_db = ls_sinr(dhat_full);
    out.sinr_low_db = ls_sinr(dhat_low);
    return out;
}

// ---------------------------------------------------------------------------
// OFDM baseline

SinrEstimate ofdm_baseline(const std::vector<PdpModel>& pdps, int M, int cp_len, CombinerKind kind,
                           int num_antennas, double noise_var, int target_terminal,
                           int target_subcarrier, int num_trials, std::uint64_t seed) {
    const int Lh = pdps[0].length();
    if (cp_len < Lh - 1)
        throw std::invalid_argument("ofdm_baseline: CP must cover the channel (cp_len >= L_h - 1)");
    const int K = static_cast<int>(pdps.size());
    std::vector<TrialPowers> slots(num_trials);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < num_trials; ++t) {
        const std::uint64_t ts = derive_seed(seed, {kTagTrial, static_cast<std::uint64_t>(t)});
        const ChannelSet ch =
            draw_channels(pdps, num_antennas, derive_seed(ts, {kTagChannel}), noise_var);
        const FreqResponse H = freq_response(ch, target_subcarrier, M);
        const Combiner comb = build_combiner(H, kind, noise_var);
        const arma::cx_vec w = comb.column(target_terminal);
        TrialPowers p;
        for (int kp = 0; kp < K; ++kp) {
            const std::complex<double> gkp = arma::cdot(w, H.coeffs.col(kp));
            if (kp == target_terminal)
                p.signal = std::norm(gkp);
            else
                p.multiuser_interference += std::norm(gkp);
        }
        p.noise = noise_var * std::real(arma::cdot(w, w));
        slots[t] = p;
    }
    SinrEstimate est;
    est.trials = num_trials;
    double sum_db = 0.0, sum_db2 = 0.0;
    for (const auto& p : slots) {
        est.signal += p.signal;
        est.multiuser_interference += p.multiuser_interference;
        est.noise += p.noise;
        const double d = db(p.signal / (p.multiuser_interference + p.noise));
        sum_db += d;
        sum_db2 += d * d;
    }
    est.signal /= num_trials;
    est.multiuser_interference /= num_trials;
    est.noise /= num_trials;
    est.mean_trial_db = sum_db / num_trials;
    const double var = std::max(0.0, sum_db2 / num_trials - est.mean_trial_db * est.mean_trial_db);
    est.stderr_db = std::sqrt(var / std::max(1, num_trials - 1));
    return est;
}

// ---------------------------------------------------------------------------
// experiment runners

namespace {

nlohmann::json estimate_json(const SinrEstimate& e) {
    nlohmann::json j;
    j["sinr_db"] = e.sinr_db();
    j["signal"] = e.signal;
    j["self_interference"] = e.self_interference;
    j["multiuser_interference"] = e.multiuser_interference;
    j["noise"] = e.noise;
    j["mean_trial_db"] = e.mean_trial_db;
    j["stderr_db"] = e.stderr_db;
    j["trials"] = e.trials;
    j["zf_retries"] = e.zf_retries;
    return j;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::uint64_t point_seed(const ExperimentConfig& cfg, int i, int j) {
    return derive_seed(cfg.seed, {kTagPoint, static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(j)});
}

}  // namespace

RunReport run_saturation(const ExperimentConfig& cfg) {
    cfg.validate();
    Stopwatch sw;
    const PrototypeFilter filter = PrototypeFilter::phydyas(cfg.M, cfg.kappa);
    const auto pdps = cfg.make_pdps();
    const int m = cfg.target_m(cfg.M);
    const int k = cfg.target_terminal;
    LinkSimulator sim(filter, pdps, k, m, cfg.L_eq, /*equalized=*/false);
    const double bound_db = saturation_sinr(pdps[k], filter, m).sinr_db();

    std::ostringstream csv;
    csv << "N,combiner,sinr_db,saturation_bound_db\n";
    nlohmann::json rows = nlohmann::json::array();
    const double snr = cfg.snr_db_list.front();
    const double nv = std::pow(10.0, -snr / 10.0);
    for (std::size_t in = 0; in < cfg.N_list.size(); ++in) {
        for (std::size_t ic = 0; ic < cfg.combiners.size(); ++ic) {
            const int N = cfg.N_list[in];
            const CombinerKind kind = cfg.combiners[ic];
            const SinrEstimate est =
                sim.run_trials(kind, N, nv, cfg.num_trials,
                               point_seed(cfg, static_cast<int>(in), static_cast<int>(ic)));
            csv << N << ',' << to_string(kind) << ',' << format_field(est.sinr_db()) << ','
                << format_field(bound_db) << '\n';
            nlohmann::json r = estimate_json(est);
            r["N"] = N;
            r["combiner"] = to_string(kind);
            r["snr_db"] = snr;
            r["saturation_bound_db"] = bound_db;
            rows.push_back(std::move(r));
        }
    }
    RunReport rep;
    rep.csv = csv.str();
    rep.json["experiment"] = "saturation";
    rep.json["config"] = cfg.to_json();
    rep.json["seed"] = cfg.seed;
    rep.json["saturation_bound_db"] = bound_db;
    rep.json["rows"] = std::move(rows);
    rep.json["wall_clock_sec"] = sw.seconds();
    return rep;
}

RunReport run_theory_vs_sim(const ExperimentConfig& cfg) {
    cfg.validate();
    Stopwatch sw;
    const PrototypeFilter filter = PrototypeFilter::phydyas(cfg.M, cfg.kappa);
    const auto pdps = cfg.make_pdps();
    const int m = cfg.target_m(cfg.M);
    const int k = cfg.target_terminal;
    LinkSimulator sim(filter, pdps, k, m, cfg.L_eq, cfg.equalizer);
    const InterferenceTable table(pdps, filter, m, k, cfg.equalizer, sim.equalizer());

    std::ostringstream csv;
    csv << "N,combiner,equalizer,sim_sinr_db,sim_stderr_db,theory_sinr_db\n";
    nlohmann::json rows = nlohmann::json::array();
    const double nv = std::pow(10.0, -cfg.snr_db_list.front() / 10.0);
    for (std::size_t in = 0; in < cfg.N_list.size(); ++in) {
        for (std::size_t ic = 0; ic < cfg.combiners.size(); ++ic) {
            const int N = cfg.N_list[in];
            const CombinerKind kind = cfg.combiners[ic];
            const SinrEstimate est =
                sim.run_trials(kind, N, nv, cfg.num_trials,
                               point_seed(cfg, static_cast<int>(in), static_cast<int>(ic)));
            std::string theory_field;
            nlohmann::json r = estimate_json(est);
            if (kind == CombinerKind::mrc) {
                const double t = table.mrc_sinr(N, nv).sinr_db();
                theory_field = format_field(t);
                r["theory_sinr_db"] = t;
            } else if (kind == CombinerKind::zf) {
                const double t = table.zf_sinr(N, nv).sinr_db();
                theory_field = format_field(t);
                r["theory_sinr_db"] = t;
            }
            csv << N << ',' << to_string(kind) << ',' << (cfg.equalizer ? "on" : "off") << ','
                << format_field(est.sinr_db()) << ',' << format_field(est.stderr_db) << ','
                << theory_field << '\n';
            r["N"] = N;
            r["combiner"] = to_string(kind);
            rows.push_back(std::move(r));
        }
    }
    RunReport rep;
    rep.csv = csv.str();
    rep.json["experiment"] = "theory_vs_sim";
    rep.json["config"] = cfg.to_json();
    rep.json["seed"] = cfg.seed;
    rep.json["rows"] = std::move(rows);
    rep.json["wall_clock_sec"] = sw.seconds();
    return rep;
}

RunReport run_snr_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    Stopwatch sw;
    const PrototypeFilter filter = PrototypeFilter::phydyas(cfg.M, cfg.kappa);
    const auto pdps = cfg.make_pdps();
    const int m = cfg.target_m(cfg.M);
    const int k = cfg.target_terminal;
    const int N = cfg.N_list.front();
    LinkSimulator sim(filter, pdps, k, m, cfg.L_eq, cfg.equalizer);
    const InterferenceTable table(pdps, filter, m, k, cfg.equalizer, sim.equalizer());

    std::ostringstream csv;
    csv << "snr_db,system,combiner,sinr_db,theory_sinr_db\n";
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t is = 0; is < cfg.snr_db_list.size(); ++is) {
        const double snr = cfg.snr_db_list[is];
        const double nv = std::pow(10.0, -snr / 10.0);
        for (std::size_t ic = 0; ic < cfg.combiners.size(); ++ic) {
            const CombinerKind kind = cfg.combiners[ic];
            const SinrEstimate est =
                sim.run_trials(kind, N, nv, cfg.num_trials,
                               point_seed(cfg, static_cast<int>(is), static_cast<int>(ic)));
            std::string theory_field;
            nlohmann::json r = estimate_json(est);
            if (kind == CombinerKind::mrc) {
                const double t = table.mrc_sinr(N, nv).sinr_db();
                theory_field = format_field(t);
                r["theory_sinr_db"] = t;
            } else if (kind == CombinerKind::zf) {
                const double t = table.zf_sinr(N, nv).sinr_db();
                theory_field = format_field(t);
                r["theory_sinr_db"] = t;
            }
            csv << format_field(snr) << ",fbmc," << to_string(kind) << ','
                << format_field(est.sinr_db()) << ',' << theory_field << '\n';
            r["snr_db"] = snr;
            r["system"] = "fbmc";
            r["combiner"] = to_string(kind);
            rows.push_back(std::move(r));

            if (kind == CombinerKind::mmse) continue;  // baseline covers MRC and ZF
            const SinrEstimate ofdm = ofdm_baseline(
                pdps, cfg.M, cfg.L_h - 1, kind, N, nv, k, m, cfg.num_trials,
                derive_seed(point_seed(cfg, static_cast<int>(is), static_cast<int>(ic)),
                            {0x0fd3ULL}));
            csv << format_field(snr) << ",ofdm," << to_string(kind) << ','
                << format_field(ofdm.sinr_db()) << ",\n";
            nlohmann::json r2 = estimate_json(ofdm);
            r2["snr_db"] = snr;
            r2["system"] = "ofdm";
            r2["combiner"] = to_string(kind);
            rows.push_back(std::move(r2));
        }
    }
    RunReport rep;
    rep.csv = csv.str();
    rep.json["experiment"] = "snr_sweep";
    rep.json["config"] = cfg.to_json();
    rep.json["seed"] = cfg.seed;
    rep.json["N"] = N;
    rep.json["rows"] = std::move(rows);
    rep.json["wall_clock_sec"] = sw.seconds();
    return rep;
}

RunReport run_spacing_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    Stopwatch sw;
    std::vector<int> M_list = cfg.M_list;
    if (M_list.empty()) M_list = {20 * cfg.L_h, 10 * cfg.L_h, 5 * cfg.L_h, 2 * cfg.L_h};
    const int N = cfg.N_list.front();
    const double snr = cfg.snr_db_list.front();
    const double nv = std::pow(10.0, -snr / 10.0);
    const auto pdps = cfg.make_pdps();
    const int k = cfg.target_terminal;

    std::ostringstream csv;
    csv << "M,delta_f,combiner,sinr_db,theory_sinr_db\n";
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t im = 0; im < M_list.size(); ++im) {
        const int M = M_list[im];
        if (M % 2 != 0 || M < 4) throw std::invalid_argument("spacing sweep: invalid M value");
        const PrototypeFilter filter = PrototypeFilter::phydyas(M, cfg.kappa);
        const int m = cfg.target_m(M);
        LinkSimulator sim(filter, pdps, k, m, cfg.L_eq, cfg.equalizer);
        const InterferenceTable table(pdps, filter, m, k, cfg.equalizer, sim.equalizer());
        for (std::size_t ic = 0; ic < cfg.combiners.size(); ++ic) {
            const CombinerKind kind = cfg.combiners[ic];
            const SinrEstimate est =
                sim.run_trials(kind, N, nv, cfg.num_trials,
                               point_seed(cfg, static_cast<int>(im), static_cast<int>(ic)));
            std::string theory_field;
            nlohmann::json r = estimate_json(est);
            if (kind == CombinerKind::mrc) {
                const double t = table.mrc_sinr(N, nv).sinr_db();
                theory_field = format_field(t);
                r["theory_sinr_db"] = t;
            } else if (kind == CombinerKind::zf) {
                const double t = table.zf_sinr(N, nv).sinr_db();
                theory_field = format_field(t);
                r["theory_sinr_db"] = t;
            }
            csv << M << ',' << format_field(1.0 / M) << ',' << to_string(kind) << ','
                << format_field(est.sinr_db()) << ',' << theory_field << '\n';
            r["M"] = M;
            r["delta_f"] = 1.0 / M;
            r["combiner"] = to_string(kind);
            rows.push_back(std::move(r));
        }
    }
    RunReport rep;
    rep.csv = csv.str();
    rep.json["experiment"] = "spacing_sweep";
    rep.json["config"] = cfg.to_json();
    rep.json["seed"] = cfg.seed;
    rep.json["N"] = N;
    rep.json["snr_db"] = snr;
    rep.json["rows"] = std::move(rows);
    rep.json["wall_clock_sec"] = sw.seconds();
    return rep;
}

RunReport run_flattening(const ExperimentConfig& cfg) {
    cfg.validate();
    Stopwatch sw;
    const PrototypeFilter filter = PrototypeFilter::phydyas(cfg.M, cfg.kappa);
    const auto pdps = cfg.make_pdps();
    const int m = cfg.target_m(cfg.M);
    const int k = cfg.target_terminal;
    const int grid_pts = 129;
    const double wm = 2.0 * arma::datum::pi * m / cfg.M;
    const arma::vec omega =
        arma::linspace(wm - 2.0 * arma::datum::pi / cfg.M, wm + 2.0 * arma::datum::pi / cfg.M,
                       grid_pts);
    const int realizations = std::min(cfg.num_trials, 31);
    const double nv = std::pow(10.0, -cfg.snr_db_list.front() / 10.0);

    std::ostringstream csv;
    csv << "N,omega,abs_unequalized,abs_equalized\n";
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t in = 0; in < cfg.N_list.size(); ++in) {
        const int N = cfg.N_list[in];
        arma::vec dev_eq(realizations), dev_uneq(realizations);
        for (int r = 0; r < realizations; ++r) {
            const std::uint64_t ts = derive_seed(point_seed(cfg, static_cast<int>(in), 0),
                                                 {kTagTrial, static_cast<std::uint64_t>(r)});
            const ChannelSet ch = draw_channels(pdps, N, derive_seed(ts, {kTagChannel}), nv);
            const Combiner comb = build_combiner(freq_response(ch, m, cfg.M), CombinerKind::mrc);
            const arma::cx_vec c_raw =
                flattening_response(ch, comb, pdps[k], k, cfg.M, omega, false);
            const arma::cx_vec c_eq =
                flattening_response(ch, comb, pdps[k], k, cfg.M, omega, true);
            dev_uneq[r] = arma::abs(c_raw - 1.0).max();
            dev_eq[r] = arma::abs(c_eq - 1.0).max();
            if (r == 0) {
                for (int g = 0; g < grid_pts; ++g)
                    csv << N << ',' << format_field(omega[g]) << ','
                        << format_field(std::abs(c_raw[g])) << ','
                        << format_field(std::abs(c_eq[g])) << '\n';
            }
        }
        nlohmann::json r;
        r["N"] = N;
        r["median_max_dev_equalized"] = arma::median(dev_eq);
        r["median_max_dev_unequalized"] = arma::median(dev_uneq);
        r["realizations"] = realizations;
        rows.push_back(std::move(r));
    }
    RunReport rep;
    rep.csv = csv.str();
    rep.json["experiment"] = "flattening";
    rep.json["config"] = cfg.to_json();
    rep.json["seed"] = cfg.seed;
    rep.json["rows"] = std::move(rows);
    rep.json["wall_clock_sec"] = sw.seconds();
    return rep;
}

}  // namespace fbmc
