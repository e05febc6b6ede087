#include "fbmc/equalizer.hpp"

#include <json.hpp>
#include <stdexcept>

#include "fbmc/dsp.hpp"
#include "fbmc/errors.hpp"

namespace fbmc {

namespace {

constexpr int kDesignGrid = 1025;   // dense frequency grid for design / residual checks
constexpr double kCoreBand = 0.5;   // |F| >= 0.5 |F|max defines the reported band

struct BandTarget {
    arma::vec omega;     // low-rate frequencies in [-pi, pi]
    arma::cx_vec target; // 1 / P(2 omega / M)
    arma::cx_vec pband;  // P(2 omega / M)
    arma::vec weight;    // |F(2 omega / M)|^4, normalized
    arma::uvec core;     // indices with |F| >= kCoreBand * max
};

// Minimum of |P| over [lo, hi], refined by ternary search around the coarse
// grid minimum so that genuine spectral nulls are detected.
double min_p_in_band(const PdpModel& pdp, double lo, double hi) {
    const int G = 2048;
    double best = 1e300, best_w = lo;
    for (int g = 0; g <= G; ++g) {
        const double w = lo + (hi - lo) * g / G;
        const double v = std::abs(pdp.dtft(w));
        if (v < best) {
            best = v;
            best_w = w;
        }
    }
    double a = std::max(lo, best_w - (hi - lo) / G);
    double b = std::min(hi, best_w + (hi - lo) / G);
    for (int it = 0; it < 80; ++it) {
        const double x1 = a + (b - a) / 3.0, x2 = b - (b - a) / 3.0;
        if (std::abs(pdp.dtft(x1)) < std::abs(pdp.dtft(x2)))
            b = x2;
        else
            a = x1;
    }
    return std::min(best, std::abs(pdp.dtft(0.5 * (a + b))));
}

BandTarget band_target(const PdpModel& pdp, const PrototypeFilter& filter, int grid_pts) {
    const int M = filter.num_subcarriers();
    if (min_p_in_band(pdp, -2.0 * arma::datum::pi / M, 2.0 * arma::datum::pi / M) < 1e-6)
        throw numerical_error("equalizer design: PDP spectrum has an in-band null");
    BandTarget bt;
    bt.omega = arma::linspace(-arma::datum::pi, arma::datum::pi, grid_pts);
    bt.target.set_size(grid_pts);
    bt.pband.set_size(grid_pts);
    arma::vec fmag(grid_pts);
    for (int g = 0; g < grid_pts; ++g) {
        const double hi_rate_omega = 2.0 * bt.omega[g] / M;
        const std::complex<double> P = pdp.dtft(hi_rate_omega);
        bt.pband[g] = P;
        bt.target[g] = 1.0 / P;
        fmag[g] = std::abs(dtft(filter.coeffs(), hi_rate_omega));
    }
    fmag /= fmag.max();
    bt.weight = arma::pow(fmag, 4);
    bt.core = arma::find(fmag >= kCoreBand);
    return bt;
}

// Weighted LS fit of centered taps to the band target. The solve is anchored
// at the unit impulse (fits the correction 1/P - 1), so rank-deficient narrow
// band designs keep an allpass out-of-band response and a flat PDP maps to
// exactly delta.
arma::cx_vec wls_fit(const BandTarget& bt, int num_taps) {
    const int h = (num_taps - 1) / 2;
    const int G = static_cast<int>(bt.omega.n_elem);
    arma::cx_mat A(G, num_taps);
    for (int g = 0; g < G; ++g) {
        const double sw = std::sqrt(bt.weight[g]);
        for (int j = 0; j < num_taps; ++j)
            A(g, j) = sw * std::polar(1.0, -bt.omega[g] * (j - h));
    }
    arma::cx_vec b(G);
    for (int g = 0; g < G; ++g) b[g] = (bt.target[g] - 1.0) * std::sqrt(bt.weight[g]);
    arma::cx_vec taps = arma::pinv(A) * b;
    taps[h] += 1.0;
    return taps;
}

void measure_residuals(const BandTarget& bt, const arma::cx_vec& taps, double& inband,
                       double& wrms) {
    const int G = static_cast<int>(bt.omega.n_elem);
    arma::vec err(G);
    for (int g = 0; g < G; ++g)
        err[g] = std::abs(dtft_centered(taps, bt.omega[g]) * bt.pband[g] - 1.0);
    inband = err(bt.core).max();
    wrms = std::sqrt(arma::accu(bt.weight % arma::square(err)) / arma::accu(bt.weight));
}

}  // namespace

LowRateEqualizer design_lowrate(const PdpModel& pdp, const PrototypeFilter& filter, int num_taps,
                                int terminal) {
    if (num_taps < 1 || num_taps % 2 == 0)
        throw std::invalid_argument("design_lowrate: tap count must be odd and positive");
    const BandTarget bt = band_target(pdp, filter, kDesignGrid);
    arma::cx_vec taps = wls_fit(bt, num_taps);
    // real PDP taps give a conjugate-symmetric target, so the taps are real
    if (arma::abs(arma::imag(taps)).max() > 1e-6)
        throw numerical_error("design_lowrate: expected real taps");
    LowRateEqualizer eq;
    eq.taps = arma::real(taps);
    eq.terminal = terminal;
    measure_residuals(bt, taps, eq.inband_residual, eq.weighted_rms_residual);
    return eq;
}

FullRateEqualizer design_fullrate(const PdpModel& pdp, const PrototypeFilter& filter,
                                  int subcarrier, int num_taps, int terminal) {
    if (num_taps < 1 || num_taps % 2 == 0)
        throw std::invalid_argument("design_fullrate: tap count must be odd and positive");
    const int M = filter.num_subcarriers();
    // Solve at baseband on the subcarrier-relative grid x in [-2pi/M, 2pi/M];
    // P_{k,m}(omega_m + x) = P_k(x), so taps modulate exactly by e^{j 2 pi m l / M}.
    BandTarget bt;
    const int G = kDesignGrid;
    bt.omega = arma::linspace(-2.0 * arma::datum::pi / M, 2.0 * arma::datum::pi / M, G);
    bt.target.set_size(G);
    bt.pband.set_size(G);
    arma::vec fmag(G);
    for (int g = 0; g < G; ++g) {
        const std::complex<double> P = pdp.dtft(bt.omega[g]);
        if (std::abs(P) < 1e-6)
            throw numerical_error("equalizer design: PDP spectrum has an in-band null");
        bt.pband[g] = P;
        bt.target[g] = 1.0 / P;
        fmag[g] = std::abs(dtft(filter.coeffs(), bt.omega[g]));
    }
    fmag /= fmag.max();
    bt.weight = arma::pow(fmag, 4);
    bt.core = arma::find(fmag >= kCoreBand);

    arma::cx_vec base = wls_fit(bt, num_taps);
    FullRateEqualizer eq;
    eq.terminal = terminal;
    eq.subcarrier = subcarrier;
    measure_residuals(bt, base, eq.inband_residual, eq.weighted_rms_residual);
    if (eq.inband_residual > 1e-3)
        throw numerical_error("design_fullrate: in-band residual above design acceptance (1e-3)");

    const int h = (num_taps - 1) / 2;
    eq.taps.set_size(num_taps);
    const double w = 2.0 * arma::datum::pi * subcarrier / M;
    for (int j = 0; j < num_taps; ++j)
        eq.taps[j] = base[j] * std::polar(1.0, w * (j - h));
    return eq;
}

ModifiedAnalysisFilter modified_analysis_filter(const PdpModel& pdp, const PrototypeFilter& filter,
                                                int subcarrier, int terminal) {
    const int L = filter.length();
    const int Lh = pdp.length();
    const int M = filter.num_subcarriers();
    if (Lh >= L) throw std::invalid_argument("modified_analysis_filter: PDP longer than filter");
    const int Lft = L - Lh + 1;

    // Baseband deconvolution: min || conv(c, pbar) - f ||, pbar[v] = p[L_h-1-v]
    // (conjugate-reverse of p at m = 0 is just the reverse; p is real).
    arma::vec pbar = arma::reverse(pdp.taps());
    arma::mat A(L, Lft, arma::fill::zeros);
    for (int r = 0; r < L; ++r) {
        const int j0 = std::max(0, r - Lh + 1);
        const int j1 = std::min(Lft - 1, r);
        for (int j = j0; j <= j1; ++j) A(r, j) = pbar[r - j];
    }
    arma::vec base = arma::solve(A, filter.coeffs());

    ModifiedAnalysisFilter out;
    out.terminal = terminal;
    out.subcarrier = subcarrier;
    out.deconv_residual = arma::norm(A * base - filter.coeffs());
    // exact modulation of the baseband solution: c_m[j] = c_0[j] e^{j 2 pi m (j + L_h - 1)/M}
    out.taps.set_size(Lft);
    const double w = 2.0 * arma::datum::pi * subcarrier / M;
    for (int j = 0; j < Lft; ++j)
        out.taps[j] = base[j] * std::polar(1.0, w * (j + Lh - 1));
    return out;
}

ModifiedAnalysisFilter identity_analysis_filter(const PrototypeFilter& filter, int subcarrier) {
    ModifiedAnalysisFilter out;
    out.subcarrier = subcarrier;
    out.taps = filter.modulated(subcarrier);
    out.deconv_residual = 0.0;
    return out;
}

arma::cx_vec equalize_stream(const arma::cx_vec& stream, const LowRateEqualizer& eq,
                             int subcarrier) {
    const int h = eq.half_width();
    const long len = static_cast<long>(stream.n_elem);
    arma::cx_vec kernel(2 * h + 1);
    for (int j = -h; j <= h; ++j)
        kernel[j + h] = eq.taps[j + h] * std::polar(1.0, arma::datum::pi * subcarrier * j);
    arma::cx_vec out(len, arma::fill::zeros);
    for (long n = 0; n < len; ++n) {
        std::complex<double> acc(0.0, 0.0);
        for (int j = -h; j <= h; ++j) {
            const long src = n - j;
            if (src >= 0 && src < len) acc += kernel[j + h] * stream[src];
        }
        out[n] = acc;
    }
    return out;
}

LowRateEqualizer lowrate_from_fullrate(const FullRateEqualizer& eq, const PrototypeFilter& filter,
                                       int sinc_halfwidth) {
    if (eq.subcarrier != 0)
        throw std::invalid_argument("lowrate_from_fullrate: defined for baseband equalizers");
    const int M = filter.num_subcarriers();
    const int W = sinc_halfwidth * M;
    const int h_hi = eq.half_width();
    const int step = M / 2;
    const int h_lo = (h_hi + W) / step;

    auto sinc_taper = [&](long l) -> double {
        const double al = std::abs(static_cast<double>(l));
        if (al > W) return 0.0;
        const double t = 2.0 * l / M;
        const double s = (l == 0) ? 1.0 : std::sin(arma::datum::pi * t) / (arma::datum::pi * t);
        const double edge = 0.9 * W;
        if (al <= edge) return s;
        return s * 0.5 * (1.0 + std::cos(arma::datum::pi * (al - edge) / (0.1 * W)));
    };

    arma::cx_vec lo(2 * h_lo + 1, arma::fill::zeros);
    for (int n = -h_lo; n <= h_lo; ++n) {
        std::complex<double> acc(0.0, 0.0);
        for (int j = -h_hi; j <= h_hi; ++j)
            acc += eq.taps[j + h_hi] * sinc_taper(static_cast<long>(n) * step - j);
        lo[n + h_lo] = acc;
    }
    LowRateEqualizer out;
    out.terminal = eq.terminal;
    if (arma::abs(arma::imag(lo)).max() > 1e-6)
        throw numerical_error("lowrate_from_fullrate: expected real taps at baseband");
    out.taps = arma::real(lo);
    out.inband_residual = eq.inband_residual;  // inherited; see design_lowrate for direct designs
    out.weighted_rms_residual = eq.weighted_rms_residual;
    return out;
}

void save_taps_json(const LowRateEqualizer& eq, std::ostream& os) {
    nlohmann::json j;
    j["terminal"] = eq.terminal;
    j["inband_residual"] = eq.inband_residual;
    j["weighted_rms_residual"] = eq.weighted_rms_residual;
    auto& arr = j["taps"] = nlohmann::json::array();
    for (arma::uword i = 0; i < eq.taps.n_elem; ++i)
        arr.push_back({eq.taps[i], 0.0});
    os << j.dump(2) << '\n';
}

LowRateEqualizer load_taps_json(std::istream& is) {
    nlohmann::json j;
    is >> j;
    LowRateEqualizer eq;
    eq.terminal = j.at("terminal").get<int>();
    eq.inband_residual = j.value("inband_residual", 0.0);
    eq.weighted_rms_residual = j.value("weighted_rms_residual", 0.0);
    const auto& arr = j.at("taps");
    eq.taps.set_size(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        eq.taps[i] = arr[i][0].get<double>();
    return eq;
}

}  // namespace fbmc
