#include <doctest.h>

#include "fbmc/channel.hpp"
#include "fbmc/rng.hpp"

using namespace fbmc;

TEST_CASE("exponential PDP values") {
    SUBCASE("alpha=0 is uniform") {
        const auto p = PdpModel::exponential(0.0, 4);
        for (int l = 0; l < 4; ++l) CHECK(p.taps()[l] == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("alpha=50 collapses to the first tap") {
        const auto p = PdpModel::exponential(50.0, 3);
        CHECK(p.taps()[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.taps()[1] < 1e-20);
    }
    SUBCASE("long profile: alpha=0.05, L_h=50") {
        const auto p = PdpModel::exponential(0.05, 50);
        CHECK(arma::accu(p.taps()) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.taps()[1] / p.taps()[0] == doctest::Approx(std::exp(-0.05)).epsilon(1e-12));
        CHECK(p.taps().min() >= 0.0);
    }
    SUBCASE("empty profile rejected") {
        CHECK_THROWS_AS(PdpModel::exponential(0.05, 0), std::invalid_argument);
    }
}

TEST_CASE("draw_channels: determinism and tap variance") {
    const std::vector<PdpModel> pdps = {PdpModel::exponential(0.05, 8),
                                        PdpModel::exponential(0.10, 8)};
    SUBCASE("same seed twice: identical realization") {
        const auto a = draw_channels(pdps, 16, 42);
        const auto b = draw_channels(pdps, 16, 42);
        CHECK(arma::abs(arma::vectorise(a.taps - b.taps)).max() == 0.0);
        const auto c = draw_channels(pdps, 16, 43);
        CHECK(arma::abs(arma::vectorise(a.taps - c.taps)).max() > 0.0);
    }
    SUBCASE("per-tap sample variance matches the PDP within 3%") {
        const int N = 100000;
        const auto ch = draw_channels(pdps, N, 7);
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 8; ++l) {
                double v = 0.0;
                for (int i = 0; i < N; ++i) v += std::norm(ch.taps(i, k, l));
                v /= N;
                CHECK(std::abs(v - pdps[k].taps()[l]) / pdps[k].taps()[l] < 0.03);
            }
    }
    SUBCASE("independence across indices") {
        const int N = 50000;
        const auto ch = draw_channels(pdps, N, 11);
        std::complex<double> c01(0.0, 0.0), c_l(0.0, 0.0);
        for (int i = 0; i < N; ++i) {
            c01 += ch.taps(i, 0, 0) * std::conj(ch.taps(i, 1, 0));
            c_l += ch.taps(i, 0, 0) * std::conj(ch.taps(i, 0, 1));
        }
        const double bound = 3.0 / std::sqrt(static_cast<double>(N));
        CHECK(std::abs(c01) / N < bound);
        CHECK(std::abs(c_l) / N < bound);
    }
}

TEST_CASE("flat PDP gives unit-power Rayleigh frequency response") {
    const std::vector<PdpModel> pdps = {PdpModel(arma::vec{1.0})};
    const int N = 100000;
    const auto ch = draw_channels(pdps, N, 3);
    const auto H = freq_response(ch, 5, 32);
    double p = 0.0;
    for (int i = 0; i < N; ++i) p += std::norm(H.coeffs(i, 0));
    CHECK(p / N == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("freq_response: deterministic taps") {
    ChannelSet ch;
    ch.taps.set_size(1, 1, 4);
    SUBCASE("leading impulse: H_m = 1 for all m") {
        ch.taps.zeros();
        ch.taps(0, 0, 0) = 1.0;
        for (int m : {0, 3, 7})
            CHECK(std::abs(freq_response(ch, m, 8).coeffs(0, 0) - 1.0) < 1e-14);
    }
    SUBCASE("delayed impulse: H_m = e^{-j 2 pi m / M}") {
        ch.taps.zeros();
        ch.taps(0, 0, 1) = 1.0;
        const auto H = freq_response(ch, 3, 8);
        const std::complex<double> expect = std::polar(1.0, -2.0 * arma::datum::pi * 3.0 / 8.0);
        CHECK(std::abs(H.coeffs(0, 0) - expect) < 1e-14);
    }
}

TEST_CASE("combiner/channel correlation kernel: E[(H_m)* h[l]] = p_{k,m}[l]") {
    const int M = 32, m = 9, Lh = 6, N = 100000;
    const std::vector<PdpModel> pdps = {PdpModel::exponential(0.2, Lh)};
    const auto ch = draw_channels(pdps, N, 17);
    const auto H = freq_response(ch, m, M);
    const arma::cx_vec expect = pdps[0].modulated(m, M);
    for (int l = 0; l < Lh; ++l) {
        std::complex<double> acc(0.0, 0.0);
        for (int i = 0; i < N; ++i) acc += std::conj(H.coeffs(i, 0)) * ch.taps(i, 0, l);
        acc /= N;
        CHECK(std::abs(acc - expect[l]) < 0.03 * std::abs(expect[0]));
    }
}

TEST_CASE("apply_uplink") {
    SUBCASE("zero signals, zero noise: zero output") {
        const std::vector<PdpModel> pdps = {PdpModel::exponential(0.1, 4)};
        const auto ch = draw_channels(pdps, 3, 5, 0.0);
        const std::vector<arma::cx_vec> x = {arma::cx_vec(64, arma::fill::zeros)};
        const auto y = apply_uplink(x, ch, 1);
        CHECK(static_cast<int>(y.size()) == 3);
        CHECK(static_cast<int>(y[0].n_elem) == 64 + 3);
        for (const auto& yi : y) CHECK(arma::abs(yi).max() == 0.0);
    }
    SUBCASE("identity channel passes the signal through") {
        ChannelSet ch;
        ch.taps.set_size(2, 1, 1);
        ch.taps.fill(1.0);
        ch.noise_var = 0.0;
        SubstreamRng rng(9, {1});
        arma::cx_vec x(50);
        for (auto& v : x) v = rng.cgauss();
        const auto y = apply_uplink({x}, ch, 2);
        CHECK(arma::abs(y[0] - x).max() < 1e-14);
    }
    SUBCASE("two-terminal impulses superpose (direct convolution oracle)") {
        const std::vector<PdpModel> pdps = {PdpModel::exponential(0.1, 4),
                                            PdpModel::exponential(0.2, 4)};
        const auto ch = draw_channels(pdps, 2, 21, 0.0);
        arma::cx_vec imp(8, arma::fill::zeros);
        imp[0] = 1.0;
        const auto y = apply_uplink({imp, imp}, ch, 3);
        for (int i = 0; i < 2; ++i)
            for (int l = 0; l < 4; ++l)
                CHECK(std::abs(y[i][l] - (ch.taps(i, 0, l) + ch.taps(i, 1, l))) < 1e-14);
    }
    SUBCASE("signal count mismatch rejected") {
        const std::vector<PdpModel> pdps = {PdpModel::exponential(0.1, 4),
                                            PdpModel::exponential(0.2, 4)};
        const auto ch = draw_channels(pdps, 2, 5, 0.0);
        CHECK_THROWS_AS(apply_uplink({arma::cx_vec(8, arma::fill::zeros)}, ch, 1),
                        std::invalid_argument);
    }
    SUBCASE("receive SNR matches 1/noise_var within 5%") {
        const std::vector<PdpModel> pdps = {PdpModel::exponential(0.05, 8)};
        const double nv = 0.25;
        const auto ch = draw_channels(pdps, 64, 31, nv);
        SubstreamRng rng(13, {2});
        arma::cx_vec x(4000);
        for (auto& v : x) v = rng.cgauss();  // unit power
        ChannelSet quiet = ch;
        quiet.noise_var = 0.0;
        const auto clean = apply_uplink({x}, quiet, 4);
        double sig = 0.0;
        long cnt = 0;
        for (const auto& yi : clean) {
            sig += std::pow(arma::norm(yi), 2);
            cnt += yi.n_elem;
        }
        const double snr = (sig / cnt) / nv;
        CHECK(snr == doctest::Approx(1.0 / nv).epsilon(0.05));
    }
}

TEST_CASE("freq_response is linear in the channel set") {
    const std::vector<PdpModel> pdps = {PdpModel::exponential(0.1, 5)};
    const auto a = draw_channels(pdps, 4, 100);
    const auto b = draw_channels(pdps, 4, 101);
    ChannelSet sum;
    sum.taps = a.taps + b.taps;
    const auto Ha = freq_response(a, 3, 16).coeffs;
    const auto Hb = freq_response(b, 3, 16).coeffs;
    const auto Hs = freq_response(sum, 3, 16).coeffs;
    CHECK(arma::abs(Hs - Ha - Hb).max() < 1e-13);
}

TEST_CASE("estimate_pdp") {
    SUBCASE("single antenna, deterministic taps") {
        ChannelSet ch;
        ch.taps.set_size(1, 1, 2);
        ch.taps(0, 0, 0) = 1.0;
        ch.taps(0, 0, 1) = 0.0;
        const auto p = estimate_pdp(ch, 0);
        CHECK(p.taps()[0] == doctest::Approx(1.0));
        CHECK(p.taps()[1] == doctest::Approx(0.0));
    }
    SUBCASE("equal-magnitude taps give a uniform estimate") {
        ChannelSet ch;
        ch.taps.set_size(2, 1, 3);
        ch.taps.fill(std::complex<double>(0.0, 0.7));
        const auto p = estimate_pdp(ch, 0);
        for (int l = 0; l < 3; ++l) CHECK(p.taps()[l] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    }
    SUBCASE("law of large numbers at N=10^4") {
        const std::vector<PdpModel> pdps = {PdpModel::exponential(0.05, 16)};
        const auto ch = draw_channels(pdps, 10000, 55);
        const auto p = estimate_pdp(ch, 0);
        const double pmax = pdps[0].taps().max();
        CHECK(arma::abs(p.taps() - pdps[0].taps()).max() < 0.05 * pmax);
    }
}
