#include <doctest.h>

#include "fbmc/filter_bank.hpp"
#include "fbmc/rng.hpp"

using namespace fbmc;

namespace {

arma::mat random_grid(int M, int Nsym, std::uint64_t seed) {
    SubstreamRng rng(seed, {0x9f1dULL});
    arma::mat d(M, Nsym);
    for (auto& v : d) v = rng.uniform_pm1();
    return d;
}

}  // namespace

TEST_CASE("synthesize: zero grid gives zero signal, correct length") {
    const auto f = PrototypeFilter::phydyas(16, 4);
    const int Nsym = 6;
    const auto x = synthesize(OqamGrid{arma::mat(16, Nsym, arma::fill::zeros)}, f);
    CHECK(static_cast<int>(x.n_elem) == Nsym * 8 + f.length() - 8);
    CHECK(arma::abs(x).max() == 0.0);
}

TEST_CASE("synthesize: single basis symbols") {
    const int M = 8;
    const auto f = PrototypeFilter::phydyas(M, 4);

    SUBCASE("d_{0,0} = 1 gives x = f") {
        arma::mat d(M, 1, arma::fill::zeros);
        d(0, 0) = 1.0;
        const auto x = synthesize(OqamGrid{d}, f);
        for (int l = 0; l < f.length(); ++l) {
            CHECK(std::real(x[l]) == doctest::Approx(f.coeffs()[l]).epsilon(1e-12));
            CHECK(std::abs(std::imag(x[l])) < 1e-12);
        }
    }
    SUBCASE("d_{1,1} = 1 matches the basis function evaluated directly") {
        arma::mat d(M, 2, arma::fill::zeros);
        d(1, 1) = 1.0;
        const auto x = synthesize(OqamGrid{d}, f);
        // oracle: a_{1,1}[l] = f[l - M/2] e^{j 2 pi (l - M/2)/M} e^{j theta_{1,1}}, theta = pi
        for (long l = 0; l < static_cast<long>(x.n_elem); ++l) {
            std::complex<double> expect(0.0, 0.0);
            const long u = l - M / 2;
            if (u >= 0 && u < f.length())
                expect = f.coeffs()[u] *
                         std::polar(1.0, 2.0 * arma::datum::pi * u / M + arma::datum::pi);
            CHECK(std::abs(x[l] - expect) < 1e-12);
        }
    }
}

TEST_CASE("synthesize: dimension mismatch is rejected") {
    const auto f = PrototypeFilter::phydyas(16, 4);
    CHECK_THROWS_AS(synthesize(OqamGrid{arma::mat(8, 4, arma::fill::ones)}, f),
                    std::invalid_argument);
}

TEST_CASE("analyze: zero signal gives zero grid; too-short signal rejected") {
    const auto f = PrototypeFilter::phydyas(16, 4);
    const arma::cx_vec zero(200, arma::fill::zeros);
    const auto g = analyze(zero, f, 4);
    CHECK(arma::abs(g.samples).max() == 0.0);
    CHECK_THROWS_AS(analyze(arma::cx_vec(32, arma::fill::zeros), f, 4), std::invalid_argument);
}

TEST_CASE("real-orthogonality: analyze(synthesize(g)) recovers g") {
    const int M = 32, Nsym = 10;
    const auto f = PrototypeFilter::phydyas(M, 4);
    const double tol = f.ortho_deviation();
    for (std::uint64_t s = 0; s < 20; ++s) {
        const arma::mat d = random_grid(M, Nsym, s);
        const auto y = analyze(synthesize(OqamGrid{d}, f), f, Nsym);
        const double err = arma::abs(arma::real(y.samples) - d).max();
        CHECK(err <= tol * arma::abs(d).max());
    }
}

TEST_CASE("energy: ||x||^2 equals the symbol energy within 2 eps") {
    const int M = 32, Nsym = 8;
    const auto f = PrototypeFilter::phydyas(M, 4);
    const arma::mat d = random_grid(M, Nsym, 77);
    const auto x = synthesize(OqamGrid{d}, f);
    const double ex = std::pow(arma::norm(x), 2);
    const double ed = arma::accu(arma::square(d));
    CHECK(std::abs(ex - ed) / ed <= 2.0 * f.ortho_deviation());
}

TEST_CASE("modulation identity: subcarrier shift equals remodulation") {
    const int M = 16;
    const auto f = PrototypeFilter::phydyas(M, 4);
    arma::mat d0(M, 1, arma::fill::zeros), d1(M, 1, arma::fill::zeros);
    d0(2, 0) = 1.0;
    d1(3, 0) = 1.0;
    const auto x0 = synthesize(OqamGrid{d0}, f);
    const auto x1 = synthesize(OqamGrid{d1}, f);
    // shifting one subcarrier multiplies by e^{j 2 pi l / M} and advances theta by pi/2
    for (long l = 0; l < static_cast<long>(x0.n_elem); ++l) {
        const std::complex<double> expect =
            x0[l] * std::polar(1.0, 2.0 * arma::datum::pi * l / M + 0.5 * arma::datum::pi);
        CHECK(std::abs(x1[l] - expect) < 1e-10);
    }
}

TEST_CASE("single tone concentrates in its subcarrier row") {
    const int M = 64, Nsym = 8;
    const auto f = PrototypeFilter::phydyas(M, 4);
    const int m0 = 20;
    const long len = Nsym * M / 2 + f.length() - M / 2;
    arma::cx_vec tone(len);
    for (long l = 0; l < len; ++l)
        tone[l] = std::polar(1.0, 2.0 * arma::datum::pi * m0 * l / M);
    const auto y = analyze(tone, f, Nsym);
    const double peak = arma::abs(y.samples.row(m0)).max();
    for (int m = 0; m < M; ++m) {
        const int dm = std::min(std::abs(m - m0), M - std::abs(m - m0));
        if (dm >= 2) CHECK(arma::abs(y.samples.row(m)).max() < peak * 1e-3);  // below -60 dB
    }
}

TEST_CASE("serial and parallel kernels are bit-identical") {
    const int M = 32, Nsym = 9;
    const auto f = PrototypeFilter::phydyas(M, 4);
    const arma::mat d = random_grid(M, Nsym, 5);
    const auto xs = synthesize(OqamGrid{d}, f, Execution::serial);
    const auto xp = synthesize(OqamGrid{d}, f, Execution::parallel);
    CHECK(arma::approx_equal(xs, xp, "absdiff", 0.0));
    const auto ys = analyze(xs, f, Nsym, true, Execution::serial);
    const auto yp = analyze(xs, f, Nsym, true, Execution::parallel);
    CHECK(arma::approx_equal(ys.samples, yp.samples, "absdiff", 0.0));
}
