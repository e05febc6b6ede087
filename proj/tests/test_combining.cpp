#include <doctest.h>

#include "fbmc/combining.hpp"
#include "fbmc/rng.hpp"

using namespace fbmc;

namespace {

FreqResponse random_H(int N, int K, std::uint64_t seed, int m = 0) {
    SubstreamRng rng(seed, {0xcafeULL});
    arma::cx_mat H(N, K);
    for (auto& v : H) v = rng.cgauss();
    return FreqResponse{std::move(H), m};
}

}  // namespace

TEST_CASE("scalar case: MRC and ZF coincide at h/|h|^2") {
    FreqResponse H{arma::cx_mat(1, 1), 0};
    H.coeffs(0, 0) = std::complex<double>(0.6, -0.8);
    const auto expect = H.coeffs(0, 0) / std::norm(H.coeffs(0, 0));
    for (auto kind : {CombinerKind::mrc, CombinerKind::zf}) {
        const auto w = build_combiner(H, kind);
        CHECK(std::abs(w.weights(0, 0) - expect) < 1e-14);
    }
    const auto wm = build_combiner(H, CombinerKind::mmse, 0.5);
    CHECK(std::abs(wm.weights(0, 0) - H.coeffs(0, 0) / (std::norm(H.coeffs(0, 0)) + 0.5)) < 1e-14);
}

TEST_CASE("orthogonal columns with norm^2 = N: all combiners equal H/N") {
    const int N = 8, K = 2;
    arma::cx_mat H(N, K, arma::fill::zeros);
    // two orthogonal DFT columns scaled to ||h||^2 = N
    for (int i = 0; i < N; ++i) {
        H(i, 0) = std::polar(1.0, 2.0 * arma::datum::pi * i / N);
        H(i, 1) = std::polar(1.0, 2.0 * arma::datum::pi * 2 * i / N);
    }
    const FreqResponse fr{H, 0};
    for (auto kind : {CombinerKind::mrc, CombinerKind::zf}) {
        const auto w = build_combiner(fr, kind);
        CHECK(arma::abs(w.weights - H / N).max() < 1e-12);
    }
}

TEST_CASE("ZF is an exact left inverse") {
    const auto H = random_H(8, 2, 3);
    const auto w = build_combiner(H, CombinerKind::zf);
    const arma::cx_mat res = w.weights.t() * H.coeffs - arma::eye<arma::cx_mat>(2, 2);
    CHECK(arma::abs(res).max() < 1e-9);
}

TEST_CASE("ZF rejects a rank-deficient channel") {
    arma::cx_mat H(6, 2);
    SubstreamRng rng(4, {1});
    for (int i = 0; i < 6; ++i) {
        H(i, 0) = rng.cgauss();
        H(i, 1) = 2.0 * H(i, 0);  // linearly dependent columns
    }
    CHECK_THROWS_AS(build_combiner(FreqResponse{H, 0}, CombinerKind::zf), numerical_error);
    CHECK_THROWS_AS(build_combiner(random_H(2, 4, 9), CombinerKind::zf), std::domain_error);
}

TEST_CASE("combine applies conjugated weights to the target row") {
    const int M = 8, Nsym = 5, N = 2;
    SubstreamRng rng(12, {7});
    std::vector<ComplexGrid> grids;
    for (int i = 0; i < N; ++i) {
        arma::cx_mat g(M, Nsym);
        for (auto& v : g) v = rng.cgauss();
        grids.push_back(ComplexGrid{std::move(g)});
    }

    SUBCASE("selector weight picks out antenna 0") {
        Combiner w;
        w.kind = CombinerKind::mrc;
        w.subcarrier = 3;
        w.weights = arma::cx_mat(N, 1, arma::fill::zeros);
        w.weights(0, 0) = 1.0;
        const auto s = combine(w, grids);
        CHECK(arma::abs(s.row(0).st() - grids[0].samples.row(3).st()).max() < 1e-15);
    }
    SUBCASE("zero grids give zero streams") {
        std::vector<ComplexGrid> zeros = {ComplexGrid{arma::cx_mat(M, Nsym, arma::fill::zeros)},
                                          ComplexGrid{arma::cx_mat(M, Nsym, arma::fill::zeros)}};
        Combiner w;
        w.weights = arma::cx_mat(N, 2, arma::fill::ones);
        w.subcarrier = 1;
        CHECK(arma::abs(combine(w, zeros)).max() == 0.0);
    }
    SUBCASE("random weights match a hand-computed sum") {
        Combiner w;
        w.kind = CombinerKind::zf;
        w.subcarrier = 2;
        w.weights.set_size(N, 1);
        w.weights(0, 0) = std::complex<double>(0.3, 0.4);
        w.weights(1, 0) = std::complex<double>(-0.2, 0.9);
        const auto s = combine(w, grids);
        for (int n = 0; n < Nsym; ++n) {
            const auto expect = std::conj(w.weights(0, 0)) * grids[0].samples(2, n) +
                                std::conj(w.weights(1, 0)) * grids[1].samples(2, n);
            CHECK(std::abs(s(0, n) - expect) < 1e-14);
        }
    }
    SUBCASE("grid count mismatch rejected") {
        Combiner w;
        w.weights = arma::cx_mat(3, 1, arma::fill::ones);
        CHECK_THROWS_AS(combine(w, grids), std::invalid_argument);
    }
}

TEST_CASE("large-N convergence to H/N for all kinds") {
    const std::vector<int> Ns = {16, 64, 256};
    const int K = 4;
    const int seeds = 15;
    for (auto kind : {CombinerKind::mrc, CombinerKind::zf, CombinerKind::mmse}) {
        std::vector<double> med;
        for (int N : Ns) {
            std::vector<double> devs;
            for (int s = 0; s < seeds; ++s) {
                const auto H = random_H(N, K, 1000 + s);
                const auto w = build_combiner(H, kind, 0.1);
                devs.push_back(arma::norm(w.weights - H.coeffs / N, "fro") /
                               arma::norm(H.coeffs / N, "fro"));
            }
            std::sort(devs.begin(), devs.end());
            med.push_back(devs[seeds / 2]);
        }
        CHECK(med[1] < med[0]);
        CHECK(med[2] < med[1]);
    }
}

TEST_CASE("MRC normalization D/N approaches the identity like 1/sqrt(N)") {
    const int K = 3, seeds = 21;
    std::vector<double> med;
    for (int N : {16, 64, 256}) {
        std::vector<double> devs;
        for (int s = 0; s < seeds; ++s) {
            const auto H = random_H(N, K, 500 + s);
            double worst = 0.0;
            for (int k = 0; k < K; ++k) {
                const double d = arma::accu(arma::square(arma::abs(H.coeffs.col(k))));
                worst = std::max(worst, std::abs(d / N - 1.0));
            }
            devs.push_back(worst);
        }
        std::sort(devs.begin(), devs.end());
        med.push_back(devs[seeds / 2]);
    }
    CHECK(med[1] < med[0]);
    CHECK(med[2] < med[1]);
}
