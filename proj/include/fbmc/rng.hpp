#ifndef FBMC_RNG_HPP
#define FBMC_RNG_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace fbmc {

// splitmix64 step; used only to derive well-separated substream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master);
    for (auto p : path) s = mix64(s ^ mix64(p));
    return s;
}

/**
 * Seedable substream generator. Each substream is identified by a master seed
 * plus an integer path (trial, antenna, terminal, ...), so draws are
 * reproducible and independent of loop ordering or thread count.
 */
class SubstreamRng {
  public:
    SubstreamRng(std::uint64_t master, std::initializer_list<std::uint64_t> path)
        : eng_(derive_seed(master, path)) {}

    explicit SubstreamRng(std::uint64_t seed) : eng_(mix64(seed)) {}

    double gauss(double variance = 1.0) { return normal_(eng_) * std::sqrt(variance); }

    // CN(0, variance): real and imaginary parts each N(0, variance/2).
    std::complex<double> cgauss(double variance = 1.0) {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal_(eng_);
        const double im = normal_(eng_);
        return {re * s, im * s};
    }

    double uniform() { return unif_(eng_); }          // [0, 1)
    double uniform_pm1() { return 2.0 * unif_(eng_) - 1.0; }

  private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

}  // namespace fbmc

#endif
