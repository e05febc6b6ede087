#ifndef FBMC_DSP_HPP
#define FBMC_DSP_HPP

#include <armadillo>
#include <complex>

namespace fbmc {

/// sum_l x[l] e^{-j omega l} for a causal sequence.
template <typename VecT>
std::complex<double> dtft(const VecT& x, double omega) {
    std::complex<double> acc(0.0, 0.0);
    for (arma::uword l = 0; l < x.n_elem; ++l)
        acc += std::complex<double>(x[l]) * std::polar(1.0, -omega * static_cast<double>(l));
    return acc;
}

/// DTFT of a sequence whose taps are indexed n = -h..h (centre at index h).
template <typename VecT>
std::complex<double> dtft_centered(const VecT& x, double omega) {
    const long h = (static_cast<long>(x.n_elem) - 1) / 2;
    std::complex<double> acc(0.0, 0.0);
    for (arma::uword l = 0; l < x.n_elem; ++l)
        acc += std::complex<double>(x[l]) *
               std::polar(1.0, -omega * static_cast<double>(static_cast<long>(l) - h));
    return acc;
}

}  // namespace fbmc

#endif
