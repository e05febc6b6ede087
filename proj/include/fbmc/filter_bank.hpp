#ifndef FBMC_FILTER_BANK_HPP
#define FBMC_FILTER_BANK_HPP

#include <armadillo>

#include "fbmc/prototype_filter.hpp"

namespace fbmc {

/// Real OQAM data symbols d_{m,n}: rows are subcarriers, columns half-symbol instants.
struct OqamGrid {
    arma::mat data;

    OqamGrid() = default;
    explicit OqamGrid(arma::mat d);
    int num_subcarriers() const { return static_cast<int>(data.n_rows); }
    int num_symbols() const { return static_cast<int>(data.n_cols); }
};

/// Demodulated complex samples y_{m,n} on the same lattice.
struct ComplexGrid {
    arma::cx_mat samples;

    ComplexGrid() = default;
    explicit ComplexGrid(arma::cx_mat s) : samples(std::move(s)) {}
    int num_subcarriers() const { return static_cast<int>(samples.n_rows); }
    int num_symbols() const { return static_cast<int>(samples.n_cols); }
};

/// Kernels run OpenMP-parallel by default; the serial path is the reference
/// implementation kept for testing and benchmarking. Both produce bit-identical
/// results (parallelism partitions independent outputs only).
enum class Execution { serial, parallel };

/// x[l] = sum_{n,m} d_{m,n} f_m[l - nM/2] e^{j theta_{m,n}};
/// output length N_sym*M/2 + L_f - M/2.
arma::cx_vec synthesize(const OqamGrid& grid, const PrototypeFilter& filter,
                        Execution exec = Execution::parallel);

/// y_{m,n} = e^{-j theta_{m,n}} (signal conv conj(f_m)[-.]) decimated by M/2,
/// aligned so analyze(synthesize(g)) recovers g in the real part.
/// compensate_phase=false leaves the e^{-j theta} factor off (used by receiver
/// chains that equalize before phase compensation).
ComplexGrid analyze(const arma::cx_vec& signal, const PrototypeFilter& filter, int num_symbols,
                    bool compensate_phase = true, Execution exec = Execution::parallel);

}  // namespace fbmc

#endif
