#ifndef FBMC_COMBINING_HPP
#define FBMC_COMBINING_HPP

#include <armadillo>
#include <stdexcept>
#include <vector>

#include "fbmc/channel.hpp"
#include "fbmc/errors.hpp"
#include "fbmc/filter_bank.hpp"

namespace fbmc {

enum class CombinerKind { mrc, zf, mmse };

const char* to_string(CombinerKind kind);
CombinerKind combiner_from_string(const std::string& name);

/// Per-subcarrier N x K receive combiner W_m.
struct Combiner {
    arma::cx_mat weights;  // N x K
    CombinerKind kind = CombinerKind::mrc;
    int subcarrier = 0;

    arma::cx_vec column(int terminal) const { return weights.col(terminal); }
};

/// MRC: H D^{-1}; ZF: H (H^H H)^{-1}; MMSE: H (H^H H + noise_var I)^{-1}.
/// ZF raises numerical_error when the Gram condition number exceeds 1e12.
Combiner build_combiner(const FreqResponse& H, CombinerKind kind, double noise_var = 0.0);

/// stream_k[n] = sum_i conj(W^{i,k}) y^{(i)}_{m,n} over row m of each per-antenna grid.
/// The real part is not taken here; the equalizer runs first.
arma::cx_mat combine(const Combiner& w, const std::vector<ComplexGrid>& per_antenna_grids);

}  // namespace fbmc

#endif
