#include "fbmc/combining.hpp"

namespace fbmc {

const char* to_string(CombinerKind kind) {
    switch (kind) {
        case CombinerKind::mrc: return "mrc";
        case CombinerKind::zf: return "zf";
        case CombinerKind::mmse: return "mmse";
    }
    return "?";
}

CombinerKind combiner_from_string(const std::string& name) {
    if (name == "mrc") return CombinerKind::mrc;
    if (name == "zf") return CombinerKind::zf;
    if (name == "mmse") return CombinerKind::mmse;
    throw std::invalid_argument("unknown combiner: " + name);
}

Combiner build_combiner(const FreqResponse& H, CombinerKind kind, double noise_var) {
    const arma::cx_mat& Hm = H.coeffs;
    const arma::uword N = Hm.n_rows, K = Hm.n_cols;
    Combiner out;
    out.kind = kind;
    out.subcarrier = H.subcarrier;

    switch (kind) {
        case CombinerKind::mrc: {
            arma::vec d(K);
            for (arma::uword k = 0; k < K; ++k) d[k] = arma::accu(arma::square(arma::abs(Hm.col(k))));
            out.weights = Hm * arma::diagmat(1.0 / d);
            break;
        }
        case CombinerKind::zf: {
            if (N < K) throw std::domain_error("zf combiner: needs N >= K");
            arma::cx_mat gram = Hm.t() * Hm;
            if (arma::rcond(gram) < 1e-12)
                throw numerical_error("zf combiner: H^H H numerically rank deficient");
            // W^H = gram^{-1} H^H via a stable Hermitian solve
            arma::cx_mat WH = arma::solve(gram, Hm.t(), arma::solve_opts::likely_sympd);
            out.weights = WH.t();
            break;
        }
        case CombinerKind::mmse: {
            arma::cx_mat gram = Hm.t() * Hm + noise_var * arma::eye<arma::cx_mat>(K, K);
            arma::cx_mat WH = arma::solve(gram, Hm.t(), arma::solve_opts::likely_sympd);
            out.weights = WH.t();
            break;
        }
    }
    return out;
}

arma::cx_mat combine(const Combiner& w, const std::vector<ComplexGrid>& per_antenna_grids) {
    const arma::uword N = w.weights.n_rows, K = w.weights.n_cols;
    if (per_antenna_grids.size() != N)
        throw std::invalid_argument("combine: grid count must equal antenna count");
    const int m = w.subcarrier;
    const int Nsym = per_antenna_grids[0].num_symbols();
    for (const auto& g : per_antenna_grids)
        if (g.num_symbols() != Nsym || m >= g.num_subcarriers())
            throw std::invalid_argument("combine: grid dimensions mismatch");

    arma::cx_mat streams(K, Nsym, arma::fill::zeros);
    for (arma::uword i = 0; i < N; ++i) {
        const arma::cx_rowvec row = per_antenna_grids[i].samples.row(m);
        for (arma::uword k = 0; k < K; ++k)
            streams.row(k) += std::conj(w.weights(i, k)) * row;
    }
    return streams;
}

}  // namespace fbmc
