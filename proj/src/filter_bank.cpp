#include "fbmc/filter_bank.hpp"

#include <complex>
#include <stdexcept>

namespace fbmc {

OqamGrid::OqamGrid(arma::mat d) : data(std::move(d)) {
    if (data.n_rows == 0 || data.n_cols == 0)
        throw std::invalid_argument("OqamGrid: dimensions must be positive");
}

namespace {

// Symbol block n of the waveform: sum_m d_{m,n} e^{j theta_{m,n}} f[u] e^{j 2 pi m u / M},
// u = 0..L-1 relative to the block start n*M/2. The modulation is periodic in u
// with period M, so the subcarrier sum is evaluated once per residue.
void symbol_block(const arma::mat& d, int n, const arma::vec& f, int M, arma::cx_vec& block) {
    const int L = static_cast<int>(f.n_elem);
    block.zeros(L);
    const double half_pi = 0.5 * arma::datum::pi;
    arma::cx_vec period(M, arma::fill::zeros);
    for (int m = 0; m < M; ++m) {
        if (d(m, n) == 0.0) continue;
        const std::complex<double> dm = d(m, n) * std::polar(1.0, half_pi * (m + n));
        const std::complex<double> w = std::polar(1.0, 2.0 * arma::datum::pi * m / M);
        std::complex<double> ph(1.0, 0.0);
        for (int u = 0; u < M; ++u) {
            period[u] += dm * ph;
            ph *= w;
        }
    }
    for (int u = 0; u < L; ++u)
        block[u] = f[u] * period[u % M];
}

}  // namespace

arma::cx_vec synthesize(const OqamGrid& grid, const PrototypeFilter& filter, Execution exec) {
    const int M = filter.num_subcarriers();
    if (grid.num_subcarriers() != M)
        throw std::invalid_argument("synthesize: grid/filter subcarrier count mismatch");
    const int L = filter.length();
    const int Nsym = grid.num_symbols();
    const int step = M / 2;
    const long out_len = static_cast<long>(Nsym) * step + L - step;

    arma::cx_mat blocks(L, Nsym);
    if (exec == Execution::parallel) {
#pragma omp parallel
        {
            arma::cx_vec block;
#pragma omp for schedule(static)
            for (int n = 0; n < Nsym; ++n) {
                symbol_block(grid.data, n, filter.coeffs(), M, block);
                blocks.col(n) = block;
            }
        }
    } else {
        arma::cx_vec block;
        for (int n = 0; n < Nsym; ++n) {
            symbol_block(grid.data, n, filter.coeffs(), M, block);
            blocks.col(n) = block;
        }
    }

    // overlap-add in fixed symbol order so results are parallelism-invariant
    arma::cx_vec x(out_len, arma::fill::zeros);
    for (int n = 0; n < Nsym; ++n)
        x.subvec(static_cast<long>(n) * step, static_cast<long>(n) * step + L - 1) += blocks.col(n);
    return x;
}

ComplexGrid analyze(const arma::cx_vec& signal, const PrototypeFilter& filter, int num_symbols,
                    bool compensate_phase, Execution exec) {
    const int M = filter.num_subcarriers();
    const int L = filter.length();
    const int step = M / 2;
    if (num_symbols < 1) throw std::invalid_argument("analyze: num_symbols must be positive");
    if (static_cast<long>(signal.n_elem) < static_cast<long>(num_symbols - 1) * step + L)
        throw std::invalid_argument("analyze: signal too short for requested symbol count");

    const arma::vec& f = filter.coeffs();
    arma::cx_mat y(M, num_symbols);
    const double half_pi = 0.5 * arma::datum::pi;

    auto row_task = [&](int m) {
        const double w = 2.0 * arma::datum::pi * m / M;
        arma::cx_vec fm_conj(L);
        for (int u = 0; u < L; ++u)
            fm_conj[u] = f[u] * std::polar(1.0, -w * u);
        for (int n = 0; n < num_symbols; ++n) {
            const long s = static_cast<long>(n) * step;
            std::complex<double> acc(0.0, 0.0);
            for (int u = 0; u < L; ++u)
                acc += signal[s + u] * fm_conj[u];
            if (compensate_phase) acc *= std::polar(1.0, -half_pi * (m + n));
            y(m, n) = acc;
        }
    };

    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (int m = 0; m < M; ++m) row_task(m);
    } else {
        for (int m = 0; m < M; ++m) row_task(m);
    }
    return ComplexGrid{std::move(y)};
}

}  // namespace fbmc
