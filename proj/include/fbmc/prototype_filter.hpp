#ifndef FBMC_PROTOTYPE_FILTER_HPP
#define FBMC_PROTOTYPE_FILTER_HPP

#include <armadillo>
#include <complex>

namespace fbmc {

/// Time-frequency lattice point: subcarrier m in [0, M), symbol index n.
struct BasisIndex {
    int subcarrier = 0;
    long symbol = 0;
};

/// OQAM phase term theta_{m,n} = (pi/2)(m+n).
inline double basis_phase(const BasisIndex& b) {
    return 0.5 * arma::datum::pi * static_cast<double>(b.subcarrier + b.symbol);
}

/**
 * PHYDYAS prototype filter (frequency-sampling design).
 *
 * coeffs() has length kappa*M, symmetric about kappa*M/2 (f[l] == f[(L-l) mod L],
 * f[0] ~ 0), unit energy so the matched-filter autocorrelation q[0] = 1.
 *
 * Two quality metrics are measured at construction:
 *  - nyquist_deviation(): max_{j != 0} |q[jM]|, the time-lattice Nyquist residual;
 *  - ortho_deviation(): worst-case sum of |Re<a_{m',n'}, a_{m,n}>| over the
 *    neighbouring lattice, i.e. the real-orthogonality leakage budget that bounds
 *    reconstruction error for any data grid.
 */
class PrototypeFilter {
  public:
    static PrototypeFilter phydyas(int num_subcarriers, int overlap_factor);

    const arma::vec& coeffs() const { return coeffs_; }
    int num_subcarriers() const { return num_subcarriers_; }
    int overlap_factor() const { return overlap_; }
    int length() const { return static_cast<int>(coeffs_.n_elem); }

    /// f_m[l] = f[l] e^{j 2 pi m l / M}
    arma::cx_vec modulated(int subcarrier) const;

    /// q = f * conj(f)[-.], length 2L-1, centre (lag 0) at index L-1.
    const arma::vec& autocorrelation() const { return autocorr_; }
    double q_at(long lag) const;

    double nyquist_deviation() const { return nyquist_deviation_; }
    double ortho_deviation() const { return ortho_deviation_; }

  private:
    PrototypeFilter() = default;

    arma::vec coeffs_;
    arma::vec autocorr_;
    int num_subcarriers_ = 0;
    int overlap_ = 0;
    double nyquist_deviation_ = 0.0;
    double ortho_deviation_ = 0.0;
};

/// <a_{m,n}, a_{m',n'}> = sum_l a_{m,n}[l] conj(a_{m',n'}[l]).
std::complex<double> basis_inner_product(const BasisIndex& a, const BasisIndex& b,
                                         const PrototypeFilter& filter);

}  // namespace fbmc

#endif
