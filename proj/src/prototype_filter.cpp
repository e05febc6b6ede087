#include "fbmc/prototype_filter.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace fbmc {

namespace {

// Published frequency-sampling sidelobe coefficients (A0 = 1 implicit).
std::vector<double> phydyas_sidelobes(int overlap) {
    switch (overlap) {
        case 2:
            return {std::sqrt(2.0) / 2.0};
        case 3:
            return {0.91143783, std::sqrt(1.0 - 0.91143783 * 0.91143783)};
        case 4:
            return {0.97195983, std::sqrt(2.0) / 2.0, std::sqrt(1.0 - 0.97195983 * 0.97195983)};
        default:
            throw std::invalid_argument("phydyas: unsupported overlap factor (need 2, 3 or 4)");
    }
}

}  // namespace

PrototypeFilter PrototypeFilter::phydyas(int num_subcarriers, int overlap_factor) {
    if (num_subcarriers < 4 || num_subcarriers % 2 != 0)
        throw std::invalid_argument("phydyas: M must be even and >= 4");
    const auto sidelobes = phydyas_sidelobes(overlap_factor);

    const int L = overlap_factor * num_subcarriers;
    arma::vec f(L);
    for (int l = 0; l < L; ++l) {
        double v = 1.0;
        double sign = -1.0;
        for (std::size_t p = 0; p < sidelobes.size(); ++p) {
            v += 2.0 * sign * sidelobes[p] *
                 std::cos(2.0 * arma::datum::pi * static_cast<double>(p + 1) * l / L);
            sign = -sign;
        }
        f[l] = v;
    }
    f /= arma::norm(f);

    PrototypeFilter out;
    out.coeffs_ = std::move(f);
    out.num_subcarriers_ = num_subcarriers;
    out.overlap_ = overlap_factor;

    // Autocorrelation q[lag], lag 0 at index L-1. Unit energy makes q[0] = 1.
    out.autocorr_ = arma::conv(out.coeffs_, arma::reverse(out.coeffs_));

    double nyq = 0.0;
    for (int j = -(overlap_factor - 1); j <= overlap_factor - 1; ++j) {
        if (j == 0) continue;
        nyq = std::max(nyq, std::abs(out.q_at(static_cast<long>(j) * num_subcarriers)));
    }
    out.nyquist_deviation_ = nyq;

    // Real-orthogonality leakage budget around one interior lattice point.
    // |Re<.,.>| depends only on (dm mod M, dn), so a single target suffices.
    const int M = num_subcarriers;
    const int dm_max = std::min(3, M / 2);
    const int dn_max = 2 * overlap_factor + 1;
    std::set<int> neighbours;
    for (int dm = -dm_max; dm <= dm_max; ++dm) neighbours.insert(((dm % M) + M) % M);
    double leak = 0.0;
    BasisIndex target{0, 0};
    for (int mp : neighbours) {
        for (int dn = -dn_max; dn <= dn_max; ++dn) {
            if (mp == 0 && dn == 0) continue;
            BasisIndex other{mp, dn};
            leak += std::abs(std::real(basis_inner_product(other, target, out)));
        }
    }
    out.ortho_deviation_ = leak;
    return out;
}

arma::cx_vec PrototypeFilter::modulated(int subcarrier) const {
    const int L = length();
    arma::cx_vec fm(L);
    const double w = 2.0 * arma::datum::pi * subcarrier / num_subcarriers_;
    for (int l = 0; l < L; ++l)
        fm[l] = coeffs_[l] * std::polar(1.0, w * l);
    return fm;
}

double PrototypeFilter::q_at(long lag) const {
    const long idx = lag + length() - 1;
    if (idx < 0 || idx >= static_cast<long>(autocorr_.n_elem)) return 0.0;
    return autocorr_[idx];
}

std::complex<double> basis_inner_product(const BasisIndex& a, const BasisIndex& b,
                                         const PrototypeFilter& filter) {
    // a_{m,n}[l] = f[l - nM/2] e^{j 2 pi m (l - nM/2) / M} e^{j theta_{m,n}}
    const int L = filter.length();
    const int M = filter.num_subcarriers();
    const long sa = a.symbol * (M / 2);
    const long sb = b.symbol * (M / 2);
    const long lo = std::max(sa, sb);
    const long hi = std::min(sa + L, sb + L);
    if (lo >= hi) return {0.0, 0.0};

    const arma::vec& f = filter.coeffs();
    const double wa = 2.0 * arma::datum::pi * a.subcarrier / M;
    const double wb = 2.0 * arma::datum::pi * b.subcarrier / M;
    std::complex<double> acc(0.0, 0.0);
    for (long l = lo; l < hi; ++l) {
        const long ua = l - sa;
        const long ub = l - sb;
        acc += f[ua] * f[ub] * std::polar(1.0, wa * ua - wb * ub);
    }
    return acc * std::polar(1.0, basis_phase(a) - basis_phase(b));
}

}  // namespace fbmc
