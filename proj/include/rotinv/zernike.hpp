#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "rotinv/features.hpp"
#include "rotinv/image.hpp"

namespace rotinv {

/// Valid (n, m) index pairs with m >= 0, sorted by (n, m). For n_max = 5 this
/// is N = [0,1,2,2,3,3,4,4,4,5,5,5], M = [0,1,0,2,1,3,0,2,4,1,3,5].
struct ZernikeIndex {
    std::vector<int> n_list;
    std::vector<int> m_list;
    std::size_t size() const { return n_list.size(); }
};

inline ZernikeIndex zernike_index_vectors(int n_max) {
    if (n_max < 0) throw InvalidIndex("zernike_index_vectors: n_max must be >= 0");
    ZernikeIndex idx;
    for (int n = 0; n <= n_max; ++n) {
        for (int m = n % 2; m <= n; m += 2) {
            idx.n_list.push_back(n);
            idx.m_list.push_back(m);
        }
    }
    return idx;
}

namespace detail {

inline double factorial(int n) {
    static const auto table = [] {
        std::vector<double> t(171, 1.0);
        for (int i = 1; i < 171; ++i) t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i - 1)] * i;
        return t;
    }();
    return table[static_cast<std::size_t>(n)];
}

}  // namespace detail

/// Radial polynomial R_{n,m}(r) on the unit disk; R(n,m) = R(n,-m).
inline double zernike_radial(int n, int m, double r) {
    const int am = std::abs(m);
    if (am > n || (n - am) % 2 != 0 || n < 0)
        throw InvalidIndex("zernike_radial: need |m| <= n with n - |m| even");
    double acc = 0.0;
    const int k_hi = (n - am) / 2;
    for (int k = 0; k <= k_hi; ++k) {
        const double num = detail::factorial(n - k);
        const double den = detail::factorial(k) * detail::factorial((n + am) / 2 - k) *
                           detail::factorial((n - am) / 2 - k);
        const double term = num / den * std::pow(r, n - 2 * k);
        acc += (k % 2 == 0) ? term : -term;
    }
    return acc;
}

/// Zernike moment A_{n,m} of a polar image. Ring r (1-based) is evaluated at
/// unit-disk radius r / N_rho; angle t at t * delta_theta.
inline std::complex<double> zernike_moment(const PolarImage& p, int n, int m) {
    const int am = std::abs(m);
    if (am > n || (n - am) % 2 != 0 || n < 0)
        throw InvalidIndex("zernike_moment: need |m| <= n with n - |m| even");
    const double d_theta = p.delta_theta();
    std::complex<double> acc = 0.0;
    for (int r = 0; r < p.n_rho; ++r) {
        const double radial = zernike_radial(n, m, static_cast<double>(r + 1) / p.n_rho);
        std::complex<double> ring = 0.0;
        for (int t = 0; t < p.n_theta; ++t) {
            const double theta = (t + 1) * d_theta;
            // conj(V) = R * e^{-i m theta}
            ring += p.at(r, t) * std::complex<double>(std::cos(m * theta), -std::sin(m * theta));
        }
        acc += radial * ring;
    }
    return acc;
}

/// All A_j for the m >= 0 index set, in (n, m) order.
inline std::vector<std::complex<double>> zernike_moments(const PolarImage& p, int n_max) {
    const ZernikeIndex idx = zernike_index_vectors(n_max);
    std::vector<std::complex<double>> out(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
        out[j] = zernike_moment(p, idx.n_list[j], idx.m_list[j]);
    return out;
}

/// Rotation invariants |A_j|; 12 features for n_max = 5.
inline FeatureVector zernike_features(const PolarImage& p, int n_max) {
    const auto moments = zernike_moments(p, n_max);
    FeatureVector out;
    out.family = Family::Zernike;
    out.params.n_max = n_max;
    out.params.n_rho = p.n_rho;
    out.params.n_theta = p.n_theta;
    out.values.reserve(moments.size());
    for (const auto& a : moments) out.values.push_back(std::abs(a));
    return out;
}

}  // namespace rotinv
