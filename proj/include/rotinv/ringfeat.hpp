#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "rotinv/features.hpp"
#include "rotinv/image.hpp"

namespace rotinv {

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline int ilog2(std::size_t n) {
    int k = 0;
    while (n > 1) {
        n >>= 1;
        ++k;
    }
    return k;
}

}  // namespace detail

/// Unnormalized forward DFT, radix-2 in-place: Y(k) = sum x(n) e^{-i2pi kn/N}.
inline std::vector<std::complex<double>> dft_radix2(std::vector<std::complex<double>> x) {
    const std::size_t n = x.size();
    if (!detail::is_power_of_two(n)) throw NotPowerOfTwo();
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -kTwoPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = x[i + k];
                const std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    return x;
}

/// Per-ring mean, deviation, skewness and kurtosis of the angular signal,
/// flattened row-major: [all mu, all sigma, all gamma, all kappa]. Degenerate
/// rings (zero variance) report gamma = kappa = 0. With `literal` the raw
/// ratio variants are produced instead: sigma as the mean squared deviation,
/// gamma = mu^3/sigma^3, kappa = mu^4/sigma^4.
inline FeatureVector ring_stats(const PolarImage& p, bool literal = false) {
    const int nr = p.n_rho;
    std::vector<double> mu(nr), sig(nr), gam(nr), kap(nr);
    for (int r = 0; r < nr; ++r) {
        double m = 0.0;
        for (int t = 0; t < p.n_theta; ++t) m += p.at(r, t);
        m /= p.n_theta;
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (int t = 0; t < p.n_theta; ++t) {
            const double d = p.at(r, t) - m;
            const double d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= p.n_theta;
        m3 /= p.n_theta;
        m4 /= p.n_theta;
        mu[static_cast<std::size_t>(r)] = m;
        if (literal) {
            sig[static_cast<std::size_t>(r)] = m2;
            const bool degenerate = m2 < 1e-24;
            gam[static_cast<std::size_t>(r)] = degenerate ? 0.0 : (m * m * m) / (m2 * m2 * m2);
            kap[static_cast<std::size_t>(r)] = degenerate ? 0.0 : (m * m * m * m) / (m2 * m2 * m2 * m2);
        } else {
            const double sd = std::sqrt(m2);
            sig[static_cast<std::size_t>(r)] = sd;
            const bool degenerate = m2 < 1e-24;
            gam[static_cast<std::size_t>(r)] = degenerate ? 0.0 : m3 / (sd * sd * sd);
            kap[static_cast<std::size_t>(r)] = degenerate ? 0.0 : m4 / (m2 * m2);
        }
    }
    FeatureVector out;
    out.family = Family::Ring;
    out.params.n_rho = p.n_rho;
    out.params.n_theta = p.n_theta;
    out.params.ring_literal = literal;
    out.values.reserve(static_cast<std::size_t>(4 * nr));
    for (const auto& row : {mu, sig, gam, kap})
        out.values.insert(out.values.end(), row.begin(), row.end());
    return out;
}

/// Logarithmic band partition over the retained 1-based bins 2..N/2+1:
/// bins 2 and 3 are kept singly, then [2+2^{p-1}, 1+2^p] for p = 2..log2(N/2).
/// Returned bands are inclusive 1-based bin ranges.
inline std::vector<std::pair<int, int>> fft_log_bands(int n_theta) {
    if (!detail::is_power_of_two(static_cast<std::size_t>(n_theta))) throw NotPowerOfTwo();
    std::vector<std::pair<int, int>> bands;
    const int p_hi = detail::ilog2(static_cast<std::size_t>(n_theta) / 2);
    for (int p = 2; p <= p_hi; ++p) bands.emplace_back(2 + (1 << (p - 1)), 1 + (1 << p));
    return bands;
}

inline int fft_ring_feature_count(int n_rho, int n_theta) {
    return n_rho * (detail::ilog2(static_cast<std::size_t>(n_theta) / 2) + 2);
}

/// Per-ring magnitude spectrum invariants: |Y(1)|, |Y(2)|, |Y(3)| (1-based,
/// DC included) followed by the log-band means. N_rho * (log2(N_theta/2) + 2)
/// features in total.
inline FeatureVector fft_ring_features(const PolarImage& p) {
    if (!detail::is_power_of_two(static_cast<std::size_t>(p.n_theta))) throw NotPowerOfTwo();
    const auto bands = fft_log_bands(p.n_theta);
    FeatureVector out;
    out.family = Family::Fft;
    out.params.fft_n_rho = p.n_rho;
    out.params.fft_n_theta = p.n_theta;
    out.values.reserve(static_cast<std::size_t>(fft_ring_feature_count(p.n_rho, p.n_theta)));
    std::vector<std::complex<double>> signal(static_cast<std::size_t>(p.n_theta));
    for (int r = 0; r < p.n_rho; ++r) {
        for (int t = 0; t < p.n_theta; ++t) signal[static_cast<std::size_t>(t)] = p.at(r, t);
        const auto spectrum = dft_radix2(signal);
        std::vector<double> mag(spectrum.size());
        for (std::size_t i = 0; i < spectrum.size(); ++i) mag[i] = std::abs(spectrum[i]);
        out.values.push_back(mag[0]);
        out.values.push_back(mag[1]);
        out.values.push_back(mag[2]);
        for (const auto& [lo, hi] : bands) {
            double acc = 0.0;
            for (int b = lo; b <= hi; ++b) acc += mag[static_cast<std::size_t>(b - 1)];
            out.values.push_back(acc / (hi - lo + 1));
        }
    }
    return out;
}

}  // namespace rotinv
