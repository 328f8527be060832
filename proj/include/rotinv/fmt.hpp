#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "rotinv/features.hpp"
#include "rotinv/image.hpp"

namespace rotinv {

/// Number of retained coefficients in the symmetry-reduced grid.
inline int fmt_count(int k_max, int v_max) {
    if (k_max < 0 || v_max < 0) throw InvalidIndex("fmt_count: orders must be >= 0");
    return (1 + v_max) + k_max * (2 * v_max + 1);
}

/// Fourier-Mellin coefficients over the half-plane
/// {(0, v): 0 <= v <= V} u {(k, v): 1 <= k <= K, -V <= v <= V};
/// the other half follows from M(-k, -v) = conj(M(k, v)).
struct FmtGrid {
    int k_max = 0;
    int v_max = 0;
    double sigma = 0.5;
    std::vector<std::complex<double>> coeffs;

    FmtGrid() = default;
    FmtGrid(int k, int v, double s)
        : k_max(k), v_max(v), sigma(s), coeffs(static_cast<std::size_t>(fmt_count(k, v))) {}

    std::size_t index(int k, int v) const {
        if (k == 0) {
            if (v < 0 || v > v_max) throw InvalidIndex("FmtGrid: v out of range for k = 0");
            return static_cast<std::size_t>(v);
        }
        if (k < 1 || k > k_max || v < -v_max || v > v_max)
            throw InvalidIndex("FmtGrid: (k, v) outside the stored half-plane");
        return static_cast<std::size_t>((1 + v_max) + (k - 1) * (2 * v_max + 1) + (v + v_max));
    }

    std::complex<double> at(int k, int v) const { return coeffs[index(k, v)]; }
    std::complex<double>& at(int k, int v) { return coeffs[index(k, v)]; }
};

/// Discrete Cartesian Fourier-Mellin transform about an explicit center:
/// M(k,v) = (1/2pi) sum f(p,q) (p+iq)^{-k} (p^2+q^2)^{(k-2+sigma-iv)/2}
/// over pixel offsets (p,q) from the center. The origin sample is excluded
/// (the continuous measure is dr/r; the term is ill-defined for k < 2 with
/// sigma < 2).
inline FmtGrid fmt_cartesian_at(const GrayImage& img, const Centroid& center, int k_max, int v_max,
                                double sigma = 0.5) {
    if (!(sigma > 0.0)) throw InvalidIndex("fmt_cartesian: sigma must be > 0");
    FmtGrid grid(k_max, v_max, sigma);
    const int n_v = 2 * v_max + 1;
    std::vector<std::complex<double>> pow_v(static_cast<std::size_t>(n_v));
    std::size_t idx = 0;
    for (int y = 0; y < img.height; ++y) {
        const double q = y - center.cy;
        for (int x = 0; x < img.width; ++x, ++idx) {
            const double f = img.data[idx];
            if (f == 0.0) continue;
            const double p = x - center.cx;
            const double r2 = p * p + q * q;
            if (r2 < 1e-12) continue;  // origin sample
            const double rho = std::sqrt(r2);
            const double w = f * std::pow(rho, sigma - 2.0) / kTwoPi;
            const std::complex<double> phase_theta(p / rho, -q / rho);  // e^{-i theta}
            const double lr = std::log(rho);
            const std::complex<double> phase_v(std::cos(lr), -std::sin(lr));  // e^{-i ln rho}

            pow_v[static_cast<std::size_t>(v_max)] = w;
            for (int v = 1; v <= v_max; ++v) {
                pow_v[static_cast<std::size_t>(v_max + v)] =
                    pow_v[static_cast<std::size_t>(v_max + v - 1)] * phase_v;
                pow_v[static_cast<std::size_t>(v_max - v)] =
                    pow_v[static_cast<std::size_t>(v_max - v + 1)] * std::conj(phase_v);
            }

            std::complex<double> pk(1.0, 0.0);
            for (int k = 0; k <= k_max; ++k) {
                const int v_lo = (k == 0) ? 0 : -v_max;
                for (int v = v_lo; v <= v_max; ++v)
                    grid.coeffs[grid.index(k, v)] += pk * pow_v[static_cast<std::size_t>(v_max + v)];
                pk *= phase_theta;
            }
        }
    }
    return grid;
}

/// Cartesian FMT about the gravity center.
inline FmtGrid fmt_cartesian(const GrayImage& img, int k_max, int v_max, double sigma = 0.5) {
    return fmt_cartesian_at(img, gravity_center(img), k_max, v_max, sigma);
}

/// |M(k,v)| in the fixed (0,0..V), then k = 1..K with v = -V..V ordering.
inline FeatureVector fmt1_features(const FmtGrid& g) {
    FeatureVector out;
    out.family = Family::Fmt1;
    out.params.k_max = g.k_max;
    out.params.v_max = g.v_max;
    out.params.fmt_sigma = g.sigma;
    out.values.reserve(g.coeffs.size());
    for (const auto& c : g.coeffs) out.values.push_back(std::abs(c));
    return out;
}

/// Phase-normalized coefficients
/// I(k,v) = M(0,0)^{(-sigma+iv)/sigma} e^{i k arg M(1,0)} M(k,v),
/// retained in full complex form.
inline std::vector<std::complex<double>> fmt2_normalized(const FmtGrid& g) {
    const std::complex<double> m00 = g.at(0, 0);
    if (g.k_max < 1) throw InvalidIndex("fmt2: needs k_max >= 1 for the M(1,0) normalizer");
    const std::complex<double> m10 = g.at(1, 0);
    if (std::abs(m00) < 1e-12 || std::abs(m10) < 1e-12)
        throw DegenerateNormalizer("fmt2: M(0,0) or M(1,0) is (near) zero");
    const double phase10 = std::arg(m10);

    std::vector<std::complex<double>> out(g.coeffs.size());
    auto emit = [&](int k, int v) {
        const std::complex<double> expo(-1.0, v / g.sigma);  // (-sigma + iv) / sigma
        const std::complex<double> scale = std::pow(m00, expo);
        const std::complex<double> spin(std::cos(k * phase10), std::sin(k * phase10));
        out[g.index(k, v)] = scale * spin * g.at(k, v);
    };
    for (int v = 0; v <= g.v_max; ++v) emit(0, v);
    for (int k = 1; k <= g.k_max; ++k)
        for (int v = -g.v_max; v <= g.v_max; ++v) emit(k, v);
    return out;
}

/// Magnitudes |I(k,v)| of the phase-normalized coefficients, same ordering
/// as fmt1.
inline FeatureVector fmt2_features(const FmtGrid& g) {
    const auto normalized = fmt2_normalized(g);
    FeatureVector out;
    out.family = Family::Fmt2;
    out.params.k_max = g.k_max;
    out.params.v_max = g.v_max;
    out.params.fmt_sigma = g.sigma;
    out.values.reserve(normalized.size());
    for (const auto& c : normalized) out.values.push_back(std::abs(c));
    return out;
}

}  // namespace rotinv
