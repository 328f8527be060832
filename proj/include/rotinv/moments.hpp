#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "rotinv/features.hpp"
#include "rotinv/image.hpp"

namespace rotinv {

using Complex = std::complex<double>;

/// Geometric moment sum (x-cx)^p (y-cy)^q f(x,y); center (0,0) gives the raw
/// moments m_pq.
inline double geometric_moment(const GrayImage& img, int p, int q, const Centroid& center) {
    if (p < 0 || q < 0) throw InvalidIndex("geometric_moment: order must be >= 0");
    double acc = 0.0;
    std::size_t idx = 0;
    for (int y = 0; y < img.height; ++y) {
        const double cy = y - center.cy;
        const double yq = std::pow(cy, q);
        for (int x = 0; x < img.width; ++x, ++idx) {
            const double v = img.data[idx];
            if (v == 0.0) continue;
            acc += std::pow(x - center.cx, p) * yq * v;
        }
    }
    return acc;
}

namespace detail {

/// Table of central complex moments c_pq for all p, q <= max_order, computed
/// about an explicit center in one pass over the pixels.
template <int MaxOrder = 4>
struct ComplexMomentTable {
    std::array<std::array<Complex, MaxOrder + 1>, MaxOrder + 1> c{};

    ComplexMomentTable(const GrayImage& img, const Centroid& center) {
        std::array<Complex, MaxOrder + 1> zp, wq;
        std::size_t idx = 0;
        for (int y = 0; y < img.height; ++y) {
            const double cy = y - center.cy;
            for (int x = 0; x < img.width; ++x, ++idx) {
                const double v = img.data[idx];
                if (v == 0.0) continue;
                const Complex z(x - center.cx, cy);
                const Complex w = std::conj(z);
                zp[0] = 1.0;
                wq[0] = 1.0;
                for (int k = 1; k <= MaxOrder; ++k) {
                    zp[static_cast<std::size_t>(k)] = zp[static_cast<std::size_t>(k - 1)] * z;
                    wq[static_cast<std::size_t>(k)] = wq[static_cast<std::size_t>(k - 1)] * w;
                }
                for (int p = 0; p <= MaxOrder; ++p)
                    for (int q = 0; q <= MaxOrder; ++q)
                        c[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] +=
                            v * zp[static_cast<std::size_t>(p)] * wq[static_cast<std::size_t>(q)];
            }
        }
    }

    Complex at(int p, int q) const { return c[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)]; }
};

}  // namespace detail

/// Central complex moment about an explicit center.
inline Complex complex_moment_at(const GrayImage& img, int p, int q, const Centroid& center) {
    if (p < 0 || q < 0) throw InvalidIndex("complex_moment: order must be >= 0");
    Complex acc = 0.0;
    std::size_t idx = 0;
    for (int y = 0; y < img.height; ++y) {
        const double cy = y - center.cy;
        for (int x = 0; x < img.width; ++x, ++idx) {
            const double v = img.data[idx];
            if (v == 0.0) continue;
            const Complex z(x - center.cx, cy);
            acc += v * std::pow(z, p) * std::pow(std::conj(z), q);
        }
    }
    return acc;
}

/// Central complex moment c_pq about the gravity center. An all-zero image
/// has every moment equal to 0.
inline Complex complex_moment(const GrayImage& img, int p, int q) {
    Centroid c;
    try {
        c = gravity_center(img);
    } catch (const ZeroMass&) {
        return Complex(0.0, 0.0);
    }
    return complex_moment_at(img, p, q, c);
}

/// Hu invariants about an explicit center (used on pyramid levels, where the
/// frame center stands in for the gravity center).
inline FeatureVector hu_features_at(const GrayImage& img, const Centroid& center) {
    const detail::ComplexMomentTable<4> m(img, center);
    const Complex c11 = m.at(1, 1), c20 = m.at(2, 0), c02 = m.at(0, 2);
    const Complex c30 = m.at(3, 0), c03 = m.at(0, 3), c21 = m.at(2, 1), c12 = m.at(1, 2);
    const Complex c12_2 = c12 * c12;
    const Complex c12_3 = c12_2 * c12;

    FeatureVector out;
    out.family = Family::Hu;
    out.values = {
        c11.real(),               // phi1
        (c20 * c02).real(),       // phi2
        (c30 * c03).real(),       // phi3
        (c21 * c12).real(),       // phi4
        (c30 * c12_3).real(),     // phi5
        (c20 * c12_2).real(),     // phi6
        (c30 * c12_3).imag(),     // phi7
    };
    return out;
}

/// The seven Hu invariants in their complex-moment form.
inline FeatureVector hu_features(const GrayImage& img) {
    return hu_features_at(img, gravity_center(img));
}

/// Flusser invariants about an explicit center.
inline FeatureVector flusser_features_at(const GrayImage& img, const Centroid& center) {
    const detail::ComplexMomentTable<4> m(img, center);
    const Complex c11 = m.at(1, 1), c21 = m.at(2, 1), c12 = m.at(1, 2);
    const Complex c20 = m.at(2, 0), c30 = m.at(3, 0), c22 = m.at(2, 2);
    const Complex c31 = m.at(3, 1), c40 = m.at(4, 0);
    const Complex c12_2 = c12 * c12;
    const Complex c12_3 = c12_2 * c12;
    const Complex c12_4 = c12_2 * c12_2;

    FeatureVector out;
    out.family = Family::Flusser;
    out.values = {
        c11.real(),               // psi1
        (c21 * c12).real(),       // psi2
        (c20 * c12_2).real(),     // psi3
        (c20 * c12_2).imag(),     // psi4
        (c30 * c12_3).real(),     // psi5
        (c30 * c12_3).imag(),     // psi6
        c22.real(),               // psi7
        (c31 * c12_2).real(),     // psi8
        (c31 * c12_2).imag(),     // psi9
        (c40 * c12_4).real(),     // psi10
        (c40 * c12_4).imag(),     // psi11
    };
    return out;
}

/// The eleven Flusser invariants (orders two to four).
inline FeatureVector flusser_features(const GrayImage& img) {
    return flusser_features_at(img, gravity_center(img));
}

}  // namespace rotinv
