#pragma once

#include <cmath>
#include <vector>

#include "rotinv/features.hpp"
#include "rotinv/image.hpp"
#include "rotinv/moments.hpp"
#include "rotinv/rng.hpp"

namespace testutil {

using rotinv::Centroid;
using rotinv::GrayImage;

/// Isotropic Gaussian blob sampled at pixel centers.
inline GrayImage gaussian_blob(int side, double cx, double cy, double sigma, double amp = 1.0) {
    GrayImage img(side, side);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            img.at(x, y) = amp * std::exp(-d2 / (2.0 * sigma * sigma));
        }
    return img;
}

/// Smooth annulus (Gaussian cross-section in radius) centered on the frame.
inline GrayImage gaussian_annulus(int side, double r_mid, double r_sigma, double amp = 1.0) {
    GrayImage img(side, side);
    const double c = 0.5 * (side - 1);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const double r = std::hypot(x - c, y - c);
            const double d = (r - r_mid) / r_sigma;
            img.at(x, y) = amp * std::exp(-0.5 * d * d);
        }
    return img;
}

/// Hard-edged disk.
inline GrayImage disk(int side, double cx, double cy, double radius, double value = 1.0) {
    GrayImage img(side, side);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            if (std::hypot(x - cx, y - cy) <= radius) img.at(x, y) = value;
    return img;
}

/// Uniform-noise image in [0, 1].
inline GrayImage random_image(int w, int h, std::uint64_t seed) {
    rotinv::Rng rng(seed);
    GrayImage img(w, h);
    for (double& v : img.data) v = rng.uniform01();
    return img;
}

/// A smooth but asymmetric test shape (two unequal blobs); useful where
/// symmetric images would make moments vanish.
inline GrayImage asymmetric_shape(int side = 64) {
    GrayImage a = gaussian_blob(side, 0.5 * (side - 1) + 4.0, 0.5 * (side - 1) - 2.0, 5.0, 1.0);
    const GrayImage b = gaussian_blob(side, 0.5 * (side - 1) - 6.0, 0.5 * (side - 1) + 3.0, 3.0, 0.6);
    for (std::size_t i = 0; i < a.size(); ++i) a.data[i] = std::min(1.0, a.data[i] + b.data[i]);
    return a;
}

inline double max_abs_diff(const GrayImage& a, const GrayImage& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

inline double rel_rms(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Componentwise relative comparison with an absolute floor of rtol times
/// the vector scale: entries that are discretization residues of analytic
/// zeros carry errors relative to the summation scale, not to themselves.
inline bool rel_match(const std::vector<double>& a, const std::vector<double>& b, double rtol) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (double v : b) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double m = std::max(std::abs(a[i]), std::abs(b[i]));
        if (std::abs(a[i] - b[i]) > rtol * (m + scale)) return false;
    }
    return true;
}

/// Comparison against explicit per-component conditioning bounds (for the
/// moment products, whose Im parts are cancellation-dominated).
inline bool match_with_bounds(const std::vector<double>& a, const std::vector<double>& b,
                              const std::vector<double>& bounds, double rtol) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double tol = rtol * std::max(std::max(std::abs(a[i]), std::abs(b[i])), bounds[i]);
        if (std::abs(a[i] - b[i]) > tol) return false;
    }
    return true;
}

/// Conditioning bound for every Hu / Flusser component: products of the
/// radial absolute moment sums R_d = sum rho^d f, which bound |c_pq| with
/// p + q = d and, unlike the moments themselves, never vanish by symmetry.
inline std::vector<double> moment_product_bounds(const rotinv::GrayImage& img,
                                                 rotinv::Family family) {
    const rotinv::Centroid c = rotinv::gravity_center(img);
    auto radial = [&](int degree) {
        double acc = 0.0;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) {
                const double rho = std::hypot(x - c.cx, y - c.cy);
                acc += std::pow(rho, degree) * img.at(x, y);
            }
        return acc;
    };
    const double r2 = radial(2), r3 = radial(3), r4 = radial(4);
    const double r3_2 = r3 * r3, r3_3 = r3_2 * r3, r3_4 = r3_2 * r3_2;
    if (family == rotinv::Family::Hu)
        return {r2, r2 * r2, r3_2, r3_2, r3 * r3_3, r2 * r3_2, r3 * r3_3};
    return {r2,   r3_2,      r2 * r3_2, r2 * r3_2, r3_4, r3_4,
            r4,   r4 * r3_2, r4 * r3_2, r4 * r3_4, r4 * r3_4};
}

}  // namespace testutil
