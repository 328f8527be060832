#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rotinv/errors.hpp"

namespace rotinv {

inline constexpr double kPi = 3.14159265358979323846264338328;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Sub-pixel image coordinate. Pixel (i, j) sits at real coordinate (i, j);
/// an image of width W spans [-0.5, W-0.5] along x.
struct Centroid {
    double cx = 0.0;
    double cy = 0.0;
};

/// Dense row-major grid of real intensities, nominally in [0, 1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    std::size_t size() const { return data.size(); }

    double total() const {
        double s = 0.0;
        for (double v : data) s += v;
        return s;
    }
};

inline Centroid frame_center(const GrayImage& img) {
    return {0.5 * (img.width - 1), 0.5 * (img.height - 1)};
}

/// Bilinear sample; coordinates outside the pixel grid read 0.
inline double sample_bilinear_zero(const GrayImage& img, double x, double y) {
    const double fx0 = std::floor(x);
    const double fy0 = std::floor(y);
    const int x0 = static_cast<int>(fx0);
    const int y0 = static_cast<int>(fy0);
    const double ax = x - fx0;
    const double ay = y - fy0;
    auto pick = [&](int xx, int yy) { return img.in_bounds(xx, yy) ? img.at(xx, yy) : 0.0; };
    const double v00 = pick(x0, y0);
    const double v10 = pick(x0 + 1, y0);
    const double v01 = pick(x0, y0 + 1);
    const double v11 = pick(x0 + 1, y0 + 1);
    return (1.0 - ay) * ((1.0 - ax) * v00 + ax * v10) + ay * ((1.0 - ax) * v01 + ax * v11);
}

/// Bilinear sample with coordinates clamped to the grid (used by resizing,
/// keeps constants constant).
inline double sample_bilinear_clamp(const GrayImage& img, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
    const int x0 = std::min(static_cast<int>(x), img.width - 1);
    const int y0 = std::min(static_cast<int>(y), img.height - 1);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double ax = x - x0;
    const double ay = y - y0;
    return (1.0 - ay) * ((1.0 - ax) * img.at(x0, y0) + ax * img.at(x1, y0)) +
           ay * ((1.0 - ax) * img.at(x0, y1) + ax * img.at(x1, y1));
}

/// Intensity-weighted centroid (m10/m00, m01/m00).
inline Centroid gravity_center(const GrayImage& img) {
    double m00 = 0.0, m10 = 0.0, m01 = 0.0;
    std::size_t idx = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x, ++idx) {
            const double v = img.data[idx];
            m00 += v;
            m10 += v * x;
            m01 += v * y;
        }
    }
    if (m00 <= 0.0) throw ZeroMass();
    return {m10 / m00, m01 / m00};
}

/// Largest Euclidean distance from `center` to any pixel with intensity > eps.
inline double max_radius(const GrayImage& img, const Centroid& center, double eps) {
    double best = -1.0;
    std::size_t idx = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x, ++idx) {
            if (img.data[idx] > eps) {
                const double dx = x - center.cx;
                const double dy = y - center.cy;
                best = std::max(best, dx * dx + dy * dy);
            }
        }
    }
    if (best < 0.0) throw EmptyImage();
    return std::sqrt(best);
}

/// Bilinear resample to w x h with pixel-center alignment. An identity
/// resize reproduces the input bitwise.
inline GrayImage resize_bilinear(const GrayImage& img, int w, int h) {
    if (w < 1 || h < 1) throw InvalidIndex("resize_bilinear: target size must be >= 1");
    GrayImage out(w, h);
    const double sx = static_cast<double>(img.width) / w;
    const double sy = static_cast<double>(img.height) / h;
    for (int y = 0; y < h; ++y) {
        const double src_y = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < w; ++x) {
            const double src_x = (x + 0.5) * sx - 0.5;
            out.at(x, y) = sample_bilinear_clamp(img, src_x, src_y);
        }
    }
    return out;
}

namespace detail {
// Snap near-exact multiples of pi/2 so those rotations become pure pixel
// permutations.
inline void snapped_cos_sin(double angle, double& c, double& s) {
    c = std::cos(angle);
    s = std::sin(angle);
    if (std::abs(c) < 1e-12) c = 0.0;
    if (std::abs(s) < 1e-12) s = 0.0;
    if (std::abs(std::abs(c) - 1.0) < 1e-12) c = std::copysign(1.0, c);
    if (std::abs(std::abs(s) - 1.0) < 1e-12) s = std::copysign(1.0, s);
}
}  // namespace detail

/// Inverse-mapped bilinear rotation about `center`; out-of-frame reads 0.
inline GrayImage rotate(const GrayImage& img, double angle, const Centroid& center) {
    double c, s;
    detail::snapped_cos_sin(angle, c, s);
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        const double dy = y - center.cy;
        for (int x = 0; x < img.width; ++x) {
            const double dx = x - center.cx;
            const double src_x = center.cx + c * dx + s * dy;
            const double src_y = center.cy - s * dx + c * dy;
            out.at(x, y) = sample_bilinear_zero(img, src_x, src_y);
        }
    }
    return out;
}

/// Separable Gaussian convolution. Kernel truncated at +-ceil(3*sigma) and
/// renormalized to sum 1; borders replicate, so constants are fixed points.
inline GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (!(sigma > 0.0)) throw InvalidIndex("gaussian_blur: sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : kernel) w /= sum;

    GrayImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xx = std::clamp(x + i, 0, img.width - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] * img.at(xx, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yy = std::clamp(y + i, 0, img.height - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] * tmp.at(x, yy);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

/// N_rho x N_theta resampling of an image around a center point. Ring r
/// (1-based) holds radius r * (r_max / n_rho); angle t (1-based) is
/// t * (2*pi / n_theta). Storage is 0-based ring-major.
struct PolarImage {
    int n_rho = 0;
    int n_theta = 0;
    double r_max = 0.0;
    std::vector<double> data;

    PolarImage() = default;
    PolarImage(int nr, int nt, double rm)
        : n_rho(nr), n_theta(nt), r_max(rm), data(static_cast<std::size_t>(nr) * nt, 0.0) {}

    double at(int r, int t) const { return data[static_cast<std::size_t>(r) * n_theta + t]; }
    double& at(int r, int t) { return data[static_cast<std::size_t>(r) * n_theta + t]; }

    double delta_rho() const { return r_max / n_rho; }
    double delta_theta() const { return kTwoPi / n_theta; }
};

/// Polar resampling about an explicit center. Samples outside the frame
/// read 0.
inline PolarImage to_polar_at(const GrayImage& img, const Centroid& c, int n_rho, int n_theta,
                              double r_max) {
    if (n_rho < 1 || n_theta < 4 || !(r_max > 0.0))
        throw InvalidIndex("to_polar: need n_rho >= 1, n_theta >= 4, r_max > 0");
    PolarImage p(n_rho, n_theta, r_max);
    const double d_rho = p.delta_rho();
    const double d_theta = p.delta_theta();
    for (int r = 0; r < n_rho; ++r) {
        const double rho = (r + 1) * d_rho;
        for (int t = 0; t < n_theta; ++t) {
            const double theta = (t + 1) * d_theta;
            const double x = c.cx + rho * std::cos(theta);
            const double y = c.cy + rho * std::sin(theta);
            p.at(r, t) = sample_bilinear_zero(img, x, y);
        }
    }
    return p;
}

/// Polar resampling about the gravity center (frame center when the image is
/// empty).
inline PolarImage to_polar(const GrayImage& img, int n_rho, int n_theta, double r_max) {
    Centroid c;
    try {
        c = gravity_center(img);
    } catch (const ZeroMass&) {
        c = frame_center(img);
    }
    return to_polar_at(img, c, n_rho, n_theta, r_max);
}

/// Geometric normalization used by the artificial pipeline: recenter on the
/// gravity center, crop/pad to the square of side 2*R_max around it, resize
/// to out_side x out_side and surround with `border` zero pixels.
inline GrayImage center_square_normalize(const GrayImage& img, int out_side, int border,
                                         double eps = 1e-3) {
    const Centroid c = gravity_center(img);  // throws ZeroMass
    double radius;
    try {
        radius = max_radius(img, c, eps);
    } catch (const EmptyImage&) {
        radius = 0.0;
    }
    radius = std::max(radius, 0.5);

    GrayImage core(out_side, out_side);
    const double step = 2.0 * radius / out_side;
    const double x_lo = c.cx - radius;
    const double y_lo = c.cy - radius;
    for (int y = 0; y < out_side; ++y) {
        const double src_y = y_lo + (y + 0.5) * step;
        for (int x = 0; x < out_side; ++x) {
            const double src_x = x_lo + (x + 0.5) * step;
            core.at(x, y) = sample_bilinear_zero(img, src_x, src_y);
        }
    }
    if (border <= 0) return core;

    GrayImage out(out_side + 2 * border, out_side + 2 * border);
    for (int y = 0; y < out_side; ++y)
        for (int x = 0; x < out_side; ++x) out.at(x + border, y + border) = core.at(x, y);
    return out;
}

}  // namespace rotinv
