#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "rotinv/extract.hpp"
#include "rotinv/image.hpp"

namespace rotinv {

/// Boolean grid with the same dimensions as the image it masks.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

namespace detail {

inline int histogram_bin(double v) {
    return std::clamp(static_cast<int>(std::lround(v * 255.0)), 0, 255);
}

}  // namespace detail

/// Global threshold maximizing the between-class variance of the 256-bin
/// histogram over [0, 1]; ties break toward the lowest qualifying bin. The
/// returned value is the upper edge of the background bin, so foreground is
/// v > threshold.
inline double otsu_threshold(const GrayImage& img) {
    std::array<std::int64_t, 256> hist{};
    for (double v : img.data) ++hist[static_cast<std::size_t>(detail::histogram_bin(v))];

    int occupied = 0;
    for (auto h : hist)
        if (h > 0) ++occupied;
    if (occupied <= 1) throw DegenerateHistogram();

    const double n = static_cast<double>(img.size());
    double total_mean = 0.0;
    for (int b = 0; b < 256; ++b) total_mean += b * static_cast<double>(hist[static_cast<std::size_t>(b)]);
    total_mean /= n;

    double best_score = -1.0;
    int best_bin = 0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < 255; ++t) {
        w0 += static_cast<double>(hist[static_cast<std::size_t>(t)]);
        sum0 += t * static_cast<double>(hist[static_cast<std::size_t>(t)]);
        const double w1 = n - w0;
        if (w0 <= 0.0 || w1 <= 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (total_mean * n - sum0) / w1;
        const double score = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (score > best_score) {  // strict: ties keep the lowest bin
            best_score = score;
            best_bin = t;
        }
    }
    return (best_bin + 0.5) / 255.0;
}

inline BinaryMask binarize(const GrayImage& img, double threshold) {
    BinaryMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) mask.bits[i] = img.data[i] > threshold ? 1 : 0;
    return mask;
}

/// Boolean stencil with an odd bounding box, anchored at its center.
struct StructuringElement {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> on;

    bool at(int x, int y) const { return on[static_cast<std::size_t>(y) * width + x] != 0; }

    /// Full n x n square.
    static StructuringElement square(int n) {
        StructuringElement se;
        se.width = se.height = n;
        se.on.assign(static_cast<std::size_t>(n) * n, 1);
        return se;
    }

    /// Discrete Euclidean disk inscribed in a diameter x diameter box
    /// (radius (diameter-1)/2); the 13 x 13 disk is the radius-6 ball.
    static StructuringElement disk(int diameter) {
        StructuringElement se;
        se.width = se.height = diameter;
        se.on.assign(static_cast<std::size_t>(diameter) * diameter, 0);
        const int r = (diameter - 1) / 2;
        for (int y = 0; y < diameter; ++y)
            for (int x = 0; x < diameter; ++x)
                if ((x - r) * (x - r) + (y - r) * (y - r) <= r * r)
                    se.on[static_cast<std::size_t>(y) * diameter + x] = 1;
        return se;
    }
};

enum class MorphOp { Dilate, Erode, Close };

/// Binary morphology; pixels outside the frame count as background for both
/// dilation and erosion, so erosion shrinks shapes touching the border.
/// Close is dilate followed by erode with the same element.
inline BinaryMask morph(const BinaryMask& mask, const StructuringElement& se, MorphOp op) {
    bool any = false;
    for (auto v : se.on) any = any || v != 0;
    if (!any) throw EmptyStructuringElement();

    if (op == MorphOp::Close) {
        return morph(morph(mask, se, MorphOp::Dilate), se, MorphOp::Erode);
    }
    const int ax = se.width / 2;
    const int ay = se.height / 2;
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool value = (op == MorphOp::Erode);
            for (int j = 0; j < se.height && (op == MorphOp::Erode ? value : !value); ++j) {
                for (int i = 0; i < se.width; ++i) {
                    if (!se.at(i, j)) continue;
                    const int xx = x + i - ax;
                    const int yy = y + j - ay;
                    const bool hit = mask.in_bounds(xx, yy) && mask.at(xx, yy);
                    if (op == MorphOp::Dilate) {
                        if (hit) {
                            value = true;
                            break;
                        }
                    } else {
                        if (!hit) {
                            value = false;
                            break;
                        }
                    }
                }
            }
            out.set(x, y, value);
        }
    }
    return out;
}

/// Zero out everything the mask rejects.
inline GrayImage apply_mask(const GrayImage& img, const BinaryMask& mask) {
    GrayImage out = img;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!mask.bits[i]) out.data[i] = 0.0;
    return out;
}

/// Real-image normalization: center-crop 250 x 250, downsample to 64 x 64,
/// Otsu binarize, close (5 x 5 square), dilate (13 x 13 disk), select the
/// foreground, recenter on the gravity center by cropping to the largest
/// centered square, resize to 60 x 60 and add a 2-pixel zero border.
inline GrayImage gz2_normalize(const GrayImage& raw) {
    if (raw.width < 250 || raw.height < 250)
        throw DimensionMismatch("gz2_normalize: input must be at least 250 x 250");
    const int x0 = (raw.width - 250) / 2;
    const int y0 = (raw.height - 250) / 2;
    GrayImage crop(250, 250);
    for (int y = 0; y < 250; ++y)
        for (int x = 0; x < 250; ++x) crop.at(x, y) = raw.at(x0 + x, y0 + y);

    GrayImage small = resize_bilinear(crop, 64, 64);

    BinaryMask mask(64, 64);
    try {
        mask = binarize(small, otsu_threshold(small));
    } catch (const DegenerateHistogram&) {
        // Constant image: either nothing to keep or everything is foreground.
        if (small.total() <= 0.0) throw ZeroMass("gz2_normalize: mask selects nothing");
        mask = BinaryMask(64, 64, true);
    }
    mask = morph(mask, StructuringElement::square(5), MorphOp::Close);
    mask = morph(mask, StructuringElement::disk(13), MorphOp::Dilate);

    const GrayImage selected = apply_mask(small, mask);
    Centroid c;
    try {
        c = gravity_center(selected);
    } catch (const ZeroMass&) {
        throw ZeroMass("gz2_normalize: mask selects nothing");
    }
    const int icx = std::clamp(static_cast<int>(std::lround(c.cx)), 0, 63);
    const int icy = std::clamp(static_cast<int>(std::lround(c.cy)), 0, 63);
    const int half = std::min({icx, icy, 63 - icx, 63 - icy});
    const int side = 2 * half + 1;
    GrayImage square(side, side);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) square.at(x, y) = selected.at(icx - half + x, icy - half + y);

    const GrayImage resized = resize_bilinear(square, 60, 60);
    GrayImage out(64, 64);
    for (int y = 0; y < 60; ++y)
        for (int x = 0; x < 60; ++x) out.at(x + 2, y + 2) = resized.at(x, y);
    return out;
}

/// Band-pass decomposition: L_j = I_j - blur(I_j), iterated without
/// downsampling; the residual is the final low-pass image. Levels plus
/// residual reconstruct the input exactly.
struct Pyramid {
    std::vector<GrayImage> levels;
    GrayImage residual;
};

inline Pyramid laplacian_pyramid(const GrayImage& img, int levels = 4, double sigma = 2.0) {
    if (levels < 1) throw InvalidIndex("laplacian_pyramid: levels must be >= 1");
    Pyramid pyr;
    pyr.levels.reserve(static_cast<std::size_t>(levels));
    GrayImage current = img;
    for (int j = 0; j < levels; ++j) {
        GrayImage low = gaussian_blur(current, sigma);
        GrayImage band(current.width, current.height);
        for (std::size_t i = 0; i < band.size(); ++i) band.data[i] = current.data[i] - low.data[i];
        pyr.levels.push_back(std::move(band));
        current = std::move(low);
    }
    pyr.residual = std::move(current);
    return pyr;
}

/// Concatenation of one descriptor family over the pyramid levels, in order.
/// Levels are band-pass (near-zero mass), so descriptors anchor on the frame
/// center.
inline FeatureVector pyramid_features(const Pyramid& pyr, Family family,
                                      const DescriptorParams& params) {
    FeatureVector out;
    out.family = family;
    out.params = params;
    for (const GrayImage& level : pyr.levels) {
        const FeatureVector f = extract_features(level, family, params, CenterMode::Frame);
        out.values.insert(out.values.end(), f.values.begin(), f.values.end());
    }
    return out;
}

}  // namespace rotinv
