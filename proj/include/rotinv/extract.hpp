#pragma once

#include <algorithm>
#include <string>

#include "rotinv/features.hpp"
#include "rotinv/fmt.hpp"
#include "rotinv/image.hpp"
#include "rotinv/moments.hpp"
#include "rotinv/ringfeat.hpp"
#include "rotinv/zernike.hpp"

namespace rotinv {

/// Which point descriptors treat as the origin. Gravity is the default;
/// Frame is used on band-pass images such as Laplacian pyramid levels whose
/// total mass is close to zero.
enum class CenterMode { Gravity, Frame };

namespace detail {

inline Centroid resolve_center(const GrayImage& img, CenterMode mode) {
    if (mode == CenterMode::Frame) return frame_center(img);
    return gravity_center(img);
}

inline double half_frame_radius(const GrayImage& img) {
    return 0.5 * std::min(img.width, img.height);
}

}  // namespace detail

/// Single-image dispatcher over the descriptor families. Polar-based
/// families sample out to half the frame side.
inline FeatureVector extract_features(const GrayImage& img, Family family,
                                      const DescriptorParams& params,
                                      CenterMode mode = CenterMode::Gravity) {
    switch (family) {
        case Family::Hu: {
            FeatureVector f = hu_features_at(img, detail::resolve_center(img, mode));
            f.params = params;
            return f;
        }
        case Family::Flusser: {
            FeatureVector f = flusser_features_at(img, detail::resolve_center(img, mode));
            f.params = params;
            return f;
        }
        case Family::Zernike: {
            const Centroid c = detail::resolve_center(img, mode);
            const PolarImage p =
                to_polar_at(img, c, params.n_rho, params.n_theta, detail::half_frame_radius(img));
            FeatureVector f = zernike_features(p, params.n_max);
            f.params = params;
            return f;
        }
        case Family::Ring: {
            const Centroid c = detail::resolve_center(img, mode);
            const PolarImage p =
                to_polar_at(img, c, params.n_rho, params.n_theta, detail::half_frame_radius(img));
            FeatureVector f = ring_stats(p, params.ring_literal);
            f.params = params;
            return f;
        }
        case Family::Fft: {
            const Centroid c = detail::resolve_center(img, mode);
            const PolarImage p = to_polar_at(img, c, params.fft_n_rho, params.fft_n_theta,
                                             detail::half_frame_radius(img));
            FeatureVector f = fft_ring_features(p);
            f.params = params;
            return f;
        }
        case Family::Fmt1: {
            const Centroid c = detail::resolve_center(img, mode);
            FeatureVector f =
                fmt1_features(fmt_cartesian_at(img, c, params.k_max, params.v_max, params.fmt_sigma));
            f.params = params;
            return f;
        }
        case Family::Fmt2: {
            const Centroid c = detail::resolve_center(img, mode);
            FeatureVector f =
                fmt2_features(fmt_cartesian_at(img, c, params.k_max, params.v_max, params.fmt_sigma));
            f.params = params;
            return f;
        }
    }
    throw InvalidIndex("extract_features: unknown family");
}

/// Expected feature count per image for a family.
inline int feature_count(Family family, const DescriptorParams& params) {
    switch (family) {
        case Family::Hu: return 7;
        case Family::Flusser: return 11;
        case Family::Zernike:
            return static_cast<int>(zernike_index_vectors(params.n_max).size());
        case Family::Ring: return 4 * params.n_rho;
        case Family::Fft: return fft_ring_feature_count(params.fft_n_rho, params.fft_n_theta);
        case Family::Fmt1:
        case Family::Fmt2: return fmt_count(params.k_max, params.v_max);
    }
    throw InvalidIndex("feature_count: unknown family");
}

}  // namespace rotinv
