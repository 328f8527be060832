#pragma once

#include <string>
#include <vector>

#include "rotinv/errors.hpp"

namespace rotinv {

/// The six descriptor families (fmt split into its two variants).
enum class Family { Hu, Flusser, Zernike, Ring, Fft, Fmt1, Fmt2 };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Hu: return "hu";
        case Family::Flusser: return "flusser";
        case Family::Zernike: return "zernike";
        case Family::Ring: return "ring";
        case Family::Fft: return "fft";
        case Family::Fmt1: return "fmt1";
        case Family::Fmt2: return "fmt2";
    }
    return "?";
}

inline Family parse_family(const std::string& s) {
    if (s == "hu") return Family::Hu;
    if (s == "flusser") return Family::Flusser;
    if (s == "zernike") return Family::Zernike;
    if (s == "ring") return Family::Ring;
    if (s == "fft") return Family::Fft;
    if (s == "fmt1") return Family::Fmt1;
    if (s == "fmt2") return Family::Fmt2;
    throw InvalidIndex("unknown descriptor family: " + s);
}

/// Descriptor parameterization. Defaults follow the evaluation setup:
/// Zernike/ring on a 10 x 16 polar grid with n_max = 5, FFT rings on 8 x 32,
/// Fourier-Mellin with K = V = 7 and sigma = 0.5.
struct DescriptorParams {
    int n_max = 5;
    int n_rho = 10;
    int n_theta = 16;
    int fft_n_rho = 8;
    int fft_n_theta = 32;
    int k_max = 7;
    int v_max = 7;
    double fmt_sigma = 0.5;
    bool ring_literal = false;  ///< use the raw mu^3/sigma^3, mu^4/sigma^4 ratios
};

/// Ordered list of real descriptor values tagged with its family.
struct FeatureVector {
    Family family = Family::Hu;
    DescriptorParams params;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

}  // namespace rotinv
