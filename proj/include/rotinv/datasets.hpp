#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rotinv/image.hpp"
#include "rotinv/image_io.hpp"
#include "rotinv/parallel.hpp"
#include "rotinv/preprocess.hpp"
#include "rotinv/rng.hpp"

namespace rotinv {

// ---------------------------------------------------------------------------
// Galaxy taxonomy
// ---------------------------------------------------------------------------

enum class GalaxyLabel { E0, E3, E7, S0, Sa, Sb, Sc, SBa, SBb, SBc, I };

inline constexpr int kNumGalaxyClasses = 11;

inline const char* to_string(GalaxyLabel label) {
    switch (label) {
        case GalaxyLabel::E0: return "E0";
        case GalaxyLabel::E3: return "E3";
        case GalaxyLabel::E7: return "E7";
        case GalaxyLabel::S0: return "S0";
        case GalaxyLabel::Sa: return "Sa";
        case GalaxyLabel::Sb: return "Sb";
        case GalaxyLabel::Sc: return "Sc";
        case GalaxyLabel::SBa: return "SBa";
        case GalaxyLabel::SBb: return "SBb";
        case GalaxyLabel::SBc: return "SBc";
        case GalaxyLabel::I: return "I";
    }
    return "?";
}

inline GalaxyLabel parse_galaxy_label(const std::string& s) {
    static const std::array<GalaxyLabel, kNumGalaxyClasses> all = {
        GalaxyLabel::E0,  GalaxyLabel::E3,  GalaxyLabel::E7, GalaxyLabel::S0,
        GalaxyLabel::Sa,  GalaxyLabel::Sb,  GalaxyLabel::Sc, GalaxyLabel::SBa,
        GalaxyLabel::SBb, GalaxyLabel::SBc, GalaxyLabel::I};
    for (GalaxyLabel l : all)
        if (s == to_string(l)) return l;
    throw InvalidIndex("unknown galaxy class: " + s);
}

/// 5-cluster grouping: E = {E0,E3,E7}, S = {Sa,Sb,Sc}, SB = {SBa,SBb,SBc},
/// with S0 and I standing alone.
enum class Cluster5 { E, S0, S, SB, I };

inline Cluster5 cluster5_of(GalaxyLabel label) {
    switch (label) {
        case GalaxyLabel::E0:
        case GalaxyLabel::E3:
        case GalaxyLabel::E7: return Cluster5::E;
        case GalaxyLabel::S0: return Cluster5::S0;
        case GalaxyLabel::Sa:
        case GalaxyLabel::Sb:
        case GalaxyLabel::Sc: return Cluster5::S;
        case GalaxyLabel::SBa:
        case GalaxyLabel::SBb:
        case GalaxyLabel::SBc: return Cluster5::SB;
        case GalaxyLabel::I: return Cluster5::I;
    }
    throw InvalidIndex("cluster5_of: bad label");
}

/// 3-cluster grouping keeps S, SB and E; S0 and I are excluded entirely.
enum class Cluster3 { S, SB, E };

inline std::optional<Cluster3> cluster3_of(GalaxyLabel label) {
    switch (cluster5_of(label)) {
        case Cluster5::S: return Cluster3::S;
        case Cluster5::SB: return Cluster3::SB;
        case Cluster5::E: return Cluster3::E;
        default: return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Parametric template rendering
// ---------------------------------------------------------------------------

namespace detail {

/// Additive shape components evaluated analytically at pixel centers.
/// Lengths are in units of a 64-pixel frame and scaled when rendering at
/// other sizes. The radial falloff exp(-(m^2)^2) has near-compact support,
/// which keeps the maximum-radius estimate stable under rotation.
struct GalaxyShape {
    double angle = 0.0;  // orientation of the whole shape

    double ellipse_a = 0.0, ellipse_b = 0.0, ellipse_amp = 0.0;
    double bulge_sigma = 0.0, bulge_amp = 0.0;
    double disk_a = 0.0, disk_amp = 0.0;

    bool arms = false;
    double pitch_deg = 20.0, arm_amp = 0.0, arm_mid = 12.0, arm_half = 7.0, arm_rho0 = 4.0;
    double arm_sharp = 2.0;
    // Relative brightness of the second arm. Values below 1 break the point
    // symmetry, so the odd-order moments carry real signal instead of
    // discretization residue.
    double arm2_frac = 0.55;

    bool bar = false;
    double bar_len = 10.0, bar_wid = 2.5, bar_amp = 0.0;

    struct Blob {
        double x, y, sigma, amp;
    };
    std::vector<Blob> blobs;

    double eval(double dx, double dy) const {
        const double ca = std::cos(angle), sa = std::sin(angle);
        const double u = ca * dx + sa * dy;
        const double v = -sa * dx + ca * dy;
        const double rho = std::sqrt(dx * dx + dy * dy);
        double acc = 0.0;
        if (ellipse_amp > 0.0) {
            const double m2 = (u / ellipse_a) * (u / ellipse_a) + (v / ellipse_b) * (v / ellipse_b);
            acc += ellipse_amp * std::exp(-m2 * m2);
        }
        if (bulge_amp > 0.0) {
            const double t = rho / bulge_sigma;
            acc += bulge_amp * std::exp(-t * t);
        }
        if (disk_amp > 0.0) {
            const double m2 = (rho / disk_a) * (rho / disk_a);
            acc += disk_amp * std::exp(-m2 * m2);
        }
        if (bar && bar_amp > 0.0) {
            const double m2 = (u / bar_len) * (u / bar_len) + (v / bar_wid) * (v / bar_wid);
            acc += bar_amp * std::exp(-m2 * m2);
        }
        if (arms && arm_amp > 0.0 && rho > 0.5) {
            const double pitch = pitch_deg * kPi / 180.0;
            const double theta = std::atan2(v, u);
            const double theta_sp = std::log(std::max(rho, 0.75) / arm_rho0) / std::tan(pitch);
            const double band = (rho - arm_mid) / arm_half;
            const double env = std::exp(-(band * band) * (band * band));
            const double s1 = 0.5 * (1.0 + std::cos(theta - theta_sp));
            const double s2 = 0.5 * (1.0 + std::cos(theta - theta_sp - kPi));
            acc += arm_amp * env *
                   (std::pow(s1, arm_sharp) + arm2_frac * std::pow(s2, arm_sharp));
        }
        for (const Blob& b : blobs) {
            const double bx = dx - b.x, by = dy - b.y;
            const double t = (bx * bx + by * by) / (b.sigma * b.sigma);
            acc += b.amp * std::exp(-t);
        }
        return std::min(acc, 1.0);
    }
};

inline GalaxyShape template_shape(GalaxyLabel label, std::uint64_t seed) {
    GalaxyShape s;
    switch (label) {
        case GalaxyLabel::E0:
            s.ellipse_a = s.ellipse_b = 13.0;
            s.ellipse_amp = 1.0;
            break;
        case GalaxyLabel::E3:
            s.ellipse_a = 15.0;
            s.ellipse_b = 10.5;  // b/a = 0.7
            s.ellipse_amp = 0.95;
            break;
        case GalaxyLabel::E7:
            s.ellipse_a = 16.0;
            s.ellipse_b = 4.8;  // b/a = 0.3
            s.ellipse_amp = 0.95;
            break;
        case GalaxyLabel::S0:
            s.bulge_sigma = 4.5;
            s.bulge_amp = 1.0;
            s.disk_a = 14.0;
            s.disk_amp = 0.45;
            break;
        case GalaxyLabel::Sa:
            s.bulge_sigma = 5.0;
            s.bulge_amp = 1.0;
            s.arms = true;
            s.pitch_deg = 10.0;
            s.arm_amp = 0.7;
            s.arm_mid = 12.0;
            s.arm_half = 6.0;
            s.arm_rho0 = 4.0;
            s.arm2_frac = 0.3;
            break;
        case GalaxyLabel::Sb:
            s.bulge_sigma = 4.2;
            s.bulge_amp = 0.9;
            s.arms = true;
            s.pitch_deg = 20.0;
            s.arm_amp = 0.62;
            s.arm_mid = 13.0;
            s.arm_half = 6.5;
            s.arm_rho0 = 4.0;
            s.arm2_frac = 0.4;
            break;
        case GalaxyLabel::Sc:
            s.bulge_sigma = 3.2;
            s.bulge_amp = 0.8;
            s.arms = true;
            s.pitch_deg = 31.0;
            s.arm_amp = 0.65;
            s.arm_mid = 13.5;
            s.arm_half = 7.0;
            s.arm_rho0 = 3.5;
            s.arm2_frac = 0.45;
            break;
        case GalaxyLabel::SBa:
            s.bulge_sigma = 3.5;
            s.bulge_amp = 0.95;
            s.bar = true;
            s.bar_len = 9.0;
            s.bar_wid = 4.2;
            s.bar_amp = 0.7;
            s.arms = true;
            s.pitch_deg = 12.0;
            s.arm_amp = 0.55;
            s.arm_mid = 14.0;
            s.arm_half = 6.0;
            s.arm_rho0 = 9.0;  // arms anchored at the bar ends
            s.arm2_frac = 0.35;
            break;
        case GalaxyLabel::SBb:
            s.bulge_sigma = 3.2;
            s.bulge_amp = 0.9;
            s.bar = true;
            s.bar_len = 10.5;
            s.bar_wid = 3.8;
            s.bar_amp = 0.7;
            s.arms = true;
            s.pitch_deg = 22.0;
            s.arm_amp = 0.58;
            s.arm_mid = 15.0;
            s.arm_half = 6.2;
            s.arm_rho0 = 10.5;
            s.arm2_frac = 0.52;
            break;
        case GalaxyLabel::SBc:
            s.bulge_sigma = 3.0;
            s.bulge_amp = 0.85;
            s.bar = true;
            s.bar_len = 12.0;
            s.bar_wid = 3.4;
            s.bar_amp = 0.7;
            s.arms = true;
            s.pitch_deg = 32.0;
            s.arm_amp = 0.6;
            s.arm_mid = 15.0;
            s.arm_half = 6.8;
            s.arm_rho0 = 12.0;
            s.arm2_frac = 0.47;
            break;
        case GalaxyLabel::I: {
            Rng rng(derive_seed(seed, 10));
            for (int i = 0; i < 7; ++i) {
                GalaxyShape::Blob b;
                const double r = rng.uniform(0.0, 11.0);
                const double a = rng.uniform(0.0, kTwoPi);
                b.x = r * std::cos(a);
                b.y = r * std::sin(a);
                b.sigma = rng.uniform(2.5, 4.5);
                b.amp = rng.uniform(0.5, 1.0);
                s.blobs.push_back(b);
            }
            break;
        }
    }
    return s;
}

inline GrayImage render_shape(const GalaxyShape& shape, int size, double unit_scale) {
    GrayImage img(size, size);
    const double cx = 0.5 * (size - 1);
    const double cy = 0.5 * (size - 1);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double v = shape.eval((x - cx) / unit_scale, (y - cy) / unit_scale);
            img.at(x, y) = v < 1e-9 ? 0.0 : v;
        }
    }
    return img;
}

}  // namespace detail

/// Deterministic parametric renders of the 11 template classes on a
/// side x side frame. Only the irregular class consumes randomness.
inline std::array<GrayImage, kNumGalaxyClasses> generate_templates(std::uint64_t seed,
                                                                   int side = 64) {
    std::array<GrayImage, kNumGalaxyClasses> out;
    const double unit = side / 64.0;
    for (int i = 0; i < kNumGalaxyClasses; ++i) {
        const auto label = static_cast<GalaxyLabel>(i);
        out[static_cast<std::size_t>(i)] =
            detail::render_shape(detail::template_shape(label, seed), side, unit);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Noise models
// ---------------------------------------------------------------------------

/// Multiplicative speckle: J = I + n * I with n zero-mean uniform of the
/// given variance, clamped to [0, 1].
inline GrayImage add_speckle(const GrayImage& img, double variance, std::uint64_t seed) {
    if (variance < 0.0) throw InvalidIndex("add_speckle: variance must be >= 0");
    if (variance == 0.0) return img;
    Rng rng(seed);
    const double half_width = std::sqrt(3.0 * variance);
    GrayImage out = img;
    for (double& v : out.data) {
        const double n = rng.uniform(-half_width, half_width);
        v = std::clamp(v + n * v, 0.0, 1.0);
    }
    return out;
}

/// Additive zero-mean Gaussian noise, clamped to [0, 1].
inline GrayImage add_gaussian_noise(const GrayImage& img, double variance, std::uint64_t seed) {
    if (variance < 0.0) throw InvalidIndex("add_gaussian_noise: variance must be >= 0");
    if (variance == 0.0) return img;
    Rng rng(seed);
    const double sd = std::sqrt(variance);
    GrayImage out = img;
    for (double& v : out.data) v = std::clamp(v + sd * rng.normal(), 0.0, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation conditions DBA1..DBA6
// ---------------------------------------------------------------------------

struct DatasetItem {
    GrayImage image;
    GalaxyLabel label = GalaxyLabel::E0;
    int rotation_index = 0;
    std::string noise_kind = "none";
    double blur_sigma = 0.0;
    std::uint64_t item_seed = 0;
    std::string id;
};

struct LabeledDataset {
    int condition = 0;
    std::vector<DatasetItem> items;
};

struct GenParams {
    int side = 64;
    double speckle_variance = 0.05;
    double gaussian_variance = 0.01;
    int out_side = 62;
    int border = 2;
    double radius_eps = 1e-3;
};

namespace detail {

struct ItemRecipe {
    int rotation_index;
    double blur_sigma;
    const char* noise_kind;
};

inline std::vector<ItemRecipe> condition_recipes(int condition) {
    std::vector<ItemRecipe> recipes;
    switch (condition) {
        case 1:
            for (int r = 0; r < 12; ++r) recipes.push_back({r, 0.0, "none"});
            break;
        case 2:
            for (int r = 0; r < 12; ++r) recipes.push_back({r, 0.0, "speckle"});
            break;
        case 3:
            for (int r = 0; r < 12; ++r) recipes.push_back({r, 0.0, "gaussian"});
            break;
        case 4:
            for (int r = 0; r < 12; ++r) recipes.push_back({r, 2.0, "none"});
            break;
        case 5:
            for (int r = 0; r < 12; ++r) recipes.push_back({r, 4.0, "none"});
            break;
        case 6:
            for (int r = 0; r < 12; ++r)
                for (double sigma : {0.125, 1.0, 2.0, 4.0})
                    for (const char* noise : {"none", "speckle", "gaussian"})
                        recipes.push_back({r, sigma, noise});
            break;
        default: throw InvalidCondition("condition index must be 1..6");
    }
    return recipes;
}

}  // namespace detail

/// One evaluation condition over the 11 templates: rotations at multiples of
/// pi/6, optional blur, optional noise, then geometric normalization.
/// Per-item randomness is keyed by (seed, condition, class, item) so the
/// output never depends on scheduling.
inline LabeledDataset build_condition(int condition, std::uint64_t seed,
                                      const GenParams& params = {}, int threads = 0) {
    const auto recipes = detail::condition_recipes(condition);
    const auto templates = generate_templates(seed, params.side);
    std::array<Centroid, kNumGalaxyClasses> centers;
    for (int c = 0; c < kNumGalaxyClasses; ++c)
        centers[static_cast<std::size_t>(c)] = gravity_center(templates[static_cast<std::size_t>(c)]);

    LabeledDataset ds;
    ds.condition = condition;
    ds.items.resize(static_cast<std::size_t>(kNumGalaxyClasses) * recipes.size());

    parallel_for(
        ds.items.size(),
        [&](std::size_t i) {
            const int class_idx = static_cast<int>(i / recipes.size());
            const int item_idx = static_cast<int>(i % recipes.size());
            const auto& recipe = recipes[static_cast<std::size_t>(item_idx)];
            const auto label = static_cast<GalaxyLabel>(class_idx);

            DatasetItem item;
            item.label = label;
            item.rotation_index = recipe.rotation_index;
            item.noise_kind = recipe.noise_kind;
            item.blur_sigma = recipe.blur_sigma;
            item.item_seed = derive_seed(seed, static_cast<std::uint64_t>(condition),
                                         static_cast<std::uint64_t>(class_idx),
                                         static_cast<std::uint64_t>(item_idx));

            GrayImage img = rotate(templates[static_cast<std::size_t>(class_idx)],
                                   recipe.rotation_index * (kPi / 6.0),
                                   centers[static_cast<std::size_t>(class_idx)]);
            if (recipe.blur_sigma > 0.0) img = gaussian_blur(img, recipe.blur_sigma);
            if (item.noise_kind == "speckle")
                img = add_speckle(img, params.speckle_variance, item.item_seed);
            else if (item.noise_kind == "gaussian")
                img = add_gaussian_noise(img, params.gaussian_variance, item.item_seed);
            item.image =
                center_square_normalize(img, params.out_side, params.border, params.radius_eps);

            char buf[16];
            std::snprintf(buf, sizeof(buf), "_%03d", item_idx);
            item.id = std::string(to_string(label)) + buf;
            ds.items[i] = std::move(item);
        },
        threads);
    return ds;
}

// ---------------------------------------------------------------------------
// Galaxy-Zoo-style ingest
// ---------------------------------------------------------------------------

struct Gz2Row {
    std::string filename;
    double p_elliptical = 0.0;
    double p_spiral = 0.0;
    double p_not_odd = 0.0;

    /// Effective confidence used by the tau filter.
    double confidence() const { return std::min(p_not_odd, std::max(p_elliptical, p_spiral)); }
    bool is_spiral() const { return p_spiral > p_elliptical; }
};

/// Parse a labels.csv with header columns filename, p_elliptical, p_spiral,
/// p_not_odd (any order). Malformed rows report their 1-based line number.
inline std::vector<Gz2Row> read_gz2_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);
    std::string line;
    if (!std::getline(in, line)) throw MalformedRow(1, "empty labels file");

    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::string cur;
        for (char ch : s) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur.push_back(ch);
            }
        }
        fields.push_back(cur);
        return fields;
    };

    const auto header = split(line);
    int col_file = -1, col_el = -1, col_sp = -1, col_odd = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "filename") col_file = static_cast<int>(i);
        else if (header[i] == "p_elliptical") col_el = static_cast<int>(i);
        else if (header[i] == "p_spiral") col_sp = static_cast<int>(i);
        else if (header[i] == "p_not_odd") col_odd = static_cast<int>(i);
    }
    if (col_file < 0 || col_el < 0 || col_sp < 0 || col_odd < 0)
        throw MalformedRow(1, "header must name filename, p_elliptical, p_spiral, p_not_odd");

    std::vector<Gz2Row> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw MalformedRow(line_no, "wrong field count");
        Gz2Row row;
        row.filename = fields[static_cast<std::size_t>(col_file)];
        auto parse_prob = [&](const std::string& s, const char* name) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(s, &pos);
                if (pos != s.size() || !(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(name);
                return v;
            } catch (...) {
                throw MalformedRow(line_no, std::string(name) + " is not a probability: " + s);
            }
        };
        row.p_elliptical = parse_prob(fields[static_cast<std::size_t>(col_el)], "p_elliptical");
        row.p_spiral = parse_prob(fields[static_cast<std::size_t>(col_sp)], "p_spiral");
        row.p_not_odd = parse_prob(fields[static_cast<std::size_t>(col_odd)], "p_not_odd");
        if (row.filename.empty()) throw MalformedRow(line_no, "empty filename");
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Binary elliptical-versus-spiral corpus after normalization.
struct BinaryDataset {
    std::vector<GrayImage> images;   ///< gz2-normalized 64 x 64 frames
    std::vector<int> labels;         ///< +1 spiral, -1 elliptical
    std::vector<double> confidence;  ///< per-item min(p_not_odd, max class prob)
    std::vector<std::string> ids;

    std::size_t size() const { return images.size(); }
};

/// Confidence filter and normalization pass: keep rows with
/// p_not_odd >= tau and max(p_elliptical, p_spiral) >= tau, label by the
/// argmax of the two class columns, and gz2-normalize each retained image.
inline BinaryDataset ingest_gz2(const std::string& image_dir, const std::string& labels_path,
                                double tau, int threads = 0) {
    const auto rows = read_gz2_labels(labels_path);
    std::vector<const Gz2Row*> selected;
    for (const auto& row : rows) {
        if (row.p_not_odd >= tau && std::max(row.p_elliptical, row.p_spiral) >= tau)
            selected.push_back(&row);
    }
    if (selected.empty()) throw ZeroSelected();

    BinaryDataset ds;
    ds.images.resize(selected.size());
    ds.labels.resize(selected.size());
    ds.confidence.resize(selected.size());
    ds.ids.resize(selected.size());
    parallel_for(
        selected.size(),
        [&](std::size_t i) {
            const Gz2Row& row = *selected[i];
            const std::filesystem::path path = std::filesystem::path(image_dir) / row.filename;
            ds.images[i] = gz2_normalize(read_image(path.string()));
            ds.labels[i] = row.is_spiral() ? 1 : -1;
            ds.confidence[i] = row.confidence();
            ds.ids[i] = row.filename;
        },
        threads);
    return ds;
}

// ---------------------------------------------------------------------------
// Synthetic GZ2-format corpus (exercises the real-image contract end to end)
// ---------------------------------------------------------------------------

struct SynthCorpusParams {
    int n_per_class = 520;
    int image_size = 424;
    std::uint64_t seed = 7;
    double noise_variance = 0.002;
    double conf_lo = 0.92;
    double conf_hi = 1.0;
};

namespace detail {

inline GrayImage render_gz2_like(bool spiral, std::uint64_t item_seed, int size,
                                 double noise_variance) {
    Rng rng(derive_seed(item_seed, spiral ? 1 : 0));
    GalaxyShape shape;
    shape.angle = rng.uniform(0.0, kTwoPi);
    // Shape lengths in pixels of the full frame; everything stays inside the
    // 250 x 250 center crop.
    const double unit = size / 424.0;
    if (spiral) {
        shape.bulge_sigma = rng.uniform(15.0, 25.0) * unit;
        shape.bulge_amp = rng.uniform(0.8, 1.0);
        shape.arms = true;
        shape.pitch_deg = rng.uniform(10.0, 32.0);
        shape.arm_amp = rng.uniform(0.5, 0.7);
        shape.arm_mid = rng.uniform(45.0, 65.0) * unit;
        shape.arm_half = rng.uniform(22.0, 30.0) * unit;
        shape.arm_rho0 = rng.uniform(12.0, 25.0) * unit;
        if (rng.uniform01() < 0.5) {
            shape.bar = true;
            shape.bar_len = shape.arm_rho0;
            shape.bar_wid = rng.uniform(6.0, 10.0) * unit;
            shape.bar_amp = rng.uniform(0.5, 0.75);
        }
    } else {
        const double a = rng.uniform(45.0, 75.0) * unit;
        shape.ellipse_a = a;
        shape.ellipse_b = a * rng.uniform(0.35, 0.95);
        shape.ellipse_amp = rng.uniform(0.8, 1.0);
    }
    GrayImage img = render_shape(shape, size, 1.0);

    // a few faint foreground stars
    const int n_stars = static_cast<int>(rng.below(5));
    for (int s = 0; s < n_stars; ++s) {
        const double sx = rng.uniform(0.1, 0.9) * size;
        const double sy = rng.uniform(0.1, 0.9) * size;
        const double sigma = rng.uniform(1.0, 2.5);
        const double amp = rng.uniform(0.15, 0.35);
        const int lo_x = std::max(0, static_cast<int>(sx - 4 * sigma));
        const int hi_x = std::min(size - 1, static_cast<int>(sx + 4 * sigma));
        const int lo_y = std::max(0, static_cast<int>(sy - 4 * sigma));
        const int hi_y = std::min(size - 1, static_cast<int>(sy + 4 * sigma));
        for (int y = lo_y; y <= hi_y; ++y)
            for (int x = lo_x; x <= hi_x; ++x) {
                const double d2 = (x - sx) * (x - sx) + (y - sy) * (y - sy);
                img.at(x, y) =
                    std::min(1.0, img.at(x, y) + amp * std::exp(-d2 / (2.0 * sigma * sigma)));
            }
    }
    return add_gaussian_noise(img, noise_variance, derive_seed(item_seed, 2));
}

}  // namespace detail

/// Write a synthetic corpus in the GZ2 ingest format: dir/images/*.png plus
/// dir/labels.csv. Elliptical items come first, then spirals.
inline void write_synthetic_gz2_corpus(const std::string& dir, const SynthCorpusParams& params,
                                       int threads = 0) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "images");

    const int total = 2 * params.n_per_class;
    std::vector<std::string> names(static_cast<std::size_t>(total));
    std::vector<double> conf_class(static_cast<std::size_t>(total));
    std::vector<double> conf_odd(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) {
        const bool spiral = i >= params.n_per_class;
        Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(i), 99));
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s%05d.png", spiral ? "sp" : "el",
                      spiral ? i - params.n_per_class : i);
        names[static_cast<std::size_t>(i)] = buf;
        conf_class[static_cast<std::size_t>(i)] = rng.uniform(params.conf_lo, params.conf_hi);
        conf_odd[static_cast<std::size_t>(i)] = rng.uniform(params.conf_lo, params.conf_hi);
    }

    parallel_for(
        static_cast<std::size_t>(total),
        [&](std::size_t i) {
            const bool spiral = static_cast<int>(i) >= params.n_per_class;
            const GrayImage img = detail::render_gz2_like(
                spiral, derive_seed(params.seed, i), params.image_size, params.noise_variance);
            write_png((fs::path(dir) / "images" / names[i]).string(), img);
        },
        threads);

    std::ofstream labels(fs::path(dir) / "labels.csv");
    labels << "filename,p_elliptical,p_spiral,p_not_odd\n";
    char buf[160];
    for (int i = 0; i < total; ++i) {
        const bool spiral = i >= params.n_per_class;
        const double pc = conf_class[static_cast<std::size_t>(i)];
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f\n",
                      names[static_cast<std::size_t>(i)].c_str(), spiral ? 1.0 - pc : pc,
                      spiral ? pc : 1.0 - pc, conf_odd[static_cast<std::size_t>(i)]);
        labels << buf;
    }
}

}  // namespace rotinv
