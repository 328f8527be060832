#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "rotinv/preprocess.hpp"
#include "rotinv/datasets.hpp"
#include "test_util.hpp"

using namespace rotinv;

namespace {

// Exhaustive Otsu: evaluate the between-class variance at all 256 candidate
// splits and keep the lowest maximizing bin.
double otsu_exhaustive(const GrayImage& img) {
    std::array<double, 256> hist{};
    for (double v : img.data)
        hist[static_cast<std::size_t>(std::clamp(static_cast<int>(std::lround(v * 255.0)), 0, 255))] += 1.0;
    const double n = static_cast<double>(img.size());
    double best = -1.0;
    int best_bin = 0;
    for (int t = 0; t < 255; ++t) {
        double w0 = 0.0, w1 = 0.0, s0 = 0.0, s1 = 0.0;
        for (int b = 0; b <= t; ++b) {
            w0 += hist[static_cast<std::size_t>(b)];
            s0 += b * hist[static_cast<std::size_t>(b)];
        }
        for (int b = t + 1; b < 256; ++b) {
            w1 += hist[static_cast<std::size_t>(b)];
            s1 += b * hist[static_cast<std::size_t>(b)];
        }
        if (w0 <= 0.0 || w1 <= 0.0) continue;
        const double mu0 = s0 / w0, mu1 = s1 / w1;
        const double score = (w0 / n) * (w1 / n) * (mu0 - mu1) * (mu0 - mu1);
        if (score > best) {
            best = score;
            best_bin = t;
        }
    }
    return (best_bin + 0.5) / 255.0;
}

}  // namespace

TEST_CASE("otsu separates a perfectly bimodal image") {
    GrayImage img(10, 10);
    for (int i = 0; i < 50; ++i) img.data[static_cast<std::size_t>(i)] = 0.0;
    for (int i = 50; i < 100; ++i) img.data[static_cast<std::size_t>(i)] = 1.0;
    const double thr = otsu_threshold(img);
    int fg = 0;
    for (double v : img.data)
        if (v > thr) ++fg;
    CHECK(fg == 50);

    GrayImage flat(4, 4, 0.5);
    CHECK_THROWS_AS(otsu_threshold(flat), DegenerateHistogram);
}

TEST_CASE("otsu equals the exhaustive search on 1000 random histograms") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Rng rng(derive_seed(9000, seed));
        GrayImage img(8, 8);
        // random bimodal-ish histograms with occasional uniform junk
        const double split = rng.uniform(0.2, 0.8);
        for (double& v : img.data) {
            if (rng.uniform01() < 0.5) v = std::clamp(split / 2 + 0.15 * rng.normal(), 0.0, 1.0);
            else v = std::clamp((1 + split) / 2 + 0.2 * rng.normal(), 0.0, 1.0);
        }
        double fast;
        try {
            fast = otsu_threshold(img);
        } catch (const DegenerateHistogram&) {
            continue;
        }
        CHECK(fast == doctest::Approx(otsu_exhaustive(img)).epsilon(1e-15));
    }
}

TEST_CASE("constant intensity offset translates the chosen bin") {
    Rng rng(4);
    GrayImage img(16, 16);
    for (double& v : img.data) v = rng.uniform(0.0, 0.5);
    const double thr = otsu_threshold(img);
    const double offset = 64.0 / 255.0;  // exact bin translation
    GrayImage shifted = img;
    for (double& v : shifted.data) v += offset;
    const double thr2 = otsu_threshold(shifted);
    CHECK(std::lround(thr2 * 255.0 - 0.5) - std::lround(thr * 255.0 - 0.5) == 64);
}

TEST_CASE("morphology basics") {
    BinaryMask point(9, 9);
    point.set(4, 4, true);
    const BinaryMask dil = morph(point, StructuringElement::square(3), MorphOp::Dilate);
    int count = 0;
    for (auto b : dil.bits) count += b;
    CHECK(count == 9);
    for (int y = 3; y <= 5; ++y)
        for (int x = 3; x <= 5; ++x) CHECK(dil.at(x, y));

    // closing is idempotent on an interior solid rectangle
    BinaryMask rect(20, 20);
    for (int y = 6; y < 14; ++y)
        for (int x = 5; x < 15; ++x) rect.set(x, y, true);
    const BinaryMask closed = morph(rect, StructuringElement::square(5), MorphOp::Close);
    CHECK(closed.bits == rect.bits);

    // closing fills a single interior hole
    BinaryMask holed = rect;
    holed.set(10, 10, false);
    const BinaryMask filled = morph(holed, StructuringElement::square(5), MorphOp::Close);
    CHECK(filled.bits == rect.bits);

    StructuringElement empty;
    empty.width = empty.height = 3;
    empty.on.assign(9, 0);
    CHECK_THROWS_AS(morph(point, empty, MorphOp::Dilate), EmptyStructuringElement);
}

TEST_CASE("erosion shrinks at the frame border") {
    BinaryMask full(8, 8, true);
    const BinaryMask eroded = morph(full, StructuringElement::square(3), MorphOp::Erode);
    for (int x = 0; x < 8; ++x) {
        CHECK_FALSE(eroded.at(x, 0));
        CHECK_FALSE(eroded.at(x, 7));
    }
    CHECK(eroded.at(3, 3));
}

TEST_CASE("dilation/erosion duality on interior pixels") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        Rng rng(seed);
        BinaryMask m(24, 24);
        for (auto& b : m.bits) b = rng.uniform01() < 0.35 ? 1 : 0;
        for (const auto& se : {StructuringElement::square(5), StructuringElement::disk(13)}) {
            BinaryMask comp = m;
            for (auto& b : comp.bits) b = b ? 0 : 1;
            const BinaryMask left = morph(m, se, MorphOp::Dilate);
            const BinaryMask right = morph(comp, se, MorphOp::Erode);
            const int margin = se.width / 2;  // border convention differs outside
            for (int y = margin; y < 24 - margin; ++y)
                for (int x = margin; x < 24 - margin; ++x)
                    CHECK(left.at(x, y) == !right.at(x, y));
        }
    }
}

TEST_CASE("disk element is the Euclidean ball") {
    const StructuringElement d = StructuringElement::disk(13);
    CHECK(d.width == 13);
    for (int y = 0; y < 13; ++y)
        for (int x = 0; x < 13; ++x)
            CHECK(d.at(x, y) == ((x - 6) * (x - 6) + (y - 6) * (y - 6) <= 36));
}

TEST_CASE("gz2 normalization") {
    const GrayImage bright = testutil::disk(424, 211.5, 211.5, 60.0, 0.9);
    const GrayImage out = gz2_normalize(bright);
    CHECK(out.width == 64);
    CHECK(out.height == 64);
    const Centroid c = gravity_center(out);
    CHECK(std::abs(c.cx - 31.5) <= 0.5);
    CHECK(std::abs(c.cy - 31.5) <= 0.5);

    // border is zero
    for (int i = 0; i < 64; ++i) {
        CHECK(out.at(i, 0) == 0.0);
        CHECK(out.at(i, 63) == 0.0);
        CHECK(out.at(0, i) == 0.0);
        CHECK(out.at(63, i) == 0.0);
    }

    GrayImage black(424, 424);
    CHECK_THROWS_AS(gz2_normalize(black), ZeroMass);

    GrayImage tiny(100, 100, 0.5);
    CHECK_THROWS_AS(gz2_normalize(tiny), DimensionMismatch);
}

TEST_CASE("gz2 normalization recentres an off-center source") {
    GrayImage img(424, 424);
    // off-center blob, still inside the 250x250 crop
    const GrayImage blob = testutil::gaussian_blob(424, 240.0, 190.0, 18.0, 0.95);
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = blob.data[i];
    const GrayImage out = gz2_normalize(img);
    const Centroid c = gravity_center(out);
    CHECK(std::abs(c.cx - 31.5) <= 0.5);
    CHECK(std::abs(c.cy - 31.5) <= 0.5);
}

TEST_CASE("laplacian pyramid") {
    GrayImage constant(32, 32, 0.42);
    const Pyramid pc = laplacian_pyramid(constant, 4, 2.0);
    REQUIRE(pc.levels.size() == 4);
    for (const auto& level : pc.levels)
        for (double v : level.data) CHECK(std::abs(v) < 1e-12);

    // reconstruction: sum of levels + residual = input
    const GrayImage img = testutil::random_image(48, 48, 17);
    const Pyramid p = laplacian_pyramid(img, 4, 2.0);
    GrayImage recon = p.residual;
    for (const auto& level : p.levels)
        for (std::size_t i = 0; i < recon.size(); ++i) recon.data[i] += level.data[i];
    CHECK(testutil::max_abs_diff(recon, img) < 1e-10);
}

TEST_CASE("pyramid feature concatenation lengths") {
    const GrayImage img = testutil::gaussian_blob(64, 31.5, 31.5, 9.0);
    const Pyramid pyr = laplacian_pyramid(img, 4, 2.0);
    DescriptorParams params;
    CHECK(pyramid_features(pyr, Family::Ring, params).size() == 160);
    CHECK(pyramid_features(pyr, Family::Hu, params).size() == 28);
    CHECK(pyramid_features(pyr, Family::Fft, params).size() == 192);
}

TEST_CASE("end-to-end quarter-turn stability of pyramid features") {
    // rotate the raw source, push both copies through the full pipeline
    GrayImage img(424, 424);
    Rng rng(5);
    const GrayImage blob = testutil::gaussian_blob(424, 211.5, 211.5, 40.0, 0.9);
    for (std::size_t i = 0; i < img.size(); ++i)
        img.data[i] = std::min(1.0, blob.data[i] * (1.0 + 0.15 * std::sin(static_cast<double>(i % 97))));
    const GrayImage rot = rotate(img, kPi / 2.0, frame_center(img));

    DescriptorParams params;
    const FeatureVector a =
        pyramid_features(laplacian_pyramid(gz2_normalize(img), 4, 2.0), Family::Ring, params);
    const FeatureVector b =
        pyramid_features(laplacian_pyramid(gz2_normalize(rot), 4, 2.0), Family::Ring, params);
    CHECK(testutil::rel_rms(a.values, b.values) < 0.05);
}
