#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rotinv/image.hpp"
#include "test_util.hpp"

using namespace rotinv;
using testutil::gaussian_blob;

TEST_CASE("gravity center basics") {
    GrayImage img(8, 8);
    img.at(3, 5) = 1.0;
    const Centroid c = gravity_center(img);
    CHECK(c.cx == doctest::Approx(3.0));
    CHECK(c.cy == doctest::Approx(5.0));

    GrayImage uniform(10, 6, 0.4);
    const Centroid u = gravity_center(uniform);
    CHECK(u.cx == doctest::Approx(4.5));
    CHECK(u.cy == doctest::Approx(2.5));

    GrayImage pair(6, 3);
    pair.at(0, 0) = 1.0;
    pair.at(4, 0) = 1.0;
    const Centroid p = gravity_center(pair);
    CHECK(p.cx == doctest::Approx(2.0));
    CHECK(p.cy == doctest::Approx(0.0));

    GrayImage empty(4, 4);
    CHECK_THROWS_AS(gravity_center(empty), ZeroMass);
}

TEST_CASE("max radius") {
    GrayImage img(21, 21);
    img.at(10, 10) = 1.0;
    const Centroid c{10.0, 10.0};
    CHECK(max_radius(img, c, 0.5) == doctest::Approx(0.0));

    img.at(10 + 10, 10) = 1.0;
    CHECK(max_radius(img, c, 0.5) == doctest::Approx(10.0));

    GrayImage empty(5, 5);
    CHECK_THROWS_AS(max_radius(empty, c, 0.5), EmptyImage);
}

TEST_CASE("max radius matches brute force on a lit ring") {
    const int side = 33;
    const double cx = 16.0, cy = 16.0;
    GrayImage img(side, side);
    for (int k = 0; k < 64; ++k) {
        const double a = kTwoPi * k / 64.0;
        const int x = static_cast<int>(std::lround(cx + 7.0 * std::cos(a)));
        const int y = static_cast<int>(std::lround(cy + 7.0 * std::sin(a)));
        img.at(x, y) = 1.0;
    }
    double brute = 0.0;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            if (img.at(x, y) > 0.1) brute = std::max(brute, std::hypot(x - cx, y - cy));
    const double r = max_radius(img, {cx, cy}, 0.1);
    CHECK(r == doctest::Approx(brute));
    CHECK(std::abs(r - 7.0) <= 0.5);
}

TEST_CASE("bilinear resize") {
    GrayImage constant(7, 5, 0.37);
    const GrayImage up = resize_bilinear(constant, 13, 11);
    for (double v : up.data) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));

    const GrayImage same = resize_bilinear(constant, 7, 5);
    CHECK(same.data == constant.data);  // bitwise

    GrayImage checker(2, 2);
    checker.at(0, 0) = 0.0;
    checker.at(1, 0) = 1.0;
    checker.at(0, 1) = 1.0;
    checker.at(1, 1) = 0.0;
    const GrayImage three = resize_bilinear(checker, 3, 3);
    CHECK(three.at(1, 1) == doctest::Approx(0.5));

    // output range stays within the input range (convex combinations)
    const GrayImage noisy = testutil::random_image(9, 9, 123);
    const GrayImage resized = resize_bilinear(noisy, 17, 5);
    const auto [lo, hi] = std::minmax_element(noisy.data.begin(), noisy.data.end());
    for (double v : resized.data) {
        CHECK(v >= *lo - 1e-12);
        CHECK(v <= *hi + 1e-12);
    }
}

TEST_CASE("rotation stays within the value range extended by the zero fill") {
    const GrayImage img = testutil::random_image(15, 15, 321);
    const auto [lo, hi] = std::minmax_element(img.data.begin(), img.data.end());
    for (double angle : {0.4, 1.9, 4.0}) {
        const GrayImage rot = rotate(img, angle, frame_center(img));
        for (double v : rot.data) {
            CHECK(v >= std::min(0.0, *lo) - 1e-12);
            CHECK(v <= std::max(0.0, *hi) + 1e-12);
        }
    }
}

TEST_CASE("rotation: identity and exact quarter turns") {
    const GrayImage img = testutil::random_image(12, 12, 7);
    const GrayImage same = rotate(img, 0.0, frame_center(img));
    CHECK(same.data == img.data);  // bitwise

    const GrayImage quarter = rotate(img, kPi / 2.0, frame_center(img));
    // pixel permutation: every input value appears exactly; spot-check the mapping
    double diff = 0.0;
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x) {
            // src = center + R(-pi/2) (dst - center): sx = cx + dy, sy = cy - dx
            const int sx = static_cast<int>(5.5 + (y - 5.5));
            const int sy = static_cast<int>(5.5 - (x - 5.5));
            diff = std::max(diff, std::abs(quarter.at(x, y) - img.at(sx, sy)));
        }
    CHECK(diff == 0.0);
}

TEST_CASE("rotation: twelve pi/6 steps approximate one full turn") {
    const GrayImage img = gaussian_blob(64, 31.5, 31.5, 8.0);
    GrayImage acc = img;
    const Centroid c = frame_center(img);
    for (int i = 0; i < 12; ++i) acc = rotate(acc, kPi / 6.0, c);
    const GrayImage full = rotate(img, kTwoPi, c);
    CHECK(testutil::max_abs_diff(acc, full) < 0.1);
}

TEST_CASE("gaussian blur") {
    GrayImage constant(16, 16, 0.8);
    const GrayImage blurred = gaussian_blur(constant, 2.0);
    CHECK(testutil::max_abs_diff(blurred, constant) < 1e-12);

    // impulse response equals the normalized truncated kernel
    GrayImage impulse(31, 31);
    impulse.at(15, 15) = 1.0;
    const double sigma = 1.0;
    const GrayImage resp = gaussian_blur(impulse, sigma);
    const int radius = 3;
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[static_cast<std::size_t>(i + radius)];
    }
    for (double& k : kernel) k /= sum;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            const double expected = kernel[static_cast<std::size_t>(dx + radius)] *
                                    kernel[static_cast<std::size_t>(dy + radius)];
            CHECK(resp.at(15 + dx, 15 + dy) == doctest::Approx(expected).epsilon(1e-12));
        }

    // total intensity preserved for interior-supported shapes
    const GrayImage blob = gaussian_blob(64, 31.5, 31.5, 4.0);
    CHECK(gaussian_blur(blob, 2.0).total() == doctest::Approx(blob.total()).epsilon(1e-9));
}

TEST_CASE("gaussian blur is linear") {
    const GrayImage f = testutil::random_image(24, 24, 11);
    const GrayImage g = testutil::random_image(24, 24, 12);
    const double a = 0.7, b = -0.3;
    GrayImage combo(24, 24);
    for (std::size_t i = 0; i < combo.size(); ++i) combo.data[i] = a * f.data[i] + b * g.data[i];
    const GrayImage left = gaussian_blur(combo, 1.5);
    const GrayImage bf = gaussian_blur(f, 1.5);
    const GrayImage bg = gaussian_blur(g, 1.5);
    double worst = 0.0;
    for (std::size_t i = 0; i < combo.size(); ++i)
        worst = std::max(worst, std::abs(left.data[i] - (a * bf.data[i] + b * bg.data[i])));
    CHECK(worst < 1e-9);
}

TEST_CASE("polar resampling") {
    GrayImage constant(32, 32, 0.6);
    const PolarImage p = to_polar(constant, 8, 16, 12.0);
    for (double v : p.data) CHECK(v == doctest::Approx(0.6).epsilon(1e-12));

    // radially symmetric blob: rings are constant and match the analytic
    // profile up to the bilinear error bound ~ h^2 |f''| / 8 <= 1 / (4 sigma^2)
    const double sigma = 8.0;
    const GrayImage blob = gaussian_blob(65, 32.0, 32.0, sigma);
    const PolarImage pb = to_polar(blob, 10, 32, 20.0);
    const double interp_bound = 1.0 / (4.0 * sigma * sigma);
    for (int r = 0; r < pb.n_rho; ++r) {
        const double rho = (r + 1) * pb.delta_rho();
        const double expected = std::exp(-rho * rho / (2.0 * sigma * sigma));
        double ring_min = 1e300, ring_max = -1e300;
        for (int t = 0; t < pb.n_theta; ++t) {
            CHECK(std::abs(pb.at(r, t) - expected) < interp_bound);
            ring_min = std::min(ring_min, pb.at(r, t));
            ring_max = std::max(ring_max, pb.at(r, t));
        }
        CHECK(ring_max - ring_min < interp_bound);
    }
}

TEST_CASE("polar of an exact quarter rotation is a circular shift") {
    const GrayImage img = testutil::asymmetric_shape(65);
    const Centroid c = frame_center(img);
    const GrayImage rot = rotate(img, kPi / 2.0, c);

    const int n_theta = 16;
    const PolarImage p0 = to_polar(img, 8, n_theta, 24.0);
    const PolarImage p1 = to_polar(rot, 8, n_theta, 24.0);
    const int shift = n_theta / 4;
    double worst = 0.0;
    for (int r = 0; r < p0.n_rho; ++r)
        for (int t = 0; t < n_theta; ++t)
            worst = std::max(worst,
                             std::abs(p1.at(r, (t + shift) % n_theta) - p0.at(r, t)));
    CHECK(worst < 1e-6);
}

TEST_CASE("center-square normalization") {
    // centered disk of diameter ~62 lands in a 66x66 frame
    const GrayImage d = testutil::disk(64, 31.5, 31.5, 25.0);
    const GrayImage norm = center_square_normalize(d, 62, 2);
    CHECK(norm.width == 66);
    CHECK(norm.height == 66);

    // translation invariance: integer-shifted copy normalizes identically
    const GrayImage blob = gaussian_blob(96, 47.5, 47.5, 7.0);
    GrayImage shifted(96, 96);
    for (int y = 0; y < 96; ++y)
        for (int x = 0; x < 96; ++x) {
            const int sx = x - 9, sy = y + 5;
            shifted.at(x, y) = (sx >= 0 && sx < 96 && sy >= 0 && sy < 96) ? blob.at(sx, sy) : 0.0;
        }
    const GrayImage na = center_square_normalize(blob, 62, 2);
    const GrayImage nb = center_square_normalize(shifted, 62, 2);
    CHECK(testutil::max_abs_diff(na, nb) < 1e-6);

    // off-center point-like source: output centroid within half a pixel of
    // the frame center
    const GrayImage point = gaussian_blob(64, 11.3, 50.2, 2.0);
    const GrayImage np = center_square_normalize(point, 62, 2);
    const Centroid cc = gravity_center(np);
    CHECK(std::abs(cc.cx - 32.5) <= 0.5);
    CHECK(std::abs(cc.cy - 32.5) <= 0.5);

    GrayImage empty(16, 16);
    CHECK_THROWS_AS(center_square_normalize(empty, 62, 2), ZeroMass);
}

TEST_CASE("normalized output keeps its centroid near the frame center") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        GrayImage img = testutil::random_image(48, 48, seed);
        // sparsify so the shape is localized
        for (std::size_t i = 0; i < img.size(); ++i)
            if (img.data[i] < 0.93) img.data[i] = 0.0;
        const GrayImage norm = center_square_normalize(img, 62, 2);
        const Centroid c = gravity_center(norm);
        CHECK(std::abs(c.cx - 32.5) <= 0.5);
        CHECK(std::abs(c.cy - 32.5) <= 0.5);
    }
}
