#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "rotinv/datasets.hpp"
#include "test_util.hpp"

using namespace rotinv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("rotinv_test_tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct ThreadCapGuard {
    std::string saved;
    bool had = false;
    explicit ThreadCapGuard(const char* value) {
        if (const char* old = std::getenv("ROTINV_THREADS")) {
            saved = old;
            had = true;
        }
        setenv("ROTINV_THREADS", value, 1);
    }
    ~ThreadCapGuard() {
        if (had) setenv("ROTINV_THREADS", saved.c_str(), 1);
        else unsetenv("ROTINV_THREADS");
    }
};

}  // namespace

TEST_CASE("templates are deterministic and within range") {
    const auto a = generate_templates(42);
    const auto b = generate_templates(42);
    for (int i = 0; i < kNumGalaxyClasses; ++i) {
        CHECK(a[static_cast<std::size_t>(i)].data == b[static_cast<std::size_t>(i)].data);
        for (double v : a[static_cast<std::size_t>(i)].data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(a[static_cast<std::size_t>(i)].total() > 0.0);
    }
    const auto c = generate_templates(43);
    // a different seed changes at least the irregular class
    CHECK(a[10].data != c[10].data);
}

TEST_CASE("E0 is rotation symmetric to within interpolation error") {
    const auto templates = generate_templates(42);
    const GrayImage& e0 = templates[0];
    const Centroid c = gravity_center(e0);
    for (double angle : {0.3, 1.1, 2.5}) {
        const GrayImage rot = rotate(e0, angle, c);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < e0.size(); ++i) {
            num += (rot.data[i] - e0.data[i]) * (rot.data[i] - e0.data[i]);
            den += e0.data[i] * e0.data[i];
        }
        CHECK(std::sqrt(num / den) < 0.01);
    }
}

TEST_CASE("E7 intensity covariance has the expected axis ratio") {
    const auto templates = generate_templates(42);
    const GrayImage& e7 = templates[2];
    const Centroid c = gravity_center(e7);
    double sxx = 0.0, syy = 0.0, sxy = 0.0, m = 0.0;
    for (int y = 0; y < e7.height; ++y)
        for (int x = 0; x < e7.width; ++x) {
            const double v = e7.at(x, y);
            const double dx = x - c.cx, dy = y - c.cy;
            m += v;
            sxx += v * dx * dx;
            syy += v * dy * dy;
            sxy += v * dx * dy;
        }
    sxx /= m;
    syy /= m;
    sxy /= m;
    const double tr = sxx + syy;
    const double det = sxx * syy - sxy * sxy;
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    const double ratio = std::sqrt((tr / 2.0 - disc) / (tr / 2.0 + disc));
    CHECK(std::abs(ratio - 0.3) <= 0.05);
}

TEST_CASE("speckle noise") {
    const GrayImage img = testutil::gaussian_blob(32, 15.5, 15.5, 5.0);
    CHECK(add_speckle(img, 0.0, 1).data == img.data);

    GrayImage black(16, 16);
    const GrayImage still_black = add_speckle(black, 0.05, 2);
    for (double v : still_black.data) CHECK(v == 0.0);

    // Monte-Carlo mean reverts to the clean image
    GrayImage mid(8, 8, 0.5);
    GrayImage acc(8, 8, 0.0);
    const int n_seeds = 1000;
    for (int s = 0; s < n_seeds; ++s) {
        const GrayImage noisy = add_speckle(mid, 0.02, derive_seed(77, static_cast<std::uint64_t>(s)));
        for (std::size_t i = 0; i < acc.size(); ++i) acc.data[i] += noisy.data[i];
    }
    const double stderr_bound = 3.0 * std::sqrt(0.02 * 0.25 / n_seeds);
    for (std::size_t i = 0; i < acc.size(); ++i)
        CHECK(std::abs(acc.data[i] / n_seeds - 0.5) < stderr_bound);
}

TEST_CASE("gaussian noise") {
    // large sample so the 5% check sits several standard errors out
    const GrayImage img(128, 128, 0.5);
    CHECK(add_gaussian_noise(img, 0.0, 1).data == img.data);

    const GrayImage a = add_gaussian_noise(img, 0.01, 1);
    const GrayImage b = add_gaussian_noise(img, 0.01, 2);
    CHECK(a.data != b.data);

    double var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        var += (a.data[i] - img.data[i]) * (a.data[i] - img.data[i]);
    var /= static_cast<double>(a.size());
    CHECK(std::abs(var - 0.01) < 0.05 * 0.01);
}

TEST_CASE("condition cardinalities") {
    const GenParams params;
    for (int cond : {1, 4}) {
        const LabeledDataset ds = build_condition(cond, 42, params);
        CHECK(ds.items.size() == 132);
        for (const auto& item : ds.items) {
            CHECK(item.image.width == 66);
            CHECK(item.image.height == 66);
        }
    }
    const LabeledDataset dba6 = build_condition(6, 42, params);
    CHECK(dba6.items.size() == 1584);
    CHECK_THROWS_AS(build_condition(7, 42, params), InvalidCondition);
}

TEST_CASE("DBA4 items are blurred rotations of the template") {
    const GenParams params;
    const LabeledDataset ds = build_condition(4, 42, params);
    const auto templates = generate_templates(42, params.side);
    const auto& item = ds.items[3];  // E0, rotation 3
    REQUIRE(item.label == GalaxyLabel::E0);
    REQUIRE(item.blur_sigma == 2.0);
    const Centroid c = gravity_center(templates[0]);
    GrayImage expected = rotate(templates[0], item.rotation_index * (kPi / 6.0), c);
    expected = gaussian_blur(expected, 2.0);
    expected = center_square_normalize(expected, params.out_side, params.border, params.radius_eps);
    CHECK(testutil::max_abs_diff(item.image, expected) == 0.0);
}

TEST_CASE("cluster maps") {
    std::set<Cluster5> seen5;
    int in3 = 0;
    for (int i = 0; i < kNumGalaxyClasses; ++i) {
        const auto label = static_cast<GalaxyLabel>(i);
        seen5.insert(cluster5_of(label));
        if (cluster3_of(label)) ++in3;
    }
    CHECK(seen5.size() == 5);
    CHECK(in3 == 9);
    CHECK_FALSE(cluster3_of(GalaxyLabel::S0));
    CHECK_FALSE(cluster3_of(GalaxyLabel::I));
    CHECK(cluster3_of(GalaxyLabel::Sb) == Cluster3::S);
    CHECK(cluster3_of(GalaxyLabel::SBc) == Cluster3::SB);
    CHECK(cluster3_of(GalaxyLabel::E7) == Cluster3::E);
}

TEST_CASE("dataset generation is independent of the thread count") {
    const GenParams params;
    std::vector<std::vector<double>> runs;
    for (const char* cap : {"1", "4"}) {
        ThreadCapGuard guard(cap);
        const LabeledDataset ds = build_condition(2, 7, params);
        std::vector<double> flat;
        for (const auto& item : ds.items)
            flat.insert(flat.end(), item.image.data.begin(), item.image.data.end());
        runs.push_back(std::move(flat));
    }
    CHECK(runs[0] == runs[1]);
}

TEST_CASE("png round trip preserves the 8-bit quantization") {
    TempDir tmp("roundtrip");
    const GenParams params;
    const LabeledDataset ds = build_condition(1, 9, params);
    for (std::size_t i = 0; i < ds.items.size(); i += 37) {
        const fs::path file = tmp.path / (ds.items[i].id + ".png");
        write_png(file.string(), ds.items[i].image);
        const GrayImage back = read_png(file.string());
        REQUIRE(back.width == ds.items[i].image.width);
        for (std::size_t j = 0; j < back.size(); ++j) {
            const int q_orig = static_cast<int>(
                std::lround(std::clamp(ds.items[i].image.data[j], 0.0, 1.0) * 255.0));
            const int q_back = static_cast<int>(std::lround(back.data[j] * 255.0));
            CHECK(q_orig == q_back);
        }
    }
}

TEST_CASE("gz2 label parsing and filtering") {
    TempDir tmp("gz2");
    {
        std::ofstream labels(tmp.path / "labels.csv");
        labels << "filename,p_elliptical,p_spiral,p_not_odd\n";
        labels << "a.png,0.95,0.02,0.97\n";
        labels << "b.png,0.10,0.96,0.95\n";
        labels << "c.png,0.50,0.50,0.99\n";
    }
    const auto rows = read_gz2_labels((tmp.path / "labels.csv").string());
    REQUIRE(rows.size() == 3);
    CHECK_FALSE(rows[0].is_spiral());
    CHECK(rows[1].is_spiral());
    CHECK(rows[0].confidence() == doctest::Approx(0.95));

    // write the two referenced images; ingest at tau = 0.9 keeps a and b
    write_png((tmp.path / "a.png").string(), testutil::disk(424, 211.5, 211.5, 50.0, 0.9));
    write_png((tmp.path / "b.png").string(), testutil::disk(424, 211.5, 211.5, 40.0, 0.8));
    write_png((tmp.path / "c.png").string(), testutil::disk(424, 211.5, 211.5, 30.0, 0.7));
    const BinaryDataset ds = ingest_gz2(tmp.path.string(), (tmp.path / "labels.csv").string(), 0.9);
    REQUIRE(ds.size() == 2);
    CHECK(ds.labels[0] == -1);
    CHECK(ds.labels[1] == 1);
    CHECK(ds.images[0].width == 64);

    CHECK_THROWS_AS(ingest_gz2(tmp.path.string(), (tmp.path / "labels.csv").string(), 0.999),
                    ZeroSelected);
}

TEST_CASE("gz2 malformed rows report their line") {
    TempDir tmp("gz2bad");
    {
        std::ofstream labels(tmp.path / "labels.csv");
        labels << "filename,p_elliptical,p_spiral,p_not_odd\n";
        labels << "a.png,0.95,0.02,0.97\n";
        labels << "b.png,not_a_number,0.96,0.95\n";
    }
    try {
        read_gz2_labels((tmp.path / "labels.csv").string());
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(e.row == 3);
    }
    CHECK_THROWS_AS(read_gz2_labels((tmp.path / "missing.csv").string()), MissingFile);

    {
        std::ofstream labels(tmp.path / "labels.csv", std::ios::app);
        labels.close();
    }
    // a referenced image that does not exist surfaces as MissingFile
    {
        std::ofstream labels(tmp.path / "ok.csv");
        labels << "filename,p_elliptical,p_spiral,p_not_odd\n";
        labels << "ghost.png,0.95,0.02,0.97\n";
    }
    CHECK_THROWS_AS(ingest_gz2(tmp.path.string(), (tmp.path / "ok.csv").string(), 0.9),
                    MissingFile);
}

TEST_CASE("synthetic corpus writer produces a loadable GZ2-format tree") {
    TempDir tmp("synth");
    SynthCorpusParams params;
    params.n_per_class = 6;
    params.image_size = 300;
    params.seed = 11;
    write_synthetic_gz2_corpus(tmp.path.string(), params);
    const BinaryDataset ds =
        ingest_gz2((tmp.path / "images").string(), (tmp.path / "labels.csv").string(), 0.9);
    CHECK(ds.size() == 12);
    int spirals = 0;
    for (int label : ds.labels)
        if (label > 0) ++spirals;
    CHECK(spirals == 6);
}
