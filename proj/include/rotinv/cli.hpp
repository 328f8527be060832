#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rotinv/config.hpp"
#include "rotinv/datasets.hpp"
#include "rotinv/pipeline.hpp"
#include "rotinv/report.hpp"

namespace rotinv {

namespace detail {

inline DescriptorParams descriptor_params_from(const Config& cfg) {
    DescriptorParams p;
    p.n_max = cfg.get_int("extract.n_max", p.n_max);
    p.n_rho = cfg.get_int("extract.n_rho", p.n_rho);
    p.n_theta = cfg.get_int("extract.n_theta", p.n_theta);
    p.fft_n_rho = cfg.get_int("extract.fft_n_rho", p.fft_n_rho);
    p.fft_n_theta = cfg.get_int("extract.fft_n_theta", p.fft_n_theta);
    p.k_max = cfg.get_int("extract.k", p.k_max);
    p.v_max = cfg.get_int("extract.v", p.v_max);
    p.fmt_sigma = cfg.get_double("extract.fmt_sigma", p.fmt_sigma);
    p.ring_literal = cfg.get_bool("extract.ring_literal", p.ring_literal);
    if (p.n_max < 0 || p.n_rho < 1 || p.n_theta < 4 || p.fft_n_rho < 1 || p.fft_n_theta < 4 ||
        p.k_max < 0 || p.v_max < 0 || !(p.fmt_sigma > 0.0))
        throw InvalidIndex("config: descriptor parameter out of range");
    return p;
}

inline ClassifierParams classifier_params_from(const Config& cfg) {
    ClassifierParams p;
    p.svm_c = cfg.get_double("classify.svm_c", p.svm_c);
    p.p_enter = cfg.get_double("classify.p_enter", p.p_enter);
    p.p_remove = cfg.get_double("classify.p_remove", p.p_remove);
    p.elm_hidden = cfg.get_int("classify.elm_hidden", p.elm_hidden);
    p.elm_ridge = cfg.get_double("classify.elm_ridge", p.elm_ridge);
    p.zscore = cfg.get_bool("classify.zscore", p.zscore);
    if (p.svm_c <= 0 || p.elm_hidden < 1 || p.elm_ridge < 0 || !(p.p_enter > 0) ||
        !(p.p_remove >= p.p_enter))
        throw InvalidIndex("config: classifier parameter out of range");
    return p;
}

/// Column header for one feature family over `levels` pyramid levels
/// (level 0 means direct extraction).
inline std::string feature_header(Family family, int per_level, int levels) {
    std::string out;
    if (levels <= 1) {
        for (int i = 0; i < per_level; ++i)
            out += "," + std::string(family_name(family)) + "_0_" + std::to_string(i);
    } else {
        for (int level = 1; level <= levels; ++level)
            for (int i = 0; i < per_level; ++i)
                out += "," + std::string(family_name(family)) + "_" + std::to_string(level) + "_" +
                       std::to_string(i);
    }
    return out;
}

struct IncompleteMarker {
    std::filesystem::path path;
    explicit IncompleteMarker(const std::filesystem::path& dir) : path(dir / ".incomplete") {
        std::ofstream(path.string()) << "in progress\n";
    }
    void finish() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
        path.clear();
    }
    ~IncompleteMarker() = default;  // marker stays behind if the command failed
};

}  // namespace detail

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

/// Write the 11 templates, the requested conditions and a manifest under
/// `out_dir`. Reruns with the same config produce byte-identical trees.
inline void cmd_gen(const Config& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const std::uint64_t seed = cfg.get_u64("common.seed", 42);
    const int threads = cfg.get_int("common.threads", 0);

    GenParams gen;
    gen.side = cfg.get_int("gen.side", gen.side);
    gen.speckle_variance = cfg.get_double("gen.speckle_variance", gen.speckle_variance);
    gen.gaussian_variance = cfg.get_double("gen.gaussian_variance", gen.gaussian_variance);
    gen.out_side = cfg.get_int("gen.out_side", gen.out_side);
    gen.border = cfg.get_int("gen.border", gen.border);
    gen.radius_eps = cfg.get_double("gen.radius_eps", gen.radius_eps);
    if (gen.side < 16 || gen.out_side < 4 || gen.border < 0 || gen.speckle_variance < 0 ||
        gen.gaussian_variance < 0)
        throw InvalidIndex("config: gen parameter out of range");
    std::vector<int> conditions = cfg.get_int_list("gen.conditions", {1, 2, 3, 4, 5, 6});

    fs::create_directories(out_dir);
    detail::IncompleteMarker marker(out_dir);

    const auto templates = generate_templates(seed, gen.side);
    fs::create_directories(fs::path(out_dir) / "templates");
    for (int c = 0; c < kNumGalaxyClasses; ++c) {
        const auto label = static_cast<GalaxyLabel>(c);
        write_png((fs::path(out_dir) / "templates" / (std::string(to_string(label)) + ".png")).string(),
                  templates[static_cast<std::size_t>(c)]);
    }

    std::string manifest = "filename,class,condition,rotation_index,noise_kind,blur_sigma,seed\n";
    for (int cond : conditions) {
        const LabeledDataset ds = build_condition(cond, seed, gen, threads);
        const std::string sub = "dba" + std::to_string(cond);
        fs::create_directories(fs::path(out_dir) / sub);
        for (const DatasetItem& item : ds.items) {
            const std::string rel = sub + "/" + item.id + ".png";
            write_png((fs::path(out_dir) / rel).string(), item.image);
            char line[256];
            std::snprintf(line, sizeof(line), "%s,%s,%d,%d,%s,%g,%llu\n", rel.c_str(),
                          to_string(item.label), cond, item.rotation_index, item.noise_kind.c_str(),
                          item.blur_sigma, static_cast<unsigned long long>(item.item_seed));
            manifest += line;
        }
    }
    detail::write_text_file((fs::path(out_dir) / "manifest.csv").string(), manifest);
    marker.finish();
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

namespace detail {

struct ManifestRow {
    std::string filename;
    std::string cls;
    std::string condition;
};

inline std::vector<ManifestRow> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);
    std::string line;
    if (!std::getline(in, line)) throw MalformedRow(1, "empty manifest");
    std::vector<ManifestRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        std::stringstream ss(line);
        ManifestRow row;
        std::string rest;
        if (!std::getline(ss, row.filename, ',') || !std::getline(ss, row.cls, ',') ||
            !std::getline(ss, row.condition, ','))
            throw MalformedRow(line_no, "expected filename,class,condition,...");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw MalformedRow(1, "manifest has no items");
    return rows;
}

}  // namespace detail

/// Compute one feature row per manifest image and write the feature CSV.
/// With extract.pyramid = true each image runs through the 4-level Laplacian
/// pyramid front-end first.
inline void cmd_extract(const Config& cfg, const std::string& dataset_dir,
                        const std::string& out_csv) {
    namespace fs = std::filesystem;
    const int threads = cfg.get_int("common.threads", 0);
    const Family family = parse_family(cfg.get_str("extract.family", "fft"));
    const DescriptorParams params = detail::descriptor_params_from(cfg);
    const bool pyramid = cfg.get_bool("extract.pyramid", false);
    const int levels = cfg.get_int("extract.levels", 4);
    const double pyr_sigma = cfg.get_double("extract.pyramid_sigma", 2.0);

    const auto rows = detail::read_manifest((fs::path(dataset_dir) / "manifest.csv").string());
    const int per_level = feature_count(family, params);
    const int d = pyramid ? levels * per_level : per_level;

    std::vector<std::string> lines(rows.size());
    parallel_for(
        rows.size(),
        [&](std::size_t i) {
            const GrayImage img =
                read_image((fs::path(dataset_dir) / rows[i].filename).string());
            FeatureVector f;
            if (pyramid) {
                f = pyramid_features(laplacian_pyramid(img, levels, pyr_sigma), family, params);
            } else {
                f = extract_features(img, family, params);
            }
            std::string line = rows[i].filename + "," + rows[i].cls + "," + rows[i].condition;
            char buf[40];
            for (double v : f.values) {
                std::snprintf(buf, sizeof(buf), ",%.17g", v);
                line += buf;
            }
            lines[i] = std::move(line);
        },
        threads);

    std::string out = "id,class,condition" + detail::feature_header(family, per_level, pyramid ? levels : 1) + "\n";
    for (const auto& line : lines) {
        if (static_cast<int>(std::count(line.begin(), line.end(), ',')) != d + 2)
            throw IoError("internal: feature row width mismatch");
        out += line + "\n";
    }
    detail::write_text_file(out_csv, out);
}

// ---------------------------------------------------------------------------
// retrieve
// ---------------------------------------------------------------------------

namespace detail {

struct FeatureFile {
    std::vector<std::string> ids;
    std::vector<std::string> classes;
    std::vector<std::string> conditions;
    MatrixXd X;
};

inline FeatureFile read_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);
    std::string line;
    if (!std::getline(in, line)) throw MalformedRow(1, "empty feature file");
    const std::string header = line;
    const auto n_cols = static_cast<int>(std::count(header.begin(), header.end(), ',')) + 1;
    if (n_cols < 4) throw MalformedRow(1, "feature file needs id,class,condition plus features");
    const int d = n_cols - 3;

    FeatureFile ff;
    std::vector<std::vector<double>> values;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string id, cls, cond, tok;
        if (!std::getline(ss, id, ',') || !std::getline(ss, cls, ',') || !std::getline(ss, cond, ','))
            throw MalformedRow(line_no, "expected id,class,condition,features...");
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(d));
        while (std::getline(ss, tok, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (...) {
                throw MalformedRow(line_no, "non-numeric feature value: " + tok);
            }
        }
        if (static_cast<int>(row.size()) != d)
            throw MalformedRow(line_no, "expected " + std::to_string(d) + " feature values, got " +
                                            std::to_string(row.size()));
        ff.ids.push_back(std::move(id));
        ff.classes.push_back(std::move(cls));
        ff.conditions.push_back(std::move(cond));
        values.push_back(std::move(row));
    }
    if (values.empty()) throw MalformedRow(1, "feature file has no rows");
    ff.X.resize(static_cast<Eigen::Index>(values.size()), d);
    for (std::size_t i = 0; i < values.size(); ++i)
        for (int j = 0; j < d; ++j) ff.X(static_cast<Eigen::Index>(i), j) = values[i][static_cast<std::size_t>(j)];
    return ff;
}

}  // namespace detail

/// Leave-one-out Euclidean retrieval over a feature CSV under the 11-, 5- or
/// 3-class grouping; writes <out_prefix>.csv and <out_prefix>.json. The
/// retrieve.condition config key restricts the run to one condition when the
/// feature file mixes several.
inline RetrievalReport cmd_retrieve(const Config& cfg, const std::string& features_csv,
                                    int grouping, const std::string& out_prefix) {
    const int threads = cfg.get_int("common.threads", 0);
    const std::string condition = cfg.get_str("retrieve.condition", "");
    const auto ff = detail::read_feature_csv(features_csv);

    std::vector<int> kept;
    std::vector<int> groups;
    for (std::size_t i = 0; i < ff.classes.size(); ++i) {
        if (!condition.empty() && ff.conditions[i] != condition) continue;
        const GalaxyLabel label = parse_galaxy_label(ff.classes[i]);
        if (grouping == 11) {
            kept.push_back(static_cast<int>(i));
            groups.push_back(static_cast<int>(label));
        } else if (grouping == 5) {
            kept.push_back(static_cast<int>(i));
            groups.push_back(static_cast<int>(cluster5_of(label)));
        } else if (grouping == 3) {
            if (const auto c3 = cluster3_of(label)) {
                kept.push_back(static_cast<int>(i));
                groups.push_back(static_cast<int>(*c3));
            }
        } else {
            throw InvalidIndex("grouping must be 11, 5 or 3");
        }
    }
    if (kept.empty())
        throw ZeroSelected("cmd_retrieve: no row matches condition '" + condition + "'");
    MatrixXd X(static_cast<Eigen::Index>(kept.size()), ff.X.cols());
    for (std::size_t i = 0; i < kept.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = ff.X.row(kept[i]);

    const RankPolicy policy = grouping == 5 ? RankPolicy::MinClassSize : RankPolicy::PerClassRetrievable;
    const RetrievalReport report = retrieval_eval(X, groups, policy, grouping, threads);
    detail::write_text_file(out_prefix + ".csv", retrieval_csv(report));
    detail::write_text_file(out_prefix + ".json", retrieval_json(report).dump(2) + "\n");
    return report;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

/// Full real-image pipeline: ingest a GZ2-format corpus, normalize, compute
/// pyramid descriptor features and run 10-fold cross-validated
/// classification. With `sweep` the confidence threshold is swept instead.
inline EvalReport cmd_classify(const Config& cfg, const std::string& out_prefix,
                               bool sweep = false) {
    const std::uint64_t seed = cfg.get_u64("common.seed", 42);
    const int threads = cfg.get_int("common.threads", 0);
    const std::string image_dir = cfg.get_str("classify.images");
    const std::string labels_path = cfg.get_str("classify.labels");
    if (image_dir.empty() || labels_path.empty())
        throw InvalidIndex("config: classify.images and classify.labels are required");
    const double tau = cfg.get_double("classify.tau", 0.9);
    const int folds = cfg.get_int("classify.folds", 10);
    const Family family = parse_family(cfg.get_str("extract.family", "ring"));
    const DescriptorParams dparams = detail::descriptor_params_from(cfg);
    const ClassifierKind kind = parse_classifier(cfg.get_str("classify.classifier", "steplda"));
    const ClassifierParams cparams = detail::classifier_params_from(cfg);
    const int levels = cfg.get_int("extract.levels", 4);
    const double pyr_sigma = cfg.get_double("extract.pyramid_sigma", 2.0);
    if (folds < 2) throw InvalidIndex("config: classify.folds must be >= 2");

    std::vector<double> taus = cfg.get_double_list("classify.sweep_taus",
                                                   {0.5, 0.6, 0.7, 0.8, 0.9});
    const double ingest_tau = sweep ? *std::min_element(taus.begin(), taus.end()) : tau;

    const BinaryDataset ds = ingest_gz2(image_dir, labels_path, ingest_tau, threads);
    const MatrixXd X = pyramid_feature_matrix(ds.images, family, dparams, levels, pyr_sigma, threads);

    if (sweep) {
        const auto rows = confidence_sweep(X, ds.labels, ds.confidence, taus, kind, cparams, folds, seed);
        detail::write_text_file(out_prefix + ".csv", sweep_csv(rows));
        detail::write_text_file(out_prefix + ".json", sweep_json(rows).dump(2) + "\n");
        return {};
    }
    const EvalReport report = cv_classify(X, ds.labels, kind, cparams, folds, seed);
    detail::write_text_file(out_prefix + ".csv", classification_csv(report));
    detail::write_text_file(out_prefix + ".json", classification_json(report).dump(2) + "\n");
    return report;
}

}  // namespace rotinv
