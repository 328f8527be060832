#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rotinv/datasets.hpp"
#include "rotinv/extract.hpp"
#include "rotinv/learn.hpp"
#include "rotinv/parallel.hpp"
#include "rotinv/preprocess.hpp"

namespace rotinv {

/// Feature matrix over a set of images, one row per image. Direct extraction
/// about the gravity center (the artificial-dataset path).
inline MatrixXd direct_feature_matrix(const std::vector<GrayImage>& images, Family family,
                                      const DescriptorParams& params, int threads = 0) {
    if (images.empty()) throw TooFewItems("direct_feature_matrix: no images");
    const int d = feature_count(family, params);
    MatrixXd X(static_cast<Eigen::Index>(images.size()), d);
    parallel_for(
        images.size(),
        [&](std::size_t i) {
            const FeatureVector f = extract_features(images[i], family, params);
            for (int j = 0; j < d; ++j) X(static_cast<Eigen::Index>(i), j) = f.values[static_cast<std::size_t>(j)];
        },
        threads);
    return X;
}

/// Feature matrix through the 4-level Laplacian pyramid front-end (the
/// real-image path); one row per image, 4x the per-image feature count.
inline MatrixXd pyramid_feature_matrix(const std::vector<GrayImage>& images, Family family,
                                       const DescriptorParams& params, int levels = 4,
                                       double sigma = 2.0, int threads = 0) {
    if (images.empty()) throw TooFewItems("pyramid_feature_matrix: no images");
    const int d = levels * feature_count(family, params);
    MatrixXd X(static_cast<Eigen::Index>(images.size()), d);
    parallel_for(
        images.size(),
        [&](std::size_t i) {
            const Pyramid pyr = laplacian_pyramid(images[i], levels, sigma);
            const FeatureVector f = pyramid_features(pyr, family, params);
            for (int j = 0; j < d; ++j) X(static_cast<Eigen::Index>(i), j) = f.values[static_cast<std::size_t>(j)];
        },
        threads);
    return X;
}

/// Group ids for a labeled dataset under a grouping of 11, 5 or 3 classes.
/// With grouping 3 the S0 and I items are excluded; `kept` receives the
/// retained item indices.
inline std::vector<int> grouping_ids(const LabeledDataset& ds, int grouping,
                                     std::vector<int>& kept) {
    kept.clear();
    std::vector<int> groups;
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
        const GalaxyLabel label = ds.items[i].label;
        if (grouping == 11) {
            kept.push_back(static_cast<int>(i));
            groups.push_back(static_cast<int>(label));
        } else if (grouping == 5) {
            kept.push_back(static_cast<int>(i));
            groups.push_back(static_cast<int>(cluster5_of(label)));
        } else if (grouping == 3) {
            const auto c3 = cluster3_of(label);
            if (c3) {
                kept.push_back(static_cast<int>(i));
                groups.push_back(static_cast<int>(*c3));
            }
        } else {
            throw InvalidIndex("grouping must be 11, 5 or 3");
        }
    }
    return groups;
}

}  // namespace rotinv
