#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rotinv/errors.hpp"
#include "rotinv/math_special.hpp"
#include "rotinv/parallel.hpp"
#include "rotinv/rng.hpp"

namespace rotinv {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Euclidean retrieval
// ---------------------------------------------------------------------------

/// Gallery items ordered by nondecreasing distance to the query; the query
/// itself is excluded and ties break by ascending item id.
struct RankedList {
    int query = -1;
    std::vector<int> order;
    std::vector<double> dist;
};

inline RankedList euclidean_rank(const VectorXd& query, const MatrixXd& gallery,
                                 int self_index = -1) {
    if (gallery.cols() != query.size())
        throw DimensionMismatch("euclidean_rank: feature dimensionality differs");
    RankedList rl;
    rl.query = self_index;
    const int n = static_cast<int>(gallery.rows());
    rl.order.reserve(static_cast<std::size_t>(n));
    std::vector<double> d2(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        if (i == self_index) continue;
        d2[static_cast<std::size_t>(i)] = (gallery.row(i).transpose() - query).squaredNorm();
        rl.order.push_back(i);
    }
    std::sort(rl.order.begin(), rl.order.end(), [&](int a, int b) {
        const double da = d2[static_cast<std::size_t>(a)];
        const double db = d2[static_cast<std::size_t>(b)];
        if (da != db) return da < db;
        return a < b;
    });
    rl.dist.reserve(rl.order.size());
    for (int i : rl.order) rl.dist.push_back(std::sqrt(d2[static_cast<std::size_t>(i)]));
    return rl;
}

inline RankedList euclidean_rank(const MatrixXd& gallery, int query_index) {
    return euclidean_rank(gallery.row(query_index).transpose(), gallery, query_index);
}

/// Fraction of the top k entries sharing the query's class.
inline double precision_at_k(const RankedList& rl, const std::vector<int>& labels, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > rl.order.size())
        throw RankOutOfRange("precision_at_k: k = " + std::to_string(k) + " outside 1.." +
                             std::to_string(rl.order.size()));
    const int query_label = labels[static_cast<std::size_t>(rl.query)];
    int hits = 0;
    for (int i = 0; i < k; ++i)
        if (labels[static_cast<std::size_t>(rl.order[static_cast<std::size_t>(i)])] == query_label)
            ++hits;
    return static_cast<double>(hits) / k;
}

/// Mean of P_k over the ranks holding relevant items, normalized by the
/// retrievable count (class size minus the query).
inline double average_precision(const RankedList& rl, const std::vector<int>& labels,
                                int n_class_examples) {
    if (n_class_examples < 2) throw DegenerateClass();
    const int query_label = labels[static_cast<std::size_t>(rl.query)];
    int hits = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < rl.order.size(); ++i) {
        if (labels[static_cast<std::size_t>(rl.order[i])] == query_label) {
            ++hits;
            acc += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return acc / (n_class_examples - 1);
}

enum class RankPolicy {
    PerClassRetrievable,  ///< per-query rank = class size - 1 (groupings 11 and 3)
    MinClassSize,         ///< fixed rank = smallest class size (grouping 5)
};

struct RetrievalReport {
    int grouping = 11;
    int rank_k = 0;  ///< the k of the precision column (uniform across queries)
    int n_queries = 0;
    double p_mean = 0.0, p_std = 0.0;
    double ap_mean = 0.0, ap_std = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_and_sample_std(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace detail

/// Leave-one-out retrieval over a feature matrix. `groups` carries the class
/// id of every row under the chosen grouping (rows excluded from the
/// grouping must be dropped by the caller).
inline RetrievalReport retrieval_eval(const MatrixXd& X, const std::vector<int>& groups,
                                      RankPolicy policy, int grouping_tag = 11, int threads = 0) {
    const int n = static_cast<int>(X.rows());
    if (n < 2) throw TooFewItems("retrieval_eval: need at least two items");
    if (groups.size() != static_cast<std::size_t>(n))
        throw DimensionMismatch("retrieval_eval: labels/rows mismatch");

    std::map<int, int> class_size;
    for (int g : groups) ++class_size[g];
    int min_size = n;
    for (const auto& [g, c] : class_size) min_size = std::min(min_size, c);
    if (min_size < 2) throw DegenerateClass("retrieval_eval: every class needs >= 2 items");

    std::vector<double> precision(static_cast<std::size_t>(n));
    std::vector<double> avg_precision(static_cast<std::size_t>(n));
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t q) {
            const RankedList rl = euclidean_rank(X, static_cast<int>(q));
            const int n_ex = class_size.at(groups[q]);
            const int k = policy == RankPolicy::MinClassSize ? min_size : n_ex - 1;
            precision[q] = precision_at_k(rl, groups, k);
            avg_precision[q] = average_precision(rl, groups, n_ex);
        },
        threads);

    RetrievalReport report;
    report.grouping = grouping_tag;
    report.rank_k = policy == RankPolicy::MinClassSize ? min_size : min_size - 1;
    report.n_queries = n;
    std::tie(report.p_mean, report.p_std) = detail::mean_and_sample_std(precision);
    std::tie(report.ap_mean, report.ap_std) = detail::mean_and_sample_std(avg_precision);
    return report;
}

// ---------------------------------------------------------------------------
// z-score normalization
// ---------------------------------------------------------------------------

struct ZScoreStats {
    VectorXd mean;
    VectorXd std_dev;
};

inline ZScoreStats zscore_fit(const MatrixXd& train) {
    if (train.rows() < 1) throw TooFewItems("zscore_fit: empty training matrix");
    ZScoreStats s;
    s.mean = train.colwise().mean();
    s.std_dev = ((train.rowwise() - s.mean.transpose()).array().square().colwise().sum() /
                 static_cast<double>(train.rows()))
                    .sqrt()
                    .matrix()
                    .transpose();
    return s;
}

/// Columns whose training deviation vanishes map to zero.
inline MatrixXd zscore_apply(const MatrixXd& X, const ZScoreStats& s) {
    MatrixXd out(X.rows(), X.cols());
    for (int j = 0; j < X.cols(); ++j) {
        if (s.std_dev(j) < 1e-12) {
            out.col(j).setZero();
        } else {
            out.col(j) = (X.col(j).array() - s.mean(j)) / s.std_dev(j);
        }
    }
    return out;
}

inline std::pair<MatrixXd, MatrixXd> zscore_fit_apply(const MatrixXd& train,
                                                      const MatrixXd& test) {
    const ZScoreStats s = zscore_fit(train);
    return {zscore_apply(train, s), zscore_apply(test, s)};
}

// ---------------------------------------------------------------------------
// Stratified k-fold
// ---------------------------------------------------------------------------

/// Stratified fold assignment. Items of each class are shuffled and dealt
/// round-robin with a fold cursor that carries across classes, so fold sizes
/// stay within one item of each other globally as well as per class.
inline std::vector<int> kfold_split(const std::vector<int>& labels, int k, std::uint64_t seed) {
    const int n = static_cast<int>(labels.size());
    if (k < 1 || k > n) throw TooFewItems("kfold_split: need k <= n");
    std::map<int, std::vector<int>> per_class;
    for (int i = 0; i < n; ++i) per_class[labels[static_cast<std::size_t>(i)]].push_back(i);

    Rng rng(seed);
    std::vector<int> fold(static_cast<std::size_t>(n), -1);
    int cursor = 0;
    for (auto& [label, indices] : per_class) {
        rng.shuffle(indices);
        for (int idx : indices) {
            fold[static_cast<std::size_t>(idx)] = cursor;
            cursor = (cursor + 1) % k;
        }
    }
    return fold;
}

// ---------------------------------------------------------------------------
// Classifiers
// ---------------------------------------------------------------------------

enum class ClassifierKind { Svm, Blda, StepLda, Elm };

inline const char* classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::Svm: return "svm";
        case ClassifierKind::Blda: return "blda";
        case ClassifierKind::StepLda: return "steplda";
        case ClassifierKind::Elm: return "elm";
    }
    return "?";
}

inline ClassifierKind parse_classifier(const std::string& s) {
    if (s == "svm") return ClassifierKind::Svm;
    if (s == "blda") return ClassifierKind::Blda;
    if (s == "steplda") return ClassifierKind::StepLda;
    if (s == "elm") return ClassifierKind::Elm;
    throw InvalidIndex("unknown classifier: " + s);
}

struct ClassifierModel {
    ClassifierKind kind = ClassifierKind::Svm;
    VectorXd w;        ///< linear weights (svm/blda/steplda)
    double bias = 0.0;
    std::vector<int> selected;  ///< steplda feature subset (empty = none entered)

    MatrixXd elm_w;             ///< d x h orthonormalized projection
    VectorXd elm_hidden_bias;   ///< h
    VectorXd elm_beta;          ///< h output weights

    std::optional<ZScoreStats> norm;  ///< set by cv_classify when enabled
};

namespace detail {

inline void check_training_input(const MatrixXd& X, const std::vector<int>& y) {
    if (X.rows() != static_cast<Eigen::Index>(y.size()))
        throw DimensionMismatch("training: X rows and label count differ");
    if (!X.allFinite()) throw NonFinite("training: non-finite feature value");
    bool pos = false, neg = false;
    for (int v : y) {
        if (v > 0) pos = true;
        else neg = true;
    }
    if (!pos || !neg) throw SingleClass();
}

}  // namespace detail

/// Linear SVM trained by dual coordinate descent on the L1 hinge loss; the
/// bias is learned through an appended constant feature.
inline ClassifierModel train_svm(const MatrixXd& X, const std::vector<int>& y, double c_reg = 1.0,
                                 std::uint64_t seed = 1) {
    detail::check_training_input(X, y);
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());

    MatrixXd Xa(n, d + 1);
    Xa.leftCols(d) = X;
    Xa.col(d).setOnes();

    VectorXd alpha = VectorXd::Zero(n);
    VectorXd w = VectorXd::Zero(d + 1);
    VectorXd q_diag(n);
    for (int i = 0; i < n; ++i) q_diag(i) = Xa.row(i).squaredNorm();

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);

    constexpr int kMaxSweeps = 1000;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        rng.shuffle(perm);
        double max_violation = 0.0;
        for (int i : perm) {
            const double yi = y[static_cast<std::size_t>(i)] > 0 ? 1.0 : -1.0;
            const double grad = yi * Xa.row(i).dot(w) - 1.0;
            double projected = grad;
            if (alpha(i) <= 0.0) projected = std::min(grad, 0.0);
            else if (alpha(i) >= c_reg) projected = std::max(grad, 0.0);
            max_violation = std::max(max_violation, std::abs(projected));
            if (std::abs(projected) > 1e-12 && q_diag(i) > 0.0) {
                const double old = alpha(i);
                alpha(i) = std::clamp(old - grad / q_diag(i), 0.0, c_reg);
                if (alpha(i) != old) w += (alpha(i) - old) * yi * Xa.row(i).transpose();
            }
        }
        if (max_violation < 1e-6) break;
    }

    ClassifierModel model;
    model.kind = ClassifierKind::Svm;
    model.w = w.head(d);
    model.bias = w(d);
    return model;
}

/// Ridge posterior mean at fixed hyperparameters (lambda = alpha / beta);
/// the closed form the evidence iteration converges around.
inline VectorXd blda_posterior_mean(const MatrixXd& X, const VectorXd& y, double alpha,
                                    double beta) {
    const int d = static_cast<int>(X.cols());
    const MatrixXd A =
        (alpha / beta) * MatrixXd::Identity(d, d) + X.transpose() * X;
    return A.ldlt().solve(X.transpose() * y);
}

/// Bayesian ridge regression on +-1 targets with evidence maximization of
/// the prior precision alpha and noise precision beta.
inline ClassifierModel train_blda(const MatrixXd& X, const std::vector<int>& y) {
    detail::check_training_input(X, y);
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());

    MatrixXd Xa(n, d + 1);
    Xa.leftCols(d) = X;
    Xa.col(d).setOnes();
    VectorXd target(n);
    for (int i = 0; i < n; ++i) target(i) = y[static_cast<std::size_t>(i)] > 0 ? 1.0 : -1.0;

    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(Xa.transpose() * Xa);
    const VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
    const VectorXd z = eig.eigenvectors().transpose() * (Xa.transpose() * target);
    const double yty = target.squaredNorm();

    double alpha = 1.0, beta = 1.0;
    VectorXd m_eig = VectorXd::Zero(d + 1);
    for (int iter = 0; iter < 100; ++iter) {
        const VectorXd denom = (beta * lambda).array() + alpha;
        m_eig = (beta * z.array() / denom.array()).matrix();
        const double gamma = (beta * lambda.array() / denom.array()).sum();
        const double mtm = m_eig.squaredNorm();
        double resid = yty - 2.0 * m_eig.dot(z) + (lambda.array() * m_eig.array().square()).sum();
        resid = std::max(resid, 1e-12);
        const double alpha_new = gamma / std::max(mtm, 1e-300);
        const double beta_new = (n - gamma) / resid;
        const bool done = std::abs(alpha_new - alpha) < 1e-6 * std::abs(alpha) &&
                          std::abs(beta_new - beta) < 1e-6 * std::abs(beta);
        alpha = alpha_new;
        beta = beta_new;
        if (done) break;
    }
    const VectorXd denom = (beta * lambda).array() + alpha;
    m_eig = (beta * z.array() / denom.array()).matrix();
    const VectorXd w_full = eig.eigenvectors() * m_eig;

    ClassifierModel model;
    model.kind = ClassifierKind::Blda;
    model.w = w_full.head(d);
    model.bias = w_full(d);
    return model;
}

namespace detail {

/// Schur complement of entry j against the subset S: M_jj - M_jS M_SS^-1 M_Sj.
inline double bordered_schur(const MatrixXd& M, const std::vector<int>& subset, int j) {
    const int p = static_cast<int>(subset.size());
    if (p == 0) return M(j, j);
    MatrixXd mss(p, p);
    VectorXd msj(p);
    for (int a = 0; a < p; ++a) {
        msj(a) = M(subset[static_cast<std::size_t>(a)], j);
        for (int b = 0; b < p; ++b)
            mss(a, b) = M(subset[static_cast<std::size_t>(a)], subset[static_cast<std::size_t>(b)]);
    }
    return M(j, j) - msj.dot(mss.ldlt().solve(msj));
}

}  // namespace detail

/// Stepwise discriminant analysis: forward selection and backward
/// elimination on the partial-F test of the Wilks lambda ratio, followed by
/// Fisher LDA on the selected subset.
inline ClassifierModel train_steplda(const MatrixXd& X, const std::vector<int>& y,
                                     double p_enter = 0.05, double p_remove = 0.10) {
    detail::check_training_input(X, y);
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());

    VectorXd mean_pos = VectorXd::Zero(d), mean_neg = VectorXd::Zero(d);
    int n_pos = 0, n_neg = 0;
    for (int i = 0; i < n; ++i) {
        if (y[static_cast<std::size_t>(i)] > 0) {
            mean_pos += X.row(i).transpose();
            ++n_pos;
        } else {
            mean_neg += X.row(i).transpose();
            ++n_neg;
        }
    }
    mean_pos /= n_pos;
    mean_neg /= n_neg;
    const VectorXd grand_mean = (n_pos * mean_pos + n_neg * mean_neg) / n;

    // Within-class and total scatter matrices.
    MatrixXd W = MatrixXd::Zero(d, d);
    MatrixXd T = MatrixXd::Zero(d, d);
    for (int i = 0; i < n; ++i) {
        const VectorXd xc = X.row(i).transpose() -
                            (y[static_cast<std::size_t>(i)] > 0 ? mean_pos : mean_neg);
        W.noalias() += xc * xc.transpose();
        const VectorXd xt = X.row(i).transpose() - grand_mean;
        T.noalias() += xt * xt.transpose();
    }

    std::vector<int> selected;
    std::vector<char> in_model(static_cast<std::size_t>(d), 0);
    const int max_selected = std::min(d, n - 4);

    for (int round = 0; round < 2 * d; ++round) {
        bool changed = false;

        // forward step
        if (static_cast<int>(selected.size()) < max_selected) {
            const int p = static_cast<int>(selected.size());
            const double dof2 = n - 2 - p;
            double best_p = 2.0;
            int best_j = -1;
            for (int j = 0; j < d; ++j) {
                if (in_model[static_cast<std::size_t>(j)]) continue;
                const double schur_t = detail::bordered_schur(T, selected, j);
                if (schur_t < 1e-10) continue;  // collinear with the current subset
                const double schur_w = detail::bordered_schur(W, selected, j);
                const double ratio = std::clamp(schur_w / schur_t, 1e-12, 1.0);
                const double f_stat = dof2 * (1.0 - ratio) / ratio;
                const double p_val = f_survival(f_stat, 1.0, dof2);
                if (p_val < best_p - 1e-15) {
                    best_p = p_val;
                    best_j = j;
                }
            }
            if (best_j >= 0 && best_p < p_enter) {
                selected.push_back(best_j);
                std::sort(selected.begin(), selected.end());
                in_model[static_cast<std::size_t>(best_j)] = 1;
                changed = true;
            }
        }

        // backward step
        if (selected.size() > 1) {
            const int p = static_cast<int>(selected.size());
            const double dof2 = n - 2 - (p - 1);
            double worst_p = -1.0;
            int worst_pos = -1;
            for (int pos = 0; pos < p; ++pos) {
                std::vector<int> without = selected;
                without.erase(without.begin() + pos);
                const int j = selected[static_cast<std::size_t>(pos)];
                const double schur_t = detail::bordered_schur(T, without, j);
                if (schur_t < 1e-10) continue;
                const double schur_w = detail::bordered_schur(W, without, j);
                const double ratio = std::clamp(schur_w / schur_t, 1e-12, 1.0);
                const double f_stat = dof2 * (1.0 - ratio) / ratio;
                const double p_val = f_survival(f_stat, 1.0, dof2);
                if (p_val > worst_p) {
                    worst_p = p_val;
                    worst_pos = pos;
                }
            }
            if (worst_pos >= 0 && worst_p > p_remove) {
                in_model[static_cast<std::size_t>(selected[static_cast<std::size_t>(worst_pos)])] = 0;
                selected.erase(selected.begin() + worst_pos);
                changed = true;
            }
        }

        if (!changed) break;
    }

    ClassifierModel model;
    model.kind = ClassifierKind::StepLda;
    model.selected = selected;
    model.w = VectorXd::Zero(d);
    model.bias = 0.0;
    if (!selected.empty()) {
        const int p = static_cast<int>(selected.size());
        MatrixXd w_sub(p, p);
        VectorXd diff(p), mid(p);
        for (int a = 0; a < p; ++a) {
            diff(a) = mean_pos(selected[static_cast<std::size_t>(a)]) -
                      mean_neg(selected[static_cast<std::size_t>(a)]);
            mid(a) = 0.5 * (mean_pos(selected[static_cast<std::size_t>(a)]) +
                            mean_neg(selected[static_cast<std::size_t>(a)]));
            for (int b = 0; b < p; ++b)
                w_sub(a, b) =
                    W(selected[static_cast<std::size_t>(a)], selected[static_cast<std::size_t>(b)]);
        }
        MatrixXd pooled = w_sub / (n - 2);
        pooled.diagonal().array() += 1e-10 * (pooled.trace() / p + 1.0);
        const VectorXd w_fisher = pooled.ldlt().solve(diff);
        for (int a = 0; a < p; ++a) model.w(selected[static_cast<std::size_t>(a)]) = w_fisher(a);
        model.bias = -w_fisher.dot(mid);
    }
    return model;
}

/// Extreme learning machine: orthonormalized random sigmoid projection with
/// ridge-regularized least-squares output weights.
inline ClassifierModel train_elm(const MatrixXd& X, const std::vector<int>& y, int hidden = 1000,
                                 std::uint64_t seed = 1, double ridge = 1e-6) {
    detail::check_training_input(X, y);
    if (hidden < 1) throw InvalidIndex("train_elm: hidden must be >= 1");
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());

    Rng rng(seed);
    MatrixXd W;
    if (hidden <= d) {
        MatrixXd G(d, hidden);
        for (int j = 0; j < hidden; ++j)
            for (int i = 0; i < d; ++i) G(i, j) = rng.normal();
        Eigen::HouseholderQR<MatrixXd> qr(G);
        W = qr.householderQ() * MatrixXd::Identity(d, hidden);  // W^T W = I
    } else {
        MatrixXd G(hidden, d);
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < hidden; ++i) G(i, j) = rng.normal();
        Eigen::HouseholderQR<MatrixXd> qr(G);
        const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(hidden, d);
        W = Q.transpose();  // W W^T = I
    }
    VectorXd hidden_bias(hidden);
    for (int j = 0; j < hidden; ++j) hidden_bias(j) = rng.uniform(-1.0, 1.0);

    MatrixXd H = X * W;
    H.rowwise() += hidden_bias.transpose();
    H = ((-H.array()).exp() + 1.0).inverse();  // sigmoid

    VectorXd target(n);
    for (int i = 0; i < n; ++i) target(i) = y[static_cast<std::size_t>(i)] > 0 ? 1.0 : -1.0;

    MatrixXd A = H.transpose() * H;
    A.diagonal().array() += ridge;

    ClassifierModel model;
    model.kind = ClassifierKind::Elm;
    model.elm_w = std::move(W);
    model.elm_hidden_bias = std::move(hidden_bias);
    model.elm_beta = A.ldlt().solve(H.transpose() * target);
    return model;
}

/// Continuous decision scores; higher means the positive (spiral) class.
inline VectorXd predict_scores(const ClassifierModel& model, const MatrixXd& X_raw) {
    const MatrixXd X = model.norm ? zscore_apply(X_raw, *model.norm) : X_raw;
    if (model.kind == ClassifierKind::Elm) {
        if (X.cols() != model.elm_w.rows())
            throw DimensionMismatch("predict_scores: dimensionality differs from training");
        MatrixXd H = X * model.elm_w;
        H.rowwise() += model.elm_hidden_bias.transpose();
        H = ((-H.array()).exp() + 1.0).inverse();
        return H * model.elm_beta;
    }
    if (X.cols() != model.w.size())
        throw DimensionMismatch("predict_scores: dimensionality differs from training");
    return (X * model.w).array() + model.bias;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Rank-sum AUC with half credit for ties: the probability that a positive
/// outranks a negative.
inline double auc(const VectorXd& scores, const std::vector<int>& labels) {
    const int n = static_cast<int>(scores.size());
    if (labels.size() != static_cast<std::size_t>(n))
        throw DimensionMismatch("auc: scores/labels mismatch");
    int n_pos = 0, n_neg = 0;
    for (int v : labels) (v > 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) throw SingleClass();

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return scores(a) < scores(b); });

    double rank_sum_pos = 0.0;
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && scores(idx[static_cast<std::size_t>(j + 1)]) ==
                                scores(idx[static_cast<std::size_t>(i)]))
            ++j;
        const double avg_rank = 0.5 * (i + j) + 1.0;  // 1-based average rank of the tie group
        for (int t = i; t <= j; ++t)
            if (labels[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])] > 0)
                rank_sum_pos += avg_rank;
        i = j + 1;
    }
    return (rank_sum_pos - 0.5 * n_pos * (n_pos + 1.0)) / (static_cast<double>(n_pos) * n_neg);
}

struct Confusion {
    double tpr = 0.0, fpr = 0.0, fnr = 0.0, tnr = 0.0, fscore = 0.0;
};

/// Confusion rates with positives = spirals; predicted positive when the
/// score exceeds the threshold.
inline Confusion confusion_metrics(const VectorXd& scores, const std::vector<int>& labels,
                                   double threshold = 0.0) {
    const int n = static_cast<int>(scores.size());
    if (labels.size() != static_cast<std::size_t>(n))
        throw DimensionMismatch("confusion_metrics: scores/labels mismatch");
    int tp = 0, fp = 0, fn = 0, tn = 0;
    for (int i = 0; i < n; ++i) {
        const bool predicted = scores(i) > threshold;
        const bool actual = labels[static_cast<std::size_t>(i)] > 0;
        if (actual) (predicted ? tp : fn)++;
        else (predicted ? fp : tn)++;
    }
    if (tp + fn == 0 || fp + tn == 0) throw SingleClass();
    Confusion c;
    c.tpr = static_cast<double>(tp) / (tp + fn);
    c.fnr = static_cast<double>(fn) / (tp + fn);
    c.fpr = static_cast<double>(fp) / (fp + tn);
    c.tnr = static_cast<double>(tn) / (fp + tn);
    c.fscore = (2 * tp + fp + fn) > 0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
    return c;
}

// ---------------------------------------------------------------------------
// Cross-validated classification
// ---------------------------------------------------------------------------

struct ClassifierParams {
    double svm_c = 1.0;
    double p_enter = 0.05;
    double p_remove = 0.10;
    int elm_hidden = 1000;
    double elm_ridge = 1e-6;
    bool zscore = true;
};

inline ClassifierModel train_classifier(ClassifierKind kind, const MatrixXd& X,
                                        const std::vector<int>& y, const ClassifierParams& params,
                                        std::uint64_t seed) {
    switch (kind) {
        case ClassifierKind::Svm: return train_svm(X, y, params.svm_c, seed);
        case ClassifierKind::Blda: return train_blda(X, y);
        case ClassifierKind::StepLda: return train_steplda(X, y, params.p_enter, params.p_remove);
        case ClassifierKind::Elm: return train_elm(X, y, params.elm_hidden, seed, params.elm_ridge);
    }
    throw InvalidIndex("train_classifier: unknown kind");
}

struct FoldMetrics {
    double auc = 0.0, fscore = 0.0, tpr = 0.0, fpr = 0.0, fnr = 0.0, tnr = 0.0;
};

struct EvalReport {
    std::vector<FoldMetrics> folds;
    FoldMetrics mean;
    FoldMetrics stdev;
};

namespace detail {

inline FoldMetrics fold_mean(const std::vector<FoldMetrics>& folds) {
    FoldMetrics m;
    for (const auto& f : folds) {
        m.auc += f.auc;
        m.fscore += f.fscore;
        m.tpr += f.tpr;
        m.fpr += f.fpr;
        m.fnr += f.fnr;
        m.tnr += f.tnr;
    }
    const double n = static_cast<double>(folds.size());
    m.auc /= n;
    m.fscore /= n;
    m.tpr /= n;
    m.fpr /= n;
    m.fnr /= n;
    m.tnr /= n;
    return m;
}

inline FoldMetrics fold_std(const std::vector<FoldMetrics>& folds, const FoldMetrics& mean) {
    FoldMetrics s;
    if (folds.size() < 2) return s;
    for (const auto& f : folds) {
        s.auc += (f.auc - mean.auc) * (f.auc - mean.auc);
        s.fscore += (f.fscore - mean.fscore) * (f.fscore - mean.fscore);
        s.tpr += (f.tpr - mean.tpr) * (f.tpr - mean.tpr);
        s.fpr += (f.fpr - mean.fpr) * (f.fpr - mean.fpr);
        s.fnr += (f.fnr - mean.fnr) * (f.fnr - mean.fnr);
        s.tnr += (f.tnr - mean.tnr) * (f.tnr - mean.tnr);
    }
    const double n = static_cast<double>(folds.size() - 1);
    s.auc = std::sqrt(s.auc / n);
    s.fscore = std::sqrt(s.fscore / n);
    s.tpr = std::sqrt(s.tpr / n);
    s.fpr = std::sqrt(s.fpr / n);
    s.fnr = std::sqrt(s.fnr / n);
    s.tnr = std::sqrt(s.tnr / n);
    return s;
}

}  // namespace detail

/// Stratified k-fold cross-validation with per-fold z-score fitting on the
/// training block. Deterministic for a fixed seed.
inline EvalReport cv_classify(const MatrixXd& X, const std::vector<int>& y, ClassifierKind kind,
                              const ClassifierParams& params = {}, int folds = 10,
                              std::uint64_t seed = 1) {
    const auto fold_of = kfold_split(y, folds, seed);
    EvalReport report;
    report.folds.reserve(static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        std::vector<int> train_idx, test_idx;
        for (std::size_t i = 0; i < fold_of.size(); ++i)
            (fold_of[i] == f ? test_idx : train_idx).push_back(static_cast<int>(i));

        MatrixXd Xtr(train_idx.size(), X.cols()), Xte(test_idx.size(), X.cols());
        std::vector<int> ytr(train_idx.size()), yte(test_idx.size());
        for (std::size_t i = 0; i < train_idx.size(); ++i) {
            Xtr.row(static_cast<Eigen::Index>(i)) = X.row(train_idx[i]);
            ytr[i] = y[static_cast<std::size_t>(train_idx[i])];
        }
        for (std::size_t i = 0; i < test_idx.size(); ++i) {
            Xte.row(static_cast<Eigen::Index>(i)) = X.row(test_idx[i]);
            yte[i] = y[static_cast<std::size_t>(test_idx[i])];
        }

        ClassifierModel model;
        if (params.zscore) {
            const ZScoreStats stats = zscore_fit(Xtr);
            model = train_classifier(kind, zscore_apply(Xtr, stats), ytr, params,
                                     derive_seed(seed, static_cast<std::uint64_t>(f)));
            model.norm = stats;
        } else {
            model = train_classifier(kind, Xtr, ytr, params,
                                     derive_seed(seed, static_cast<std::uint64_t>(f)));
        }
        const VectorXd scores = predict_scores(model, Xte);

        FoldMetrics metrics;
        metrics.auc = auc(scores, yte);
        const Confusion c = confusion_metrics(scores, yte, 0.0);
        metrics.fscore = c.fscore;
        metrics.tpr = c.tpr;
        metrics.fpr = c.fpr;
        metrics.fnr = c.fnr;
        metrics.tnr = c.tnr;
        report.folds.push_back(metrics);
    }
    report.mean = detail::fold_mean(report.folds);
    report.stdev = detail::fold_std(report.folds, report.mean);
    return report;
}

// ---------------------------------------------------------------------------
// Confidence sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    double tau = 0.0;
    int n_examples = 0;
    double auc = std::numeric_limits<double>::quiet_NaN();
    double fscore = std::numeric_limits<double>::quiet_NaN();
    std::string error;  ///< empty on success
};

/// Re-filter by each tau and cross-validate the surviving subset. Errors
/// (nothing selected, single class, too few items) are surfaced per row.
inline std::vector<SweepRow> confidence_sweep(const MatrixXd& X, const std::vector<int>& y,
                                              const std::vector<double>& confidence,
                                              const std::vector<double>& taus, ClassifierKind kind,
                                              const ClassifierParams& params = {}, int folds = 10,
                                              std::uint64_t seed = 1) {
    std::vector<SweepRow> rows;
    for (double tau : taus) {
        SweepRow row;
        row.tau = tau;
        std::vector<int> keep;
        for (std::size_t i = 0; i < confidence.size(); ++i)
            if (confidence[i] >= tau) keep.push_back(static_cast<int>(i));
        row.n_examples = static_cast<int>(keep.size());
        if (keep.empty()) {
            row.error = "ZeroSelected";
            rows.push_back(row);
            continue;
        }
        MatrixXd Xs(keep.size(), X.cols());
        std::vector<int> ys(keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i) {
            Xs.row(static_cast<Eigen::Index>(i)) = X.row(keep[i]);
            ys[i] = y[static_cast<std::size_t>(keep[i])];
        }
        try {
            const EvalReport report = cv_classify(Xs, ys, kind, params, folds, seed);
            row.auc = report.mean.auc;
            row.fscore = report.mean.fscore;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace rotinv
