#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotinv/errors.hpp"
#include "rotinv/learn.hpp"

namespace rotinv {

namespace detail {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("failed writing: " + path);
}

}  // namespace detail

/// Classification report: one CSV row per fold plus mean and std aggregates.
inline std::string classification_csv(const EvalReport& report) {
    std::string out = "fold,auc,fscore,tpr,fpr,fnr,tnr\n";
    auto row = [&](const std::string& tag, const FoldMetrics& m) {
        out += tag + "," + detail::fmt_num(m.auc) + "," + detail::fmt_num(m.fscore) + "," +
               detail::fmt_num(m.tpr) + "," + detail::fmt_num(m.fpr) + "," + detail::fmt_num(m.fnr) +
               "," + detail::fmt_num(m.tnr) + "\n";
    };
    for (std::size_t i = 0; i < report.folds.size(); ++i)
        row(std::to_string(i + 1), report.folds[i]);
    row("mean", report.mean);
    row("std", report.stdev);
    return out;
}

inline nlohmann::ordered_json classification_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    auto pack = [](const FoldMetrics& m) {
        return nlohmann::ordered_json{{"auc", m.auc}, {"fscore", m.fscore}, {"tpr", m.tpr},
                                      {"fpr", m.fpr}, {"fnr", m.fnr},       {"tnr", m.tnr}};
    };
    j["folds"] = nlohmann::ordered_json::array();
    for (const auto& f : report.folds) j["folds"].push_back(pack(f));
    j["mean"] = pack(report.mean);
    j["std"] = pack(report.stdev);
    return j;
}

/// Retrieval report; the precision column is named after the evaluated rank.
inline std::string retrieval_csv(const RetrievalReport& r) {
    const std::string pcol = "p_at_" + std::to_string(r.rank_k);
    std::string out = "grouping,n_queries," + pcol + "_mean," + pcol + "_std,ap_mean,ap_std\n";
    out += std::to_string(r.grouping) + "," + std::to_string(r.n_queries) + "," +
           detail::fmt_num(r.p_mean) + "," + detail::fmt_num(r.p_std) + "," +
           detail::fmt_num(r.ap_mean) + "," + detail::fmt_num(r.ap_std) + "\n";
    return out;
}

inline nlohmann::ordered_json retrieval_json(const RetrievalReport& r) {
    return nlohmann::ordered_json{
        {"grouping", r.grouping},
        {"rank_k", r.rank_k},
        {"n_queries", r.n_queries},
        {"precision", {{"mean", r.p_mean}, {"std", r.p_std}}},
        {"average_precision", {{"mean", r.ap_mean}, {"std", r.ap_std}}},
    };
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "tau,n_examples,auc,fscore,error\n";
    for (const auto& r : rows) {
        out += detail::fmt_num(r.tau) + "," + std::to_string(r.n_examples) + "," +
               (r.error.empty() ? detail::fmt_num(r.auc) : "") + "," +
               (r.error.empty() ? detail::fmt_num(r.fscore) : "") + "," + r.error + "\n";
    }
    return out;
}

inline nlohmann::ordered_json sweep_json(const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j{{"tau", r.tau}, {"n_examples", r.n_examples}};
        if (r.error.empty()) {
            j["auc"] = r.auc;
            j["fscore"] = r.fscore;
        } else {
            j["error"] = r.error;
        }
        arr.push_back(j);
    }
    return arr;
}

}  // namespace rotinv
