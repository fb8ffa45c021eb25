#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "elastic/error.hpp"
#include "elastic/field.hpp"

namespace elastic {

/// Ratios whose denominator is zero are reported as 0, except AUC, which is
/// 0.5 when only one class is present.
struct ConfusionMetrics {
    double sensitivity = 0;
    double specificity = 0;
    double f1 = 0;
    double auc = 0;
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

namespace detail {

inline double ratio(std::int64_t num, std::int64_t den) { return den > 0 ? double(num) / double(den) : 0.0; }

inline void fill_rates(ConfusionMetrics& m) {
    m.sensitivity = ratio(m.tp, m.tp + m.fn);
    m.specificity = ratio(m.tn, m.tn + m.fp);
    m.f1 = ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn);
}

}  // namespace detail

/// Counts at `score >= threshold` plus sensitivity, specificity and F1; no AUC.
template <typename Derived>
ConfusionMetrics confusion_at(const BinaryMask& gt, const Eigen::ArrayBase<Derived>& score,
                              typename Derived::Scalar threshold) {
    detail::require_same_shape(gt, score, "metrics");
    ConfusionMetrics m;
    for (Eigen::Index r = 0; r < gt.rows(); ++r)
        for (Eigen::Index c = 0; c < gt.cols(); ++c) {
            const bool pos = gt(r, c) != 0;
            const bool pred = score(r, c) >= threshold;
            (pos ? (pred ? m.tp : m.fn) : (pred ? m.fp : m.tn)) += 1;
        }
    detail::fill_rates(m);
    return m;
}

/// Area under the ROC curve traced over every distinct score value, ties
/// grouped into one ROC step and integrated with the trapezoid rule.
template <typename Derived>
double roc_auc(const BinaryMask& gt, const Eigen::ArrayBase<Derived>& score) {
    using Scalar = typename Derived::Scalar;
    detail::require_same_shape(gt, score, "roc_auc");
    std::vector<std::pair<Scalar, bool>> items;
    items.reserve(static_cast<std::size_t>(gt.size()));
    for (Eigen::Index r = 0; r < gt.rows(); ++r)
        for (Eigen::Index c = 0; c < gt.cols(); ++c) items.emplace_back(score(r, c), gt(r, c) != 0);
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    std::int64_t pos = 0, neg = 0;
    for (const auto& it : items) (it.second ? pos : neg) += 1;
    if (pos == 0 || neg == 0) return 0.5;

    double area = 0;  // in units of (tp count) x (fp count)
    std::int64_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < items.size();) {
        const std::int64_t tp0 = tp, fp0 = fp;
        const Scalar v = items[i].first;
        for (; i < items.size() && items[i].first == v; ++i) (items[i].second ? tp : fp) += 1;
        area += double(fp - fp0) * double(tp + tp0) / 2.0;
    }
    return area / (double(pos) * double(neg));
}

/// Sensitivity, specificity, F1 (foreground at score >= threshold) and AUC.
template <typename Derived>
ConfusionMetrics compute_metrics(const BinaryMask& gt, const Eigen::ArrayBase<Derived>& score,
                                 typename Derived::Scalar threshold = 0.5) {
    using Scalar = typename Derived::Scalar;
    detail::require_same_shape(gt, score, "compute_metrics");
    detail::require_finite(score, "score");
    if (score.size() > 0 && (score.minCoeff() < Scalar(0) || score.maxCoeff() > Scalar(1)))
        throw InvalidInput("scores must lie in [0,1]");
    ConfusionMetrics m = confusion_at(gt, score, threshold);
    m.auc = roc_auc(gt, score);
    return m;
}

}  // namespace elastic
