#include "vmr/metrics.hpp"

#include "vmr/error.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace vmr {

std::string_view bucket_name(LengthBucket b) noexcept {
    switch (b) {
    case LengthBucket::Short:
        return "short";
    case LengthBucket::Medium:
        return "medium";
    case LengthBucket::Long:
        return "long";
    }
    return "?";
}

LengthBucket bucketize(const TimeInterval& window) noexcept {
    const double len = window.length();
    if (len < 10.0) {
        return LengthBucket::Short;
    }
    if (len <= 30.0) {
        return LengthBucket::Medium;
    }
    return LengthBucket::Long;
}

namespace {

void require_same_query(const PredictionRecord& preds, const QueryRecord& gt) {
    if (preds.qid != gt.qid) {
        throw UsageError("prediction qid " + std::to_string(preds.qid) + " does not match query " +
                         std::to_string(gt.qid));
    }
}

// Greedy matching of ranked predictions to gt windows at one threshold.
// Returns the true-positive flag for each prediction.
std::vector<bool> match_predictions(std::span<const ScoredMoment> ranked, std::span<const TimeInterval> windows,
                                    double iou_thresh) {
    std::vector<bool> tp(ranked.size(), false);
    std::vector<bool> taken(windows.size(), false);
    std::vector<double> ious(windows.size());
    std::vector<std::size_t> order(windows.size());
    for (std::size_t p = 0; p < ranked.size(); ++p) {
        for (std::size_t g = 0; g < windows.size(); ++g) {
            ious[g] = iou(ranked[p].interval(), windows[g]);
        }
        // Highest IoU first; among equal IoUs the later window is tried first.
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ious[a] > ious[b] || (ious[a] == ious[b] && a > b);
        });
        for (std::size_t g : order) {
            if (ious[g] < iou_thresh) {
                break;
            }
            if (!taken[g]) {
                taken[g] = true;
                tp[p] = true;
                break;
            }
        }
    }
    return tp;
}

// Area under the precision-recall curve with precision replaced by its
// running maximum from the right.
double interpolated_ap(const std::vector<bool>& tp, std::size_t num_gt) {
    const std::size_t n = tp.size();
    std::vector<double> precision(n);
    std::vector<double> recall(n);
    double hits = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (tp[i]) {
            hits += 1.0;
        }
        precision[i] = hits / static_cast<double>(i + 1);
        recall[i] = hits / static_cast<double>(num_gt);
    }
    for (std::size_t i = n; i-- > 1;) {
        precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (recall[i] != prev_recall) {
            ap += (recall[i] - prev_recall) * precision[i];
            prev_recall = recall[i];
        }
    }
    return ap;
}

std::vector<ScoredMoment> top_predictions(const PredictionRecord& preds, std::size_t max_preds) {
    std::vector<ScoredMoment> ranked(preds.moments.begin(),
                                     preds.moments.begin() + std::min(max_preds, preds.moments.size()));
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const ScoredMoment& a, const ScoredMoment& b) { return a.score() > b.score(); });
    return ranked;
}

double mean(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

int recall_at_1(const PredictionRecord& preds, const QueryRecord& gt, double iou_thresh) {
    require_same_query(preds, gt);
    if (preds.moments.empty()) {
        return 0;
    }
    return max_iou(preds.moments.front().interval(), gt.gt_windows) >= iou_thresh ? 1 : 0;
}

std::vector<double> average_precision(const PredictionRecord& preds, const QueryRecord& gt,
                                      std::span<const double> thresholds, std::size_t max_preds) {
    require_same_query(preds, gt);
    std::vector<double> aps(thresholds.size(), 0.0);
    if (preds.moments.empty() || gt.gt_windows.empty() || max_preds == 0) {
        return aps;
    }
    const auto ranked = top_predictions(preds, max_preds);
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
        aps[t] = interpolated_ap(match_predictions(ranked, gt.gt_windows, thresholds[t]), gt.gt_windows.size());
    }
    return aps;
}

double average_precision(const PredictionRecord& preds, const QueryRecord& gt, double iou_thresh) {
    const double thresholds[] = {iou_thresh};
    return average_precision(preds, gt, thresholds, preds.moments.size()).front();
}

EvalReport evaluate(std::span<const PredictionRecord> preds, std::span<const QueryRecord> gts,
                    const EvalOptions& options) {
    if (options.max_preds == 0) {
        throw UsageError("max_preds must be at least 1");
    }
    std::unordered_map<std::int64_t, const QueryRecord*> gt_by_qid;
    for (const auto& gt : gts) {
        if (!gt_by_qid.emplace(gt.qid, &gt).second) {
            throw DataError("duplicate ground-truth record for qid " + std::to_string(gt.qid));
        }
    }
    std::unordered_map<std::int64_t, const PredictionRecord*> pred_by_qid;
    for (const auto& p : preds) {
        if (!pred_by_qid.emplace(p.qid, &p).second) {
            throw DataError("duplicate prediction record for qid " + std::to_string(p.qid));
        }
    }

    EvalReport report;
    report.num_queries = gts.size();
    report.max_preds = options.max_preds;
    if (gts.empty()) {
        return report;
    }

    const auto lookup = [&](const QueryRecord& gt) {
        const auto it = pred_by_qid.find(gt.qid);
        return it == pred_by_qid.end() ? PredictionRecord{gt.qid, gt.vid, {}} : *it->second;
    };

    double r1_5 = 0.0;
    double r1_7 = 0.0;
    std::array<double, kMapThresholds.size()> ap_sum{};
    std::array<std::vector<double>, 3> bucket_ap;

    for (const auto& gt : gts) {
        const PredictionRecord p = lookup(gt);
        r1_5 += recall_at_1(p, gt, 0.5);
        r1_7 += recall_at_1(p, gt, 0.7);
        const auto aps = average_precision(p, gt, kMapThresholds, options.max_preds);
        for (std::size_t t = 0; t < aps.size(); ++t) {
            ap_sum[t] += aps[t];
        }

        for (LengthBucket b : kBuckets) {
            QueryRecord restricted{gt.qid, gt.vid, gt.query_text, gt.duration_s, {}};
            std::copy_if(gt.gt_windows.begin(), gt.gt_windows.end(), std::back_inserter(restricted.gt_windows),
                         [b](const TimeInterval& w) { return bucketize(w) == b; });
            if (restricted.gt_windows.empty()) {
                continue;
            }
            bucket_ap[static_cast<std::size_t>(b)].push_back(
                mean(average_precision(p, restricted, kMapThresholds, options.max_preds)));
        }
    }

    const double n = static_cast<double>(gts.size());
    report.r1_at_0_5 = 100.0 * r1_5 / n;
    report.r1_at_0_7 = 100.0 * r1_7 / n;
    for (std::size_t t = 0; t < ap_sum.size(); ++t) {
        report.map_by_threshold[t] = 100.0 * ap_sum[t] / n;
    }
    report.map_at_0_5 = report.map_by_threshold[0];
    report.map_at_0_75 = report.map_by_threshold[5];
    report.map_avg = mean(report.map_by_threshold);
    for (std::size_t b = 0; b < 3; ++b) {
        report.bucket_queries[b] = bucket_ap[b].size();
        if (!bucket_ap[b].empty()) {
            report.bucketed[b] = 100.0 * mean(bucket_ap[b]);
        }
    }
    return report;
}

}  // namespace vmr
