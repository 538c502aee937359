#pragma once

// Test oracle: a literal C++ port of the moment-retrieval part of the
// official QVHighlights evaluator (numpy code), operating directly on the
// raw JSON records. Deliberately shares no code with vmr::metrics.
//
// Official quirks preserved:
//  - predictions truncated to the first 10 listed, then stably sorted by score
//  - mAP averages only over qids present in the submission
//  - R1 uses the first listed prediction and the hull-based "paired" IoU
//  - gt candidates visited in reversed stable argsort order of IoU

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>
#include <vector>

namespace reference {

struct Headline {
    double r1_at_0_5 = 0;
    double r1_at_0_7 = 0;
    double map_at_0_5 = 0;
    double map_at_0_75 = 0;
    double map_avg = 0;
};

struct Span {
    double start;
    double end;
};

inline std::vector<double> official_thresholds() {
    // float(f"{e:.2f}") for e in np.linspace(0.5, 0.95, 10)
    std::vector<double> out;
    for (int i = 0; i < 10; ++i) {
        const double e = 0.5 + (0.95 - 0.5) * i / 9.0;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", e);
        out.push_back(std::strtod(buf, nullptr));
    }
    return out;
}

inline double cross_iou(const Span& a, const Span& b) {
    const double area1 = a.end - a.start;
    const double area2 = b.end - b.start;
    const double left = std::max(a.start, b.start);
    const double right = std::min(a.end, b.end);
    const double inter = std::max(right - left, 0.0);
    const double uni = area1 + area2 - inter;
    return inter / uni;
}

inline double paired_iou(const Span& p, const Span& g) {
    const double inter = std::max(0.0, std::min(p.end, g.end) - std::max(p.start, g.start));
    const double uni = std::max(p.end, g.end) - std::min(p.start, g.start);
    return uni != 0 ? inter / uni : 0.0;
}

inline double interpolated_precision_recall(const std::vector<double>& precision, const std::vector<double>& recall) {
    std::vector<double> mprecision;
    std::vector<double> mrecall;
    mprecision.push_back(0);
    mprecision.insert(mprecision.end(), precision.begin(), precision.end());
    mprecision.push_back(0);
    mrecall.push_back(0);
    mrecall.insert(mrecall.end(), recall.begin(), recall.end());
    mrecall.push_back(1);
    for (int i = static_cast<int>(mprecision.size()) - 2; i >= 0; --i) {
        mprecision[i] = std::max(mprecision[i], mprecision[i + 1]);
    }
    double ap = 0;
    for (std::size_t i = 1; i < mrecall.size(); ++i) {
        if (mrecall[i] != mrecall[i - 1]) {
            ap += (mrecall[i] - mrecall[i - 1]) * mprecision[i];
        }
    }
    return ap;
}

struct Pred {
    Span span;
    double score;
};

inline std::vector<double> compute_average_precision_detection(const std::vector<Span>& gts, std::vector<Pred> preds,
                                                               const std::vector<double>& thresholds) {
    const std::size_t nt = thresholds.size();
    const std::size_t ng = gts.size();
    const std::size_t np = preds.size();
    std::vector<double> ap(nt, 0.0);
    if (np == 0) {
        return ap;
    }
    const double num_positive = static_cast<double>(ng);
    std::vector<std::vector<double>> lock_gt(nt, std::vector<double>(ng, -1));
    std::stable_sort(preds.begin(), preds.end(), [](const Pred& a, const Pred& b) { return -a.score < -b.score; });
    std::vector<std::vector<double>> tp(nt, std::vector<double>(np, 0));
    std::vector<std::vector<double>> fp(nt, std::vector<double>(np, 0));

    for (std::size_t idx = 0; idx < np; ++idx) {
        std::vector<double> tiou(ng);
        for (std::size_t j = 0; j < ng; ++j) {
            tiou[j] = cross_iou(preds[idx].span, gts[j]);
        }
        std::vector<std::size_t> sorted(ng);
        std::iota(sorted.begin(), sorted.end(), 0);
        std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) { return tiou[a] < tiou[b]; });
        std::reverse(sorted.begin(), sorted.end());
        for (std::size_t t = 0; t < nt; ++t) {
            for (std::size_t j : sorted) {
                if (tiou[j] < thresholds[t]) {
                    fp[t][idx] = 1;
                    break;
                }
                if (lock_gt[t][j] >= 0) {
                    continue;
                }
                tp[t][idx] = 1;
                lock_gt[t][j] = static_cast<double>(idx);
                break;
            }
            if (fp[t][idx] == 0 && tp[t][idx] == 0) {
                fp[t][idx] = 1;
            }
        }
    }
    for (std::size_t t = 0; t < nt; ++t) {
        std::vector<double> precision(np);
        std::vector<double> recall(np);
        double tps = 0;
        double fps = 0;
        for (std::size_t i = 0; i < np; ++i) {
            tps += tp[t][i];
            fps += fp[t][i];
            recall[i] = tps / num_positive;
            precision[i] = tps / (tps + fps);
        }
        ap[t] = interpolated_precision_recall(precision, recall);
    }
    return ap;
}

/// gt and submission are lists of official-format JSON objects.
inline Headline evaluate(const std::vector<nlohmann::json>& ground_truth, const std::vector<nlohmann::json>& submission,
                         std::size_t max_pred_windows = 10) {
    const auto thresholds = official_thresholds();

    std::map<long long, std::vector<Pred>> pred_by_qid;
    std::vector<long long> pred_order;
    for (const auto& d : submission) {
        const auto qid = d["qid"].get<long long>();
        const auto& windows = d["pred_relevant_windows"];
        for (std::size_t i = 0; i < windows.size() && i < max_pred_windows; ++i) {
            if (!pred_by_qid.contains(qid)) {
                pred_order.push_back(qid);
            }
            pred_by_qid[qid].push_back({{windows[i][0].get<double>(), windows[i][1].get<double>()},
                                        windows[i][2].get<double>()});
        }
    }
    std::map<long long, std::vector<Span>> gt_by_qid;
    for (const auto& d : ground_truth) {
        for (const auto& w : d["relevant_windows"]) {
            gt_by_qid[d["qid"].get<long long>()].push_back({w[0].get<double>(), w[1].get<double>()});
        }
    }

    std::vector<double> ap_sum(thresholds.size(), 0.0);
    for (long long qid : pred_order) {
        const auto ap = compute_average_precision_detection(gt_by_qid[qid], pred_by_qid[qid], thresholds);
        for (std::size_t t = 0; t < ap.size(); ++t) {
            ap_sum[t] += ap[t];
        }
    }
    std::vector<double> ap_thds(thresholds.size());
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
        ap_thds[t] = ap_sum[t] / static_cast<double>(pred_order.size());
    }
    const double average = std::accumulate(ap_thds.begin(), ap_thds.end(), 0.0) / static_cast<double>(ap_thds.size());

    // R1
    std::map<long long, Span> pred_top;
    std::vector<long long> r1_qids;
    for (const auto& d : submission) {
        const auto qid = d["qid"].get<long long>();
        const auto& w = d["pred_relevant_windows"][0];
        if (!pred_top.contains(qid)) {
            r1_qids.push_back(qid);
        }
        pred_top[qid] = {w[0].get<double>(), w[1].get<double>()};
    }
    std::map<long long, Span> gt_pick;
    for (const auto& d : ground_truth) {
        const auto qid = d["qid"].get<long long>();
        const auto& gts = gt_by_qid[qid];
        std::size_t best = 0;
        for (std::size_t j = 1; j < gts.size(); ++j) {
            if (cross_iou(pred_top[qid], gts[j]) > cross_iou(pred_top[qid], gts[best])) {
                best = j;
            }
        }
        gt_pick[qid] = gts[best];
    }
    double hits5 = 0;
    double hits7 = 0;
    for (long long qid : r1_qids) {
        const double v = paired_iou(pred_top[qid], gt_pick[qid]);
        hits5 += v >= 0.5 ? 1 : 0;
        hits7 += v >= 0.7 ? 1 : 0;
    }
    const double n = static_cast<double>(r1_qids.size());
    return {100.0 * hits5 / n, 100.0 * hits7 / n, 100.0 * ap_thds[0], 100.0 * ap_thds[5], 100.0 * average};
}

}  // namespace reference
