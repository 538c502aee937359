#include "vmr/oracle.hpp"

#include "vmr/error.hpp"
#include "vmr/postprocess.hpp"

#include <algorithm>

namespace vmr {

std::vector<ScoredMoment> oracle_scores(std::span<const TimeInterval> segments, const QueryRecord& gt) {
    if (gt.gt_windows.empty()) {
        throw DataError("query " + std::to_string(gt.qid) + " has no ground-truth windows");
    }
    std::vector<ScoredMoment> out;
    out.reserve(segments.size());
    for (const auto& seg : segments) {
        out.emplace_back(seg, max_iou(seg, gt.gt_windows));
    }
    return out;
}

std::vector<ScoredMoment> oracle_merge(std::span<const TimeInterval> segments, const QueryRecord& gt) {
    if (gt.gt_windows.empty()) {
        throw DataError("query " + std::to_string(gt.qid) + " has no ground-truth windows");
    }
    if (!is_partition(segments)) {
        throw UsageError("oracle merge needs temporally ordered, adjacent segments");
    }
    std::vector<ScoredMoment> out;
    if (segments.empty()) {
        return out;
    }
    TimeInterval current = segments.front();
    double current_iou = max_iou(current, gt.gt_windows);
    for (std::size_t i = 1; i < segments.size(); ++i) {
        const TimeInterval candidate(current.start(), segments[i].end());
        const double candidate_iou = max_iou(candidate, gt.gt_windows);
        const double next_iou = max_iou(segments[i], gt.gt_windows);
        if (candidate_iou > std::max(current_iou, next_iou)) {
            current = candidate;
            current_iou = candidate_iou;
            continue;
        }
        out.emplace_back(current, current_iou);
        current = segments[i];
        current_iou = next_iou;
    }
    out.emplace_back(current, current_iou);
    return out;
}

}  // namespace vmr
