#include "vmr/core.hpp"

#include "vmr/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vmr {

TimeInterval::TimeInterval(double start_s, double end_s) : start_(start_s), end_(end_s) {
    if (!std::isfinite(start_s) || !std::isfinite(end_s)) {
        throw DataError("interval bounds must be finite");
    }
    if (start_s < 0.0) {
        std::ostringstream msg;
        msg << "interval start " << start_s << " is negative";
        throw DataError(msg.str());
    }
    if (!(start_s < end_s)) {
        std::ostringstream msg;
        msg << "interval [" << start_s << ", " << end_s << "] is empty or inverted";
        throw DataError(msg.str());
    }
}

ScoredMoment::ScoredMoment(TimeInterval interval, double score) : interval_(interval), score_(score) {
    if (!(score >= 0.0 && score <= 1.0)) {
        std::ostringstream msg;
        msg << "moment score " << score << " outside [0, 1]";
        throw DataError(msg.str());
    }
}

void QueryRecord::validate(double slack_s) const {
    if (gt_windows.empty()) {
        throw DataError("query " + std::to_string(qid) + " has no ground-truth windows");
    }
    for (const auto& w : gt_windows) {
        if (w.end() > duration_s + slack_s) {
            std::ostringstream msg;
            msg << "query " << qid << ": window [" << w.start() << ", " << w.end()
                << "] exceeds video duration " << duration_s;
            throw DataError(msg.str());
        }
    }
}

// Same arithmetic as the reference evaluator: union = |a| + |b| - intersection.
double iou(const TimeInterval& a, const TimeInterval& b) noexcept {
    const double inter = std::max(0.0, std::min(a.end(), b.end()) - std::max(a.start(), b.start()));
    const double uni = a.length() + b.length() - inter;
    return inter / uni;
}

double max_iou(const TimeInterval& a, std::span<const TimeInterval> windows) noexcept {
    double best = 0.0;
    for (const auto& w : windows) {
        best = std::max(best, iou(a, w));
    }
    return best;
}

TimeInterval clamp_to_video(const TimeInterval& a, double duration_s) {
    if (!(duration_s > 0.0)) {
        throw UsageError("video duration must be positive");
    }
    if (a.start() >= duration_s) {
        std::ostringstream msg;
        msg << "proposal [" << a.start() << ", " << a.end() << "] starts beyond video end " << duration_s;
        throw DataError(msg.str());
    }
    return {a.start(), std::min(a.end(), duration_s)};
}

bool ranks_before(const ScoredMoment& a, const ScoredMoment& b) noexcept {
    if (a.score() != b.score()) {
        return a.score() > b.score();
    }
    if (a.interval().start() != b.interval().start()) {
        return a.interval().start() < b.interval().start();
    }
    return a.interval().end() < b.interval().end();
}

void rank_moments(std::vector<ScoredMoment>& moments) {
    std::stable_sort(moments.begin(), moments.end(), ranks_before);
}

bool is_ranked(std::span<const ScoredMoment> moments) noexcept {
    return std::is_sorted(moments.begin(), moments.end(), ranks_before);
}

PredictionRecord make_prediction(std::int64_t qid, std::string vid, std::vector<ScoredMoment> moments) {
    rank_moments(moments);
    return {qid, std::move(vid), std::move(moments)};
}

}  // namespace vmr
