#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vmr {

/// A [start, end] span of a video, in seconds.
///
/// Always valid once constructed: finite, non-negative, start < end.
class TimeInterval {
public:
    TimeInterval(double start_s, double end_s);

    double start() const noexcept { return start_; }
    double end() const noexcept { return end_; }
    double length() const noexcept { return end_ - start_; }

    TimeInterval shifted(double offset_s) const { return {start_ + offset_s, end_ + offset_s}; }

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;

private:
    double start_;
    double end_;
};

/// A candidate moment with its query similarity in [0, 1].
class ScoredMoment {
public:
    ScoredMoment(TimeInterval interval, double score);

    const TimeInterval& interval() const noexcept { return interval_; }
    double score() const noexcept { return score_; }

    friend bool operator==(const ScoredMoment&, const ScoredMoment&) = default;

private:
    TimeInterval interval_;
    double score_;
};

struct QueryRecord {
    std::int64_t qid = 0;
    std::string vid;
    std::string query_text;
    double duration_s = 0.0;
    std::vector<TimeInterval> gt_windows;

    // Throws DataError if gt_windows is empty or a window leaves [0, duration_s + slack_s].
    void validate(double slack_s = 0.0) const;
};

struct PredictionRecord {
    std::int64_t qid = 0;
    std::string vid;
    std::vector<ScoredMoment> moments;  // ranked, see rank_moments()
};

/// Temporal intersection over union. 0 for disjoint intervals.
double iou(const TimeInterval& a, const TimeInterval& b) noexcept;

/// Highest IoU of `a` against any of `windows` (0 when empty).
double max_iou(const TimeInterval& a, std::span<const TimeInterval> windows) noexcept;

/// Intersects `a` with [0, duration_s]. Throws UsageError for duration_s <= 0 and
/// DataError when nothing of `a` lies inside the video.
TimeInterval clamp_to_video(const TimeInterval& a, double duration_s);

/// Ranking order: score descending, then earlier start, then earlier end.
bool ranks_before(const ScoredMoment& a, const ScoredMoment& b) noexcept;

/// Sorts in place by ranks_before (stable, so exact duplicates keep input order).
void rank_moments(std::vector<ScoredMoment>& moments);

bool is_ranked(std::span<const ScoredMoment> moments) noexcept;

/// Builds a PredictionRecord with its moments ranked.
PredictionRecord make_prediction(std::int64_t qid, std::string vid, std::vector<ScoredMoment> moments);

}  // namespace vmr
