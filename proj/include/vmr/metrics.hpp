#pragma once

#include "vmr/core.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace vmr {

/// IoU thresholds 0.50, 0.55, ..., 0.95 used for average mAP.
inline constexpr std::array<double, 10> kMapThresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                                          0.75, 0.80, 0.85, 0.90, 0.95};

enum class LengthBucket { Short, Medium, Long };

inline constexpr std::array<LengthBucket, 3> kBuckets = {LengthBucket::Short, LengthBucket::Medium,
                                                         LengthBucket::Long};

std::string_view bucket_name(LengthBucket b) noexcept;

/// short: < 10 s, medium: 10..30 s inclusive, long: > 30 s.
LengthBucket bucketize(const TimeInterval& window) noexcept;

/// All values are percentages in [0, 100].
struct EvalReport {
    double r1_at_0_5 = 0.0;
    double r1_at_0_7 = 0.0;
    double map_at_0_5 = 0.0;
    double map_at_0_75 = 0.0;
    double map_avg = 0.0;
    std::array<double, kMapThresholds.size()> map_by_threshold{};

    /// Average mAP restricted to gt windows of one length bucket, indexed by
    /// LengthBucket. Empty when no query has a window in the bucket.
    std::array<std::optional<double>, 3> bucketed{};
    std::array<std::size_t, 3> bucket_queries{};

    std::size_t num_queries = 0;
    std::size_t max_preds = 0;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct EvalOptions {
    /// Predictions beyond this rank are ignored.
    std::size_t max_preds = 10;
};

/// 1 when the first prediction reaches `iou_thresh` against some gt window.
int recall_at_1(const PredictionRecord& preds, const QueryRecord& gt, double iou_thresh);

/// Detection-style AP of one ranked prediction list at one IoU threshold.
double average_precision(const PredictionRecord& preds, const QueryRecord& gt, double iou_thresh);

/// AP at each of `thresholds`, considering at most `max_preds` predictions.
std::vector<double> average_precision(const PredictionRecord& preds, const QueryRecord& gt,
                                      std::span<const double> thresholds, std::size_t max_preds);

/// Aggregate metrics over `gts`. A query without a prediction record counts as
/// an empty prediction; records for qids absent from `gts` are ignored.
EvalReport evaluate(std::span<const PredictionRecord> preds, std::span<const QueryRecord> gts,
                    const EvalOptions& options = {});

}  // namespace vmr
