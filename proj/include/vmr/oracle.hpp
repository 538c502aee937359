#pragma once

#include "vmr/core.hpp"

#include <span>
#include <vector>

namespace vmr {

// Bounds obtained by replacing the matcher with one that can see the ground
// truth. They are not strict upper bounds: a better oracle score than IoU may
// exist.

/// Scores each segment by its highest IoU with any ground-truth window.
std::vector<ScoredMoment> oracle_scores(std::span<const TimeInterval> segments, const QueryRecord& gt);

/// Greedy left-to-right merge over a partition. The accumulated segment
/// absorbs the next one when the union has a strictly higher IoU than both
/// the accumulated segment and the incoming one; otherwise it is emitted and
/// accumulation restarts. Emitted segments are scored by their IoU.
std::vector<ScoredMoment> oracle_merge(std::span<const TimeInterval> segments, const QueryRecord& gt);

}  // namespace vmr
