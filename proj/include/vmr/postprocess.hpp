#pragma once

#include "vmr/core.hpp"

#include <span>
#include <vector>

namespace vmr {

/// True when the moments are in temporal order and each one starts exactly
/// where the previous one ends.
bool is_partition(std::span<const TimeInterval> segments) noexcept;
bool is_partition(std::span<const ScoredMoment> moments) noexcept;

/// SimpleWatershed. Every maximal run of adjacent moments whose scores are all
/// >= gamma becomes one moment spanning the run, scored by the run maximum.
/// Moments below gamma pass through unchanged. Input must be a temporally
/// ordered partition; output keeps temporal order.
std::vector<ScoredMoment> simple_watershed(std::span<const ScoredMoment> moments, double gamma);

}  // namespace vmr
