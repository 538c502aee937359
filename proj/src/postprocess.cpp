#include "vmr/postprocess.hpp"

#include "vmr/error.hpp"

#include <algorithm>

namespace vmr {

bool is_partition(std::span<const TimeInterval> segments) noexcept {
    for (std::size_t i = 1; i < segments.size(); ++i) {
        if (segments[i].start() != segments[i - 1].end()) {
            return false;
        }
    }
    return true;
}

bool is_partition(std::span<const ScoredMoment> moments) noexcept {
    for (std::size_t i = 1; i < moments.size(); ++i) {
        if (moments[i].interval().start() != moments[i - 1].interval().end()) {
            return false;
        }
    }
    return true;
}

std::vector<ScoredMoment> simple_watershed(std::span<const ScoredMoment> moments, double gamma) {
    if (!is_partition(moments)) {
        throw UsageError("watershed needs temporally ordered, adjacent segments");
    }
    std::vector<ScoredMoment> out;
    out.reserve(moments.size());
    std::size_t i = 0;
    while (i < moments.size()) {
        if (moments[i].score() < gamma) {
            out.push_back(moments[i]);
            ++i;
            continue;
        }
        std::size_t j = i;
        double best = moments[i].score();
        while (j + 1 < moments.size() && moments[j + 1].score() >= gamma) {
            ++j;
            best = std::max(best, moments[j].score());
        }
        out.emplace_back(TimeInterval(moments[i].interval().start(), moments[j].interval().end()), best);
        i = j + 1;
    }
    return out;
}

}  // namespace vmr
