#include "vmr/proposals.hpp"

#include "vmr/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace vmr {

FrameTrack::FrameTrack(std::string vid, double fps, std::uint16_t width, std::uint16_t height,
                       std::vector<std::uint8_t> pixels)
    : vid_(std::move(vid)), fps_(fps), width_(width), height_(height), frame_count_(0), pixels_(std::move(pixels)) {
    if (!(fps > 0.0) || !std::isfinite(fps)) {
        throw DataError("frame track '" + vid_ + "': fps must be positive");
    }
    if (width == 0 || height == 0) {
        throw DataError("frame track '" + vid_ + "': zero frame dimensions");
    }
    if (pixels_.size() % frame_size() != 0) {
        std::ostringstream msg;
        msg << "frame track '" << vid_ << "': " << pixels_.size() << " bytes is not a whole number of "
            << frame_size() << "-byte frames";
        throw DataError(msg.str());
    }
    frame_count_ = pixels_.size() / frame_size();
    if (frame_count_ < 2) {
        throw DataError("frame track '" + vid_ + "': need at least 2 frames");
    }
}

std::span<const std::uint8_t> FrameTrack::frame(std::size_t i) const {
    if (i >= frame_count_) {
        throw UsageError("frame index out of range");
    }
    return std::span<const std::uint8_t>(pixels_).subspan(i * frame_size(), frame_size());
}

ContentSignal content_values(const FrameTrack& track) {
    const std::size_t plane = track.plane_size();
    ContentSignal signal;
    signal.values.reserve(track.frame_count() - 1);
    auto prev = track.frame(0);
    for (std::size_t i = 1; i < track.frame_count(); ++i) {
        const auto cur = track.frame(i);
        double channel_sum = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            std::uint64_t acc = 0;
            const std::size_t base = c * plane;
            for (std::size_t p = 0; p < plane; ++p) {
                acc += static_cast<std::uint64_t>(std::abs(int{cur[base + p]} - int{prev[base + p]}));
            }
            channel_sum += static_cast<double>(acc) / static_cast<double>(plane);
        }
        signal.values.push_back(channel_sum / 3.0);
        prev = cur;
    }
    return signal;
}

std::vector<TimeInterval> detect_shots(const ContentSignal& signal, double fps, std::size_t frame_count,
                                       double threshold, double min_len_s) {
    if (!(threshold > 0.0)) {
        throw UsageError("shot threshold must be positive");
    }
    if (!(min_len_s >= 0.0)) {
        throw UsageError("minimum shot length must be non-negative");
    }
    if (!(fps > 0.0) || frame_count < 2 || signal.values.size() + 1 != frame_count) {
        throw UsageError("content signal does not match the frame track");
    }

    const double duration = static_cast<double>(frame_count) / fps;
    std::vector<TimeInterval> shots;
    std::size_t shot_start = 0;
    for (std::size_t i = 0; i < signal.values.size(); ++i) {
        if (signal.values[i] < threshold) {
            continue;
        }
        const std::size_t cut = i + 1;
        const double start = static_cast<double>(shot_start) / fps;
        const double end = static_cast<double>(cut) / fps;
        if (end - start < min_len_s) {
            continue;
        }
        shots.emplace_back(start, end);
        shot_start = cut;
    }
    shots.emplace_back(static_cast<double>(shot_start) / fps, duration);
    return shots;
}

std::vector<TimeInterval> detect_shots(const FrameTrack& track, double threshold, double min_len_s) {
    return detect_shots(content_values(track), track.fps(), track.frame_count(), threshold, min_len_s);
}

std::vector<TimeInterval> sliding_windows(double duration_s, double window_s, double stride_s) {
    if (!(duration_s > 0.0) || !(window_s > 0.0) || !(stride_s > 0.0)) {
        throw UsageError("sliding windows need positive duration, window and stride");
    }
    std::vector<TimeInterval> windows;
    for (std::size_t k = 0;; ++k) {
        const double start = static_cast<double>(k) * stride_s;
        if (start >= duration_s) {
            break;
        }
        const double end = std::min(start + window_s, duration_s);
        if (end - start < kMinTailWindow && k > 0) {
            break;
        }
        windows.emplace_back(start, end);
        if (start + window_s > duration_s) {
            break;
        }
    }
    return windows;
}

}  // namespace vmr
