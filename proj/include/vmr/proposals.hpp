#pragma once

#include "vmr/core.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vmr {

/// Downscaled HSV frames of one video at a fixed frame rate.
///
/// Pixels are stored frame after frame, each frame as three planes (H, S, V) of
/// width*height bytes in row-major order. H is rescaled to 0..255. This is the
/// same layout as the VMRF payload so files load with a single read.
class FrameTrack {
public:
    FrameTrack(std::string vid, double fps, std::uint16_t width, std::uint16_t height,
               std::vector<std::uint8_t> pixels);

    const std::string& vid() const noexcept { return vid_; }
    double fps() const noexcept { return fps_; }
    std::uint16_t width() const noexcept { return width_; }
    std::uint16_t height() const noexcept { return height_; }
    std::size_t frame_count() const noexcept { return frame_count_; }
    double duration_s() const noexcept { return static_cast<double>(frame_count_) / fps_; }

    std::size_t plane_size() const noexcept { return std::size_t{width_} * height_; }
    std::size_t frame_size() const noexcept { return 3 * plane_size(); }

    /// All three planes of frame `i`.
    std::span<const std::uint8_t> frame(std::size_t i) const;
    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

    /// Timestamp of frame `i`, i / fps.
    double frame_time(std::size_t i) const noexcept { return static_cast<double>(i) / fps_; }

    friend bool operator==(const FrameTrack&, const FrameTrack&) = default;

private:
    std::string vid_;
    double fps_;
    std::uint16_t width_;
    std::uint16_t height_;
    std::size_t frame_count_;
    std::vector<std::uint8_t> pixels_;
};

/// Per adjacent-frame-pair colour change, one value per pair, each in [0, 255].
struct ContentSignal {
    std::vector<double> values;
};

/// values[i] is the mean over H, S and V of the mean absolute difference
/// between frame i+1 and frame i. Hue is compared linearly, without wraparound.
ContentSignal content_values(const FrameTrack& track);

inline constexpr double kDefaultMinShotLength = 0.4;

/// Hard-cut shot detection. A cut is placed before frame i+1 when
/// content_values[i] >= threshold and the shot it closes is at least
/// min_len_s long. The returned shots partition [0, track.duration_s()].
std::vector<TimeInterval> detect_shots(const FrameTrack& track, double threshold,
                                       double min_len_s = kDefaultMinShotLength);

/// Same as detect_shots but reuses a precomputed signal.
std::vector<TimeInterval> detect_shots(const ContentSignal& signal, double fps, std::size_t frame_count,
                                       double threshold, double min_len_s = kDefaultMinShotLength);

inline constexpr double kDefaultWindowLength = 15.0;
inline constexpr double kDefaultWindowStride = 10.0;
inline constexpr double kMinTailWindow = 1.0;

/// Fixed-length windows starting every stride_s seconds. Generation stops after
/// the first window clipped to the video end; a tail shorter than one second is dropped.
std::vector<TimeInterval> sliding_windows(double duration_s, double window_s = kDefaultWindowLength,
                                          double stride_s = kDefaultWindowStride);

}  // namespace vmr
