#pragma once

// Synthetic feature generators shared by the fixture tool and the tests.
// Every random draw goes through SplitRng so outputs do not depend on the
// standard library's distribution implementations.

#include "vmr/matching.hpp"
#include "vmr/proposals.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace vmr::synth {

class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(engine_() % span);
    }
    /// Standard normal via Box-Muller.
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 engine_;
};

using Hsv = std::array<std::uint8_t, 3>;

/// Content value of a clean cut from colour a to colour b.
inline double color_distance(const Hsv& a, const Hsv& b) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        sum += std::abs(int{a[c]} - int{b[c]});
    }
    return sum / 3.0;
}

/// Each block is `frames[k]` frames of colour `colors[k]`; every pixel gets
/// independent uniform noise in [0, noise_amp] added (saturating at 255).
/// Adjacent noisy frames of one block then differ by at most noise_amp.
inline FrameTrack make_block_track(const std::string& vid, double fps, std::uint16_t width, std::uint16_t height,
                                   const std::vector<std::size_t>& frames, const std::vector<Hsv>& colors,
                                   int noise_amp, SplitRng& rng) {
    const std::size_t plane = std::size_t{width} * height;
    std::vector<std::uint8_t> pixels;
    for (std::size_t b = 0; b < frames.size(); ++b) {
        for (std::size_t f = 0; f < frames[b]; ++f) {
            for (std::size_t c = 0; c < 3; ++c) {
                for (std::size_t p = 0; p < plane; ++p) {
                    int v = colors[b][c];
                    if (noise_amp > 0) {
                        v += static_cast<int>(rng.integer(0, noise_amp));
                    }
                    pixels.push_back(static_cast<std::uint8_t>(std::min(v, 255)));
                }
            }
        }
    }
    return FrameTrack(vid, fps, width, height, std::move(pixels));
}

inline std::vector<float> normalized(const std::vector<double>& v) {
    double n = 0.0;
    for (double x : v) {
        n += x * x;
    }
    n = std::sqrt(n);
    std::vector<float> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = static_cast<float>(v[i] / n);
    }
    return out;
}

inline std::vector<double> random_direction(std::size_t dim, SplitRng& rng) {
    std::vector<double> v(dim);
    for (auto& x : v) {
        x = rng.normal();
    }
    const auto u = normalized(v);
    return {u.begin(), u.end()};
}

/// normalize(weight * direction + noise * gaussian)
inline std::vector<float> noisy_embedding(const std::vector<double>& direction, double weight, double noise,
                                          SplitRng& rng) {
    std::vector<double> v(direction.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = weight * direction[i] + noise * rng.normal();
    }
    return normalized(v);
}

}  // namespace vmr::synth
