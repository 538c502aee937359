#include "synthetic.hpp"
#include "vmr/error.hpp"
#include "vmr/proposals.hpp"

#include <doctest.h>

#include <cmath>

using namespace vmr;
using synth::Hsv;

namespace {

FrameTrack solid_blocks(double fps, const std::vector<std::size_t>& frames, const std::vector<Hsv>& colors,
                        std::uint16_t w = 4, std::uint16_t h = 3) {
    synth::SplitRng rng(0);
    return synth::make_block_track("t", fps, w, h, frames, colors, 0, rng);
}

// Independent content values: per pixel, per channel, straight from the definition.
std::vector<double> brute_content(const FrameTrack& t) {
    std::vector<double> out;
    const std::size_t plane = t.plane_size();
    for (std::size_t i = 0; i + 1 < t.frame_count(); ++i) {
        double total = 0;
        for (std::size_t c = 0; c < 3; ++c) {
            double s = 0;
            for (std::size_t p = 0; p < plane; ++p) {
                s += std::fabs(double(t.frame(i + 1)[c * plane + p]) - double(t.frame(i)[c * plane + p]));
            }
            total += s / double(plane);
        }
        out.push_back(total / 3);
    }
    return out;
}

std::vector<TimeInterval> brute_shots(const FrameTrack& t, double lambda, double min_len) {
    const auto v = brute_content(t);
    std::vector<double> bounds = {0.0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double at = double(i + 1) / t.fps();
        if (v[i] >= lambda && at - bounds.back() >= min_len) {
            bounds.push_back(at);
        }
    }
    bounds.push_back(double(t.frame_count()) / t.fps());
    std::vector<TimeInterval> out;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        out.emplace_back(bounds[i], bounds[i + 1]);
    }
    return out;
}

}  // namespace

TEST_CASE("FrameTrack invariants") {
    CHECK_THROWS_AS(FrameTrack("v", 10, 2, 1, std::vector<std::uint8_t>(6)), DataError);  // one frame
    CHECK_THROWS_AS(FrameTrack("v", 10, 2, 1, std::vector<std::uint8_t>(13)), DataError);  // ragged
    CHECK_THROWS_AS(FrameTrack("v", 0, 2, 1, std::vector<std::uint8_t>(12)), DataError);
    const FrameTrack t("v", 10, 2, 1, std::vector<std::uint8_t>(12));
    CHECK(t.frame_count() == 2);
    CHECK(t.duration_s() == doctest::Approx(0.2));
}

TEST_CASE("content_values examples") {
    SUBCASE("identical frames") {
        const auto t = solid_blocks(10, {2}, {Hsv{10, 20, 30}});
        CHECK(content_values(t).values == std::vector<double>{0.0});
    }
    SUBCASE("black to white") {
        const auto t = solid_blocks(10, {1, 1}, {Hsv{0, 0, 0}, Hsv{255, 255, 255}});
        CHECK(content_values(t).values == std::vector<double>{255.0});
    }
    SUBCASE("2x1 frames, zero then (30, 60, 90)") {
        const auto t = solid_blocks(10, {1, 1}, {Hsv{0, 0, 0}, Hsv{30, 60, 90}}, 2, 1);
        CHECK(content_values(t).values == std::vector<double>{60.0});
    }
}

TEST_CASE("content_values matches the per-pixel definition on noisy tracks") {
    synth::SplitRng rng(3);
    for (int k = 0; k < 20; ++k) {
        const auto t = synth::make_block_track("n", 12, 5, 4, {3, 4, 2}, {Hsv{10, 200, 30}, Hsv{90, 90, 90}, Hsv{0, 0, 255}},
                                               static_cast<int>(rng.integer(0, 40)), rng);
        const auto fast = content_values(t).values;
        const auto slow = brute_content(t);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) {
            CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
            CHECK(fast[i] >= 0.0);
            CHECK(fast[i] <= 255.0);
        }
    }
}

TEST_CASE("content_values of a reversed track is the reversed signal") {
    synth::SplitRng rng(5);
    const auto t = synth::make_block_track("r", 10, 6, 2, {4, 5, 3}, {Hsv{0, 10, 20}, Hsv{200, 10, 20}, Hsv{5, 5, 5}}, 25, rng);
    std::vector<std::uint8_t> reversed;
    for (std::size_t i = t.frame_count(); i-- > 0;) {
        const auto f = t.frame(i);
        reversed.insert(reversed.end(), f.begin(), f.end());
    }
    const FrameTrack r("r", t.fps(), t.width(), t.height(), std::move(reversed));
    auto fwd = content_values(t).values;
    std::reverse(fwd.begin(), fwd.end());
    CHECK(content_values(r).values == fwd);
}

TEST_CASE("detect_shots examples") {
    const auto two_blocks = solid_blocks(10, {50, 50}, {Hsv{0, 0, 0}, Hsv{255, 255, 255}});
    // Frozen from brute_shots on the same track.
    const auto expected = brute_shots(two_blocks, 100, kDefaultMinShotLength);
    REQUIRE(expected == std::vector<TimeInterval>{{0, 5}, {5, 10}});
    CHECK(detect_shots(two_blocks, 100) == expected);

    CHECK(detect_shots(two_blocks, 300) == std::vector<TimeInterval>{{0, 10}});

    const auto constant = solid_blocks(10, {37}, {Hsv{40, 50, 60}});
    CHECK(detect_shots(constant, 0.001) == std::vector<TimeInterval>{{0, 3.7}});

    CHECK_THROWS_AS(detect_shots(two_blocks, 0), UsageError);
    CHECK_THROWS_AS(detect_shots(two_blocks, 10, -1), UsageError);
}

TEST_CASE("detect_shots suppresses cuts that would close a too-short shot") {
    // Cuts after 1, 2 and 10 frames at 10 fps.
    const auto t = solid_blocks(10, {1, 1, 8, 10},
                                {Hsv{0, 0, 0}, Hsv{255, 255, 255}, Hsv{0, 0, 0}, Hsv{255, 255, 255}});
    CHECK(detect_shots(t, 100, 0.0) == std::vector<TimeInterval>{{0, 0.1}, {0.1, 0.2}, {0.2, 1.0}, {1.0, 2.0}});
    CHECK(detect_shots(t, 100, 0.15) == std::vector<TimeInterval>{{0, 0.2}, {0.2, 1.0}, {1.0, 2.0}});
    CHECK(detect_shots(t, 100, 0.4) == std::vector<TimeInterval>{{0, 1.0}, {1.0, 2.0}});
}

TEST_CASE("detect_shots partitions the track and is monotone in the threshold") {
    synth::SplitRng rng(17);
    for (int k = 0; k < 60; ++k) {
        std::vector<std::size_t> frames;
        std::vector<Hsv> colors;
        const auto blocks = rng.integer(1, 8);
        for (int b = 0; b < blocks; ++b) {
            frames.push_back(static_cast<std::size_t>(rng.integer(1, 15)));
            colors.push_back(Hsv{static_cast<std::uint8_t>(rng.integer(0, 255)),
                                 static_cast<std::uint8_t>(rng.integer(0, 255)),
                                 static_cast<std::uint8_t>(rng.integer(0, 255))});
        }
        if (frames.size() == 1 && frames[0] < 2) {
            frames[0] = 2;
        }
        const double fps = rng.uniform(5, 30);
        const auto t = synth::make_block_track("p", fps, 3, 2, frames, colors, static_cast<int>(rng.integer(0, 30)), rng);
        const double min_len = rng.uniform(0, 0.5);
        std::size_t prev_count = std::numeric_limits<std::size_t>::max();
        for (double lambda = 1; lambda <= 256; lambda *= 1.7) {
            const auto shots = detect_shots(t, lambda, min_len);
            CHECK(shots == brute_shots(t, lambda, min_len));
            REQUIRE_FALSE(shots.empty());
            CHECK(shots.front().start() == 0.0);
            CHECK(shots.back().end() == t.duration_s());
            for (std::size_t i = 1; i < shots.size(); ++i) {
                CHECK(shots[i].start() == shots[i - 1].end());
            }
            CHECK(shots.size() <= prev_count);
            prev_count = shots.size();
        }
    }
}

TEST_CASE("sliding_windows examples") {
    CHECK(sliding_windows(35) == std::vector<TimeInterval>{{0, 15}, {10, 25}, {20, 35}, {30, 35}});
    CHECK(sliding_windows(12) == std::vector<TimeInterval>{{0, 12}});
    const auto w = sliding_windows(150);
    REQUIRE(w.size() == 15);
    CHECK(w.front() == TimeInterval(0, 15));
    CHECK(w[13].start() == 130);
    CHECK(w.back() == TimeInterval(140, 150));
    // 40.5 s: the [40, 40.5] tail is dropped.
    CHECK(sliding_windows(40.5).back() == TimeInterval(30, 40.5));
    CHECK_THROWS_AS(sliding_windows(0), UsageError);
    CHECK_THROWS_AS(sliding_windows(10, 0, 1), UsageError);
    CHECK_THROWS_AS(sliding_windows(10, 1, -1), UsageError);
}

TEST_CASE("sliding_windows cover the whole video") {
    synth::SplitRng rng(23);
    for (int k = 0; k < 500; ++k) {
        const double duration = rng.uniform(0.2, 400);
        const auto w = sliding_windows(duration);
        REQUIRE_FALSE(w.empty());
        CHECK(w.front().start() == 0.0);
        double covered = 0.0;
        for (const auto& x : w) {
            CHECK(x.start() <= covered);
            covered = std::max(covered, x.end());
        }
        CHECK(covered == duration);
    }
}
