// Writes the synthetic fixture set: a dataset JSONL plus a feature root with
// frame tracks, 1 fps embedding tracks, query embeddings and captions.
//
// Videos are runs of solid-colour shots. Some shots carry a mid-shot colour
// shift whose content value sits between 32 and 53, so the two default
// thresholds split the same video differently. Every shot has a topic; frame,
// caption and query embeddings are noisy copies of per-topic directions, and
// a query's ground truth is every maximal run of shots with its topic.

#include "synthetic.hpp"
#include "vmr/io.hpp"
#include "vmr/proposals.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

namespace fs = std::filesystem;
using namespace vmr;
using namespace vmr::synth;

namespace {

constexpr double kFps = 5.0;
constexpr std::uint16_t kWidth = 16;
constexpr std::uint16_t kHeight = 9;
constexpr int kNoise = 3;
constexpr std::size_t kTopics = 6;
constexpr std::size_t kJointDim = 32;
constexpr std::size_t kSentenceDim = 24;

struct Shot {
    std::size_t first_frame;
    std::size_t frames;
    std::size_t topic;
    bool soft_shift;
    double weight;  // how strongly the shot's frames express its topic
};

struct Video {
    std::string vid;
    std::vector<Shot> shots;
    std::size_t frame_count = 0;
    double duration() const { return static_cast<double>(frame_count) / kFps; }
};

Hsv random_color(SplitRng& rng) {
    return {static_cast<std::uint8_t>(rng.integer(0, 200)), static_cast<std::uint8_t>(rng.integer(0, 200)),
            static_cast<std::uint8_t>(rng.integer(0, 200))};
}

Hsv pick_distinct(const Hsv& prev, SplitRng& rng) {
    for (;;) {
        const Hsv c = random_color(rng);
        if (color_distance(prev, c) >= 75.0) {
            return c;
        }
    }
}

// Shifts each channel by 40 toward the far end so the clean change is exactly 40.
Hsv soft_shift(const Hsv& c) {
    Hsv out{};
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = static_cast<std::uint8_t>(c[i] < 128 ? c[i] + 40 : c[i] - 40);
    }
    return out;
}

Video make_video(const std::string& vid, SplitRng& rng) {
    Video v{vid, {}, 0};
    const auto target_frames = static_cast<std::size_t>(rng.integer(40, 90) * kFps);
    std::size_t topic = static_cast<std::size_t>(rng.integer(0, kTopics - 1));
    while (v.frame_count < target_frames) {
        auto frames = static_cast<std::size_t>(rng.integer(2 * 5, 12 * 5));
        frames = std::min(frames, target_frames - v.frame_count);
        if (frames < 5 && !v.shots.empty()) {
            v.shots.back().frames += frames;
            v.frame_count += frames;
            break;
        }
        // Consecutive shots keep their topic 40% of the time.
        if (!v.shots.empty() && rng.uniform() >= 0.4) {
            topic = static_cast<std::size_t>(rng.integer(0, kTopics - 1));
        }
        const bool soft = frames >= 20 && rng.uniform() < 0.35;
        v.shots.push_back({v.frame_count, frames, topic, soft, rng.uniform(0.35, 1.5)});
        v.frame_count += frames;
    }
    return v;
}

FrameTrack render(const Video& v, SplitRng& rng) {
    std::vector<std::size_t> blocks;
    std::vector<Hsv> colors;
    Hsv prev{0, 0, 0};
    for (const auto& s : v.shots) {
        const Hsv c = pick_distinct(prev, rng);
        if (s.soft_shift) {
            const std::size_t half = s.frames / 2;
            blocks.push_back(half);
            colors.push_back(c);
            blocks.push_back(s.frames - half);
            colors.push_back(soft_shift(c));
            prev = soft_shift(c);
        } else {
            blocks.push_back(s.frames);
            colors.push_back(c);
            prev = c;
        }
    }
    return make_block_track(v.vid, kFps, kWidth, kHeight, blocks, colors, kNoise, rng);
}

const Shot& shot_at(const Video& v, double t) {
    const auto frame = static_cast<std::size_t>(t * kFps);
    for (const auto& s : v.shots) {
        if (frame < s.first_frame + s.frames) {
            return s;
        }
    }
    return v.shots.back();
}

// Topic covering most of [a, b).
std::size_t majority_topic(const Video& v, const TimeInterval& seg) {
    std::map<std::size_t, double> cover;
    for (const auto& s : v.shots) {
        const double start = static_cast<double>(s.first_frame) / kFps;
        const double end = static_cast<double>(s.first_frame + s.frames) / kFps;
        const double overlap = std::min(end, seg.end()) - std::max(start, seg.start());
        if (overlap > 0.0) {
            cover[s.topic] += overlap;
        }
    }
    return std::max_element(cover.begin(), cover.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
}

std::vector<TimeInterval> topic_windows(const Video& v, std::size_t topic) {
    std::vector<TimeInterval> windows;
    std::size_t i = 0;
    while (i < v.shots.size()) {
        if (v.shots[i].topic != topic) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < v.shots.size() && v.shots[j + 1].topic == topic) {
            ++j;
        }
        const auto first = v.shots[i].first_frame;
        const auto last = v.shots[j].first_frame + v.shots[j].frames;
        windows.emplace_back(static_cast<double>(first) / kFps, static_cast<double>(last) / kFps);
        i = j + 1;
    }
    return windows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic fixture set"};
    fs::path out_dir;
    std::uint64_t seed = 20221011;
    int videos = 8;
    int queries = 20;
    app.add_option("--out", out_dir, "Output directory")->required();
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--videos", videos, "Number of videos")->check(CLI::PositiveNumber);
    app.add_option("--queries", queries, "Number of queries (one extra query references a missing video)")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    SplitRng rng(seed);
    const fs::path features = out_dir / "features";
    fs::create_directories(features / "frames");
    fs::create_directories(features / "embeddings");

    std::vector<std::vector<double>> joint_topics;
    std::vector<std::vector<double>> sentence_topics;
    for (std::size_t t = 0; t < kTopics; ++t) {
        joint_topics.push_back(random_direction(kJointDim, rng));
        sentence_topics.push_back(random_direction(kSentenceDim, rng));
    }

    std::vector<Video> catalog;
    std::vector<SegmentCaption> captions;
    for (int i = 0; i < videos; ++i) {
        char vid[32];
        std::snprintf(vid, sizeof vid, "synth_%02d", i);
        Video v = make_video(vid, rng);
        const FrameTrack track = render(v, rng);
        write_frame_track(track, features / "frames" / (v.vid + ".vmrf"));

        std::vector<EmbeddingEntry> entries;
        for (double t = 0.5; t < v.duration(); t += 1.0) {
            const Shot& s = shot_at(v, t);
            entries.push_back({t, noisy_embedding(joint_topics[s.topic], s.weight, 0.34, rng)});
        }
        write_embedding_track(EmbeddingTrack(v.vid, kJointDim, std::move(entries)),
                              features / "embeddings" / (v.vid + ".vmre"));

        // Captions for every proposal set the tests use.
        std::vector<TimeInterval> segments;
        for (double lambda : {32.0, 53.0}) {
            const auto shots = detect_shots(track, lambda);
            segments.insert(segments.end(), shots.begin(), shots.end());
        }
        const auto windows = sliding_windows(v.duration());
        segments.insert(segments.end(), windows.begin(), windows.end());
        std::set<std::pair<double, double>> done;
        for (const auto& seg : segments) {
            if (!done.insert({seg.start(), seg.end()}).second) {
                continue;
            }
            const std::size_t topic = majority_topic(v, seg);
            captions.push_back({v.vid, seg, "a scene about topic " + std::to_string(topic),
                                noisy_embedding(sentence_topics[topic], 1.0, 0.3, rng)});
        }
        catalog.push_back(std::move(v));
    }
    write_captions(captions, features / "captions.jsonl");

    std::vector<QueryRecord> dataset;
    std::vector<QueryEmbedding> query_embeddings;
    for (int q = 0; q < queries; ++q) {
        const Video& v = catalog[static_cast<std::size_t>(q) % catalog.size()];
        const auto& shot = v.shots[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(v.shots.size()) - 1))];
        const std::int64_t qid = 1000 + q;
        dataset.push_back({qid, v.vid, "show me topic " + std::to_string(shot.topic), v.duration(),
                           topic_windows(v, shot.topic)});
        query_embeddings.push_back({qid, noisy_embedding(joint_topics[shot.topic], 1.0, 0.15, rng), kJointEncoder});
        query_embeddings.push_back(
            {qid, noisy_embedding(sentence_topics[shot.topic], 1.0, 0.15, rng), kSentenceEncoder});
    }
    // Features for this video were never extracted.
    dataset.push_back({1000 + queries, "synth_missing", "a query whose video is unavailable", 60.0,
                       {TimeInterval(10.0, 20.0)}});
    write_dataset(dataset, out_dir / "dataset.jsonl");
    write_query_embeddings(query_embeddings, features / "query_embeddings.jsonl");

    std::cout << "wrote " << catalog.size() << " videos and " << dataset.size() << " queries to " << out_dir << "\n";
    return 0;
}
