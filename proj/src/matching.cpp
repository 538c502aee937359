#include "vmr/matching.hpp"

#include "vmr/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vmr {

void require_unit_norm(std::span<const float> v, const std::string& what) {
    double sq = 0.0;
    for (float x : v) {
        sq += double{x} * double{x};
    }
    const double norm = std::sqrt(sq);
    if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
        std::ostringstream msg;
        msg << what << ": vector norm " << norm << " is not 1";
        throw DataError(msg.str());
    }
}

EmbeddingTrack::EmbeddingTrack(std::string vid, std::size_t dim, std::vector<EmbeddingEntry> entries)
    : vid_(std::move(vid)), dim_(dim), entries_(std::move(entries)) {
    if (dim_ == 0) {
        throw DataError("embedding track '" + vid_ + "': zero dimension");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        const std::string where = "embedding track '" + vid_ + "' entry " + std::to_string(i);
        if (e.vector.size() != dim_) {
            throw DataError(where + ": dimension mismatch");
        }
        if (!std::isfinite(e.timestamp_s) || (i > 0 && !(e.timestamp_s > entries_[i - 1].timestamp_s))) {
            throw DataError(where + ": timestamps must be strictly increasing");
        }
        require_unit_norm(e.vector, where);
    }
}

void QueryEmbedding::validate() const {
    if (vector.empty()) {
        throw DataError("query embedding " + std::to_string(qid) + " is empty");
    }
    require_unit_norm(vector, "query embedding " + std::to_string(qid));
}

void SegmentCaption::validate() const {
    if (caption_embedding.empty()) {
        throw DataError("caption embedding for '" + vid + "' is empty");
    }
    require_unit_norm(caption_embedding, "caption embedding for '" + vid + "'");
}

double cosine(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        std::ostringstream msg;
        msg << "embedding dimension mismatch: " << a.size() << " vs " << b.size();
        throw DataError(msg.str());
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += double{a[i]} * double{b[i]};
        na += double{a[i]} * double{a[i]};
        nb += double{b[i]} * double{b[i]};
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

std::vector<std::span<const float>> frames_in_segment(const EmbeddingTrack& track, const TimeInterval& seg) {
    const auto& entries = track.entries();
    if (entries.empty()) {
        throw DataError("embedding track '" + track.vid() + "' has no entries");
    }
    const auto by_time = [](const EmbeddingEntry& e, double t) { return e.timestamp_s < t; };
    const auto first = std::lower_bound(entries.begin(), entries.end(), seg.start(), by_time);
    const auto last = std::lower_bound(first, entries.end(), seg.end(), by_time);

    std::vector<std::span<const float>> frames;
    for (auto it = first; it != last; ++it) {
        frames.emplace_back(it->vector);
    }
    if (!frames.empty()) {
        return frames;
    }

    const double mid = 0.5 * (seg.start() + seg.end());
    const EmbeddingEntry* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : entries) {
        const double d = std::abs(e.timestamp_s - mid);
        if (d < best) {
            best = d;
            nearest = &e;
        }
    }
    frames.emplace_back(nearest->vector);
    return frames;
}

double score_segment_by_frames(std::span<const std::span<const float>> frames, const QueryEmbedding& query,
                               Aggregation agg) {
    if (frames.empty()) {
        throw UsageError("cannot score a segment with no frames");
    }
    double best = -1.0;
    switch (agg) {
    case Aggregation::Max:
        for (const auto& f : frames) {
            best = std::max(best, cosine(f, query.vector));
        }
        break;
    }
    return std::clamp(best, 0.0, 1.0);
}

double score_segment_by_caption(const SegmentCaption& cap, const QueryEmbedding& query) {
    if (query.encoder_tag != kSentenceEncoder) {
        throw DataError("query " + std::to_string(query.qid) + " was embedded with '" + query.encoder_tag +
                        "', captions need the '" + kSentenceEncoder + "' encoder");
    }
    return std::clamp(cosine(cap.caption_embedding, query.vector), 0.0, 1.0);
}

void normalize_scores(std::vector<double>& scores) {
    if (scores.empty()) {
        return;
    }
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const double min = *lo;
    const double range = *hi - min;
    if (!(range > 0.0)) {
        return;
    }
    for (double& s : scores) {
        s = std::clamp((s - min) / range, 0.0, 1.0);
    }
}

namespace {

std::vector<ScoredMoment> finish(std::span<const TimeInterval> segments, std::vector<double> raw,
                                 Normalization normalize) {
    if (normalize == Normalization::PerVideo) {
        normalize_scores(raw);
    }
    std::vector<ScoredMoment> out;
    out.reserve(segments.size());
    for (std::size_t i = 0; i < segments.size(); ++i) {
        out.emplace_back(segments[i], raw[i]);
    }
    return out;
}

}  // namespace

std::vector<ScoredMoment> score_proposals(std::span<const TimeInterval> segments, const EmbeddingTrack& track,
                                          const QueryEmbedding& query, Normalization normalize) {
    if (segments.empty()) {
        throw UsageError("no proposals to score");
    }
    if (query.encoder_tag != kJointEncoder) {
        throw DataError("query " + std::to_string(query.qid) + " was embedded with '" + query.encoder_tag +
                        "', frame matching needs the '" + kJointEncoder + "' encoder");
    }
    std::vector<double> raw;
    raw.reserve(segments.size());
    for (const auto& seg : segments) {
        const auto frames = frames_in_segment(track, seg);
        raw.push_back(score_segment_by_frames(frames, query));
    }
    return finish(segments, std::move(raw), normalize);
}

std::vector<ScoredMoment> score_proposals(std::span<const TimeInterval> segments,
                                          std::span<const SegmentCaption> captions, const QueryEmbedding& query,
                                          Normalization normalize) {
    if (segments.empty()) {
        throw UsageError("no proposals to score");
    }
    std::vector<double> raw;
    raw.reserve(segments.size());
    for (const auto& seg : segments) {
        const auto it = std::find_if(captions.begin(), captions.end(), [&](const SegmentCaption& c) {
            return std::abs(c.interval.start() - seg.start()) <= kCaptionMatchTolerance &&
                   std::abs(c.interval.end() - seg.end()) <= kCaptionMatchTolerance;
        });
        if (it == captions.end()) {
            std::ostringstream msg;
            msg << "no caption covers segment [" << seg.start() << ", " << seg.end() << "]";
            throw DataError(msg.str());
        }
        raw.push_back(score_segment_by_caption(*it, query));
    }
    return finish(segments, std::move(raw), normalize);
}

}  // namespace vmr
