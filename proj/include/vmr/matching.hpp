#pragma once

#include "vmr/core.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vmr {

inline constexpr double kUnitNormTolerance = 1e-4;

/// Encoder families. Vectors are only comparable within one family.
inline constexpr const char* kJointEncoder = "joint";
inline constexpr const char* kSentenceEncoder = "sentence";

struct EmbeddingEntry {
    double timestamp_s = 0.0;
    std::vector<float> vector;

    friend bool operator==(const EmbeddingEntry&, const EmbeddingEntry&) = default;
};

/// Timestamped unit-norm image embeddings sampled from one video.
class EmbeddingTrack {
public:
    EmbeddingTrack(std::string vid, std::size_t dim, std::vector<EmbeddingEntry> entries);

    const std::string& vid() const noexcept { return vid_; }
    std::size_t dim() const noexcept { return dim_; }
    const std::vector<EmbeddingEntry>& entries() const noexcept { return entries_; }

    friend bool operator==(const EmbeddingTrack&, const EmbeddingTrack&) = default;

private:
    std::string vid_;
    std::size_t dim_;
    std::vector<EmbeddingEntry> entries_;
};

struct QueryEmbedding {
    std::int64_t qid = 0;
    std::vector<float> vector;
    std::string encoder_tag;

    void validate() const;
};

struct SegmentCaption {
    std::string vid;
    TimeInterval interval;
    std::string caption_text;
    std::vector<float> caption_embedding;

    void validate() const;
};

enum class Aggregation { Max };
enum class Normalization { None, PerVideo };

/// Throws DataError unless |v| is 1 within kUnitNormTolerance.
void require_unit_norm(std::span<const float> v, const std::string& what);

/// Cosine similarity in [-1, 1].
double cosine(std::span<const float> a, std::span<const float> b);

/// The sampled frames that fall in [seg.start, seg.end). A segment containing
/// no sample gets the single entry nearest its midpoint (earlier on ties).
std::vector<std::span<const float>> frames_in_segment(const EmbeddingTrack& track, const TimeInterval& seg);

/// Aggregated frame/query cosine, clamped to [0, 1].
double score_segment_by_frames(std::span<const std::span<const float>> frames, const QueryEmbedding& query,
                               Aggregation agg = Aggregation::Max);

/// Caption/query cosine, clamped to [0, 1]. The query must come from the sentence encoder.
double score_segment_by_caption(const SegmentCaption& cap, const QueryEmbedding& query);

/// Min-max rescale to [0, 1]. Identity when every score is equal.
void normalize_scores(std::vector<double>& scores);

/// One ScoredMoment per segment, in segment order.
std::vector<ScoredMoment> score_proposals(std::span<const TimeInterval> segments, const EmbeddingTrack& track,
                                          const QueryEmbedding& query, Normalization normalize);

/// Caption path. Each segment must have a caption with the same interval
/// (within kCaptionMatchTolerance seconds).
inline constexpr double kCaptionMatchTolerance = 1e-3;
std::vector<ScoredMoment> score_proposals(std::span<const TimeInterval> segments,
                                          std::span<const SegmentCaption> captions, const QueryEmbedding& query,
                                          Normalization normalize);

}  // namespace vmr
