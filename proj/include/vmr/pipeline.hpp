#pragma once

#include "vmr/core.hpp"
#include "vmr/io.hpp"
#include "vmr/matching.hpp"
#include "vmr/metrics.hpp"
#include "vmr/proposals.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vmr {

enum class ProposalMethod { ShotDetect, SlidingWindow };
enum class Matcher { Frames, Captions };

inline constexpr double kDefaultLambda = 53.0;
inline constexpr double kDefaultWatershedLambda = 32.0;
inline constexpr double kDefaultGamma = 0.7;

struct PipelineConfig {
    ProposalMethod proposal_method = ProposalMethod::ShotDetect;
    Matcher matcher = Matcher::Frames;
    /// Unset: 53 without watershed, 32 with it.
    std::optional<double> lambda;
    /// Unset: no watershed.
    std::optional<double> gamma;
    double min_len_s = kDefaultMinShotLength;
    /// Unset: per-video when watershed follows, none otherwise.
    std::optional<Normalization> normalize;
    std::size_t max_preds = 10;
    double window_s = kDefaultWindowLength;
    double stride_s = kDefaultWindowStride;

    double effective_lambda() const;
    Normalization effective_normalization() const;

    /// Throws UsageError on out-of-range values or watershed over sliding windows.
    void validate() const;
};

/// Feature files under one root:
///   frames/<vid>.vmrf, embeddings/<vid>.vmre,
///   query_embeddings.jsonl, captions.jsonl
/// Files are loaded on first use and cached. Shot signals are cached per
/// video so that threshold sweeps only rescan them.
class FeatureStore {
public:
    explicit FeatureStore(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    std::filesystem::path frames_path(const std::string& vid) const;
    std::filesystem::path embeddings_path(const std::string& vid) const;
    std::filesystem::path query_embeddings_path() const;
    std::filesystem::path captions_path() const;

    bool has_frames(const std::string& vid) const;
    bool has_embeddings(const std::string& vid) const;

    struct ShotSignal {
        double fps = 0.0;
        std::size_t frame_count = 0;
        ContentSignal signal;
        double duration_s() const { return static_cast<double>(frame_count) / fps; }
    };

    const ShotSignal& shot_signal(const std::string& vid);
    const EmbeddingTrack& embeddings(const std::string& vid);
    /// Null when the query has no embedding from `encoder`.
    const QueryEmbedding* query_embedding(std::int64_t qid, const std::string& encoder);
    bool has_any_query_embedding(std::int64_t qid);
    /// Captions of one video; empty when the video has none.
    const std::vector<SegmentCaption>& captions(const std::string& vid);
    bool has_captions(const std::string& vid);

private:
    void load_query_embeddings_once();
    void load_captions_once();

    std::filesystem::path root_;
    std::map<std::string, ShotSignal> signals_;
    std::map<std::string, EmbeddingTrack> embeddings_;
    std::optional<QueryEmbeddingTable> queries_;
    std::optional<std::map<std::string, std::vector<SegmentCaption>>> captions_;
};

struct SkippedQuery {
    std::int64_t qid = 0;
    std::string vid;
    std::string reason;
};

struct PipelineResult {
    std::vector<PredictionRecord> predictions;
    std::vector<SkippedQuery> skipped;
    /// Moments across all queries after scoring (and watershed), before truncation.
    std::size_t total_moments = 0;
};

using WarningSink = std::function<void(const std::string&)>;

/// Proposals for one query, fitted to the dataset duration.
std::vector<TimeInterval> propose(const PipelineConfig& config, const QueryRecord& query, FeatureStore& store);

/// Propose, score, optionally watershed, rank and truncate every query.
/// Queries whose features are missing are skipped with a warning.
PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<QueryRecord>& dataset,
                            FeatureStore& store, const WarningSink& warn = {});

enum class OracleMode { Scores, Merge };

/// Oracle predictions over the configured proposals: IoU scores, optionally
/// followed by oracle-guided merging.
PipelineResult run_oracle(OracleMode mode, const PipelineConfig& config, const std::vector<QueryRecord>& dataset,
                          FeatureStore& store, const WarningSink& warn = {});

/// The queries of `dataset` that were not skipped.
std::vector<QueryRecord> evaluated_subset(const std::vector<QueryRecord>& dataset, const PipelineResult& result);

}  // namespace vmr
