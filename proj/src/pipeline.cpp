#include "vmr/pipeline.hpp"

#include "vmr/error.hpp"
#include "vmr/oracle.hpp"
#include "vmr/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace vmr {

double PipelineConfig::effective_lambda() const {
    if (lambda) {
        return *lambda;
    }
    return gamma ? kDefaultWatershedLambda : kDefaultLambda;
}

Normalization PipelineConfig::effective_normalization() const {
    if (normalize) {
        return *normalize;
    }
    return gamma ? Normalization::PerVideo : Normalization::None;
}

void PipelineConfig::validate() const {
    if (!(effective_lambda() > 0.0)) {
        throw UsageError("lambda must be positive");
    }
    if (gamma && !(*gamma >= 0.0 && *gamma <= 1.0)) {
        throw UsageError("gamma must lie in [0, 1]");
    }
    if (!(min_len_s >= 0.0)) {
        throw UsageError("min_len_s must be non-negative");
    }
    if (max_preds < 1) {
        throw UsageError("max_preds must be at least 1");
    }
    if (!(window_s > 0.0) || !(stride_s > 0.0)) {
        throw UsageError("window and stride must be positive");
    }
    if (gamma && proposal_method == ProposalMethod::SlidingWindow) {
        throw UsageError("watershed needs adjacent proposals; sliding windows overlap");
    }
}

FeatureStore::FeatureStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path FeatureStore::frames_path(const std::string& vid) const {
    return root_ / "frames" / (vid + ".vmrf");
}

std::filesystem::path FeatureStore::embeddings_path(const std::string& vid) const {
    return root_ / "embeddings" / (vid + ".vmre");
}

std::filesystem::path FeatureStore::query_embeddings_path() const { return root_ / "query_embeddings.jsonl"; }

std::filesystem::path FeatureStore::captions_path() const { return root_ / "captions.jsonl"; }

bool FeatureStore::has_frames(const std::string& vid) const { return std::filesystem::exists(frames_path(vid)); }

bool FeatureStore::has_embeddings(const std::string& vid) const {
    return std::filesystem::exists(embeddings_path(vid));
}

const FeatureStore::ShotSignal& FeatureStore::shot_signal(const std::string& vid) {
    auto it = signals_.find(vid);
    if (it == signals_.end()) {
        const FrameTrack track = load_frame_track(frames_path(vid));
        it = signals_.emplace(vid, ShotSignal{track.fps(), track.frame_count(), content_values(track)}).first;
    }
    return it->second;
}

const EmbeddingTrack& FeatureStore::embeddings(const std::string& vid) {
    auto it = embeddings_.find(vid);
    if (it == embeddings_.end()) {
        it = embeddings_.emplace(vid, load_embedding_track(embeddings_path(vid))).first;
    }
    return it->second;
}

void FeatureStore::load_query_embeddings_once() {
    if (queries_) {
        return;
    }
    const auto path = query_embeddings_path();
    queries_ = std::filesystem::exists(path) ? load_query_embeddings(path) : QueryEmbeddingTable{};
}

const QueryEmbedding* FeatureStore::query_embedding(std::int64_t qid, const std::string& encoder) {
    load_query_embeddings_once();
    const auto it = queries_->find({qid, encoder});
    return it == queries_->end() ? nullptr : &it->second;
}

bool FeatureStore::has_any_query_embedding(std::int64_t qid) {
    load_query_embeddings_once();
    const auto it = queries_->lower_bound({qid, std::string{}});
    return it != queries_->end() && it->first.first == qid;
}

void FeatureStore::load_captions_once() {
    if (captions_) {
        return;
    }
    captions_.emplace();
    const auto path = captions_path();
    if (!std::filesystem::exists(path)) {
        return;
    }
    for (auto& c : load_captions(path)) {
        (*captions_)[c.vid].push_back(std::move(c));
    }
}

const std::vector<SegmentCaption>& FeatureStore::captions(const std::string& vid) {
    static const std::vector<SegmentCaption> none;
    load_captions_once();
    const auto it = captions_->find(vid);
    return it == captions_->end() ? none : it->second;
}

bool FeatureStore::has_captions(const std::string& vid) { return !captions(vid).empty(); }

namespace {

// Shots end at frame_count / fps, which can differ from the dataset duration by
// up to a frame. Clip to the dataset duration and stretch the last shot so the
// partition covers exactly [0, duration].
std::vector<TimeInterval> fit_partition(const std::vector<TimeInterval>& shots, double duration_s) {
    std::vector<TimeInterval> out;
    out.reserve(shots.size());
    for (const auto& s : shots) {
        if (s.start() >= duration_s) {
            break;
        }
        out.push_back(clamp_to_video(s, duration_s));
    }
    if (out.back().end() < duration_s) {
        out.back() = TimeInterval(out.back().start(), duration_s);
    }
    return out;
}

// Empty when the query can run, otherwise the reason it is skipped.
std::string missing_features(const PipelineConfig& config, const QueryRecord& q, FeatureStore& store,
                             bool needs_matcher) {
    if (config.proposal_method == ProposalMethod::ShotDetect && !store.has_frames(q.vid)) {
        return "no frame track for video '" + q.vid + "'";
    }
    if (!needs_matcher) {
        return {};
    }
    if (config.matcher == Matcher::Frames && !store.has_embeddings(q.vid)) {
        return "no embedding track for video '" + q.vid + "'";
    }
    if (config.matcher == Matcher::Captions && !store.has_captions(q.vid)) {
        return "no captions for video '" + q.vid + "'";
    }
    if (!store.has_any_query_embedding(q.qid)) {
        return "no query embedding for qid " + std::to_string(q.qid);
    }
    return {};
}

const QueryEmbedding& require_query_embedding(const PipelineConfig& config, const QueryRecord& q,
                                              FeatureStore& store) {
    const std::string encoder = config.matcher == Matcher::Frames ? kJointEncoder : kSentenceEncoder;
    const auto* emb = store.query_embedding(q.qid, encoder);
    if (emb == nullptr) {
        throw DataError("query " + std::to_string(q.qid) + " has no '" + encoder + "' embedding required by the " +
                        (config.matcher == Matcher::Frames ? "frames" : "captions") + " matcher");
    }
    return *emb;
}

template <typename ScoreFn>
PipelineResult run_each(const PipelineConfig& config, const std::vector<QueryRecord>& dataset, FeatureStore& store,
                        const WarningSink& warn, bool needs_matcher, ScoreFn&& score) {
    config.validate();
    PipelineResult result;
    std::set<std::int64_t> seen;
    for (const auto& q : dataset) {
        if (!seen.insert(q.qid).second) {
            throw DataError("duplicate qid " + std::to_string(q.qid) + " in dataset");
        }
        std::string reason = missing_features(config, q, store, needs_matcher);
        if (reason.empty() && config.proposal_method == ProposalMethod::ShotDetect) {
            const auto& sig = store.shot_signal(q.vid);
            if (std::abs(sig.duration_s() - q.duration_s) > 1.0 / sig.fps + 1e-9) {
                std::ostringstream msg;
                msg << "frame track of '" << q.vid << "' lasts " << sig.duration_s() << " s, dataset says "
                    << q.duration_s << " s";
                reason = msg.str();
            }
        }
        if (!reason.empty()) {
            if (warn) {
                warn("skipping qid " + std::to_string(q.qid) + ": " + reason);
            }
            result.skipped.push_back({q.qid, q.vid, std::move(reason)});
            continue;
        }
        auto moments = score(q, propose(config, q, store));
        result.total_moments += moments.size();
        rank_moments(moments);
        if (moments.size() > config.max_preds) {
            moments.erase(moments.begin() + static_cast<std::ptrdiff_t>(config.max_preds), moments.end());
        }
        result.predictions.push_back({q.qid, q.vid, std::move(moments)});
    }
    return result;
}

}  // namespace

std::vector<TimeInterval> propose(const PipelineConfig& config, const QueryRecord& query, FeatureStore& store) {
    switch (config.proposal_method) {
    case ProposalMethod::SlidingWindow:
        return sliding_windows(query.duration_s, config.window_s, config.stride_s);
    case ProposalMethod::ShotDetect: {
        const auto& sig = store.shot_signal(query.vid);
        const auto shots =
            detect_shots(sig.signal, sig.fps, sig.frame_count, config.effective_lambda(), config.min_len_s);
        return fit_partition(shots, query.duration_s);
    }
    }
    throw UsageError("unknown proposal method");
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<QueryRecord>& dataset,
                            FeatureStore& store, const WarningSink& warn) {
    return run_each(config, dataset, store, warn, true, [&](const QueryRecord& q, std::vector<TimeInterval> segs) {
        const auto& query = require_query_embedding(config, q, store);
        auto scored = config.matcher == Matcher::Frames
                          ? score_proposals(segs, store.embeddings(q.vid), query, config.effective_normalization())
                          : score_proposals(segs, store.captions(q.vid), query, config.effective_normalization());
        if (config.gamma) {
            scored = simple_watershed(scored, *config.gamma);
        }
        return scored;
    });
}

PipelineResult run_oracle(OracleMode mode, const PipelineConfig& config, const std::vector<QueryRecord>& dataset,
                          FeatureStore& store, const WarningSink& warn) {
    if (mode == OracleMode::Merge && config.proposal_method != ProposalMethod::ShotDetect) {
        throw UsageError("oracle merging needs adjacent shot proposals");
    }
    PipelineConfig plain = config;
    plain.lambda = config.effective_lambda();
    plain.gamma.reset();
    return run_each(plain, dataset, store, warn, false, [&](const QueryRecord& q, std::vector<TimeInterval> segs) {
        return mode == OracleMode::Merge ? oracle_merge(segs, q) : oracle_scores(segs, q);
    });
}

std::vector<QueryRecord> evaluated_subset(const std::vector<QueryRecord>& dataset, const PipelineResult& result) {
    std::set<std::int64_t> skipped;
    for (const auto& s : result.skipped) {
        skipped.insert(s.qid);
    }
    std::vector<QueryRecord> out;
    std::copy_if(dataset.begin(), dataset.end(), std::back_inserter(out),
                 [&](const QueryRecord& q) { return !skipped.contains(q.qid); });
    return out;
}

}  // namespace vmr
