#pragma once

#include "vmr/core.hpp"
#include "vmr/error.hpp"
#include "vmr/matching.hpp"
#include "vmr/metrics.hpp"
#include "vmr/proposals.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace vmr {

// Frame track (VMRF), little-endian:
//   "VMRF" | u16 version=1 | u16 width | u16 height | f32 fps | u32 frame_count
//   | frame_count * (H plane, S plane, V plane), each width*height bytes, row-major
//
// Embedding track (VMRE), little-endian:
//   "VMRE" | u16 version=1 | u16 dim | u32 count
//   | count * (f32 timestamp_s, dim * f32 unit-norm vector)
inline constexpr std::uint16_t kFeatureFormatVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 4 + 2 + 2 + 2 + 4 + 4;
inline constexpr std::size_t kEmbeddingHeaderSize = 4 + 2 + 2 + 4;

class FormatError : public DataError {
public:
    enum class Kind { BadMagic, BadVersion, Truncated, TrailingData, InvalidHeader, NonUnitVector, NonMonotonic };

    FormatError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Allowed overshoot of a gt window past the video duration.
inline constexpr double kWindowSlack = 0.5;

std::vector<QueryRecord> load_dataset(const std::filesystem::path& path);
std::vector<QueryRecord> parse_dataset(std::istream& in, const std::string& source = "<stream>");

FrameTrack load_frame_track(const std::filesystem::path& path);
FrameTrack parse_frame_track(std::string vid, const std::vector<std::uint8_t>& bytes);
void write_frame_track(const FrameTrack& track, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_frame_track(const FrameTrack& track);

EmbeddingTrack load_embedding_track(const std::filesystem::path& path);
EmbeddingTrack parse_embedding_track(std::string vid, const std::vector<std::uint8_t>& bytes);
void write_embedding_track(const EmbeddingTrack& track, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_embedding_track(const EmbeddingTrack& track);

/// Query embeddings keyed by (qid, encoder tag).
using QueryEmbeddingTable = std::map<std::pair<std::int64_t, std::string>, QueryEmbedding>;

QueryEmbeddingTable load_query_embeddings(const std::filesystem::path& path);
void write_query_embeddings(const std::vector<QueryEmbedding>& embeddings, const std::filesystem::path& path);

std::vector<SegmentCaption> load_captions(const std::filesystem::path& path);
void write_captions(const std::vector<SegmentCaption>& captions, const std::filesystem::path& path);

/// One line per record: {"qid", "vid", "pred_relevant_windows": [[start, end, score], ...]}.
void write_predictions(const std::vector<PredictionRecord>& preds, std::ostream& out);
void write_predictions(const std::vector<PredictionRecord>& preds, const std::filesystem::path& path);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);
std::vector<PredictionRecord> parse_predictions(std::istream& in, const std::string& source = "<stream>");

void write_dataset(const std::vector<QueryRecord>& records, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace vmr
