#include "vmr/io.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vmr {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void magic(const char (&tag)[5]) { out_.insert(out_.end(), tag, tag + 4); }

    template <typename T>
    void le(T value) {
        using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>;
        static_assert(sizeof(T) == sizeof(U));
        const auto bits = std::bit_cast<U>(value);
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            out_.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFFu));
        }
    }

private:
    std::vector<std::uint8_t>& out_;
};

class ByteReader {
public:
    ByteReader(const std::vector<std::uint8_t>& bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

    void expect_magic(const char (&tag)[5]) {
        require(4);
        if (std::memcmp(bytes_.data(), tag, 4) != 0) {
            throw FormatError(FormatError::Kind::BadMagic, what_ + ": bad magic, expected '" + tag + "'");
        }
        pos_ = 4;
    }

    template <typename T>
    T le() {
        using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>;
        require(pos_ + sizeof(U));
        U bits = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            bits |= static_cast<U>(U{bytes_[pos_ + i]} << (8 * i));
        }
        pos_ += sizeof(U);
        return std::bit_cast<T>(bits);
    }

    void require_total(std::size_t expected) const {
        if (bytes_.size() < expected) {
            std::ostringstream msg;
            msg << what_ << ": truncated, expected " << expected << " bytes, got " << bytes_.size();
            throw FormatError(FormatError::Kind::Truncated, msg.str());
        }
        if (bytes_.size() > expected) {
            std::ostringstream msg;
            msg << what_ << ": " << bytes_.size() - expected << " trailing bytes after " << expected
                << "-byte payload";
            throw FormatError(FormatError::Kind::TrailingData, msg.str());
        }
    }

private:
    void require(std::size_t end) const {
        if (bytes_.size() < end) {
            std::ostringstream msg;
            msg << what_ << ": truncated header, expected at least " << end << " bytes, got " << bytes_.size();
            throw FormatError(FormatError::Kind::Truncated, msg.str());
        }
    }

    const std::vector<std::uint8_t>& bytes_;
    std::string what_;
    std::size_t pos_ = 0;
};

void write_bytes(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw DataError("failed writing '" + path.string() + "'");
    }
}

std::ifstream open_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    return in;
}

std::ofstream create_text(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

// Reads JSONL, calling fn(object, line_number) for every non-blank line and
// prefixing any error with the source and line.
template <typename Fn>
void for_each_json_line(std::istream& in, const std::string& source, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(where + ": invalid JSON (" + e.what() + ")");
        }
        if (!obj.is_object()) {
            throw DataError(where + ": expected a JSON object");
        }
        try {
            fn(obj, where);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        } catch (const json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
    }
}

const json& field(const json& obj, const char* name) {
    const auto it = obj.find(name);
    if (it == obj.end()) {
        throw DataError(std::string("missing field '") + name + "'");
    }
    return *it;
}

std::int64_t int_field(const json& obj, const char* name) {
    const auto& v = field(obj, name);
    if (!v.is_number_integer()) {
        throw DataError(std::string("field '") + name + "' must be an integer");
    }
    return v.get<std::int64_t>();
}

double number_field(const json& obj, const char* name) {
    const auto& v = field(obj, name);
    if (!v.is_number()) {
        throw DataError(std::string("field '") + name + "' must be a number");
    }
    return v.get<double>();
}

std::string string_field(const json& obj, const char* name) {
    const auto& v = field(obj, name);
    if (!v.is_string()) {
        throw DataError(std::string("field '") + name + "' must be a string");
    }
    return v.get<std::string>();
}

std::vector<float> vector_field(const json& obj, const char* name) {
    const auto& v = field(obj, name);
    if (!v.is_array()) {
        throw DataError(std::string("field '") + name + "' must be an array of numbers");
    }
    std::vector<float> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) {
            throw DataError(std::string("field '") + name + "' must be an array of numbers");
        }
        out.push_back(x.get<float>());
    }
    return out;
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// ---- dataset ----

std::vector<QueryRecord> parse_dataset(std::istream& in, const std::string& source) {
    std::vector<QueryRecord> records;
    for_each_json_line(in, source, [&](const json& obj, const std::string&) {
        QueryRecord rec;
        rec.qid = int_field(obj, "qid");
        rec.query_text = string_field(obj, "query");
        rec.vid = string_field(obj, "vid");
        rec.duration_s = number_field(obj, "duration");
        if (!(rec.duration_s > 0.0)) {
            throw DataError("field 'duration' must be positive");
        }
        const auto& windows = field(obj, "relevant_windows");
        if (!windows.is_array()) {
            throw DataError("field 'relevant_windows' must be a list of [start, end] pairs");
        }
        for (std::size_t i = 0; i < windows.size(); ++i) {
            const auto& w = windows[i];
            if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
                throw DataError("field 'relevant_windows'[" + std::to_string(i) + "] must be [start, end]");
            }
            try {
                rec.gt_windows.emplace_back(w[0].get<double>(), w[1].get<double>());
            } catch (const DataError& e) {
                throw DataError("field 'relevant_windows'[" + std::to_string(i) + "]: " + e.what());
            }
        }
        try {
            rec.validate(kWindowSlack);
        } catch (const DataError& e) {
            throw DataError(std::string("field 'relevant_windows': ") + e.what());
        }
        records.push_back(std::move(rec));
    });
    return records;
}

std::vector<QueryRecord> load_dataset(const std::filesystem::path& path) {
    auto in = open_text(path);
    return parse_dataset(in, path.string());
}

void write_dataset(const std::vector<QueryRecord>& records, const std::filesystem::path& path) {
    auto out = create_text(path);
    for (const auto& r : records) {
        ordered_json obj;
        obj["qid"] = r.qid;
        obj["query"] = r.query_text;
        obj["vid"] = r.vid;
        obj["duration"] = r.duration_s;
        auto windows = ordered_json::array();
        for (const auto& w : r.gt_windows) {
            windows.push_back({w.start(), w.end()});
        }
        obj["relevant_windows"] = std::move(windows);
        out << obj.dump() << '\n';
    }
}

// ---- frame tracks ----

std::vector<std::uint8_t> encode_frame_track(const FrameTrack& track) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(kFrameHeaderSize + track.pixels().size());
    ByteWriter w(bytes);
    w.magic("VMRF");
    w.le<std::uint16_t>(kFeatureFormatVersion);
    w.le<std::uint16_t>(track.width());
    w.le<std::uint16_t>(track.height());
    w.le<float>(static_cast<float>(track.fps()));
    w.le<std::uint32_t>(static_cast<std::uint32_t>(track.frame_count()));
    bytes.insert(bytes.end(), track.pixels().begin(), track.pixels().end());
    return bytes;
}

FrameTrack parse_frame_track(std::string vid, const std::vector<std::uint8_t>& bytes) {
    ByteReader r(bytes, "frame track '" + vid + "'");
    r.expect_magic("VMRF");
    const auto version = r.le<std::uint16_t>();
    if (version != kFeatureFormatVersion) {
        throw FormatError(FormatError::Kind::BadVersion,
                          "frame track '" + vid + "': unsupported version " + std::to_string(version));
    }
    const auto width = r.le<std::uint16_t>();
    const auto height = r.le<std::uint16_t>();
    const auto fps = r.le<float>();
    const auto count = r.le<std::uint32_t>();
    if (width == 0 || height == 0 || !(fps > 0.0f) || !std::isfinite(fps) || count < 2) {
        throw FormatError(FormatError::Kind::InvalidHeader,
                          "frame track '" + vid + "': invalid header (need nonzero size, fps > 0, >= 2 frames)");
    }
    const std::size_t payload = std::size_t{count} * 3 * width * height;
    r.require_total(kFrameHeaderSize + payload);
    std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(kFrameHeaderSize), bytes.end());
    return FrameTrack(std::move(vid), fps, width, height, std::move(pixels));
}

FrameTrack load_frame_track(const std::filesystem::path& path) {
    return parse_frame_track(path.stem().string(), read_file_bytes(path));
}

void write_frame_track(const FrameTrack& track, const std::filesystem::path& path) {
    write_bytes(encode_frame_track(track), path);
}

// ---- embedding tracks ----

std::vector<std::uint8_t> encode_embedding_track(const EmbeddingTrack& track) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(kEmbeddingHeaderSize + track.entries().size() * 4 * (track.dim() + 1));
    ByteWriter w(bytes);
    w.magic("VMRE");
    w.le<std::uint16_t>(kFeatureFormatVersion);
    w.le<std::uint16_t>(static_cast<std::uint16_t>(track.dim()));
    w.le<std::uint32_t>(static_cast<std::uint32_t>(track.entries().size()));
    for (const auto& e : track.entries()) {
        w.le<float>(static_cast<float>(e.timestamp_s));
        for (float x : e.vector) {
            w.le<float>(x);
        }
    }
    return bytes;
}

EmbeddingTrack parse_embedding_track(std::string vid, const std::vector<std::uint8_t>& bytes) {
    const std::string what = "embedding track '" + vid + "'";
    ByteReader r(bytes, what);
    r.expect_magic("VMRE");
    const auto version = r.le<std::uint16_t>();
    if (version != kFeatureFormatVersion) {
        throw FormatError(FormatError::Kind::BadVersion, what + ": unsupported version " + std::to_string(version));
    }
    const auto dim = r.le<std::uint16_t>();
    const auto count = r.le<std::uint32_t>();
    if (dim == 0) {
        throw FormatError(FormatError::Kind::InvalidHeader, what + ": zero dimension");
    }
    r.require_total(kEmbeddingHeaderSize + std::size_t{count} * 4 * (std::size_t{dim} + 1));

    std::vector<EmbeddingEntry> entries;
    entries.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        EmbeddingEntry e;
        e.timestamp_s = r.le<float>();
        e.vector.resize(dim);
        for (auto& x : e.vector) {
            x = r.le<float>();
        }
        if (i > 0 && !(e.timestamp_s > entries.back().timestamp_s)) {
            throw FormatError(FormatError::Kind::NonMonotonic,
                              what + ": timestamp of entry " + std::to_string(i) + " does not increase");
        }
        try {
            require_unit_norm(e.vector, what + " entry " + std::to_string(i));
        } catch (const DataError& err) {
            throw FormatError(FormatError::Kind::NonUnitVector, err.what());
        }
        entries.push_back(std::move(e));
    }
    return EmbeddingTrack(std::move(vid), dim, std::move(entries));
}

EmbeddingTrack load_embedding_track(const std::filesystem::path& path) {
    return parse_embedding_track(path.stem().string(), read_file_bytes(path));
}

void write_embedding_track(const EmbeddingTrack& track, const std::filesystem::path& path) {
    write_bytes(encode_embedding_track(track), path);
}

// ---- query embeddings and captions ----

QueryEmbeddingTable load_query_embeddings(const std::filesystem::path& path) {
    auto in = open_text(path);
    QueryEmbeddingTable table;
    for_each_json_line(in, path.string(), [&](const json& obj, const std::string&) {
        QueryEmbedding q{int_field(obj, "qid"), vector_field(obj, "vector"), string_field(obj, "encoder")};
        q.validate();
        auto key = std::make_pair(q.qid, q.encoder_tag);
        if (!table.emplace(std::move(key), std::move(q)).second) {
            throw DataError("duplicate embedding for this qid and encoder");
        }
    });
    return table;
}

void write_query_embeddings(const std::vector<QueryEmbedding>& embeddings, const std::filesystem::path& path) {
    auto out = create_text(path);
    for (const auto& q : embeddings) {
        ordered_json obj;
        obj["qid"] = q.qid;
        obj["encoder"] = q.encoder_tag;
        obj["vector"] = q.vector;
        out << obj.dump() << '\n';
    }
}

std::vector<SegmentCaption> load_captions(const std::filesystem::path& path) {
    auto in = open_text(path);
    std::vector<SegmentCaption> captions;
    for_each_json_line(in, path.string(), [&](const json& obj, const std::string&) {
        SegmentCaption c{string_field(obj, "vid"), TimeInterval(number_field(obj, "start"), number_field(obj, "end")),
                         string_field(obj, "caption"), vector_field(obj, "vector")};
        c.validate();
        captions.push_back(std::move(c));
    });
    return captions;
}

void write_captions(const std::vector<SegmentCaption>& captions, const std::filesystem::path& path) {
    auto out = create_text(path);
    for (const auto& c : captions) {
        ordered_json obj;
        obj["vid"] = c.vid;
        obj["start"] = c.interval.start();
        obj["end"] = c.interval.end();
        obj["caption"] = c.caption_text;
        obj["vector"] = c.caption_embedding;
        out << obj.dump() << '\n';
    }
}

// ---- predictions ----

void write_predictions(const std::vector<PredictionRecord>& preds, std::ostream& out) {
    for (const auto& p : preds) {
        ordered_json obj;
        obj["qid"] = p.qid;
        obj["vid"] = p.vid;
        auto windows = ordered_json::array();
        for (const auto& m : p.moments) {
            windows.push_back({m.interval().start(), m.interval().end(), m.score()});
        }
        obj["pred_relevant_windows"] = std::move(windows);
        out << obj.dump() << '\n';
    }
}

void write_predictions(const std::vector<PredictionRecord>& preds, const std::filesystem::path& path) {
    auto out = create_text(path);
    write_predictions(preds, out);
    if (!out) {
        throw DataError("failed writing '" + path.string() + "'");
    }
}

std::vector<PredictionRecord> parse_predictions(std::istream& in, const std::string& source) {
    std::vector<PredictionRecord> preds;
    for_each_json_line(in, source, [&](const json& obj, const std::string&) {
        PredictionRecord rec;
        rec.qid = int_field(obj, "qid");
        if (obj.contains("vid")) {
            rec.vid = string_field(obj, "vid");
        }
        const auto& windows = field(obj, "pred_relevant_windows");
        if (!windows.is_array()) {
            throw DataError("field 'pred_relevant_windows' must be a list of [start, end, score]");
        }
        for (std::size_t i = 0; i < windows.size(); ++i) {
            const auto& w = windows[i];
            if (!w.is_array() || w.size() != 3 || !w[0].is_number() || !w[1].is_number() || !w[2].is_number()) {
                throw DataError("field 'pred_relevant_windows'[" + std::to_string(i) + "] must be [start, end, score]");
            }
            rec.moments.emplace_back(TimeInterval(w[0].get<double>(), w[1].get<double>()), w[2].get<double>());
        }
        rank_moments(rec.moments);
        preds.push_back(std::move(rec));
    });
    return preds;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
    auto in = open_text(path);
    return parse_predictions(in, path.string());
}

}  // namespace vmr
