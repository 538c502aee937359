#include "vmr/report.hpp"

#include "vmr/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace vmr {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Table order follows the length-wise analysis layout: long, medium, short.
constexpr LengthBucket kTableBuckets[] = {LengthBucket::Long, LengthBucket::Medium, LengthBucket::Short};

std::string bucket_cell(const EvalReport& r, LengthBucket b) {
    const auto& v = r.bucketed[static_cast<std::size_t>(b)];
    return v ? fixed2(*v) : std::string("-");
}

}  // namespace

std::string format_headline_row(const EvalReport& r) {
    return fixed2(r.r1_at_0_5) + " " + fixed2(r.r1_at_0_7) + " " + fixed2(r.map_at_0_5) + " " +
           fixed2(r.map_at_0_75) + " " + fixed2(r.map_avg);
}

void write_report_table(const EvalReport& r, const std::string& label, std::ostream& out) {
    char line[512];
    std::snprintf(line, sizeof line, "%-48s %8s %8s %8s %8s %8s | %8s %8s %8s\n", "method", "R1@0.5", "R1@0.7",
                  "mAP@0.5", "mAP@0.75", "mAP-avg", "long", "medium", "short");
    out << line;
    std::snprintf(line, sizeof line, "%-48s %8.2f %8.2f %8.2f %8.2f %8.2f | %8s %8s %8s\n", label.c_str(),
                  r.r1_at_0_5, r.r1_at_0_7, r.map_at_0_5, r.map_at_0_75, r.map_avg,
                  bucket_cell(r, kTableBuckets[0]).c_str(), bucket_cell(r, kTableBuckets[1]).c_str(),
                  bucket_cell(r, kTableBuckets[2]).c_str());
    out << line;
    out << "queries: " << r.num_queries << ", predictions per query capped at " << r.max_preds
        << ", buckets restrict gt windows only\n";
}

void write_report_csv(const EvalReport& r, const std::string& label, std::ostream& out) {
    out << "label,r1@0.5,r1@0.7,map@0.5,map@0.75,map_avg,map_long,map_medium,map_short,queries,max_preds\n";
    out << label << ',' << fixed2(r.r1_at_0_5) << ',' << fixed2(r.r1_at_0_7) << ',' << fixed2(r.map_at_0_5) << ','
        << fixed2(r.map_at_0_75) << ',' << fixed2(r.map_avg);
    for (LengthBucket b : kTableBuckets) {
        const auto& v = r.bucketed[static_cast<std::size_t>(b)];
        out << ',' << (v ? fixed2(*v) : std::string());
    }
    out << ',' << r.num_queries << ',' << r.max_preds << '\n';
}

std::string report_to_json(const EvalReport& r) {
    ordered_json obj;
    obj["r1_at_0_5"] = r.r1_at_0_5;
    obj["r1_at_0_7"] = r.r1_at_0_7;
    obj["map_at_0_5"] = r.map_at_0_5;
    obj["map_at_0_75"] = r.map_at_0_75;
    obj["map_avg"] = r.map_avg;
    obj["map_by_threshold"] = r.map_by_threshold;
    ordered_json buckets = ordered_json::object();
    for (LengthBucket b : kBuckets) {
        const auto i = static_cast<std::size_t>(b);
        ordered_json entry;
        entry["map_avg"] = r.bucketed[i] ? ordered_json(*r.bucketed[i]) : ordered_json(nullptr);
        entry["queries"] = r.bucket_queries[i];
        buckets[std::string(bucket_name(b))] = std::move(entry);
    }
    obj["bucketed"] = std::move(buckets);
    obj["num_queries"] = r.num_queries;
    obj["max_preds"] = r.max_preds;
    return obj.dump(2);
}

EvalReport report_from_json(const std::string& text) {
    EvalReport r;
    try {
        const auto obj = ordered_json::parse(text);
        r.r1_at_0_5 = obj.at("r1_at_0_5").get<double>();
        r.r1_at_0_7 = obj.at("r1_at_0_7").get<double>();
        r.map_at_0_5 = obj.at("map_at_0_5").get<double>();
        r.map_at_0_75 = obj.at("map_at_0_75").get<double>();
        r.map_avg = obj.at("map_avg").get<double>();
        r.map_by_threshold = obj.at("map_by_threshold").get<decltype(r.map_by_threshold)>();
        for (LengthBucket b : kBuckets) {
            const auto i = static_cast<std::size_t>(b);
            const auto& entry = obj.at("bucketed").at(std::string(bucket_name(b)));
            if (!entry.at("map_avg").is_null()) {
                r.bucketed[i] = entry.at("map_avg").get<double>();
            }
            r.bucket_queries[i] = entry.at("queries").get<std::size_t>();
        }
        r.num_queries = obj.at("num_queries").get<std::size_t>();
        r.max_preds = obj.at("max_preds").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad report JSON: ") + e.what());
    }
    return r;
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    out << report_to_json(report) << '\n';
}

EvalReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return report_from_json(ss.str());
}

}  // namespace vmr
