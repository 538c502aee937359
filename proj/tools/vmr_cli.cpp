// vmr: zero-shot video moment retrieval over precomputed features.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include "vmr/error.hpp"
#include "vmr/io.hpp"
#include "vmr/oracle.hpp"
#include "vmr/pipeline.hpp"
#include "vmr/postprocess.hpp"
#include "vmr/report.hpp"
#include "vmr/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace vmr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr const char* kFeatureRootEnv = "VMR_FEATURE_ROOT";
constexpr const char* kExtractorEnv = "VMR_EXTRACTOR";

const std::set<std::string> kConfigKeys = {"dataset", "feature-root", "proposal",  "matcher",   "lambda", "gamma",
                                           "min-len", "normalize",    "max-preds", "window", "stride"};

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

// Options shared by every verb that runs the pipeline. Values come from the
// command line first, then VMR_FEATURE_ROOT (feature root only), then the
// --config JSON file, then built-in defaults.
struct PipelineFlags {
    fs::path dataset;
    fs::path feature_root;
    fs::path config_file;
    std::string proposal = "shotdetect";
    std::string matcher = "frames";
    double lambda = 0.0;
    double gamma = 0.0;
    double min_len = kDefaultMinShotLength;
    std::string normalize;
    std::size_t max_preds = 10;
    double window = kDefaultWindowLength;
    double stride = kDefaultWindowStride;

    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App* cmd, bool with_gamma = true) {
        options["dataset"] = cmd->add_option("--dataset", dataset, "Dataset JSONL (required here or in --config)");
        options["feature-root"] = cmd->add_option("--feature-root", feature_root,
                                                  "Feature directory (env VMR_FEATURE_ROOT)");
        cmd->add_option("--config", config_file, "JSON file with defaults for these flags")
            ->check(CLI::ExistingFile);
        options["proposal"] = cmd->add_option("--proposal", proposal, "shotdetect | slidingwindow")
                                  ->check(CLI::IsMember({"shotdetect", "slidingwindow"}));
        options["matcher"] =
            cmd->add_option("--matcher", matcher, "frames | captions")->check(CLI::IsMember({"frames", "captions"}));
        options["lambda"] = cmd->add_option("--lambda", lambda, "Shot threshold (default 53, or 32 with --gamma)");
        if (with_gamma) {
            options["gamma"] = cmd->add_option("--gamma", gamma, "Watershed threshold; omit to skip watershed");
        }
        options["min-len"] = cmd->add_option("--min-len", min_len, "Minimum shot length in seconds");
        options["normalize"] = cmd->add_option("--normalize", normalize,
                                               "per_video | none (default per_video with --gamma)")
                                   ->check(CLI::IsMember({"per_video", "none"}));
        options["max-preds"] = cmd->add_option("--max-preds", max_preds, "Predictions kept per query");
        options["window"] = cmd->add_option("--window", window, "Sliding window length in seconds");
        options["stride"] = cmd->add_option("--stride", stride, "Sliding window stride in seconds");
    }

    bool given(const std::string& key) const {
        const auto it = options.find(key);
        return it != options.end() && it->second->count() > 0;
    }

    void apply_config_file() {
        if (config_file.empty()) {
            return;
        }
        std::ifstream in(config_file);
        nlohmann::json cfg;
        try {
            cfg = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("config file '" + config_file.string() + "': " + e.what());
        }
        if (!cfg.is_object()) {
            throw UsageError("config file must hold a JSON object");
        }
        for (const auto& [key, value] : cfg.items()) {
            if (!kConfigKeys.contains(key)) {
                throw UsageError("config file: unknown key '" + key + "'");
            }
            if (!options.contains(key) || given(key)) {
                continue;
            }
            try {
                const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
                options[key]->add_result(text);
                options[key]->run_callback();
            } catch (const CLI::Error& e) {
                throw UsageError("config file: key '" + key + "': " + e.what());
            }
        }
    }

    void finish() {
        apply_config_file();
        if (dataset.empty()) {
            throw UsageError("--dataset is required");
        }
    }

    fs::path resolved_feature_root() const {
        if (given("feature-root")) {
            return feature_root;
        }
        if (const char* env = std::getenv(kFeatureRootEnv); env != nullptr && *env != '\0') {
            return env;
        }
        if (!feature_root.empty()) {
            return feature_root;
        }
        throw UsageError("no feature root: pass --feature-root or set VMR_FEATURE_ROOT");
    }

    bool was_set(const std::string& key) const {
        const auto it = options.find(key);
        return it != options.end() && !it->second->empty();
    }

    PipelineConfig config() const {
        PipelineConfig cfg;
        cfg.proposal_method = proposal == "slidingwindow" ? ProposalMethod::SlidingWindow : ProposalMethod::ShotDetect;
        cfg.matcher = matcher == "captions" ? Matcher::Captions : Matcher::Frames;
        if (was_set("lambda")) {
            cfg.lambda = lambda;
        }
        if (was_set("gamma")) {
            cfg.gamma = gamma;
        }
        cfg.min_len_s = min_len;
        if (!normalize.empty()) {
            cfg.normalize = normalize == "per_video" ? Normalization::PerVideo : Normalization::None;
        }
        cfg.max_preds = max_preds;
        cfg.window_s = window;
        cfg.stride_s = stride;
        cfg.validate();
        return cfg;
    }
};

void emit_predictions(const std::vector<PredictionRecord>& preds, const fs::path& out) {
    if (out.empty()) {
        write_predictions(preds, std::cout);
    } else {
        write_predictions(preds, out);
    }
}

void emit_report(const EvalReport& report, const std::string& label, const fs::path& json_out,
                 const fs::path& csv_out) {
    write_report_table(report, label, std::cout);
    if (!json_out.empty()) {
        save_report(report, json_out);
    }
    if (!csv_out.empty()) {
        std::ofstream csv(csv_out, std::ios::trunc);
        if (!csv) {
            throw DataError("cannot open '" + csv_out.string() + "' for writing");
        }
        write_report_csv(report, label, csv);
    }
}

std::string describe(const PipelineConfig& cfg) {
    std::ostringstream s;
    s << (cfg.proposal_method == ProposalMethod::ShotDetect ? "ShotDetect" : "SlidingWindow") << '+'
      << (cfg.matcher == Matcher::Frames ? "Frames" : "Captions");
    if (cfg.proposal_method == ProposalMethod::ShotDetect) {
        s << " lambda=" << cfg.effective_lambda();
    }
    if (cfg.gamma) {
        s << " +Watershed gamma=" << *cfg.gamma;
    }
    return s.str();
}

// Watershed over an existing prediction file: moments are put back in time
// order, merged, then re-ranked.
std::vector<PredictionRecord> watershed_predictions(std::vector<PredictionRecord> preds, double gamma,
                                                    std::size_t max_preds) {
    for (auto& p : preds) {
        std::stable_sort(p.moments.begin(), p.moments.end(), [](const ScoredMoment& a, const ScoredMoment& b) {
            return a.interval().start() < b.interval().start();
        });
        if (!is_partition(p.moments)) {
            throw DataError("qid " + std::to_string(p.qid) +
                            ": moments are not adjacent; watershed needs a full shot partition (score without "
                            "--max-preds truncation)");
        }
        p.moments = simple_watershed(p.moments, gamma);
        rank_moments(p.moments);
        if (p.moments.size() > max_preds) {
            p.moments.erase(p.moments.begin() + static_cast<std::ptrdiff_t>(max_preds), p.moments.end());
        }
    }
    return preds;
}

int run_extract(const std::vector<std::string>& args) {
    const char* env = std::getenv(kExtractorEnv);
    std::string cmd = env != nullptr && *env != '\0' ? env : "vmr-extract";
    for (const auto& a : args) {
        std::string quoted = "'";
        for (char c : a) {
            quoted += c == '\'' ? std::string("'\\''") : std::string(1, c);
        }
        cmd += " " + quoted + "'";
    }
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) {
        throw DataError("failed to run the extractor");
    }
    const int code = WEXITSTATUS(status);
    if (code == 127) {
        std::cerr << "error: feature extractor not found; install it or point " << kExtractorEnv << " at it\n";
        return kExitUsage;
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-shot video moment retrieval over precomputed features"};
    app.require_subcommand(1);

    // extract
    auto* extract = app.add_subcommand("extract", "Run the feature extractor (separate tool) with these arguments");
    extract->allow_extras();
    extract->prefix_command();

    // shots
    auto* shots = app.add_subcommand("shots", "Detect shots in one frame track");
    fs::path shots_frames;
    double shots_lambda = kDefaultLambda;
    double shots_min_len = kDefaultMinShotLength;
    bool shots_signal = false;
    shots->add_option("frames", shots_frames, "VMRF frame track")->required()->check(CLI::ExistingFile);
    shots->add_option("--lambda", shots_lambda, "Shot threshold");
    shots->add_option("--min-len", shots_min_len, "Minimum shot length in seconds");
    shots->add_flag("--signal", shots_signal, "Print the content values instead of shots");

    // propose
    auto* propose_cmd = app.add_subcommand("propose", "Write proposals per video as JSONL");
    PipelineFlags propose_flags;
    propose_flags.attach(propose_cmd, false);
    fs::path propose_out;
    propose_cmd->add_option("--out", propose_out, "Output JSONL (default stdout)");

    // score
    auto* score = app.add_subcommand("score", "Score every proposal (no watershed, no truncation by default)");
    PipelineFlags score_flags;
    score_flags.attach(score, false);
    fs::path score_out;
    score->add_option("--out", score_out, "Output predictions JSONL (default stdout)");

    // watershed
    auto* watershed = app.add_subcommand("watershed", "Apply watershed to scored proposals");
    fs::path ws_in;
    fs::path ws_out;
    double ws_gamma = kDefaultGamma;
    std::size_t ws_max = std::numeric_limits<std::size_t>::max();
    watershed->add_option("--predictions", ws_in, "Scored proposals JSONL from 'score'")
        ->required()
        ->check(CLI::ExistingFile);
    watershed->add_option("--gamma", ws_gamma, "Watershed threshold")->check(CLI::Range(0.0, 1.0));
    watershed->add_option("--max-preds", ws_max, "Predictions kept per query")->check(CLI::PositiveNumber);
    watershed->add_option("--out", ws_out, "Output JSONL (default stdout)");

    // predict
    auto* predict = app.add_subcommand("predict", "Run the full pipeline");
    PipelineFlags predict_flags;
    predict_flags.attach(predict);
    fs::path predict_out;
    bool predict_eval = false;
    predict->add_option("--out", predict_out, "Output predictions JSONL (default stdout)");
    predict->add_flag("--eval", predict_eval, "Also print the evaluation table (to stderr when writing to stdout)");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate predictions against a dataset");
    fs::path eval_dataset;
    fs::path eval_preds;
    fs::path eval_json;
    fs::path eval_csv;
    std::size_t eval_max = 10;
    bool eval_only_predicted = false;
    std::string eval_label = "predictions";
    eval->add_option("--dataset", eval_dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    eval->add_option("--predictions", eval_preds, "Predictions JSONL")->required()->check(CLI::ExistingFile);
    eval->add_option("--max-preds", eval_max, "Predictions considered per query")->check(CLI::PositiveNumber);
    eval->add_flag("--only-predicted", eval_only_predicted, "Evaluate only queries that have a prediction record");
    eval->add_option("--json", eval_json, "Write the report as JSON");
    eval->add_option("--csv", eval_csv, "Write the report as CSV");
    eval->add_option("--label", eval_label, "Row label");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Oracle bounds with a ground-truth-aware matcher");
    PipelineFlags oracle_flags;
    oracle_flags.attach(oracle, false);
    std::string oracle_mode = "both";
    fs::path oracle_out;
    oracle->add_option("--mode", oracle_mode, "scores | merge | both")
        ->check(CLI::IsMember({"scores", "merge", "both"}));
    oracle->add_option("--out", oracle_out, "Predictions JSONL of the bound (single mode only)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate the pipeline over a grid of lambda or gamma values");
    PipelineFlags sweep_flags;
    sweep_flags.attach(sweep_cmd);
    std::string sweep_param = "lambda";
    std::string sweep_grid;
    fs::path sweep_out;
    sweep_cmd->add_option("--param", sweep_param, "lambda | gamma")->check(CLI::IsMember({"lambda", "gamma"}));
    sweep_cmd->add_option("--grid", sweep_grid, "start:stop:step or v1,v2,...")->required();
    sweep_cmd->add_option("--out", sweep_out, "Output CSV (default stdout)");

    // report
    auto* report = app.add_subcommand("report", "Render a saved evaluation report");
    fs::path report_in;
    fs::path report_csv;
    std::string report_label = "predictions";
    report->add_option("input", report_in, "Report JSON from 'eval --json'")->required()->check(CLI::ExistingFile);
    report->add_option("--csv", report_csv, "Also write CSV");
    report->add_option("--label", report_label, "Row label");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (extract->parsed()) {
            return run_extract(extract->remaining());
        }

        if (shots->parsed()) {
            const FrameTrack track = load_frame_track(shots_frames);
            if (shots_signal) {
                const auto sig = content_values(track);
                for (std::size_t i = 0; i < sig.values.size(); ++i) {
                    std::cout << track.frame_time(i + 1) << '\t' << sig.values[i] << '\n';
                }
            } else {
                for (const auto& s : detect_shots(track, shots_lambda, shots_min_len)) {
                    std::cout << s.start() << '\t' << s.end() << '\n';
                }
            }
            return kExitOk;
        }

        if (propose_cmd->parsed()) {
            propose_flags.finish();
            const auto cfg = propose_flags.config();
            FeatureStore store(propose_flags.resolved_feature_root());
            std::ofstream file;
            if (!propose_out.empty()) {
                file.open(propose_out, std::ios::trunc);
                if (!file) {
                    throw DataError("cannot open '" + propose_out.string() + "' for writing");
                }
            }
            std::ostream& out = propose_out.empty() ? std::cout : file;
            std::set<std::string> done;
            for (const auto& q : load_dataset(propose_flags.dataset)) {
                if (done.contains(q.vid)) {
                    continue;
                }
                if (cfg.proposal_method == ProposalMethod::ShotDetect && !store.has_frames(q.vid)) {
                    warn("skipping video '" + q.vid + "': no frame track");
                    continue;
                }
                done.insert(q.vid);
                nlohmann::ordered_json obj;
                obj["vid"] = q.vid;
                obj["duration"] = q.duration_s;
                auto segs = nlohmann::ordered_json::array();
                for (const auto& s : vmr::propose(cfg, q, store)) {
                    segs.push_back({s.start(), s.end()});
                }
                obj["segments"] = std::move(segs);
                out << obj.dump() << '\n';
            }
            return kExitOk;
        }

        if (score->parsed()) {
            score_flags.finish();
            auto cfg = score_flags.config();
            if (!score_flags.was_set("max-preds")) {
                cfg.max_preds = std::numeric_limits<std::size_t>::max();
            }
            FeatureStore store(score_flags.resolved_feature_root());
            const auto result = run_pipeline(cfg, load_dataset(score_flags.dataset), store, warn);
            emit_predictions(result.predictions, score_out);
            return kExitOk;
        }

        if (watershed->parsed()) {
            emit_predictions(watershed_predictions(load_predictions(ws_in), ws_gamma, ws_max), ws_out);
            return kExitOk;
        }

        if (predict->parsed()) {
            predict_flags.finish();
            const auto cfg = predict_flags.config();
            FeatureStore store(predict_flags.resolved_feature_root());
            const auto dataset = load_dataset(predict_flags.dataset);
            const auto result = run_pipeline(cfg, dataset, store, warn);
            emit_predictions(result.predictions, predict_out);
            if (predict_eval) {
                const auto rep = evaluate(result.predictions, evaluated_subset(dataset, result), {cfg.max_preds});
                write_report_table(rep, describe(cfg), predict_out.empty() ? std::cerr : std::cout);
            }
            return kExitOk;
        }

        if (eval->parsed()) {
            auto dataset = load_dataset(eval_dataset);
            const auto preds = load_predictions(eval_preds);
            if (eval_only_predicted) {
                std::set<std::int64_t> have;
                for (const auto& p : preds) {
                    have.insert(p.qid);
                }
                std::erase_if(dataset, [&](const QueryRecord& q) { return !have.contains(q.qid); });
            }
            emit_report(evaluate(preds, dataset, {eval_max}), eval_label, eval_json, eval_csv);
            return kExitOk;
        }

        if (oracle->parsed()) {
            oracle_flags.finish();
            const auto cfg = oracle_flags.config();
            if (oracle_mode == "both" && !oracle_out.empty()) {
                throw UsageError("--out needs --mode scores or --mode merge");
            }
            FeatureStore store(oracle_flags.resolved_feature_root());
            const auto dataset = load_dataset(oracle_flags.dataset);
            std::vector<std::pair<OracleMode, std::string>> modes;
            if (oracle_mode != "merge") {
                modes.emplace_back(OracleMode::Scores, "Non-Postprocessing Bound");
            }
            if (oracle_mode != "scores") {
                modes.emplace_back(OracleMode::Merge, "Postprocessing Bound");
            }
            for (const auto& [mode, name] : modes) {
                const auto result = run_oracle(mode, cfg, dataset, store, warn);
                std::ostringstream label;
                label << name << " (lambda=" << cfg.effective_lambda() << ")";
                write_report_table(evaluate(result.predictions, evaluated_subset(dataset, result), {cfg.max_preds}),
                                   label.str(), std::cout);
                if (!oracle_out.empty()) {
                    write_predictions(result.predictions, oracle_out);
                }
            }
            return kExitOk;
        }

        if (sweep_cmd->parsed()) {
            sweep_flags.finish();
            SweepSpec spec;
            spec.param = sweep_param == "gamma" ? SweepParam::Gamma : SweepParam::Lambda;
            spec.grid = parse_grid(sweep_grid);
            spec.base = sweep_flags.config();
            FeatureStore store(sweep_flags.resolved_feature_root());
            const auto rows = sweep(spec, load_dataset(sweep_flags.dataset), store, warn);
            if (sweep_out.empty()) {
                write_sweep_csv(spec.param, rows, std::cout);
            } else {
                std::ofstream out(sweep_out, std::ios::trunc);
                if (!out) {
                    throw DataError("cannot open '" + sweep_out.string() + "' for writing");
                }
                write_sweep_csv(spec.param, rows, out);
            }
            return kExitOk;
        }

        if (report->parsed()) {
            emit_report(load_report(report_in), report_label, {}, report_csv);
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
