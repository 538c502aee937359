#include "vmr/error.hpp"
#include "vmr/io.hpp"
#include "vmr/pipeline.hpp"
#include "vmr/postprocess.hpp"
#include "vmr/report.hpp"
#include "vmr/sweep.hpp"

#include <doctest.h>

#include <sstream>

using namespace vmr;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = VMR_FIXTURE_DIR;

std::vector<QueryRecord> fixture_dataset() { return load_dataset(kFixture / "dataset.jsonl"); }

PipelineConfig watershed_config() {
    PipelineConfig c;
    c.lambda = 32;
    c.gamma = 0.7;
    return c;
}

std::string serialize(const std::vector<PredictionRecord>& preds) {
    std::ostringstream out;
    write_predictions(preds, out);
    return out.str();
}

}  // namespace

TEST_CASE("pipeline reproduces the golden predictions byte for byte") {
    FeatureStore store(kFixture / "features");
    const auto result = run_pipeline(watershed_config(), fixture_dataset(), store);
    const auto bytes = read_file_bytes(kFixture / "golden_predictions.jsonl");
    CHECK(serialize(result.predictions) == std::string(bytes.begin(), bytes.end()));
}

TEST_CASE("pipeline is deterministic") {
    const auto dataset = fixture_dataset();
    FeatureStore a(kFixture / "features");
    FeatureStore b(kFixture / "features");
    CHECK(serialize(run_pipeline(watershed_config(), dataset, a).predictions) ==
          serialize(run_pipeline(watershed_config(), dataset, b).predictions));
}

TEST_CASE("without gamma the predictions are the scored proposals") {
    const auto dataset = fixture_dataset();
    FeatureStore store(kFixture / "features");
    PipelineConfig c;
    c.lambda = 32;
    c.max_preds = 1000;
    const auto result = run_pipeline(c, dataset, store);
    for (const auto& p : result.predictions) {
        const auto& q = *std::find_if(dataset.begin(), dataset.end(), [&](const QueryRecord& r) { return r.qid == p.qid; });
        const auto proposals = propose(c, q, store);
        const auto* query = store.query_embedding(q.qid, kJointEncoder);
        REQUIRE(query != nullptr);
        auto scored = score_proposals(proposals, store.embeddings(q.vid), *query, Normalization::None);
        rank_moments(scored);
        CHECK(p.moments == scored);
    }
}

TEST_CASE("watershed output is re-ranked and truncated") {
    FeatureStore store(kFixture / "features");
    auto c = watershed_config();
    c.max_preds = 3;
    for (const auto& p : run_pipeline(c, fixture_dataset(), store).predictions) {
        CHECK(p.moments.size() <= 3);
        CHECK(is_ranked(p.moments));
    }
}

TEST_CASE("queries on videos without features are skipped with a warning") {
    const auto dataset = fixture_dataset();
    FeatureStore store(kFixture / "features");
    std::vector<std::string> warnings;
    const auto result = run_pipeline(watershed_config(), dataset, store,
                                     [&](const std::string& w) { warnings.push_back(w); });
    REQUIRE(result.skipped.size() == 1);
    CHECK(result.skipped[0].vid == "synth_missing");
    CHECK(warnings.size() == 1);
    CHECK(result.predictions.size() == dataset.size() - 1);
    CHECK(evaluated_subset(dataset, result).size() == dataset.size() - 1);

    // Dropping the missing query does not change the others.
    std::vector<QueryRecord> present;
    for (const auto& q : dataset) {
        if (q.vid != "synth_missing") {
            present.push_back(q);
        }
    }
    FeatureStore fresh(kFixture / "features");
    CHECK(serialize(run_pipeline(watershed_config(), present, fresh).predictions) == serialize(result.predictions));
}

TEST_CASE("caption matcher over shot and sliding-window proposals") {
    const auto dataset = fixture_dataset();
    for (const auto method : {ProposalMethod::ShotDetect, ProposalMethod::SlidingWindow}) {
        FeatureStore store(kFixture / "features");
        PipelineConfig c;
        c.matcher = Matcher::Captions;
        c.proposal_method = method;
        c.lambda = 53;
        const auto result = run_pipeline(c, dataset, store);
        CHECK(result.predictions.size() == dataset.size() - 1);
        for (const auto& p : result.predictions) {
            CHECK_FALSE(p.moments.empty());
            CHECK(is_ranked(p.moments));
        }
    }
}

TEST_CASE("pipeline config validation") {
    PipelineConfig c;
    CHECK(c.effective_lambda() == 53.0);
    CHECK(c.effective_normalization() == Normalization::None);
    c.gamma = 0.7;
    CHECK(c.effective_lambda() == 32.0);
    CHECK(c.effective_normalization() == Normalization::PerVideo);
    CHECK_NOTHROW(c.validate());

    c.proposal_method = ProposalMethod::SlidingWindow;
    CHECK_THROWS_AS(c.validate(), UsageError);

    PipelineConfig d;
    d.max_preds = 0;
    CHECK_THROWS_AS(d.validate(), UsageError);
    d = {};
    d.lambda = -1;
    CHECK_THROWS_AS(d.validate(), UsageError);
    d = {};
    d.window_s = 0;
    CHECK_THROWS_AS(d.validate(), UsageError);
}

TEST_CASE("sweep grids") {
    CHECK(parse_grid("20:70:3").size() == 17);
    CHECK(parse_grid("20:70:3").back() == 68.0);
    CHECK(parse_grid("0.5:0.9:0.1").size() == 5);
    CHECK(parse_grid("1, 2,5") == std::vector<double>{1, 2, 5});
    CHECK_THROWS_AS(parse_grid(""), UsageError);
    CHECK_THROWS_AS(parse_grid("3,1"), UsageError);
    CHECK_THROWS_AS(parse_grid("1:5:0"), UsageError);

    SweepSpec empty;
    CHECK_THROWS_AS(empty.validate(), UsageError);
}

TEST_CASE("lambda sweep writes one row per grid value") {
    const auto dataset = fixture_dataset();
    FeatureStore store(kFixture / "features");
    SweepSpec spec;
    spec.param = SweepParam::Lambda;
    spec.grid = parse_grid("20:70:3");
    const auto rows = sweep(spec, dataset, store);
    REQUIRE(rows.size() == 17);
    std::ostringstream csv;
    write_sweep_csv(spec.param, rows, csv);
    const auto text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 18);
    CHECK(text.rfind("param,value,r1@0.5,r1@0.7,map@0.5,map@0.75,map_avg,segments\n", 0) == 0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].total_moments <= rows[i - 1].total_moments);
    }
}

TEST_CASE("gamma sweep segment counts never drop as gamma rises") {
    const auto dataset = fixture_dataset();
    FeatureStore store(kFixture / "features");
    SweepSpec spec;
    spec.param = SweepParam::Gamma;
    spec.grid = parse_grid("0.1:1.0:0.05");
    spec.base.lambda = 32;
    const auto rows = sweep(spec, dataset, store);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].total_moments >= rows[i - 1].total_moments);
    }
}

TEST_CASE("oracle bounds on the fixture") {
    const auto dataset = fixture_dataset();
    FeatureStore store(kFixture / "features");
    PipelineConfig c;
    c.lambda = 32;
    const auto scores = run_oracle(OracleMode::Scores, c, dataset, store);
    const auto merged = run_oracle(OracleMode::Merge, c, dataset, store);
    const auto subset = evaluated_subset(dataset, scores);
    const auto rs = evaluate(scores.predictions, subset);
    const auto rm = evaluate(merged.predictions, subset);
    CHECK(rm.r1_at_0_5 >= rs.r1_at_0_5);
    CHECK(rm.map_avg >= rs.map_avg);
}

TEST_CASE("report rendering") {
    EvalReport r;
    r.r1_at_0_5 = r.r1_at_0_7 = r.map_at_0_5 = r.map_at_0_75 = r.map_avg = 100.0;
    CHECK(format_headline_row(r) == "100.00 100.00 100.00 100.00 100.00");
    r.num_queries = 3;
    r.bucketed = {50.0, std::nullopt, 12.5};
    CHECK(report_from_json(report_to_json(r)) == r);
}
