#pragma once

#include "vmr/metrics.hpp"
#include "vmr/pipeline.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace vmr {

enum class SweepParam { Lambda, Gamma };

struct SweepSpec {
    SweepParam param = SweepParam::Lambda;
    std::vector<double> grid;  // non-empty, strictly increasing
    PipelineConfig base;

    void validate() const;
};

struct SweepRow {
    double value = 0.0;
    EvalReport report;
    std::size_t total_moments = 0;
};

std::string_view param_name(SweepParam p) noexcept;

/// Parses "a:b:step" (inclusive, tolerant to rounding) or "v1,v2,...".
std::vector<double> parse_grid(const std::string& text);

/// One full pipeline run and evaluation per grid value. Each run is evaluated
/// on the queries it did not skip.
std::vector<SweepRow> sweep(const SweepSpec& spec, const std::vector<QueryRecord>& dataset, FeatureStore& store,
                            const WarningSink& warn = {});

/// CSV: param,value,r1@0.5,r1@0.7,map@0.5,map@0.75,map_avg,segments
void write_sweep_csv(SweepParam param, const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace vmr
