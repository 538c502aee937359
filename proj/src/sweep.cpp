#include "vmr/sweep.hpp"

#include "vmr/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace vmr {

std::string_view param_name(SweepParam p) noexcept { return p == SweepParam::Lambda ? "lambda" : "gamma"; }

void SweepSpec::validate() const {
    if (grid.empty()) {
        throw UsageError("sweep grid is empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw UsageError("sweep grid must be strictly increasing");
        }
    }
    if (param == SweepParam::Gamma && base.proposal_method != ProposalMethod::ShotDetect) {
        throw UsageError("a gamma sweep needs shot proposals");
    }
}

namespace {

double parse_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("bad number '" + s + "' in grid");
    }
    if (used != s.size()) {
        throw UsageError("bad number '" + s + "' in grid");
    }
    return v;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find_first_not_of(" \t") == std::string::npos) {
        throw UsageError("empty grid");
    }
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ':');) {
            parts.push_back(part);
        }
        if (parts.size() != 3) {
            throw UsageError("range grid must look like start:stop:step");
        }
        const double start = parse_number(parts[0]);
        const double stop = parse_number(parts[1]);
        const double step = parse_number(parts[2]);
        if (!(step > 0.0) || stop < start) {
            throw UsageError("range grid needs step > 0 and stop >= start");
        }
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i) {
            grid.push_back(start + static_cast<double>(i) * step);
        }
        return grid;
    }
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
        grid.push_back(parse_number(part));
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw UsageError("grid values must be strictly increasing");
        }
    }
    return grid;
}

std::vector<SweepRow> sweep(const SweepSpec& spec, const std::vector<QueryRecord>& dataset, FeatureStore& store,
                            const WarningSink& warn) {
    spec.validate();
    std::vector<SweepRow> rows;
    rows.reserve(spec.grid.size());
    for (double value : spec.grid) {
        PipelineConfig cfg = spec.base;
        if (spec.param == SweepParam::Lambda) {
            cfg.lambda = value;
        } else {
            cfg.gamma = value;
        }
        const auto result = run_pipeline(cfg, dataset, store, warn);
        const auto subset = evaluated_subset(dataset, result);
        rows.push_back({value, evaluate(result.predictions, subset, {cfg.max_preds}), result.total_moments});
    }
    return rows;
}

void write_sweep_csv(SweepParam param, const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "param,value,r1@0.5,r1@0.7,map@0.5,map@0.75,map_avg,segments\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%g,%.4f,%.4f,%.4f,%.4f,%.4f,%zu\n", std::string(param_name(param)).c_str(),
                      r.value, r.report.r1_at_0_5, r.report.r1_at_0_7, r.report.map_at_0_5, r.report.map_at_0_75,
                      r.report.map_avg, r.total_moments);
        out << buf;
    }
}

}  // namespace vmr
