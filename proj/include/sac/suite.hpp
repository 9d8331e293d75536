#pragma once

#include <map>
#include <optional>
#include <string>

#include "sac/metrics.hpp"
#include "sac/scenario.hpp"

namespace sac {

/// Slides a centered window over the samples and reports every `stride`
/// samples. Frame indices are absolute sample indices.
std::vector<EstimateFrame> run_stream(SacEstimator& est, std::span<const cplx> samples,
                                      long start_index, int stride);

struct SuiteConfig {
    double snr_db = 75.0;
    std::vector<uint64_t> seeds = {1, 2, 3};
    double sweep_step_hz = 0.1;     // offset grid for A1/A3
    double sweep_step_hz_a2 = 0.5;  // coarser grid for the 11 per-harmonic A2 scans
    int stride_stationary = 32;     // A tests, B1, fault
    int stride_dynamic = 1;         // modulation and step tests (sliding window)
    double warmup_s = 0.25;         // initial convergence, excluded from metrics
    double measure_s = 0.5;         // measured span per stationary run
    double ramp_warmup_s = 0.5;
    double fault_settle_s = 0.15;   // excluded after the fault onset
    ResponseLimits limits;
    bool include_a2 = true;
};

struct TestSummary {
    ErrorRecord worst;
    double mean_iterations = 0.0;
    double adapt_fraction = 0.0;  // fraction of reports with iterations >= 1
    long frames = 0;
    std::optional<StepReport> step;
};

using SuiteSummary = std::map<std::string, TestSummary>;

/// Runs the full battery (A1-A3, B1-B3, steps, synthetic fault) and returns
/// worst-case records per test. Deterministic under the configured seeds.
SuiteSummary run_suite(const FilterBank& bank, const SacThresholds& th, const SystemConfig& cfg,
                       const SuiteConfig& sc);

nlohmann::json suite_to_json(const SuiteSummary& summary);
std::string suite_to_csv(const SuiteSummary& summary);

struct GateResult {
    std::string name;
    double value;
    double limit;
    bool lower_bound = false;  // pass when value >= limit instead
    bool pass() const { return lower_bound ? value >= limit : value <= limit; }
};

/// Pass/fail gates over a suite summary (the CI exit-code contract).
std::vector<GateResult> evaluate_gates(const SuiteSummary& summary);

} // namespace sac
