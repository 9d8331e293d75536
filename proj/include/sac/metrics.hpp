#pragma once

#include <limits>
#include <vector>

#include "sac/estimator.hpp"

namespace sac {

/// Instantaneous error magnitudes of one frame against the truth track.
struct ErrorRecord {
    double ae = 0.0;        // pu
    double pe = 0.0;        // rad
    double tve = 0.0;       // fraction (not percent)
    double fe_hz = 0.0;     // Hz
    double de = 0.0;        // 1/s
    double rfe_hz_s = 0.0;  // Hz/s
    double rde = 0.0;       // 1/s^2
    bool tve_defined = true;

    /// Componentwise max, the aggregation used for worst-case tables.
    void take_max(const ErrorRecord& other);
};

struct TruthSample {
    double amp = 1.0;
    double phase = 0.0;
    double freq = 0.0;     // rad/s
    double rocof = 0.0;    // rad/s^2
    double damping = 0.0;  // 1/s
    double rocod = 0.0;    // 1/s^2
};

ErrorRecord compute_errors(const EstimateFrame& frame, const TruthSample& truth);

/// Error limits gating the step response-time measurement. Damping limits
/// follow the empirical 2*pi correspondence with the frequency limits.
struct ResponseLimits {
    double tve = 0.01;       // fraction
    double fe_hz = 0.06;     // Hz
    double rfe_hz_s = 2.3;   // Hz/s
    double de() const { return 2.0 * std::numbers::pi * fe_hz; }
    double rde() const { return 2.0 * std::numbers::pi * rfe_hz_s; }
};

struct StepReport {
    double overshoot_pct = 0.0;
    double t_res_tve = 0.0;
    double t_res_fe = 0.0;
    double t_res_de = 0.0;
    double t_res_rfe = 0.0;
    double t_res_rde = 0.0;
};

constexpr double kInfResponse = std::numeric_limits<double>::infinity();

/// Response times from an error series sampled at uniform spacing dt around a
/// step at step_time. Each response time is the span of the contiguous
/// exceedance interval; infinity when the error has not re-entered its limit
/// by settle_deadline. stepped_estimate is the series of the stepped quantity
/// (amplitude or phase) used for the overshoot measurement.
StepReport measure_response(const std::vector<double>& times,
                            const std::vector<ErrorRecord>& errors,
                            const std::vector<double>& stepped_estimate, double step_time,
                            double step_size, double post_value, const ResponseLimits& limits,
                            double settle_deadline);

} // namespace sac
