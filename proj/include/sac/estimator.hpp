#pragma once

#include <optional>
#include <span>

#include "sac/filter_bank.hpp"
#include "sac/signal_model.hpp"
#include "sac/system_config.hpp"

namespace sac {

/// Lower/upper magnitude thresholds gating prior adaptation and estimate
/// unshifting. The lower bound is a dead zone (skip negligible updates);
/// the upper bound rejects step-transient outliers.
struct SacThresholds {
    double omega_min = 2.0 * std::numbers::pi * 1e-3;  // rad/s
    double omega_max = 2.0 * std::numbers::pi * 15.0;
    double sigma_min = 6e-3;  // 1/s
    double sigma_max = 4.0;
    double alpha_min = 2.0 * std::numbers::pi * 0.1;  // rad/s^2
    double alpha_max = 2.0 * std::numbers::pi * 16.0;
    double gamma_min = 0.6;  // 1/s^2
    double gamma_max = 110.0;

    void validate() const {
        auto ok = [](double lo, double hi) { return lo > 0.0 && hi > lo; };
        if (!ok(omega_min, omega_max) || !ok(sigma_min, sigma_max) ||
            !ok(alpha_min, alpha_max) || !ok(gamma_min, gamma_max))
            throw std::invalid_argument("SacThresholds: need 0 < min < max per parameter");
    }
};

struct ParamSet {
    bool omega = false;
    bool alpha = false;
    bool sigma = false;
    bool gamma = false;
    bool any() const { return omega || alpha || sigma || gamma; }
};

/// Reported estimates at one reporting index. freq/rocof are baseband
/// deviations from nominal (rad/s, rad/s^2).
struct EstimateFrame {
    long report_index = 0;
    cplx phasor{};
    double freq = 0.0;
    double rocof = 0.0;
    double damping = 0.0;
    double rocod = 0.0;
    int iterations = 0;
    bool adapted_filters = false;
    bool valid = true;        // false when the division guard tripped
    ParamSet clamped;         // parameters that fell back to their priors
};

/// Linear extrapolation of the previous report's estimates, clamped to the
/// upper thresholds; all zeros for the first window (nominal baseband).
PriorParams init_priors(const std::optional<EstimateFrame>& prev, double dt,
                        const SacThresholds& th);

struct UnshiftResult {
    double omega = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;
    ParamSet rejected;
};

/// Adds priors back to the shifted-domain estimates; sums beyond the upper
/// thresholds are replaced by the prior alone and flagged.
UnshiftResult unshift_estimates(const RawEstimates& raw, const PriorParams& p,
                                const SacThresholds& th);

/// Parameters whose shifted-domain estimate magnitude lies between the lower
/// and upper thresholds (the set P_k driving adaptation).
ParamSet adaptation_set(const RawEstimates& raw, const SacThresholds& th);

/// Replaces the priors named in the set with the unshifted estimates.
PriorParams update_priors(const PriorParams& p, const UnshiftResult& est, const ParamSet& set);

/// Zero-placement policy for adapted filters. FundamentalMultiples puts zeros
/// at l*(w0 + west); BasebandImages at (l-1)*w0 + l*west, the positive-
/// sequence image locations after dq demodulation.
enum class HarmonicPlacement { FundamentalMultiples, BasebandImages };

/// Re-derives the three coefficient vectors from the prototype so the zeros
/// land on the off-nominal harmonic frequencies, keeping unit/zero gains at
/// the fundamental. Always adapts from the prototype, never incrementally.
FilterBank adapt_filters(const FilterBank& prototype, double freq_est, const SystemConfig& cfg,
                         HarmonicPlacement placement = HarmonicPlacement::FundamentalMultiples);

struct SacOptions {
    SacThresholds thresholds;
    HarmonicPlacement placement = HarmonicPlacement::FundamentalMultiples;
    double z_guard_rel = 1e-9;
    bool revert_to_prototype = true;  // restore prototype when freq re-enters the dead zone
};

/// Per-iteration snapshot of the adaptation loop, for convergence tests.
struct IterationTrace {
    std::vector<PriorParams> priors;   // prior vector entering each filtering pass
    std::vector<ParamSet> fired;       // adaptation set that produced each update
};

/// One estimation channel: applies the shift/filter/unshift loop per report
/// and carries priors and the (possibly adapted) bank across reports.
/// Not safe for concurrent use by multiple callers.
class SacEstimator {
public:
    SacEstimator(FilterBank prototype, SystemConfig cfg, SacOptions opt = {});

    EstimateFrame process_report(std::span<const cplx> window, long report_index,
                                 IterationTrace* trace = nullptr);

    const FilterBank& current_bank() const { return bank_; }
    const SystemConfig& config() const { return cfg_; }
    double report_dt() const { return dt_; }
    void reset();

private:
    FilterBank prototype_;
    FilterBank bank_;
    SystemConfig cfg_;
    SacOptions opt_;
    std::optional<EstimateFrame> prev_;
    double dt_;
};

} // namespace sac
