#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sac/filter_bank.hpp"
#include "sac/system_config.hpp"

namespace sac {

/// Ranges and contraction parameters of the prototype design problem.
/// Each range is the closed symmetric interval the one-step estimation map
/// must contract on (Lipschitz factor below the corresponding L).
struct DesignSpec {
    double omega_con = 2.0 * std::numbers::pi * 15.0;  // rad/s
    double alpha_con = 2.0 * std::numbers::pi * 16.0;  // rad/s^2
    double sigma_con = 4.0;                            // 1/s
    double gamma_con = 110.0;                          // 1/s^2
    double l_omega = 0.3;
    double l_sigma = 0.3;
    double l_alpha = 0.9;
    double l_gamma = 0.9;
    int grid_density = 401;      // points per contractive interval (0 excluded)
    double refine_tol = 1e-7;    // allowed contraction-ratio excess on the validation grid
    int max_refine_rounds = 10;

    // Step-transient shaping of the phasor filter: the tail mass of the
    // expanded taps beyond offset d bounds the TVE excursion while a step
    // crosses the window, so capping it caps the TVE response time at
    // roughly (2*step_tail_start - 1) samples. 0 disables.
    int step_tail_start = 16;       // first offset (in samples) with a bounded tail
    double step_tail_bound = 0.045; // cap on |sum of h0[m], m >= d|

    // Zero re-placement perturbs the frequency response of adapted banks by
    // a few percent near the band edge, so the prototype is designed against
    // l_omega*(1 - l_omega_headroom) to keep the full adaptive loop inside
    // the stated contraction factor.
    double l_omega_headroom = 0.03;

    void validate() const {
        if (omega_con <= 0 || alpha_con <= 0 || sigma_con <= 0 || gamma_con <= 0)
            throw std::invalid_argument("DesignSpec: contractive ranges must be positive");
        for (double l : {l_omega, l_sigma, l_alpha, l_gamma})
            if (!(l > 0.0 && l < 1.0))
                throw std::invalid_argument("DesignSpec: contraction parameters must lie in (0,1)");
        if (grid_density < 8)
            throw std::invalid_argument("DesignSpec: grid too coarse");
    }
};

/// Parseval weights of the filter norms: P0 = P2 = diag(1, 1/2, ...), P1 = diag(1/2, ...).
Eigen::VectorXd weight_p0(int n);
Eigen::VectorXd weight_p1(int n);

/// Phasor filter: min norm with unit DC gain and zeros at the nominal harmonics.
std::vector<double> design_a0(const SystemConfig& cfg, const DesignSpec& spec);

/// Differentiator: min norm, harmonic zeros, and discretized contractive
/// constraints on frequency and damping given a0.
std::vector<double> design_a1(const std::vector<double>& a0, const SystemConfig& cfg,
                              const DesignSpec& spec);

/// Second differentiator: min norm, zero DC gain, harmonic zeros, and
/// contractive constraints on ROCOF and ROCOD given a0 and a1.
std::vector<double> design_a2(const std::vector<double>& a0, const std::vector<double>& a1,
                              const SystemConfig& cfg, const DesignSpec& spec);

/// Worst contraction ratios of a bank over dense validation grids.
struct ContractionCertificate {
    double omega_ratio = 0.0;
    double sigma_ratio = 0.0;
    double alpha_ratio = 0.0;
    double gamma_ratio = 0.0;
    double omega_worst_at = 0.0;  // argmax locations, physical units
    double sigma_worst_at = 0.0;
    double alpha_worst_at = 0.0;
    double gamma_worst_at = 0.0;
};

ContractionCertificate certify_contraction(const FilterBank& bank, const DesignSpec& spec,
                                           int grid_points = 2001);

/// Runs the full a0 -> a1 -> a2 sequence and assembles a prototype bank with
/// design metadata (achieved ratios, norms, residuals).
FilterBank design_prototype(const SystemConfig& cfg, const DesignSpec& spec);

} // namespace sac
