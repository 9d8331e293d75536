#pragma once

#include <numbers>
#include <stdexcept>

namespace sac {

/// Sampling and reporting constants shared by the whole estimation chain.
/// The analysis window is the centered index set m = -n/2 .. n/2, so the
/// window length n+1 is always odd.
struct SystemConfig {
    double f0 = 60.0;            // nominal power frequency, Hz
    double t_s = 1.0 / 1920.0;   // sampling period, s (32 samples per nominal cycle)
    int n = 64;                  // filter order; window length is n+1
    int m_harmonics = 11;        // harmonic orders covered by filter zeros
    double fs_report = 60.0;     // reporting rate, frames per second
    int k_max = 5;               // adaptation iteration cap per report
    int report_stride = 32;      // samples between reports

    int half() const { return n / 2; }
    int window_len() const { return n + 1; }
    double omega0() const { return 2.0 * std::numbers::pi * f0; }

    void validate() const {
        if (n <= 0 || n % 2 != 0)
            throw std::invalid_argument("SystemConfig: filter order n must be positive and even");
        if (t_s <= 0.0)
            throw std::invalid_argument("SystemConfig: sampling period must be positive");
        if (f0 <= 0.0)
            throw std::invalid_argument("SystemConfig: nominal frequency must be positive");
        if (m_harmonics < 0)
            throw std::invalid_argument("SystemConfig: harmonic count must be nonnegative");
        // highest modelled harmonic must stay below Nyquist
        if (m_harmonics * f0 >= 0.5 / t_s)
            throw std::invalid_argument("SystemConfig: m_harmonics * f0 exceeds Nyquist");
        if (fs_report <= 0.0 || k_max < 0 || report_stride <= 0)
            throw std::invalid_argument("SystemConfig: invalid reporting parameters");
    }
};

} // namespace sac
