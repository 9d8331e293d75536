#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sac/system_config.hpp"

namespace sac {

using cplx = std::complex<double>;

/// Complex baseband samples centered on a reporting index,
/// ordered m = -n/2 .. n/2 (length n+1).
using Window = std::vector<cplx>;

/// Second-order prior model parameters. Frequency/ROCOF describe the phase
/// polynomial, damping/ROCOD the log-amplitude polynomial.
struct PriorParams {
    double omega = 0.0;  // rad/s
    double alpha = 0.0;  // rad/s^2
    double sigma = 0.0;  // 1/s
    double gamma = 0.0;  // 1/s^2
};

/// b_pr[m] and phi_pr[m] sampled over the window index set, stored with
/// vector index i = m + n/2. Both are exactly zero at m = 0.
struct PriorPolynomials {
    std::vector<double> log_amp;  // b_pr
    std::vector<double> phase;    // phi_pr
};

PriorPolynomials eval_prior_polynomials(const PriorParams& p, const SystemConfig& cfg);

/// Z[m] = Y[m] * exp(-b_pr[m] - j*phi_pr[m]). Maps a signal matching the
/// prior model to a (near-)constant window.
Window parameter_shift(std::span<const cplx> y, const PriorParams& p, const SystemConfig& cfg);

/// Exact inverse of parameter_shift.
Window unshift_samples(std::span<const cplx> z, const PriorParams& p, const SystemConfig& cfg);

/// Space-vector abc->dq transform with 2/3 scaling and e^{-j*w0*t} rotation:
/// a balanced positive-sequence set at nominal frequency maps to the constant 1.
cplx abc_to_dq(double ya, double yb, double yc, long n, const SystemConfig& cfg);

} // namespace sac
