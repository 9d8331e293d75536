#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sac/signal_model.hpp"
#include "sac/system_config.hpp"

namespace sac {

/// Three linear-phase FIR filters estimating a windowed phasor and its first
/// two derivatives. Only the half coefficient vectors are stored; the
/// centered taps are the symmetric expansion
///   h0[0] = a0[0],  h0[+-m] = a0[m]/2
///   h1[+-m] = +-a1[m]/2  (h1[0] = 0)
///   h2 like h0 with a2.
/// The 1/T derivative scaling is baked into a1 and a2 at design time, so the
/// ratio estimates below come out directly in rad/s, rad/s^2, 1/s, 1/s^2.
struct FilterBank {
    std::vector<double> a0;  // length n/2+1
    std::vector<double> a1;  // length n/2, index j <-> tap offset m = j+1
    std::vector<double> a2;  // length n/2+1
    int n = 0;
    double t_s = 0.0;
    double f0 = 0.0;
    int m_harmonics = 0;
    std::string provenance = "prototype";  // "prototype" | "adapted"
    nlohmann::json design_meta;

    int half() const { return n / 2; }
    void check_shape() const;
};

/// A_i(w) for normalized frequency w = omega*T:
///   A0(w) = a0[0] + sum a0[m] cos(w m),  A1(w) = sum a1[m] sin(w m),  A2 like A0.
double amplitude_response(const FilterBank& bank, int which, double w);

/// Analytic continuation to real exponentials e^{-sigma*T*m}: cosh/sinh sums.
/// s = sigma*T. Throws std::domain_error when |s|*n/2 > 700 (exp overflow).
double hyperbolic_response(const FilterBank& bank, int which, double s);

/// Response to the chirp window e^{j c m^2 / 2}, c = alpha*T^2 (even filters only).
std::complex<double> chirp_response(const FilterBank& bank, int which, double c);

/// Response to the Gaussian window e^{-g m^2 / 2}, g = gamma*T^2 (even filters only).
double gaussian_response(const FilterBank& bank, int which, double g);

/// Filtering-stage output: phasor and derivative estimates of the shifted
/// window, plus the ratio-form frequency/damping/ROCOF/ROCOD estimates.
struct RawEstimates {
    cplx z{};
    cplx z1{};
    cplx z2{};
    double omega = 0.0;  // rad/s
    double alpha = 0.0;  // rad/s^2
    double sigma = 0.0;  // 1/s
    double gamma = 0.0;  // 1/s^2
    bool valid = false;
};

/// Applies the three filters to a window and forms the ratio estimates.
/// When |z| falls below z_guard_rel times the window RMS the division is
/// not attempted and the result is marked invalid.
RawEstimates apply_filter_bank(std::span<const cplx> window, const FilterBank& bank,
                               double z_guard_rel = 1e-9);

nlohmann::json bank_to_json(const FilterBank& bank);
FilterBank bank_from_json(const nlohmann::json& j);

/// Verifies the prototype gain conditions A0(0)=1, A2(0)=0 and the harmonic
/// zeros A_i(l w0 T)=0, l=1..M, within tol. Throws std::runtime_error.
void check_prototype(const FilterBank& bank, double tol = 1e-8);

} // namespace sac
