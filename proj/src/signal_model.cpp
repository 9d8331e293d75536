#include "sac/signal_model.hpp"

#include <stdexcept>

namespace sac {

PriorPolynomials eval_prior_polynomials(const PriorParams& p, const SystemConfig& cfg) {
    const int half = cfg.half();
    PriorPolynomials out;
    out.log_amp.resize(cfg.window_len());
    out.phase.resize(cfg.window_len());
    for (int m = -half; m <= half; ++m) {
        const double tm = cfg.t_s * m;
        const double tm2 = tm * tm;
        out.log_amp[m + half] = -p.sigma * tm - 0.5 * p.gamma * tm2;
        out.phase[m + half] = p.omega * tm + 0.5 * p.alpha * tm2;
    }
    return out;
}

Window parameter_shift(std::span<const cplx> y, const PriorParams& p, const SystemConfig& cfg) {
    if (static_cast<int>(y.size()) != cfg.window_len())
        throw std::invalid_argument("parameter_shift: window length mismatch");
    const PriorPolynomials pol = eval_prior_polynomials(p, cfg);
    Window z(y.size());
    for (size_t i = 0; i < y.size(); ++i)
        z[i] = y[i] * std::exp(cplx(-pol.log_amp[i], -pol.phase[i]));
    return z;
}

Window unshift_samples(std::span<const cplx> z, const PriorParams& p, const SystemConfig& cfg) {
    if (static_cast<int>(z.size()) != cfg.window_len())
        throw std::invalid_argument("unshift_samples: window length mismatch");
    const PriorPolynomials pol = eval_prior_polynomials(p, cfg);
    Window y(z.size());
    for (size_t i = 0; i < z.size(); ++i)
        y[i] = z[i] * std::exp(cplx(pol.log_amp[i], pol.phase[i]));
    return y;
}

cplx abc_to_dq(double ya, double yb, double yc, long n, const SystemConfig& cfg) {
    constexpr double two_pi_3 = 2.0 * std::numbers::pi / 3.0;
    static const cplx a = std::polar(1.0, two_pi_3);
    static const cplx a2 = std::polar(1.0, 2.0 * two_pi_3);
    const cplx space_vector = (2.0 / 3.0) * (ya + a * yb + a2 * yc);
    return space_vector * std::polar(1.0, -cfg.omega0() * cfg.t_s * static_cast<double>(n));
}

} // namespace sac
