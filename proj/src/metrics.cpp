#include "sac/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace sac {

void ErrorRecord::take_max(const ErrorRecord& other) {
    ae = std::max(ae, other.ae);
    pe = std::max(pe, other.pe);
    tve = std::max(tve, other.tve);
    fe_hz = std::max(fe_hz, other.fe_hz);
    de = std::max(de, other.de);
    rfe_hz_s = std::max(rfe_hz_s, other.rfe_hz_s);
    rde = std::max(rde, other.rde);
    tve_defined = tve_defined && other.tve_defined;
}

namespace {

double wrap_pi(double x) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    x = std::fmod(x + std::numbers::pi, two_pi);
    if (x < 0) x += two_pi;
    return x - std::numbers::pi;
}

} // namespace

ErrorRecord compute_errors(const EstimateFrame& frame, const TruthSample& truth) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ErrorRecord e;
    const cplx x_true = std::polar(truth.amp, truth.phase);
    e.ae = std::abs(std::abs(frame.phasor) - truth.amp);
    e.pe = std::abs(wrap_pi(std::arg(frame.phasor) - truth.phase));
    if (truth.amp > 0.0) {
        e.tve = std::abs(frame.phasor - x_true) / truth.amp;
    } else {
        e.tve = 0.0;
        e.tve_defined = false;
    }
    e.fe_hz = std::abs(frame.freq - truth.freq) / two_pi;
    e.rfe_hz_s = std::abs(frame.rocof - truth.rocof) / two_pi;
    e.de = std::abs(frame.damping - truth.damping);
    e.rde = std::abs(frame.rocod - truth.rocod);
    return e;
}

namespace {

double response_time(const std::vector<double>& times, const std::vector<double>& err,
                     double limit, double settle_deadline, double dt) {
    int first = -1, last = -1;
    for (size_t i = 0; i < err.size(); ++i) {
        if (err[i] > limit) {
            if (first < 0) first = static_cast<int>(i);
            last = static_cast<int>(i);
        }
    }
    if (first < 0) return 0.0;
    if (times[last] >= settle_deadline) return kInfResponse;
    return times[last] - times[first] + dt;
}

} // namespace

StepReport measure_response(const std::vector<double>& times,
                            const std::vector<ErrorRecord>& errors,
                            const std::vector<double>& stepped_estimate, double step_time,
                            double step_size, double post_value, const ResponseLimits& limits,
                            double settle_deadline) {
    if (times.size() != errors.size() || times.size() != stepped_estimate.size())
        throw std::invalid_argument("measure_response: series length mismatch");
    if (times.size() < 2) throw std::invalid_argument("measure_response: series too short");
    if (step_time < times.front() || step_time > times.back())
        throw std::invalid_argument("measure_response: step time outside series");
    const double dt = times[1] - times[0];

    auto series = [&](auto pick) {
        std::vector<double> v(errors.size());
        for (size_t i = 0; i < errors.size(); ++i) v[i] = pick(errors[i]);
        return v;
    };

    StepReport rep;
    rep.t_res_tve = response_time(times, series([](const ErrorRecord& e) { return e.tve; }),
                                  limits.tve, settle_deadline, dt);
    rep.t_res_fe = response_time(times, series([](const ErrorRecord& e) { return e.fe_hz; }),
                                 limits.fe_hz, settle_deadline, dt);
    rep.t_res_de = response_time(times, series([](const ErrorRecord& e) { return e.de; }),
                                 limits.de(), settle_deadline, dt);
    rep.t_res_rfe = response_time(times, series([](const ErrorRecord& e) { return e.rfe_hz_s; }),
                                  limits.rfe_hz_s, settle_deadline, dt);
    rep.t_res_rde = response_time(times, series([](const ErrorRecord& e) { return e.rde; }),
                                  limits.rde(), settle_deadline, dt);

    // Overshoot: worst post-step excursion beyond the settled value, in the
    // step direction, relative to the step size.
    const double sign = step_size >= 0.0 ? 1.0 : -1.0;
    double worst = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < step_time) continue;
        worst = std::max(worst, (stepped_estimate[i] - post_value) * sign);
    }
    rep.overshoot_pct = 100.0 * worst / std::abs(step_size);
    return rep;
}

} // namespace sac
