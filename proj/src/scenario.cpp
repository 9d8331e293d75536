#include "sac/scenario.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace sac {

std::string to_string(ScenarioId id) {
    switch (id) {
        case ScenarioId::A1: return "A1";
        case ScenarioId::A2: return "A2";
        case ScenarioId::A3: return "A3";
        case ScenarioId::B1: return "B1";
        case ScenarioId::B2: return "B2";
        case ScenarioId::B3: return "B3";
        case ScenarioId::StepAmp: return "STEP_AMP";
        case ScenarioId::StepPhase: return "STEP_PHASE";
        case ScenarioId::FaultSynth: return "FAULT_SYNTH";
    }
    return "?";
}

ScenarioId scenario_id_from_string(const std::string& s) {
    if (s == "A1") return ScenarioId::A1;
    if (s == "A2") return ScenarioId::A2;
    if (s == "A3") return ScenarioId::A3;
    if (s == "B1") return ScenarioId::B1;
    if (s == "B2") return ScenarioId::B2;
    if (s == "B3") return ScenarioId::B3;
    if (s == "STEP_AMP") return ScenarioId::StepAmp;
    if (s == "STEP_PHASE") return ScenarioId::StepPhase;
    if (s == "FAULT_SYNTH") return ScenarioId::FaultSynth;
    throw std::invalid_argument("unknown scenario id: " + s);
}

ScenarioSpec make_scenario(ScenarioId id) {
    ScenarioSpec s;
    s.id = id;
    switch (id) {
        case ScenarioId::A1:
            s.duration_s = 1.0;
            break;
        case ScenarioId::A2:
            s.duration_s = 1.0;
            s.harmonic_level = 0.01;
            s.harmonic_index = 2;
            break;
        case ScenarioId::A3:
            s.duration_s = 1.0;
            s.harmonic_level = 0.10;
            break;
        case ScenarioId::B1:
            s.duration_s = 33.0;
            break;
        case ScenarioId::B2:
            s.duration_s = 2.5;
            s.mod_freq_hz = 2.0;
            break;
        case ScenarioId::B3:
            s.duration_s = 2.5;
            s.mod_freq_hz = 5.0;
            break;
        case ScenarioId::StepAmp:
        case ScenarioId::StepPhase:
            s.duration_s = 2.0;
            break;
        case ScenarioId::FaultSynth:
            s.duration_s = 5.0;
            break;
    }
    return s;
}

namespace {

// 53-bit uniform in [0,1); platform-independent for a given engine state.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct HarmonicImage {
    double omega;  // baseband image frequency, rad/s
    double level;
    double phase;
};

// Stationary family: fundamental at a fixed offset plus harmonic images.
// A positive-sequence harmonic of order l rides at l*(f0+df) in the real
// signal, so its dq baseband image sits at (l-1)*w0 + l*dw. After the
// runtime shifts by dw the images land on exact multiples of (w0+dw),
// which is where the adapted filter zeros go.
SampleStream generate_stationary(const ScenarioSpec& spec, const SystemConfig& cfg) {
    const size_t count = static_cast<size_t>(std::ceil(spec.duration_s / cfg.t_s)) + 1;
    const double dw = 2.0 * std::numbers::pi * spec.freq_offset_hz;

    std::vector<HarmonicImage> harmonics;
    std::mt19937_64 rng(spec.seed * 0x9E3779B97F4A7C15ULL + 0x1234567ULL);
    auto add_harmonic = [&](int order, double level) {
        harmonics.push_back({(order - 1) * cfg.omega0() + order * dw, level,
                             2.0 * std::numbers::pi * uniform01(rng)});
    };
    if (spec.id == ScenarioId::A2) {
        if (spec.harmonic_index < 2 || spec.harmonic_index > cfg.m_harmonics + 1)
            throw std::invalid_argument("A2: harmonic order must lie in [2, m_harmonics+1]");
        add_harmonic(spec.harmonic_index, spec.harmonic_level);
    } else if (spec.id == ScenarioId::A3) {
        for (int l = 2; l <= spec.n_harmonics + 1; ++l) add_harmonic(l, spec.harmonic_level);
    }

    SampleStream out;
    out.samples.resize(count);
    out.truth.resize(count);
    for (size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) * cfg.t_s;
        const double ph = spec.phase0 + dw * t;
        cplx y = std::polar(1.0, ph);
        for (const auto& h : harmonics) y += h.level * std::polar(1.0, h.omega * t + h.phase);
        out.samples[i] = y;
        out.truth.amp[i] = 1.0;
        out.truth.phase[i] = ph;
        out.truth.freq[i] = dw;
        out.truth.rocof[i] = 0.0;
        out.truth.damping[i] = 0.0;
        out.truth.rocod[i] = 0.0;
    }
    out.fundamental_power = 1.0;
    return out;
}

SampleStream generate_ramp(const ScenarioSpec& spec, const SystemConfig& cfg) {
    const size_t count = static_cast<size_t>(std::ceil(spec.duration_s / cfg.t_s)) + 1;
    const double two_pi = 2.0 * std::numbers::pi;
    const double t1 = spec.ramp_start_s;
    const double t2 = t1 + (spec.ramp_to_hz - spec.ramp_from_hz) / spec.ramp_rate_hz_s;
    const double d0 = spec.ramp_from_hz;
    const double rate = spec.ramp_rate_hz_s;

    SampleStream out;
    out.samples.resize(count);
    out.truth.resize(count);
    for (size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) * cfg.t_s;
        double dev_hz, phase, rocof;
        if (t < t1) {
            dev_hz = d0;
            phase = two_pi * d0 * t;
            rocof = 0.0;
        } else if (t < t2) {
            const double u = t - t1;
            dev_hz = d0 + rate * u;
            phase = two_pi * (d0 * t + 0.5 * rate * u * u);
            rocof = two_pi * rate;
        } else {
            const double span = t2 - t1;
            const double d1 = d0 + rate * span;
            phase = two_pi * (d0 * t2 + 0.5 * rate * span * span) + two_pi * d1 * (t - t2);
            dev_hz = d1;
            rocof = 0.0;
        }
        phase += spec.phase0;
        out.samples[i] = std::polar(1.0, phase);
        out.truth.amp[i] = 1.0;
        out.truth.phase[i] = phase;
        out.truth.freq[i] = two_pi * dev_hz;
        out.truth.rocof[i] = rocof;
        out.truth.damping[i] = 0.0;
        out.truth.rocod[i] = 0.0;
    }
    out.fundamental_power = 1.0;
    return out;
}

SampleStream generate_modulation(const ScenarioSpec& spec, const SystemConfig& cfg) {
    const size_t count = static_cast<size_t>(std::ceil(spec.duration_s / cfg.t_s)) + 1;
    const double wm = 2.0 * std::numbers::pi * spec.mod_freq_hz;
    const double ka = spec.mod_depth_amp;
    const double kp = spec.mod_depth_phase;

    SampleStream out;
    out.samples.resize(count);
    out.truth.resize(count);
    double power = 0.0;
    for (size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) * cfg.t_s;
        const double c = std::cos(wm * t);
        const double s = std::sin(wm * t);
        const double a = 1.0 + ka * c;
        const double ph = spec.phase0 - kp * c;  // kp*cos(wm t - pi)
        out.samples[i] = std::polar(a, ph);
        out.truth.amp[i] = a;
        out.truth.phase[i] = ph;
        out.truth.freq[i] = kp * wm * s;
        out.truth.rocof[i] = kp * wm * wm * c;
        out.truth.damping[i] = ka * wm * s / a;
        out.truth.rocod[i] = ka * wm * wm * (c + ka) / (a * a);
        power += a * a;
    }
    out.fundamental_power = power / static_cast<double>(count);
    return out;
}

SampleStream generate_step(const ScenarioSpec& spec, const SystemConfig& cfg) {
    const size_t count = static_cast<size_t>(std::ceil(spec.duration_s / cfg.t_s)) + 1;
    SampleStream out;
    out.samples.resize(count);
    out.truth.resize(count);
    for (size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) * cfg.t_s;
        const bool post = t >= spec.step_time_s;
        const double a = 1.0 + ((spec.id == ScenarioId::StepAmp && post) ? spec.amp_step_pu : 0.0);
        const double ph =
            spec.phase0 + ((spec.id == ScenarioId::StepPhase && post) ? spec.phase_step_rad : 0.0);
        out.samples[i] = std::polar(a, ph);
        out.truth.amp[i] = a;
        out.truth.phase[i] = ph;
        out.truth.freq[i] = 0.0;
        out.truth.rocof[i] = 0.0;
        out.truth.damping[i] = 0.0;
        out.truth.rocod[i] = 0.0;
    }
    out.fundamental_power = 1.0;
    return out;
}

SampleStream generate_fault(const ScenarioSpec& spec, const SystemConfig& cfg) {
    const size_t count = static_cast<size_t>(std::ceil(spec.duration_s / cfg.t_s)) + 1;
    const cplx p(-spec.fault_sigma, 2.0 * std::numbers::pi * spec.fault_mod_hz);
    const double dip = spec.fault_dip_pu;
    const double swing = 2.0 * std::numbers::pi * spec.fault_swing_hz;

    SampleStream out;
    out.samples.resize(count);
    out.truth.resize(count);
    double power = 0.0;
    for (size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) * cfg.t_s;
        double a = 1.0, ph = spec.phase0, freq = 0.0, rocof = 0.0, damping = 0.0, rocod = 0.0;
        if (t >= spec.fault_time_s) {
            const double u = t - spec.fault_time_s;
            const cplx e = std::exp(p * u);
            a = 1.0 - dip * e.real();
            const double da = -dip * (p * e).real();
            const double dda = -dip * (p * p * e).real();
            damping = -da / a;
            rocod = -(dda * a - da * da) / (a * a);
            freq = swing * e.real();
            rocof = swing * (p * e).real();
            ph = spec.phase0 + swing * ((e - 1.0) / p).real();
        }
        out.samples[i] = std::polar(a, ph);
        out.truth.amp[i] = a;
        out.truth.phase[i] = ph;
        out.truth.freq[i] = freq;
        out.truth.rocof[i] = rocof;
        out.truth.damping[i] = damping;
        out.truth.rocod[i] = rocod;
        power += a * a;
    }
    out.fundamental_power = power / static_cast<double>(count);
    return out;
}

} // namespace

SampleStream generate(const ScenarioSpec& spec, const SystemConfig& cfg) {
    cfg.validate();
    if (spec.duration_s <= 0.0) throw std::invalid_argument("scenario duration must be positive");
    SampleStream out;
    switch (spec.id) {
        case ScenarioId::A1:
        case ScenarioId::A2:
        case ScenarioId::A3:
            out = generate_stationary(spec, cfg);
            break;
        case ScenarioId::B1:
            out = generate_ramp(spec, cfg);
            break;
        case ScenarioId::B2:
        case ScenarioId::B3:
            out = generate_modulation(spec, cfg);
            break;
        case ScenarioId::StepAmp:
        case ScenarioId::StepPhase:
            out = generate_step(spec, cfg);
            break;
        case ScenarioId::FaultSynth:
            out = generate_fault(spec, cfg);
            break;
    }
    if (std::isfinite(spec.snr_db)) add_noise(out, spec.snr_db, spec.seed);
    return out;
}

void add_noise(SampleStream& stream, double snr_db, uint64_t seed) {
    if (!std::isfinite(snr_db)) return;
    const double noise_power = stream.fundamental_power * std::pow(10.0, -snr_db / 10.0);
    const double scale = std::sqrt(0.5 * noise_power);
    std::mt19937_64 rng(seed);
    for (auto& y : stream.samples) {
        // Box-Muller; both components in one draw keeps the noise circular.
        const double u1 = 1.0 - uniform01(rng);
        const double u2 = uniform01(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        y += scale * r * std::polar(1.0, 2.0 * std::numbers::pi * u2);
    }
}

ScenarioSpec scenario_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    ScenarioSpec s = make_scenario(scenario_id_from_string(j.at("id").get<std::string>()));
    auto opt = [&](const char* key, double& field) {
        if (j.contains(key)) field = j.at(key).get<double>();
    };
    opt("duration_s", s.duration_s);
    opt("phase0", s.phase0);
    opt("snr_db", s.snr_db);
    opt("freq_offset_hz", s.freq_offset_hz);
    opt("harmonic_level", s.harmonic_level);
    opt("ramp_start_s", s.ramp_start_s);
    opt("ramp_rate_hz_s", s.ramp_rate_hz_s);
    opt("ramp_from_hz", s.ramp_from_hz);
    opt("ramp_to_hz", s.ramp_to_hz);
    opt("mod_freq_hz", s.mod_freq_hz);
    opt("mod_depth_amp", s.mod_depth_amp);
    opt("mod_depth_phase", s.mod_depth_phase);
    opt("step_time_s", s.step_time_s);
    opt("amp_step_pu", s.amp_step_pu);
    opt("phase_step_rad", s.phase_step_rad);
    opt("fault_time_s", s.fault_time_s);
    opt("fault_sigma", s.fault_sigma);
    opt("fault_mod_hz", s.fault_mod_hz);
    opt("fault_dip_pu", s.fault_dip_pu);
    opt("fault_swing_hz", s.fault_swing_hz);
    if (j.contains("harmonic_index")) s.harmonic_index = j.at("harmonic_index").get<int>();
    if (j.contains("n_harmonics")) s.n_harmonics = j.at("n_harmonics").get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<uint64_t>();
    return s;
}

} // namespace sac
