#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sac/signal_model.hpp"
#include "sac/system_config.hpp"

namespace sac {

/// Per-sample true parameter tracks. All derivatives are analytic, never
/// finite differences; freq/rocof are baseband deviations (rad/s, rad/s^2).
struct GroundTruthTrack {
    std::vector<double> amp;      // pu
    std::vector<double> phase;    // rad
    std::vector<double> freq;     // rad/s
    std::vector<double> rocof;    // rad/s^2
    std::vector<double> damping;  // 1/s
    std::vector<double> rocod;    // 1/s^2
    void resize(size_t n) {
        amp.resize(n); phase.resize(n); freq.resize(n);
        rocof.resize(n); damping.resize(n); rocod.resize(n);
    }
};

struct SampleStream {
    std::vector<cplx> samples;
    long start_index = 0;
    GroundTruthTrack truth;
    double fundamental_power = 1.0;  // mean |X|^2 of the clean fundamental
};

enum class ScenarioId { A1, A2, A3, B1, B2, B3, StepAmp, StepPhase, FaultSynth };

std::string to_string(ScenarioId id);
ScenarioId scenario_id_from_string(const std::string& s);

struct ScenarioSpec {
    ScenarioId id = ScenarioId::A1;
    double duration_s = 1.0;
    double phase0 = 0.0;
    uint64_t seed = 1;
    double snr_db = std::numeric_limits<double>::infinity();  // inf = noiseless

    // stationary tests
    double freq_offset_hz = 0.0;
    int harmonic_index = 2;       // A2: injected harmonic order, in [2, M+1]
    double harmonic_level = 0.01; // fraction of the fundamental amplitude
    int n_harmonics = 11;         // A3: orders 2 .. n_harmonics+1

    // frequency ramp (offsets relative to nominal)
    double ramp_start_s = 1.0;
    double ramp_rate_hz_s = 1.0;
    double ramp_from_hz = -15.0;
    double ramp_to_hz = 15.0;

    // amplitude/phase modulation
    double mod_freq_hz = 2.0;
    double mod_depth_amp = 0.1;
    double mod_depth_phase = 0.1;

    // steps
    double step_time_s = 1.0;
    double amp_step_pu = 0.1;
    double phase_step_rad = std::numbers::pi / 18.0;

    // synthetic fault: step-initiated damped oscillation
    double fault_time_s = 1.0;
    double fault_sigma = 2.0;     // ring-down rate, 1/s
    double fault_mod_hz = 1.0;    // ring frequency
    double fault_dip_pu = 0.2;    // initial amplitude dip
    double fault_swing_hz = 0.5;  // initial frequency swing
};

/// Default parameterization of each test id (duration, depths, levels).
ScenarioSpec make_scenario(ScenarioId id);

/// Synthesizes the baseband stream with its exact truth track. Noise is
/// applied when spec.snr_db is finite.
SampleStream generate(const ScenarioSpec& spec, const SystemConfig& cfg);

/// Adds circular complex white Gaussian noise at the given SNR relative to
/// the stream's fundamental power. Deterministic under seed.
void add_noise(SampleStream& stream, double snr_db, uint64_t seed);

ScenarioSpec scenario_from_json(const std::string& json_text);

} // namespace sac
