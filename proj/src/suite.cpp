#include "sac/suite.hpp"

#include <cmath>
#include <sstream>

namespace sac {

std::vector<EstimateFrame> run_stream(SacEstimator& est, std::span<const cplx> samples,
                                      long start_index, int stride) {
    const int half = est.config().half();
    const int len = est.config().window_len();
    std::vector<EstimateFrame> frames;
    if (static_cast<int>(samples.size()) < len) return frames;
    for (size_t pos = 0; pos + len <= samples.size(); pos += stride) {
        const long center = start_index + static_cast<long>(pos) + half;
        frames.push_back(est.process_report(samples.subspan(pos, len), center));
    }
    return frames;
}

namespace {

TruthSample truth_at(const SampleStream& stream, long report_index) {
    const size_t i = static_cast<size_t>(report_index - stream.start_index);
    return {stream.truth.amp[i],     stream.truth.phase[i], stream.truth.freq[i],
            stream.truth.rocof[i],   stream.truth.damping[i], stream.truth.rocod[i]};
}

struct Accumulator {
    ErrorRecord worst;
    long frames = 0;
    long adapted = 0;
    long iterations = 0;

    void add(const ErrorRecord& e, const EstimateFrame& f) {
        worst.take_max(e);
        ++frames;
        iterations += f.iterations;
        if (f.iterations > 0) ++adapted;
    }
    void fill(TestSummary& s) const {
        s.worst = worst;
        s.frames = frames;
        if (frames > 0) {
            s.mean_iterations = static_cast<double>(iterations) / static_cast<double>(frames);
            s.adapt_fraction = static_cast<double>(adapted) / static_cast<double>(frames);
        }
    }
};

// One independent estimation run; frames inside an exclusion interval are
// skipped when aggregating.
void run_one(const FilterBank& bank, const SacThresholds& th, const SystemConfig& cfg,
             const ScenarioSpec& spec, int stride,
             const std::vector<std::pair<double, double>>& exclusions, Accumulator& acc) {
    SystemConfig run_cfg = cfg;
    run_cfg.report_stride = stride;
    const SampleStream stream = generate(spec, run_cfg);
    SacOptions opt;
    opt.thresholds = th;
    SacEstimator est(bank, run_cfg, opt);
    const auto frames = run_stream(est, stream.samples, stream.start_index, stride);
    for (const auto& f : frames) {
        const double t = static_cast<double>(f.report_index) * run_cfg.t_s;
        bool excluded = false;
        for (const auto& [lo, hi] : exclusions)
            if (t >= lo && t <= hi) { excluded = true; break; }
        if (excluded) continue;
        acc.add(compute_errors(f, truth_at(stream, f.report_index)), f);
    }
}

std::vector<double> offset_grid(double span_hz, double step_hz) {
    const int count = static_cast<int>(std::lround(span_hz / step_hz));
    std::vector<double> g;
    g.reserve(2 * count + 1);
    for (int i = -count; i <= count; ++i) g.push_back(i * step_hz);
    return g;
}

TestSummary run_stationary(const FilterBank& bank, const SacThresholds& th,
                           const SystemConfig& cfg, const SuiteConfig& sc, ScenarioId id) {
    const double span_hz = th.omega_max / (2.0 * std::numbers::pi);
    const double step = (id == ScenarioId::A2) ? sc.sweep_step_hz_a2 : sc.sweep_step_hz;
    const double window_s = cfg.window_len() * cfg.t_s;
    const std::vector<std::pair<double, double>> excl = {{0.0, sc.warmup_s}};

    Accumulator acc;
    uint64_t run_id = 0;
    for (uint64_t seed : sc.seeds) {
        for (double offset : offset_grid(span_hz, step)) {
            const int h_count = (id == ScenarioId::A2) ? cfg.m_harmonics : 1;
            for (int h = 0; h < h_count; ++h) {
                ScenarioSpec spec = make_scenario(id);
                spec.duration_s = sc.warmup_s + sc.measure_s + window_s;
                spec.freq_offset_hz = offset;
                spec.snr_db = sc.snr_db;
                spec.seed = seed * 0x100000001B3ULL + (++run_id);
                if (id == ScenarioId::A2) spec.harmonic_index = 2 + h;
                run_one(bank, th, cfg, spec, sc.stride_stationary, excl, acc);
            }
        }
    }
    TestSummary s;
    acc.fill(s);
    return s;
}

TestSummary run_ramp(const FilterBank& bank, const SacThresholds& th, const SystemConfig& cfg,
                     const SuiteConfig& sc) {
    const double window_s = cfg.window_len() * cfg.t_s;
    Accumulator acc;
    for (uint64_t seed : sc.seeds) {
        ScenarioSpec spec = make_scenario(ScenarioId::B1);
        spec.snr_db = sc.snr_db;
        spec.seed = seed;
        const double t1 = spec.ramp_start_s;
        const double t2 = t1 + (spec.ramp_to_hz - spec.ramp_from_hz) / spec.ramp_rate_hz_s;
        spec.duration_s = t2 + 1.0;
        const std::vector<std::pair<double, double>> excl = {
            {0.0, sc.ramp_warmup_s}, {t1 - window_s, t1 + window_s}, {t2 - window_s, t2 + window_s}};
        run_one(bank, th, cfg, spec, sc.stride_stationary, excl, acc);
    }
    TestSummary s;
    acc.fill(s);
    return s;
}

TestSummary run_modulation(const FilterBank& bank, const SacThresholds& th,
                           const SystemConfig& cfg, const SuiteConfig& sc, ScenarioId id) {
    Accumulator acc;
    const std::vector<std::pair<double, double>> excl = {{0.0, 0.5}};
    for (uint64_t seed : sc.seeds) {
        ScenarioSpec spec = make_scenario(id);
        spec.snr_db = sc.snr_db;
        spec.seed = seed;
        run_one(bank, th, cfg, spec, sc.stride_dynamic, excl, acc);
    }
    TestSummary s;
    acc.fill(s);
    return s;
}

TestSummary run_step(const FilterBank& bank, const SacThresholds& th, const SystemConfig& cfg,
                     const SuiteConfig& sc, ScenarioId id) {
    ScenarioSpec spec = make_scenario(id);
    spec.snr_db = sc.snr_db;
    spec.seed = sc.seeds.empty() ? 1 : sc.seeds.front();
    SystemConfig run_cfg = cfg;
    run_cfg.report_stride = sc.stride_dynamic;
    const SampleStream stream = generate(spec, run_cfg);
    SacOptions opt;
    opt.thresholds = th;
    SacEstimator est(bank, run_cfg, opt);
    const auto frames = run_stream(est, stream.samples, stream.start_index, sc.stride_dynamic);

    // Measurement span around the step; the series must extend past the
    // settle deadline so a stuck metric reads as infinity.
    const double t_lo = spec.step_time_s - 0.25;
    const double t_hi = spec.step_time_s + 0.45;
    const double settle_deadline = spec.step_time_s + 0.35;
    std::vector<double> times, stepped;
    std::vector<ErrorRecord> errs;
    for (const auto& f : frames) {
        const double t = static_cast<double>(f.report_index) * run_cfg.t_s;
        if (t < t_lo || t > t_hi) continue;
        times.push_back(t);
        errs.push_back(compute_errors(f, truth_at(stream, f.report_index)));
        stepped.push_back(id == ScenarioId::StepAmp ? std::abs(f.phasor) : std::arg(f.phasor));
    }
    const double step_size =
        (id == ScenarioId::StepAmp) ? spec.amp_step_pu : spec.phase_step_rad;
    const double post_value =
        (id == ScenarioId::StepAmp) ? 1.0 + spec.amp_step_pu : spec.phase0 + spec.phase_step_rad;

    TestSummary s;
    s.step = measure_response(times, errs, stepped, spec.step_time_s, step_size, post_value,
                              sc.limits, settle_deadline);
    s.frames = static_cast<long>(times.size());
    return s;
}

TestSummary run_fault(const FilterBank& bank, const SacThresholds& th, const SystemConfig& cfg,
                      const SuiteConfig& sc) {
    const double window_s = cfg.window_len() * cfg.t_s;
    Accumulator acc;
    for (uint64_t seed : sc.seeds) {
        ScenarioSpec spec = make_scenario(ScenarioId::FaultSynth);
        spec.snr_db = sc.snr_db;
        spec.seed = seed;
        const std::vector<std::pair<double, double>> excl = {
            {0.0, sc.warmup_s},
            {spec.fault_time_s - window_s, spec.fault_time_s + sc.fault_settle_s}};
        run_one(bank, th, cfg, spec, sc.stride_stationary, excl, acc);
    }
    TestSummary s;
    acc.fill(s);
    return s;
}

} // namespace

SuiteSummary run_suite(const FilterBank& bank, const SacThresholds& th, const SystemConfig& cfg,
                       const SuiteConfig& sc) {
    SuiteSummary out;
    out["A1"] = run_stationary(bank, th, cfg, sc, ScenarioId::A1);
    if (sc.include_a2) out["A2"] = run_stationary(bank, th, cfg, sc, ScenarioId::A2);
    out["A3"] = run_stationary(bank, th, cfg, sc, ScenarioId::A3);
    out["B1"] = run_ramp(bank, th, cfg, sc);
    out["B2"] = run_modulation(bank, th, cfg, sc, ScenarioId::B2);
    out["B3"] = run_modulation(bank, th, cfg, sc, ScenarioId::B3);
    out["STEP_AMP"] = run_step(bank, th, cfg, sc, ScenarioId::StepAmp);
    out["STEP_PHASE"] = run_step(bank, th, cfg, sc, ScenarioId::StepPhase);
    out["FAULT_SYNTH"] = run_fault(bank, th, cfg, sc);
    return out;
}

nlohmann::json suite_to_json(const SuiteSummary& summary) {
    nlohmann::json j;
    for (const auto& [name, s] : summary) {
        nlohmann::json row = {
            {"ae_pu", s.worst.ae},        {"pe_rad", s.worst.pe},
            {"tve_pct", 100.0 * s.worst.tve}, {"fe_hz", s.worst.fe_hz},
            {"de_1_s", s.worst.de},       {"rfe_hz_s", s.worst.rfe_hz_s},
            {"rde_1_s2", s.worst.rde},    {"frames", s.frames},
            {"mean_iterations", s.mean_iterations}, {"adapt_fraction", s.adapt_fraction},
        };
        if (s.step) {
            row["step"] = {{"overshoot_pct", s.step->overshoot_pct},
                           {"t_res_tve_s", s.step->t_res_tve},
                           {"t_res_fe_s", s.step->t_res_fe},
                           {"t_res_de_s", s.step->t_res_de},
                           {"t_res_rfe_s", s.step->t_res_rfe},
                           {"t_res_rde_s", s.step->t_res_rde}};
        }
        j[name] = row;
    }
    return j;
}

std::string suite_to_csv(const SuiteSummary& summary) {
    std::ostringstream os;
    os << "test,ae_pu,pe_rad,tve_pct,fe_hz,de_1_s,rfe_hz_s,rde_1_s2,frames,mean_iterations,"
          "adapt_fraction,overshoot_pct,t_res_tve_s,t_res_fe_s,t_res_de_s,t_res_rfe_s,t_res_rde_s\n";
    for (const auto& [name, s] : summary) {
        os << name << ',' << s.worst.ae << ',' << s.worst.pe << ',' << 100.0 * s.worst.tve << ','
           << s.worst.fe_hz << ',' << s.worst.de << ',' << s.worst.rfe_hz_s << ',' << s.worst.rde
           << ',' << s.frames << ',' << s.mean_iterations << ',' << s.adapt_fraction;
        if (s.step) {
            os << ',' << s.step->overshoot_pct << ',' << s.step->t_res_tve << ','
               << s.step->t_res_fe << ',' << s.step->t_res_de << ',' << s.step->t_res_rfe << ','
               << s.step->t_res_rde;
        } else {
            os << ",,,,,,";
        }
        os << '\n';
    }
    return os.str();
}

std::vector<GateResult> evaluate_gates(const SuiteSummary& summary) {
    std::vector<GateResult> gates;
    auto get = [&](const std::string& name) -> const TestSummary* {
        const auto it = summary.find(name);
        return it == summary.end() ? nullptr : &it->second;
    };
    if (const auto* a1 = get("A1")) {
        gates.push_back({"A1 worst TVE (%)", 100.0 * a1->worst.tve, 0.05});
        gates.push_back({"A1 worst FE (Hz)", a1->worst.fe_hz, 0.005});
        gates.push_back({"A1 worst RFE (Hz/s)", a1->worst.rfe_hz_s, 0.7});
    }
    if (const auto* a3 = get("A3")) {
        gates.push_back({"A3 worst TVE (%)", 100.0 * a3->worst.tve, 0.06});
        gates.push_back({"A3 worst FE (Hz)", a3->worst.fe_hz, 0.03});
    }
    if (const auto* b1 = get("B1")) {
        gates.push_back({"B1 worst FE (Hz)", b1->worst.fe_hz, 0.005});
        gates.push_back({"B1 worst TVE (%)", 100.0 * b1->worst.tve, 0.04});
    }
    if (const auto* b2 = get("B2"))
        gates.push_back({"B2 worst TVE (%)", 100.0 * b2->worst.tve, 0.05});
    if (const auto* b3 = get("B3")) {
        gates.push_back({"B3 worst TVE (%)", 100.0 * b3->worst.tve, 0.12});
        gates.push_back({"B3 mean iterations (min)", b3->mean_iterations, 0.5, true});
        gates.push_back({"B3 mean iterations (max)", b3->mean_iterations, 1.5});
        gates.push_back({"B3 adaptation fraction", b3->adapt_fraction, 0.5, true});
    }
    if (const auto* sa = get("STEP_AMP"); sa && sa->step) {
        gates.push_back({"amp step TVE response (s)", sa->step->t_res_tve, 0.020});
        gates.push_back({"amp step overshoot (%)", sa->step->overshoot_pct, 5.0});
    }
    if (const auto* sp = get("STEP_PHASE"); sp && sp->step) {
        gates.push_back({"phase step TVE response (s)", sp->step->t_res_tve, 0.020});
        gates.push_back({"phase step overshoot (%)", sp->step->overshoot_pct, 5.0});
        gates.push_back({"phase step FE response (s)", sp->step->t_res_fe, 0.040});
    }
    if (const auto* fs = get("FAULT_SYNTH")) {
        gates.push_back({"fault worst FE (Hz)", fs->worst.fe_hz, 0.005});
        gates.push_back({"fault worst DE (1/s)", fs->worst.de, 2.0 * std::numbers::pi * 0.005});
    }
    return gates;
}

} // namespace sac
