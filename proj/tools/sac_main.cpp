// Command-line front end: prototype design, scenario generation, stream
// estimation, and the batch test suite.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sac/design.hpp"
#include "sac/io.hpp"
#include "sac/suite.hpp"

namespace {

void add_config_flags(CLI::App* cmd, sac::SystemConfig& cfg) {
    cmd->add_option("--f0", cfg.f0, "nominal frequency, Hz");
    cmd->add_option("--ts", cfg.t_s, "sampling period, s");
    cmd->add_option("-n,--order", cfg.n, "filter order (window length n+1)");
    cmd->add_option("-m,--harmonics", cfg.m_harmonics, "harmonic orders with zeros");
    cmd->add_option("--fs-report", cfg.fs_report, "reporting rate, frames/s");
    cmd->add_option("--k-max", cfg.k_max, "adaptation iteration cap");
    cmd->add_option("--stride", cfg.report_stride, "samples between reports");
}

void add_threshold_flags(CLI::App* cmd, sac::SacThresholds& th) {
    cmd->add_option("--d-omega-min", th.omega_min, "rad/s");
    cmd->add_option("--d-omega-max", th.omega_max, "rad/s");
    cmd->add_option("--d-sigma-min", th.sigma_min, "1/s");
    cmd->add_option("--d-sigma-max", th.sigma_max, "1/s");
    cmd->add_option("--d-alpha-min", th.alpha_min, "rad/s^2");
    cmd->add_option("--d-alpha-max", th.alpha_max, "rad/s^2");
    cmd->add_option("--d-gamma-min", th.gamma_min, "1/s^2");
    cmd->add_option("--d-gamma-max", th.gamma_max, "1/s^2");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-adaptive contractive dynamic phasor estimator"};
    app.require_subcommand(1);

    sac::SystemConfig cfg;
    sac::DesignSpec dspec;
    sac::SacThresholds thresholds;

    // design
    auto* design = app.add_subcommand("design", "design a prototype filter bank");
    std::string bank_out = "bank.json";
    std::string report_out;
    add_config_flags(design, cfg);
    design->add_option("--omega-con", dspec.omega_con, "frequency contractive range, rad/s");
    design->add_option("--alpha-con", dspec.alpha_con, "ROCOF contractive range, rad/s^2");
    design->add_option("--sigma-con", dspec.sigma_con, "damping contractive range, 1/s");
    design->add_option("--gamma-con", dspec.gamma_con, "ROCOD contractive range, 1/s^2");
    design->add_option("--l-omega", dspec.l_omega, "frequency contraction parameter");
    design->add_option("--l-sigma", dspec.l_sigma, "damping contraction parameter");
    design->add_option("--l-alpha", dspec.l_alpha, "ROCOF contraction parameter");
    design->add_option("--l-gamma", dspec.l_gamma, "ROCOD contraction parameter");
    design->add_option("--grid", dspec.grid_density, "constraint points per range");
    design->add_option("-o,--out", bank_out, "output bank JSON path");
    design->add_option("--report", report_out, "design report JSON path");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a test scenario as CSV");
    std::string gen_id = "A1", gen_out = "scenario.csv", gen_json;
    double gen_offset = 0.0, gen_snr = std::numeric_limits<double>::infinity();
    double gen_duration = 0.0;
    uint64_t gen_seed = 1;
    add_config_flags(gen, cfg);
    gen->add_option("--id", gen_id, "A1 A2 A3 B1 B2 B3 STEP_AMP STEP_PHASE FAULT_SYNTH");
    gen->add_option("--offset-hz", gen_offset, "frequency offset for stationary tests");
    gen->add_option("--snr-db", gen_snr, "noise level (omit for noiseless)");
    gen->add_option("--duration", gen_duration, "override duration, s");
    gen->add_option("--seed", gen_seed, "noise/phase seed");
    gen->add_option("--spec-json", gen_json, "scenario JSON file (overrides flags)");
    gen->add_option("-o,--out", gen_out, "output CSV path");

    // run
    auto* run = app.add_subcommand("run", "estimate over a sample stream");
    std::string run_bank, run_csv, run_scenario, run_out = "estimates.csv";
    double run_snr = std::numeric_limits<double>::infinity();
    uint64_t run_seed = 1;
    add_config_flags(run, cfg);
    add_threshold_flags(run, thresholds);
    run->add_option("--bank", run_bank, "filter bank JSON")->required();
    run->add_option("--input", run_csv, "input samples CSV");
    run->add_option("--scenario", run_scenario, "generate this scenario id instead of reading CSV");
    run->add_option("--offset-hz", gen_offset, "offset for generated stationary scenarios");
    run->add_option("--snr-db", run_snr, "noise for generated scenarios");
    run->add_option("--seed", run_seed, "seed for generated scenarios");
    run->add_option("-o,--out", run_out, "output estimates CSV");

    // suite
    auto* suite = app.add_subcommand("suite", "run the batch test suite");
    sac::SuiteConfig sconf;
    std::string suite_bank, suite_json_out = "suite.json", suite_csv_out;
    std::vector<uint64_t> suite_seeds;
    add_config_flags(suite, cfg);
    add_threshold_flags(suite, thresholds);
    suite->add_option("--bank", suite_bank, "filter bank JSON")->required();
    suite->add_option("--snr", sconf.snr_db, "noise level, dB");
    suite->add_option("--seeds", suite_seeds, "noise seeds");
    suite->add_option("--sweep-step-hz", sconf.sweep_step_hz, "offset grid step for A1/A3");
    suite->add_option("--out-json", suite_json_out, "summary JSON path");
    suite->add_option("--out-csv", suite_csv_out, "summary CSV path");
    bool suite_no_a2 = false;
    suite->add_flag("--skip-a2", suite_no_a2, "skip the 11 per-harmonic A2 scans");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*design) {
            cfg.validate();
            dspec.validate();
            const sac::FilterBank bank = sac::design_prototype(cfg, dspec);
            sac::save_bank(bank, bank_out);
            std::cout << "bank written to " << bank_out << '\n';
            const auto cert = sac::certify_contraction(bank, dspec);
            nlohmann::json rep = {
                {"contraction_ratios",
                 {{"omega", cert.omega_ratio},
                  {"sigma", cert.sigma_ratio},
                  {"alpha", cert.alpha_ratio},
                  {"gamma", cert.gamma_ratio}}},
                {"design_meta", bank.design_meta},
            };
            if (!report_out.empty()) {
                std::ofstream os(report_out);
                os << rep.dump(2) << '\n';
            }
            std::cout << rep["contraction_ratios"].dump() << '\n';
        } else if (*gen) {
            cfg.validate();
            sac::ScenarioSpec spec;
            if (!gen_json.empty()) {
                std::ifstream is(gen_json);
                if (!is) throw std::runtime_error("cannot read " + gen_json);
                std::stringstream ss;
                ss << is.rdbuf();
                spec = sac::scenario_from_json(ss.str());
            } else {
                spec = sac::make_scenario(sac::scenario_id_from_string(gen_id));
                spec.freq_offset_hz = gen_offset;
                spec.snr_db = gen_snr;
                spec.seed = gen_seed;
                if (gen_duration > 0.0) spec.duration_s = gen_duration;
            }
            const sac::SampleStream stream = sac::generate(spec, cfg);
            sac::write_stream_csv(stream, cfg, gen_out);
            std::cout << stream.samples.size() << " samples written to " << gen_out << '\n';
        } else if (*run) {
            cfg.validate();
            const sac::FilterBank bank = sac::load_bank(run_bank);
            std::vector<sac::cplx> samples;
            if (!run_scenario.empty()) {
                sac::ScenarioSpec spec =
                    sac::make_scenario(sac::scenario_id_from_string(run_scenario));
                spec.freq_offset_hz = gen_offset;
                spec.snr_db = run_snr;
                spec.seed = run_seed;
                samples = sac::generate(spec, cfg).samples;
            } else if (!run_csv.empty()) {
                samples = sac::read_samples_csv(run_csv, cfg);
            } else {
                throw std::runtime_error("run: need --input or --scenario");
            }
            sac::SacOptions opt;
            opt.thresholds = thresholds;
            sac::SacEstimator est(bank, cfg, opt);
            const auto frames = sac::run_stream(est, samples, 0, cfg.report_stride);
            sac::write_frames_csv(frames, cfg, run_out);
            std::cout << frames.size() << " frames written to " << run_out << '\n';
        } else if (*suite) {
            cfg.validate();
            if (!suite_seeds.empty()) sconf.seeds = suite_seeds;
            sconf.include_a2 = !suite_no_a2;
            sconf.stride_stationary = cfg.report_stride;
            const sac::FilterBank bank = sac::load_bank(suite_bank);
            const sac::SuiteSummary summary = sac::run_suite(bank, thresholds, cfg, sconf);
            const nlohmann::json j = sac::suite_to_json(summary);
            {
                std::ofstream os(suite_json_out);
                os << j.dump(2) << '\n';
            }
            if (!suite_csv_out.empty()) {
                std::ofstream os(suite_csv_out);
                os << sac::suite_to_csv(summary);
            }
            std::cout << j.dump(2) << '\n';
            bool all_pass = true;
            for (const auto& g : sac::evaluate_gates(summary)) {
                const bool ok = g.pass();
                all_pass = all_pass && ok;
                std::cout << (ok ? "[PASS] " : "[FAIL] ") << g.name << " = " << g.value
                          << (g.lower_bound ? " >= " : " <= ") << g.limit << '\n';
            }
            return all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
