#include "sac/estimator.hpp"

#include <cmath>

#include "sac/design.hpp"
#include "sac/qp.hpp"

namespace sac {

namespace {

double clamp_mag(double v, double limit) { return std::clamp(v, -limit, limit); }

} // namespace

PriorParams init_priors(const std::optional<EstimateFrame>& prev, double dt,
                        const SacThresholds& th) {
    if (!prev || !prev->valid) return {};
    PriorParams p;
    p.omega = clamp_mag(prev->freq + dt * prev->rocof, th.omega_max);
    p.alpha = clamp_mag(prev->rocof, th.alpha_max);
    p.sigma = clamp_mag(prev->damping + dt * prev->rocod, th.sigma_max);
    p.gamma = clamp_mag(prev->rocod, th.gamma_max);
    return p;
}

UnshiftResult unshift_estimates(const RawEstimates& raw, const PriorParams& p,
                                const SacThresholds& th) {
    UnshiftResult out;
    auto unshift_one = [](double est, double prior, double max, bool& rejected) {
        const double sum = est + prior;
        if (std::abs(sum) <= max) return sum;
        rejected = true;
        return prior;
    };
    out.omega = unshift_one(raw.omega, p.omega, th.omega_max, out.rejected.omega);
    out.alpha = unshift_one(raw.alpha, p.alpha, th.alpha_max, out.rejected.alpha);
    out.sigma = unshift_one(raw.sigma, p.sigma, th.sigma_max, out.rejected.sigma);
    out.gamma = unshift_one(raw.gamma, p.gamma, th.gamma_max, out.rejected.gamma);
    return out;
}

ParamSet adaptation_set(const RawEstimates& raw, const SacThresholds& th) {
    ParamSet set;
    auto in_band = [](double v, double lo, double hi) {
        const double mag = std::abs(v);
        return mag >= lo && mag <= hi;
    };
    set.omega = in_band(raw.omega, th.omega_min, th.omega_max);
    set.alpha = in_band(raw.alpha, th.alpha_min, th.alpha_max);
    set.sigma = in_band(raw.sigma, th.sigma_min, th.sigma_max);
    set.gamma = in_band(raw.gamma, th.gamma_min, th.gamma_max);
    return set;
}

PriorParams update_priors(const PriorParams& p, const UnshiftResult& est, const ParamSet& set) {
    PriorParams out = p;
    if (set.omega) out.omega = est.omega;
    if (set.alpha) out.alpha = est.alpha;
    if (set.sigma) out.sigma = est.sigma;
    if (set.gamma) out.gamma = est.gamma;
    return out;
}

FilterBank adapt_filters(const FilterBank& prototype, double freq_est, const SystemConfig& cfg,
                         HarmonicPlacement placement) {
    const int half = prototype.half();
    const double w0 = cfg.omega0();
    const double t = cfg.t_s;

    std::vector<double> zero_freqs(cfg.m_harmonics);
    for (int l = 1; l <= cfg.m_harmonics; ++l) {
        zero_freqs[l - 1] = (placement == HarmonicPlacement::FundamentalMultiples)
                                ? l * (w0 + freq_est)
                                : (l - 1) * w0 + l * freq_est;
    }

    auto even_rows = [&](bool include_dc) {
        const int rows = cfg.m_harmonics + (include_dc ? 1 : 0);
        Eigen::MatrixXd g(rows, half + 1);
        int r = 0;
        auto fill = [&](double w) {
            g(r, 0) = 1.0;
            for (int m = 1; m <= half; ++m) g(r, m) = std::cos(w * t * m);
            ++r;
        };
        if (include_dc) fill(0.0);
        for (double wz : zero_freqs) fill(wz);
        return g;
    };

    auto to_eigen = [](const std::vector<double>& v) {
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    };

    FilterBank out = prototype;
    out.provenance = "adapted";
    try {
        {
            const Eigen::MatrixXd g = even_rows(true);
            Eigen::VectorXd c = Eigen::VectorXd::Zero(g.rows());
            c(0) = 1.0;
            const Eigen::VectorXd a =
                solve_equality_min_norm(weight_p0(prototype.n), g, c, to_eigen(prototype.a0));
            out.a0.assign(a.data(), a.data() + a.size());
        }
        {
            Eigen::MatrixXd g(cfg.m_harmonics, half);
            for (int l = 0; l < cfg.m_harmonics; ++l)
                for (int m = 1; m <= half; ++m) g(l, m - 1) = std::sin(zero_freqs[l] * t * m);
            const Eigen::VectorXd a =
                solve_equality_min_norm(weight_p1(prototype.n), g,
                                        Eigen::VectorXd::Zero(cfg.m_harmonics), to_eigen(prototype.a1));
            out.a1.assign(a.data(), a.data() + a.size());
        }
        {
            const Eigen::MatrixXd g = even_rows(true);
            const Eigen::VectorXd a =
                solve_equality_min_norm(weight_p0(prototype.n), g, Eigen::VectorXd::Zero(g.rows()),
                                        to_eigen(prototype.a2));
            out.a2.assign(a.data(), a.data() + a.size());
        }
    } catch (const ConstraintError& e) {
        throw std::runtime_error(std::string("adapt_filters: harmonic constraints degenerate: ") +
                                 e.what());
    }
    return out;
}

SacEstimator::SacEstimator(FilterBank prototype, SystemConfig cfg, SacOptions opt)
    : prototype_(std::move(prototype)), bank_(prototype_), cfg_(cfg), opt_(opt) {
    cfg_.validate();
    opt_.thresholds.validate();
    prototype_.check_shape();
    dt_ = cfg_.report_stride * cfg_.t_s;
}

void SacEstimator::reset() {
    bank_ = prototype_;
    prev_.reset();
}

EstimateFrame SacEstimator::process_report(std::span<const cplx> window, long report_index,
                                           IterationTrace* trace) {
    const SacThresholds& th = opt_.thresholds;
    PriorParams priors = init_priors(prev_, dt_, th);

    EstimateFrame frame;
    frame.report_index = report_index;
    frame.adapted_filters = false;

    int k = 0;
    Window shifted = parameter_shift(window, priors, cfg_);
    RawEstimates raw = apply_filter_bank(shifted, bank_, opt_.z_guard_rel);
    if (trace) {
        trace->priors.push_back(priors);
        trace->fired.push_back({});
    }

    UnshiftResult est;
    ParamSet pk;
    bool guard_tripped = !raw.valid;
    if (raw.valid) {
        est = unshift_estimates(raw, priors, th);
        pk = adaptation_set(raw, th);

        while (pk.any() && k < cfg_.k_max) {
            priors = update_priors(priors, est, pk);
            ++k;
            if (trace) {
                trace->priors.push_back(priors);
                trace->fired.push_back(pk);
            }

            shifted = parameter_shift(window, priors, cfg_);
            if (pk.omega) {
                // Frequency prior moved: re-place the harmonic zeros. Adaptation
                // always starts from the prototype coefficients.
                try {
                    bank_ = adapt_filters(prototype_, priors.omega, cfg_, opt_.placement);
                    frame.adapted_filters = true;
                } catch (const std::exception&) {
                    // Keep the previous bank on a degenerate constraint system.
                }
            }
            raw = apply_filter_bank(shifted, bank_, opt_.z_guard_rel);
            if (!raw.valid) {
                guard_tripped = true;
                break;
            }
            est = unshift_estimates(raw, priors, th);
            pk = adaptation_set(raw, th);
        }
    }

    frame.iterations = k;
    if (guard_tripped) {
        // Step-rejection path: the phasor estimate is unusable, report priors.
        frame.valid = false;
        frame.phasor = raw.z;
        frame.freq = priors.omega;
        frame.rocof = priors.alpha;
        frame.damping = priors.sigma;
        frame.rocod = priors.gamma;
        frame.clamped = ParamSet{true, true, true, true};
    } else {
        frame.valid = true;
        frame.phasor = raw.z;  // amplitude and phase pass through unshifted
        frame.freq = est.omega;
        frame.rocof = est.alpha;
        frame.damping = est.sigma;
        frame.rocod = est.gamma;
        frame.clamped = est.rejected;
    }

    if (opt_.revert_to_prototype && frame.valid && std::abs(frame.freq) < th.omega_min &&
        bank_.provenance != "prototype") {
        bank_ = prototype_;
    }

    prev_ = frame;
    return frame;
}

} // namespace sac
