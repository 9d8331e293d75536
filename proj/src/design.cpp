#include "sac/design.hpp"

#include <algorithm>
#include <cmath>

#include "sac/qp.hpp"

namespace sac {

namespace {

Eigen::VectorXd g0_row(double w, int half) {
    Eigen::VectorXd g(half + 1);
    g(0) = 1.0;
    for (int m = 1; m <= half; ++m) g(m) = std::cos(w * m);
    return g;
}

Eigen::VectorXd g1_row(double w, int half) {
    Eigen::VectorXd g(half);
    for (int m = 1; m <= half; ++m) g(m - 1) = std::sin(w * m);
    return g;
}

double eval_even(const std::vector<double>& a, double w) {
    double acc = a[0];
    for (size_t m = 1; m < a.size(); ++m) acc += a[m] * std::cos(w * static_cast<double>(m));
    return acc;
}

double eval_even_hyp(const std::vector<double>& a, double s) {
    double acc = a[0];
    for (size_t m = 1; m < a.size(); ++m) acc += a[m] * std::cosh(s * static_cast<double>(m));
    return acc;
}

double eval_odd(const std::vector<double>& a, double w) {
    double acc = 0.0;
    for (size_t j = 0; j < a.size(); ++j) acc += a[j] * std::sin(w * static_cast<double>(j + 1));
    return acc;
}

double eval_odd_hyp(const std::vector<double>& a, double s) {
    double acc = 0.0;
    for (size_t j = 0; j < a.size(); ++j) acc += a[j] * std::sinh(s * static_cast<double>(j + 1));
    return acc;
}

cplx eval_chirp(const std::vector<double>& a, double c) {
    cplx acc = a[0];
    for (size_t m = 1; m < a.size(); ++m)
        acc += a[m] * std::polar(1.0, 0.5 * c * static_cast<double>(m * m));
    return acc;
}

double eval_gauss(const std::vector<double>& a, double g) {
    double acc = a[0];
    for (size_t m = 1; m < a.size(); ++m)
        acc += a[m] * std::exp(-0.5 * g * static_cast<double>(m * m));
    return acc;
}

// Positive half of a symmetric grid over (0, range], endpoint included.
std::vector<double> half_grid(double range, int points) {
    std::vector<double> g(points);
    for (int i = 1; i <= points; ++i) g[i - 1] = range * static_cast<double>(i) / points;
    return g;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::MatrixXd harmonic_rows_even(const SystemConfig& cfg, bool include_dc) {
    const int half = cfg.half();
    const double w0t = cfg.omega0() * cfg.t_s;
    const int rows = cfg.m_harmonics + (include_dc ? 1 : 0);
    Eigen::MatrixXd g(rows, half + 1);
    int r = 0;
    if (include_dc) g.row(r++) = g0_row(0.0, half).transpose();
    for (int l = 1; l <= cfg.m_harmonics; ++l) g.row(r++) = g0_row(l * w0t, half).transpose();
    return g;
}

} // namespace

Eigen::VectorXd weight_p0(int n) {
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n / 2 + 1, 0.5);
    p(0) = 1.0;
    return p;
}

Eigen::VectorXd weight_p1(int n) { return Eigen::VectorXd::Constant(n / 2, 0.5); }

std::vector<double> design_a0(const SystemConfig& cfg, const DesignSpec& spec) {
    cfg.validate();
    spec.validate();
    const int half = cfg.half();
    if (cfg.m_harmonics + 1 > half + 1)
        throw std::invalid_argument("design_a0: more harmonic constraints than coefficients");

    Eigen::MatrixXd g = harmonic_rows_even(cfg, true);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(g.rows());
    c(0) = 1.0;

    // Tail-mass caps keep the step response inside the response-time budget;
    // the tail of the expanded taps from offset d is (1/2) sum_{m>=d} a0[m].
    Eigen::MatrixXd a_ineq(0, half + 1);
    Eigen::VectorXd b_ineq(0);
    if (spec.step_tail_start > 0) {
        const int first = std::max(1, spec.step_tail_start);
        const int rows = 2 * std::max(0, half - first + 1);
        a_ineq.resize(rows, half + 1);
        b_ineq.resize(rows);
        int r = 0;
        for (int d = first; d <= half; ++d) {
            Eigen::VectorXd row = Eigen::VectorXd::Zero(half + 1);
            for (int m = d; m <= half; ++m) row(m) = 0.5;
            a_ineq.row(r) = row.transpose();           // tail >= -bound
            b_ineq(r++) = -spec.step_tail_bound;
            a_ineq.row(r) = -row.transpose();          // tail <= bound
            b_ineq(r++) = -spec.step_tail_bound;
        }
    }

    const Eigen::VectorXd a =
        solve_qp_active_set(weight_p0(cfg.n), g, c, a_ineq, b_ineq,
                            Eigen::VectorXd::Zero(half + 1))
            .x;
    const std::vector<double> a0 = to_std(a);

    // The division-free contractive forms for a1 require strictly positive
    // even responses over the design ranges.
    for (double w : half_grid(spec.omega_con * cfg.t_s, 2000))
        if (eval_even(a0, w) <= 0.0)
            throw std::runtime_error(
                "design_a0: A0 not positive over the frequency range; increase n or reduce omega_con");
    for (double s : half_grid(spec.sigma_con * cfg.t_s, 2000))
        if (eval_even_hyp(a0, s) <= 0.0)
            throw std::runtime_error(
                "design_a0: hyperbolic response not positive over the damping range");
    return a0;
}

namespace {

struct IneqRows {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    std::vector<std::pair<char, double>> origin;  // quantity tag + physical grid value
};

void append_pair(IneqRows& rows, const Eigen::VectorXd& g, double lo, double hi, char tag,
                 double at) {
    // lo <= g'x <= hi as two >= rows
    const int r = static_cast<int>(rows.a.rows());
    rows.a.conservativeResize(r + 2, g.size());
    rows.b.conservativeResize(r + 2);
    rows.a.row(r) = g.transpose();
    rows.b(r) = lo;
    rows.a.row(r + 1) = -g.transpose();
    rows.b(r + 1) = -hi;
    rows.origin.emplace_back(tag, at);
    rows.origin.emplace_back(tag, at);
}

[[noreturn]] void rethrow_with_frequency(const ConstraintError& e, const IneqRows& rows) {
    const int idx = e.row;
    if (idx >= 0 && idx < static_cast<int>(rows.origin.size())) {
        const auto [tag, at] = rows.origin[idx];
        throw std::runtime_error(std::string("design QP infeasible near ") + tag + " = " +
                                 std::to_string(at));
    }
    throw std::runtime_error(std::string("design QP infeasible: ") + e.what());
}

} // namespace

std::vector<double> design_a1(const std::vector<double>& a0, const SystemConfig& cfg,
                              const DesignSpec& spec) {
    cfg.validate();
    spec.validate();
    const int half = cfg.half();
    const double t = cfg.t_s;
    const double w0t = cfg.omega0() * t;

    Eigen::MatrixXd g_eq(cfg.m_harmonics, half);
    for (int l = 1; l <= cfg.m_harmonics; ++l) g_eq.row(l - 1) = g1_row(l * w0t, half).transpose();
    const Eigen::VectorXd c_eq = Eigen::VectorXd::Zero(cfg.m_harmonics);

    // f odd in both quantities, so the positive half-grid carries the full
    // constraint set.
    std::vector<double> omega_pts = half_grid(spec.omega_con, spec.grid_density / 2);
    std::vector<double> sigma_pts = half_grid(spec.sigma_con, spec.grid_density / 2);
    const double l_omega_eff = spec.l_omega * (1.0 - spec.l_omega_headroom);

    auto build = [&](const std::vector<double>& wpts, const std::vector<double>& spts) {
        IneqRows rows;
        rows.a.resize(0, half);
        rows.b.resize(0);
        for (double w : wpts) {
            const double a0w = eval_even(a0, w * t);
            const double slack = l_omega_eff * std::abs(w) * a0w;
            append_pair(rows, g1_row(w * t, half), w * a0w - slack, w * a0w + slack, 'w', w);
        }
        for (double s : spts) {
            const double a0s = eval_even_hyp(a0, s * t);
            const double slack = spec.l_sigma * std::abs(s) * a0s;
            Eigen::VectorXd gh(half);
            for (int m = 1; m <= half; ++m) gh(m - 1) = std::sinh(s * t * m);
            append_pair(rows, gh, s * a0s - slack, s * a0s + slack, 's', s);
        }
        return rows;
    };

    const Eigen::VectorXd p = weight_p1(cfg.n);
    const Eigen::VectorXd center = Eigen::VectorXd::Zero(half);
    std::vector<double> a1;
    for (int round = 0;; ++round) {
        IneqRows rows = build(omega_pts, sigma_pts);
        try {
            a1 = to_std(solve_qp_active_set(p, g_eq, c_eq, rows.a, rows.b, center).x);
        } catch (const ConstraintError& e) {
            rethrow_with_frequency(e, rows);
        }

        // Audit on a 4x finer grid; re-solve with the violating points added.
        bool clean = true;
        for (double w : half_grid(spec.omega_con, 2 * spec.grid_density)) {
            const double ratio = std::abs(w - eval_odd(a1, w * t) / eval_even(a0, w * t)) / std::abs(w);
            if (ratio > l_omega_eff + spec.refine_tol) {
                omega_pts.push_back(w);
                clean = false;
            }
        }
        for (double s : half_grid(spec.sigma_con, 2 * spec.grid_density)) {
            const double ratio =
                std::abs(s - eval_odd_hyp(a1, s * t) / eval_even_hyp(a0, s * t)) / std::abs(s);
            if (ratio > spec.l_sigma + spec.refine_tol) {
                sigma_pts.push_back(s);
                clean = false;
            }
        }
        if (clean) return a1;
        if (round >= spec.max_refine_rounds)
            throw std::runtime_error("design_a1: grid refinement did not converge");
    }
}

std::vector<double> design_a2(const std::vector<double>& a0, const std::vector<double>& a1,
                              const SystemConfig& cfg, const DesignSpec& spec) {
    cfg.validate();
    spec.validate();
    (void)a1;  // enters the estimate only through terms that vanish on even windows
    const int half = cfg.half();
    const double t2 = cfg.t_s * cfg.t_s;

    Eigen::MatrixXd g_eq = harmonic_rows_even(cfg, true);
    const Eigen::VectorXd c_eq = Eigen::VectorXd::Zero(g_eq.rows());

    std::vector<double> alpha_pts = half_grid(spec.alpha_con, spec.grid_density / 2);
    std::vector<double> gamma_pts;  // both signs: no symmetry for the Gaussian model
    for (double g : half_grid(spec.gamma_con, spec.grid_density / 2)) {
        gamma_pts.push_back(g);
        gamma_pts.push_back(-g);
    }

    auto s0_at = [&](double alpha) { return eval_chirp(a0, alpha * t2); };
    auto r0_at = [&](double gamma) { return eval_gauss(a0, gamma * t2); };

    for (double al : half_grid(spec.alpha_con, 2000))
        if (std::abs(s0_at(al)) < 1e-9)
            throw std::runtime_error("design_a2: chirp response of a0 vanishes in range");
    for (double gm : half_grid(spec.gamma_con, 1000)) {
        if (r0_at(gm) <= 0.0 || r0_at(-gm) <= 0.0)
            throw std::runtime_error("design_a2: Gaussian response of a0 not positive in range");
    }

    auto build = [&](const std::vector<double>& apts, const std::vector<double>& gpts) {
        IneqRows rows;
        rows.a.resize(0, half + 1);
        rows.b.resize(0);
        for (double al : apts) {
            // alpha_hat(al) = Im{S2(al)/S0(al)} is linear in a2
            const cplx s0 = s0_at(al);
            Eigen::VectorXd g(half + 1);
            g(0) = (cplx(1.0, 0.0) / s0).imag();
            for (int m = 1; m <= half; ++m)
                g(m) = (std::polar(1.0, 0.5 * al * t2 * m * m) / s0).imag();
            const double slack = spec.l_alpha * std::abs(al);
            append_pair(rows, g, al - slack, al + slack, 'a', al);
        }
        for (double gm : gpts) {
            // gamma_hat(gm) = -R2(gm)/R0(gm)
            const double r0 = r0_at(gm);
            Eigen::VectorXd g(half + 1);
            g(0) = -1.0 / r0;
            for (int m = 1; m <= half; ++m)
                g(m) = -std::exp(-0.5 * gm * t2 * m * m) / r0;
            const double slack = spec.l_gamma * std::abs(gm);
            append_pair(rows, g, gm - slack, gm + slack, 'g', gm);
        }
        return rows;
    };

    const Eigen::VectorXd p = weight_p0(cfg.n);
    const Eigen::VectorXd center = Eigen::VectorXd::Zero(half + 1);
    std::vector<double> a2;
    for (int round = 0;; ++round) {
        IneqRows rows = build(alpha_pts, gamma_pts);
        try {
            a2 = to_std(solve_qp_active_set(p, g_eq, c_eq, rows.a, rows.b, center).x);
        } catch (const ConstraintError& e) {
            rethrow_with_frequency(e, rows);
        }

        bool clean = true;
        for (double al : half_grid(spec.alpha_con, 2 * spec.grid_density)) {
            const double est = (eval_chirp(a2, al * t2) / s0_at(al)).imag();
            if (std::abs(al - est) / std::abs(al) > spec.l_alpha + spec.refine_tol) {
                alpha_pts.push_back(al);
                clean = false;
            }
        }
        for (double gm : half_grid(spec.gamma_con, 2 * spec.grid_density)) {
            for (double sgn : {1.0, -1.0}) {
                const double g = sgn * gm;
                const double est = -eval_gauss(a2, g * t2) / r0_at(g);
                if (std::abs(g - est) / std::abs(g) > spec.l_gamma + spec.refine_tol) {
                    gamma_pts.push_back(g);
                    clean = false;
                }
            }
        }
        if (clean) return a2;
        if (round >= spec.max_refine_rounds)
            throw std::runtime_error("design_a2: grid refinement did not converge");
    }
}

ContractionCertificate certify_contraction(const FilterBank& bank, const DesignSpec& spec,
                                           int grid_points) {
    ContractionCertificate cert;
    const double t = bank.t_s;
    const int hp = grid_points / 2;

    for (double w : half_grid(spec.omega_con, hp)) {
        const double ratio =
            std::abs(w - amplitude_response(bank, 1, w * t) / amplitude_response(bank, 0, w * t)) /
            std::abs(w);
        if (ratio > cert.omega_ratio) { cert.omega_ratio = ratio; cert.omega_worst_at = w; }
    }
    for (double s : half_grid(spec.sigma_con, hp)) {
        const double ratio =
            std::abs(s - hyperbolic_response(bank, 1, s * t) / hyperbolic_response(bank, 0, s * t)) /
            std::abs(s);
        if (ratio > cert.sigma_ratio) { cert.sigma_ratio = ratio; cert.sigma_worst_at = s; }
    }
    const double t2 = t * t;
    for (double al : half_grid(spec.alpha_con, hp)) {
        const double est = (chirp_response(bank, 2, al * t2) / chirp_response(bank, 0, al * t2)).imag();
        const double ratio = std::abs(al - est) / std::abs(al);
        if (ratio > cert.alpha_ratio) { cert.alpha_ratio = ratio; cert.alpha_worst_at = al; }
    }
    for (double gm : half_grid(spec.gamma_con, hp)) {
        for (double sgn : {1.0, -1.0}) {
            const double g = sgn * gm;
            const double est = -gaussian_response(bank, 2, g * t2) / gaussian_response(bank, 0, g * t2);
            const double ratio = std::abs(g - est) / std::abs(g);
            if (ratio > cert.gamma_ratio) { cert.gamma_ratio = ratio; cert.gamma_worst_at = g; }
        }
    }
    return cert;
}

FilterBank design_prototype(const SystemConfig& cfg, const DesignSpec& spec) {
    FilterBank bank;
    bank.n = cfg.n;
    bank.t_s = cfg.t_s;
    bank.f0 = cfg.f0;
    bank.m_harmonics = cfg.m_harmonics;
    bank.provenance = "prototype";
    bank.a0 = design_a0(cfg, spec);
    bank.a1 = design_a1(bank.a0, cfg, spec);
    bank.a2 = design_a2(bank.a0, bank.a1, cfg, spec);
    check_prototype(bank);

    const ContractionCertificate cert = certify_contraction(bank, spec);
    double harm_resid = 0.0;
    const double w0t = cfg.omega0() * cfg.t_s;
    for (int l = 1; l <= cfg.m_harmonics; ++l)
        for (int i : {0, 1, 2})
            harm_resid = std::max(harm_resid, std::abs(amplitude_response(bank, i, l * w0t)));

    auto norm_of = [](const std::vector<double>& a, const Eigen::VectorXd& p) {
        double acc = 0.0;
        for (size_t i = 0; i < a.size(); ++i) acc += p(static_cast<int>(i)) * a[i] * a[i];
        return acc;
    };
    bank.design_meta = {
        {"omega_con", spec.omega_con},
        {"sigma_con", spec.sigma_con},
        {"alpha_con", spec.alpha_con},
        {"gamma_con", spec.gamma_con},
        {"l_omega", spec.l_omega},
        {"l_sigma", spec.l_sigma},
        {"l_alpha", spec.l_alpha},
        {"l_gamma", spec.l_gamma},
        {"grid_density", spec.grid_density},
        {"contraction_ratios",
         {{"omega", cert.omega_ratio},
          {"sigma", cert.sigma_ratio},
          {"alpha", cert.alpha_ratio},
          {"gamma", cert.gamma_ratio}}},
        {"filter_norms",
         {norm_of(bank.a0, weight_p0(cfg.n)), norm_of(bank.a1, weight_p1(cfg.n)),
          norm_of(bank.a2, weight_p0(cfg.n))}},
        {"max_harmonic_residual", harm_resid},
    };
    return bank;
}

} // namespace sac
