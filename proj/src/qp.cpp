#include "sac/qp.hpp"

#include <cmath>
#include <limits>

namespace sac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int find_redundant_row(const Eigen::MatrixXd& g) {
    // Column pivoting on G^T orders rows by independence; the first column
    // left out of the pivot sequence is a dependent row.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g.transpose());
    const int rank = static_cast<int>(qr.rank());
    const auto perm = qr.colsPermutation().indices();
    std::vector<bool> independent(g.rows(), false);
    for (int i = 0; i < rank; ++i) independent[perm[i]] = true;
    for (int i = 0; i < g.rows(); ++i)
        if (!independent[i]) return i;
    return static_cast<int>(g.rows()) - 1;
}

} // namespace

Eigen::VectorXd solve_equality_min_norm(const Eigen::VectorXd& p_diag, const Eigen::MatrixXd& g,
                                        const Eigen::VectorXd& c, const Eigen::VectorXd& center) {
    if (g.rows() == 0) return center;
    if (g.cols() != p_diag.size() || c.size() != g.rows() || center.size() != p_diag.size())
        throw std::invalid_argument("solve_equality_min_norm: dimension mismatch");
    if ((p_diag.array() <= 0.0).any())
        throw std::invalid_argument("solve_equality_min_norm: P must be positive");

    const Eigen::VectorXd p_inv = p_diag.cwiseInverse();
    const Eigen::MatrixXd gpi = g * p_inv.asDiagonal();          // G P^{-1}
    const Eigen::MatrixXd s = gpi * g.transpose();               // G P^{-1} G^T
    Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
    const Eigen::VectorXd resid0 = c - g * center;
    Eigen::VectorXd a;
    if (ldlt.info() == Eigen::Success) {
        const Eigen::VectorXd lambda = ldlt.solve(resid0);
        a = center + p_inv.asDiagonal() * (g.transpose() * lambda);
    }
    const double scale = std::max({1.0, c.lpNorm<Eigen::Infinity>(), center.lpNorm<Eigen::Infinity>()});
    if (ldlt.info() != Eigen::Success || !a.allFinite() ||
        (g * a - c).lpNorm<Eigen::Infinity>() > 1e-9 * scale) {
        const int row = find_redundant_row(g);
        throw ConstraintError("equality system is rank deficient or inconsistent (row " +
                                  std::to_string(row) + ")",
                              row);
    }
    return a;
}

QpResult solve_qp_active_set(const Eigen::VectorXd& p_diag, const Eigen::MatrixXd& g_eq,
                             const Eigen::VectorXd& c_eq, const Eigen::MatrixXd& a_ineq,
                             const Eigen::VectorXd& b_ineq, const Eigen::VectorXd& center,
                             int max_iterations) {
    const int nv = static_cast<int>(p_diag.size());
    const int me = static_cast<int>(g_eq.rows());
    const int mi = static_cast<int>(a_ineq.rows());
    if ((me > 0 && g_eq.cols() != nv) || (mi > 0 && a_ineq.cols() != nv))
        throw std::invalid_argument("solve_qp_active_set: dimension mismatch");

    // Normalize inequality rows; keeps step-length and feasibility tests scale free.
    Eigen::MatrixXd an = a_ineq;
    Eigen::VectorXd bn = b_ineq;
    for (int i = 0; i < mi; ++i) {
        const double nrm = an.row(i).norm();
        if (nrm <= 0.0)
            throw std::invalid_argument("solve_qp_active_set: zero inequality row " + std::to_string(i));
        an.row(i) /= nrm;
        bn(i) /= nrm;
    }

    const Eigen::VectorXd h_inv = (0.5 * p_diag.cwiseInverse());  // H = 2P
    Eigen::VectorXd x = solve_equality_min_norm(p_diag, g_eq, c_eq, center);

    std::vector<int> active;        // inequality rows in the working set
    std::vector<double> u;          // their multipliers (>= 0)
    const double tol_feas = 1e-11;
    const double tol_dir = 1e-13;

    auto constraint_value = [&](int i) { return an.row(i).dot(x) - bn(i); };

    int iter = 0;
    while (true) {
        // Most violated inactive constraint.
        int p = -1;
        double worst = -tol_feas;
        for (int i = 0; i < mi; ++i) {
            bool in_ws = false;
            for (int j : active)
                if (j == i) { in_ws = true; break; }
            if (in_ws) continue;
            const double v = constraint_value(i);
            if (v < worst) { worst = v; p = i; }
        }
        if (p < 0) break;  // primal feasible; dual feasibility held throughout

        const Eigen::VectorXd np = an.row(p).transpose();
        double u_incoming = 0.0;

        // Inner loop: step toward constraint p, dropping blockers as needed.
        while (true) {
            if (++iter > max_iterations)
                throw std::runtime_error("solve_qp_active_set: iteration cap exceeded");

            const int k = me + static_cast<int>(active.size());
            Eigen::VectorXd z;            // primal direction
            Eigen::VectorXd r_act;        // multiplier change rates for active ineqs
            if (k == 0) {
                z = h_inv.asDiagonal() * np;
            } else {
                Eigen::MatrixXd cmat(k, nv);
                if (me > 0) cmat.topRows(me) = g_eq;
                for (size_t j = 0; j < active.size(); ++j)
                    cmat.row(me + static_cast<int>(j)) = an.row(active[j]);
                const Eigen::MatrixXd chi = cmat * h_inv.asDiagonal();   // C H^{-1}
                const Eigen::MatrixXd s = chi * cmat.transpose();
                Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
                if (ldlt.info() != Eigen::Success)
                    throw std::runtime_error("solve_qp_active_set: singular working-set system");
                const Eigen::VectorXd rhs = chi * np;
                const Eigen::VectorXd r_all = ldlt.solve(rhs);
                r_act = r_all.tail(static_cast<int>(active.size()));
                z = h_inv.asDiagonal() * (np - cmat.transpose() * r_all);
            }

            const double ztnp = z.dot(np);

            // Dual step limit: first active multiplier driven to zero.
            double t1 = kInf;
            int blocker = -1;
            for (size_t j = 0; j < active.size(); ++j) {
                if (r_act.size() && r_act(static_cast<int>(j)) > tol_dir) {
                    const double t = u[j] / r_act(static_cast<int>(j));
                    if (t < t1) { t1 = t; blocker = static_cast<int>(j); }
                }
            }
            // Primal step: distance to make constraint p tight.
            const double viol = constraint_value(p);
            const double t2 = (ztnp > tol_dir) ? (-viol / ztnp) : kInf;

            const double t = std::min(t1, t2);
            if (t == kInf)
                throw ConstraintError("QP infeasible: constraint " + std::to_string(p) +
                                          " conflicts with the working set",
                                      p);

            if (t2 < kInf) x += t * z;
            for (size_t j = 0; j < active.size(); ++j) u[j] -= t * r_act(static_cast<int>(j));
            u_incoming += t;

            if (t == t2 && t2 <= t1) {
                active.push_back(p);
                u.push_back(u_incoming);
                break;
            }
            // Partial step: drop the blocking constraint and retry.
            active.erase(active.begin() + blocker);
            u.erase(u.begin() + blocker);
        }
    }

    // Refresh on the final working set to remove accumulated drift, then
    // confirm the multipliers kept their signs.
    if (!active.empty() || me > 0) {
        const int k = me + static_cast<int>(active.size());
        Eigen::MatrixXd cmat(k, nv);
        Eigen::VectorXd rhs(k);
        if (me > 0) { cmat.topRows(me) = g_eq; rhs.head(me) = c_eq; }
        for (size_t j = 0; j < active.size(); ++j) {
            cmat.row(me + static_cast<int>(j)) = an.row(active[j]);
            rhs(me + static_cast<int>(j)) = bn(active[j]);
        }
        x = solve_equality_min_norm(p_diag, cmat, rhs, center);
        if (!active.empty()) {
            // Stationarity: 2P(x - center) = C^T mult.
            const Eigen::VectorXd grad = 2.0 * p_diag.asDiagonal() * (x - center);
            const Eigen::VectorXd mult =
                cmat.transpose().colPivHouseholderQr().solve(grad);
            for (size_t j = 0; j < active.size(); ++j) {
                if (mult(me + static_cast<int>(j)) < -1e-7 * std::max(1.0, grad.norm()))
                    throw std::runtime_error("solve_qp_active_set: dual feasibility lost");
            }
        }
    }

    QpResult out;
    out.x = x;
    out.active = active;
    out.iterations = iter;
    return out;
}

} // namespace sac
