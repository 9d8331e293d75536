#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sac/qp.hpp"

using namespace sac;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Independent route: solve the stacked KKT system [2P G^T; G 0] with a
// generic LU factorization instead of the Lagrange closed form.
VectorXd kkt_oracle(const VectorXd& p, const MatrixXd& g, const VectorXd& c,
                    const VectorXd& center) {
    const int n = static_cast<int>(p.size());
    const int k = static_cast<int>(g.rows());
    MatrixXd kkt = MatrixXd::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n) = (2.0 * p).asDiagonal();
    kkt.topRightCorner(n, k) = g.transpose();
    kkt.bottomLeftCorner(k, n) = g;
    VectorXd rhs(n + k);
    rhs.head(n) = 2.0 * p.asDiagonal() * center;
    rhs.tail(k) = c;
    return kkt.fullPivLu().solve(rhs).head(n);
}

double objective(const VectorXd& p, const VectorXd& x, const VectorXd& center) {
    return (x - center).cwiseProduct(p.asDiagonal() * (x - center)).sum();
}

// Exhaustive active-set enumeration for small QPs: try every subset of
// inequalities as equalities, keep KKT-consistent feasible points, return
// the best objective.
VectorXd enumeration_oracle(const VectorXd& p, const MatrixXd& g_eq, const VectorXd& c_eq,
                            const MatrixXd& a, const VectorXd& b, const VectorXd& center) {
    const int mi = static_cast<int>(a.rows());
    const int me = static_cast<int>(g_eq.rows());
    const int n = static_cast<int>(p.size());
    double best = std::numeric_limits<double>::infinity();
    VectorXd best_x;
    for (unsigned mask = 0; mask < (1u << mi); ++mask) {
        std::vector<int> sel;
        for (int i = 0; i < mi; ++i)
            if (mask & (1u << i)) sel.push_back(i);
        if (me + static_cast<int>(sel.size()) > n) continue;

        MatrixXd gs(me + sel.size(), n);
        VectorXd cs(me + sel.size());
        if (me > 0) {
            gs.topRows(me) = g_eq;
            cs.head(me) = c_eq;
        }
        for (size_t j = 0; j < sel.size(); ++j) {
            gs.row(me + static_cast<int>(j)) = a.row(sel[j]);
            cs(me + static_cast<int>(j)) = b(sel[j]);
        }
        VectorXd x;
        try {
            x = solve_equality_min_norm(p, gs, cs, center);
        } catch (const ConstraintError&) {
            continue;
        }
        if (((a * x - b).array() < -1e-9).any()) continue;
        // multiplier signs for the selected inequalities
        if (!sel.empty() || me > 0) {
            const VectorXd grad = 2.0 * p.asDiagonal() * (x - center);
            const VectorXd mult = gs.transpose().colPivHouseholderQr().solve(grad);
            if ((gs.transpose() * mult - grad).norm() > 1e-7 * std::max(1.0, grad.norm()))
                continue;
            bool ok = true;
            for (size_t j = 0; j < sel.size(); ++j)
                if (mult(me + static_cast<int>(j)) < -1e-9) ok = false;
            if (!ok) continue;
        }
        const double f = objective(p, x, center);
        if (f < best) {
            best = f;
            best_x = x;
        }
    }
    REQUIRE(best_x.size() == n);  // at least one KKT point must exist
    return best_x;
}

} // namespace

TEST_CASE("equality solve returns a feasible center unchanged") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g01;
    const int n = 12, k = 4;
    MatrixXd g(k, n);
    VectorXd center(n);
    VectorXd p(n);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = g01(rng);
    for (int j = 0; j < n; ++j) {
        center(j) = g01(rng);
        p(j) = 0.5 + std::abs(g01(rng));
    }
    const VectorXd c = g * center;
    const VectorXd x = solve_equality_min_norm(p, g, c, center);
    CHECK((x - center).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("equality solve: symmetric two-variable projection") {
    VectorXd p = VectorXd::Ones(2);
    MatrixXd g(1, 2);
    g << 1.0, 1.0;
    VectorXd c(1);
    c << 2.0;
    const VectorXd x = solve_equality_min_norm(p, g, c, VectorXd::Zero(2));
    CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("equality solve matches the generic KKT route on random systems") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g01;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 40, k = 10;
        MatrixXd g(k, n);
        VectorXd c(k), center(n), p(n);
        for (int i = 0; i < k; ++i) {
            c(i) = g01(rng);
            for (int j = 0; j < n; ++j) g(i, j) = g01(rng);
        }
        for (int j = 0; j < n; ++j) {
            center(j) = g01(rng);
            p(j) = 0.2 + std::abs(g01(rng));
        }
        const VectorXd x = solve_equality_min_norm(p, g, c, center);
        const VectorXd y = kkt_oracle(p, g, c, center);
        CHECK((x - y).lpNorm<Eigen::Infinity>() < 1e-8 * std::max(1.0, y.norm()));
        CHECK((g * x - c).lpNorm<Eigen::Infinity>() < 1e-10 * std::max(1.0, c.norm()));
    }
}

TEST_CASE("duplicated constraint row raises an error naming a row") {
    VectorXd p = VectorXd::Ones(5);
    MatrixXd g(3, 5);
    g.setZero();
    g(0, 0) = 1.0;
    g(1, 1) = 1.0;
    g.row(2) = g.row(0);  // duplicate of row 0
    VectorXd c(3);
    c << 1.0, 2.0, 5.0;  // inconsistent on purpose
    try {
        solve_equality_min_norm(p, g, c, VectorXd::Zero(5));
        FAIL("expected ConstraintError");
    } catch (const ConstraintError& e) {
        CHECK((e.row == 0 || e.row == 2));
        CHECK(std::string(e.what()).find("row") != std::string::npos);
    }
}

TEST_CASE("QP with no inequalities reduces to the equality solve") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g01;
    const int n = 8, k = 3;
    MatrixXd g(k, n);
    VectorXd c(k), center(n), p(n);
    for (int i = 0; i < k; ++i) {
        c(i) = g01(rng);
        for (int j = 0; j < n; ++j) g(i, j) = g01(rng);
    }
    for (int j = 0; j < n; ++j) {
        center(j) = g01(rng);
        p(j) = 1.0 + std::abs(g01(rng));
    }
    const auto r = solve_qp_active_set(p, g, c, MatrixXd(0, n), VectorXd(0), center);
    const VectorXd direct = solve_equality_min_norm(p, g, c, center);
    CHECK((r.x - direct).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(r.active.empty());
}

TEST_CASE("QP toy problem: projection onto a halfspace") {
    VectorXd p = VectorXd::Ones(2);
    MatrixXd a(1, 2);
    a << 1.0, 1.0;
    VectorXd b(1);
    b << 1.0;
    const auto r = solve_qp_active_set(p, MatrixXd(0, 2), VectorXd(0), a, b, VectorXd::Zero(2));
    CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r.x(1) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r.active.size() == 1);
}

TEST_CASE("QP matches brute-force active-set enumeration on random instances") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g01;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3, me = 1, mi = 6;
        VectorXd p(n), center(n), xf(n);
        for (int j = 0; j < n; ++j) {
            p(j) = 0.3 + u01(rng);
            center(j) = g01(rng);
            xf(j) = g01(rng);
        }
        MatrixXd g_eq(me, n);
        for (int j = 0; j < n; ++j) g_eq(0, j) = g01(rng);
        const VectorXd c_eq = g_eq * xf;  // xf satisfies the equality
        MatrixXd a(mi, n);
        VectorXd b(mi);
        for (int i = 0; i < mi; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = g01(rng);
            b(i) = a.row(i).dot(xf) - u01(rng);  // xf strictly feasible
        }
        const auto r = solve_qp_active_set(p, g_eq, c_eq, a, b, center);
        const VectorXd want = enumeration_oracle(p, g_eq, c_eq, a, b, center);
        CHECK((r.x - want).lpNorm<Eigen::Infinity>() < 1e-7 * std::max(1.0, want.norm()));

        // KKT conditions of the returned point
        CHECK(((a * r.x - b).array() > -1e-9).all());
        CHECK((g_eq * r.x - c_eq).lpNorm<Eigen::Infinity>() < 1e-9);
    }
}

TEST_CASE("QP reports infeasibility with a certificate row") {
    VectorXd p = VectorXd::Ones(1);
    MatrixXd a(2, 1);
    a << 1.0, -1.0;  // x >= 1 and -x >= 0  -> empty
    VectorXd b(2);
    b << 1.0, 0.0;
    CHECK_THROWS_AS(
        solve_qp_active_set(p, MatrixXd(0, 1), VectorXd(0), a, b, VectorXd::Zero(1)),
        ConstraintError);
}
