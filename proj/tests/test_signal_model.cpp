#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sac/signal_model.hpp"

using namespace sac;

namespace {

SystemConfig default_cfg() {
    SystemConfig cfg;
    cfg.validate();
    return cfg;
}

Window random_window(std::mt19937_64& rng, int len) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Window w(len);
    for (auto& v : w) v = cplx(u(rng), u(rng));
    return w;
}

constexpr double kPi = std::numbers::pi;

} // namespace

TEST_CASE("prior polynomials: zero parameters give zero curves") {
    const SystemConfig cfg = default_cfg();
    const auto pol = eval_prior_polynomials({}, cfg);
    REQUIRE(pol.phase.size() == static_cast<size_t>(cfg.window_len()));
    for (double v : pol.phase) CHECK(v == 0.0);
    for (double v : pol.log_amp) CHECK(v == 0.0);
}

TEST_CASE("prior polynomials: direct substitution values") {
    const SystemConfig cfg = default_cfg();
    const int half = cfg.half();

    // 5 Hz prior frequency at the window edge m = +32
    const auto pol_w = eval_prior_polynomials({2.0 * kPi * 5.0, 0.0, 0.0, 0.0}, cfg);
    CHECK(pol_w.phase[half + 32] == doctest::Approx(kPi / 6.0).epsilon(1e-12));
    CHECK(pol_w.phase[half] == 0.0);
    CHECK(pol_w.log_amp[half] == 0.0);

    // unit damping at m = -32 flips sign: b = +32/1920
    const auto pol_s = eval_prior_polynomials({0.0, 0.0, 1.0, 0.0}, cfg);
    CHECK(pol_s.log_amp[half - 32] == doctest::Approx(32.0 / 1920.0).epsilon(1e-12));
}

TEST_CASE("parameter_shift: identity at zero priors") {
    const SystemConfig cfg = default_cfg();
    std::mt19937_64 rng(11);
    const Window y = random_window(rng, cfg.window_len());
    const Window z = parameter_shift(y, {}, cfg);
    for (size_t i = 0; i < y.size(); ++i) CHECK(std::abs(z[i] - y[i]) < 1e-15);
}

TEST_CASE("parameter_shift: cancels a matching phase ramp") {
    const SystemConfig cfg = default_cfg();
    const double ws = 2.0 * kPi * 7.3;
    Window y(cfg.window_len());
    for (int m = -cfg.half(); m <= cfg.half(); ++m)
        y[m + cfg.half()] = std::polar(1.0, ws * cfg.t_s * m);
    const Window z = parameter_shift(y, {ws, 0.0, 0.0, 0.0}, cfg);
    for (const auto& v : z) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-12);
    CHECK(z[cfg.half()] == y[cfg.half()]);  // center sample untouched
}

TEST_CASE("parameter_shift: elementwise brute-force oracle") {
    const SystemConfig cfg = default_cfg();
    std::mt19937_64 rng(17);
    const Window y = random_window(rng, cfg.window_len());
    const PriorParams p{2.0 * kPi, 0.0, 0.5, 0.0};
    const Window z = parameter_shift(y, p, cfg);
    for (int m = -cfg.half(); m <= cfg.half(); ++m) {
        const double tm = cfg.t_s * m;
        const cplx expected = std::exp(cplx(0.5 * tm, -2.0 * kPi * tm)) * y[m + cfg.half()];
        CHECK(std::abs(z[m + cfg.half()] - expected) < 1e-13);
    }
}

TEST_CASE("unshift_samples inverts parameter_shift over random draws") {
    const SystemConfig cfg = default_cfg();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Window y = random_window(rng, cfg.window_len());
        const PriorParams p{2.0 * kPi * 15.0 * u(rng), 2.0 * kPi * 16.0 * u(rng), 4.0 * u(rng),
                            110.0 * u(rng)};
        const Window back = unshift_samples(parameter_shift(y, p, cfg), p, cfg);
        for (size_t i = 0; i < y.size(); ++i) {
            const double rel = std::abs(back[i] - y[i]) / std::max(1e-30, std::abs(y[i]));
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("parameter_shift is linear in the window") {
    const SystemConfig cfg = default_cfg();
    std::mt19937_64 rng(31);
    const Window y1 = random_window(rng, cfg.window_len());
    const Window y2 = random_window(rng, cfg.window_len());
    const PriorParams p{3.0, 5.0, 0.7, -20.0};
    const cplx c1(0.3, -1.1), c2(-2.0, 0.4);

    Window mix(cfg.window_len());
    for (size_t i = 0; i < mix.size(); ++i) mix[i] = c1 * y1[i] + c2 * y2[i];
    const Window lhs = parameter_shift(mix, p, cfg);
    const Window za = parameter_shift(y1, p, cfg);
    const Window zb = parameter_shift(y2, p, cfg);
    for (size_t i = 0; i < mix.size(); ++i)
        CHECK(std::abs(lhs[i] - (c1 * za[i] + c2 * zb[i])) < 1e-12);
}

TEST_CASE("shift scales magnitudes by exp(-b) and rotates by -phi") {
    const SystemConfig cfg = default_cfg();
    std::mt19937_64 rng(37);
    const Window y = random_window(rng, cfg.window_len());
    const PriorParams p{10.0, -40.0, 1.5, 30.0};
    const auto pol = eval_prior_polynomials(p, cfg);
    const Window z = parameter_shift(y, p, cfg);
    for (size_t i = 0; i < y.size(); ++i) {
        CHECK(std::abs(z[i]) ==
              doctest::Approx(std::abs(y[i]) * std::exp(-pol.log_amp[i])).epsilon(1e-12));
        const double dphi = std::arg(z[i] / y[i]);
        const double want = std::remainder(-pol.phase[i], 2.0 * kPi);
        CHECK(std::abs(std::remainder(dphi - want, 2.0 * kPi)) < 1e-10);
    }
}

TEST_CASE("second-order synthetic signal shifts to a constant window") {
    const SystemConfig cfg = default_cfg();
    const PriorParams truth{2.0 * kPi * 4.0, 2.0 * kPi * 10.0, 2.5, 60.0};
    const cplx x0 = std::polar(0.9, 0.7);
    Window y(cfg.window_len());
    for (int m = -cfg.half(); m <= cfg.half(); ++m) {
        const double tm = cfg.t_s * m;
        const double b = -truth.sigma * tm - 0.5 * truth.gamma * tm * tm;
        const double ph = truth.omega * tm + 0.5 * truth.alpha * tm * tm;
        y[m + cfg.half()] = x0 * std::exp(cplx(b, ph));
    }
    const Window z = parameter_shift(y, truth, cfg);
    for (const auto& v : z) CHECK(std::abs(v - x0) / std::abs(x0) < 1e-10);
}

TEST_CASE("abc_to_dq: balanced nominal set maps to unit DC") {
    const SystemConfig cfg = default_cfg();
    for (long n : {0L, 1L, 7L, 480L, 1919L}) {
        const double th = cfg.omega0() * cfg.t_s * static_cast<double>(n);
        const cplx y = abc_to_dq(std::cos(th), std::cos(th - 2.0 * kPi / 3.0),
                                 std::cos(th + 2.0 * kPi / 3.0), n, cfg);
        CHECK(std::abs(y - cplx(1.0, 0.0)) < 1e-12);
    }
}

TEST_CASE("abc_to_dq: off-nominal balanced set rotates at the deviation") {
    const SystemConfig cfg = default_cfg();
    const double df = 3.7;
    for (long n = 0; n < 200; n += 13) {
        const double th = 2.0 * kPi * (cfg.f0 + df) * cfg.t_s * static_cast<double>(n);
        const cplx y = abc_to_dq(std::cos(th), std::cos(th - 2.0 * kPi / 3.0),
                                 std::cos(th + 2.0 * kPi / 3.0), n, cfg);
        const cplx expected = std::polar(1.0, 2.0 * kPi * df * cfg.t_s * static_cast<double>(n));
        CHECK(std::abs(y - expected) < 1e-9);
    }
}

TEST_CASE("abc_to_dq: negative sequence lands at the -2*f0 image") {
    const SystemConfig cfg = default_cfg();
    for (long n = 0; n < 100; n += 7) {
        const double th = cfg.omega0() * cfg.t_s * static_cast<double>(n);
        // swapped phases b and c
        const cplx y = abc_to_dq(std::cos(th), std::cos(th + 2.0 * kPi / 3.0),
                                 std::cos(th - 2.0 * kPi / 3.0), n, cfg);
        const cplx expected =
            std::polar(1.0, -2.0 * kPi * 2.0 * cfg.f0 * cfg.t_s * static_cast<double>(n));
        CHECK(std::abs(y - expected) < 1e-9);
    }
}

TEST_CASE("config validation rejects harmonics beyond Nyquist and odd order") {
    SystemConfig cfg = default_cfg();
    cfg.m_harmonics = 16;  // 16*60 = 960 = Nyquist exactly
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.n = 63;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
