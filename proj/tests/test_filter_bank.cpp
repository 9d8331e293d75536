#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sac/filter_bank.hpp"

using namespace sac;

namespace {

constexpr double kPi = std::numbers::pi;

SystemConfig default_cfg() {
    SystemConfig cfg;
    cfg.validate();
    return cfg;
}

// Hand-made bank with valid shapes and the prototype gain conditions
// A0(0)=1, A2(0)=0; coefficients otherwise arbitrary.
FilterBank hand_bank(const SystemConfig& cfg, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FilterBank b;
    b.n = cfg.n;
    b.t_s = cfg.t_s;
    b.f0 = cfg.f0;
    b.m_harmonics = 0;
    const int half = cfg.half();
    b.a0.assign(half + 1, 2.0 / (cfg.n + 1));
    b.a0[0] = 1.0 / (cfg.n + 1);  // moving average: A0(0) = 1
    b.a1.resize(half);
    for (auto& v : b.a1) v = 50.0 * u(rng);
    b.a2.resize(half + 1);
    double sum = 0.0;
    for (int m = 1; m <= half; ++m) {
        b.a2[m] = 100.0 * u(rng);
        sum += b.a2[m];
    }
    b.a2[0] = -sum;  // A2(0) = 0
    b.check_shape();
    return b;
}

// Expanded centered taps h[m], m = -n/2..n/2.
std::vector<double> expand_even(const std::vector<double>& a, int half) {
    std::vector<double> h(2 * half + 1, 0.0);
    h[half] = a[0];
    for (int m = 1; m <= half; ++m) h[half + m] = h[half - m] = 0.5 * a[m];
    return h;
}

std::vector<double> expand_odd(const std::vector<double>& a, int half) {
    std::vector<double> h(2 * half + 1, 0.0);
    for (int m = 1; m <= half; ++m) {
        h[half + m] = 0.5 * a[m - 1];
        h[half - m] = -0.5 * a[m - 1];
    }
    return h;
}

// Response of the taps to the window e^{j w m} (the convention the
// estimator applies: inner product with the window samples).
cplx taps_response(const std::vector<double>& h, int half, double w) {
    cplx acc = 0.0;
    for (int m = -half; m <= half; ++m) acc += h[m + half] * std::polar(1.0, w * m);
    return acc;
}

} // namespace

TEST_CASE("amplitude response basics") {
    const SystemConfig cfg = default_cfg();
    const FilterBank b = hand_bank(cfg, 5);
    CHECK(amplitude_response(b, 1, 0.0) == 0.0);  // sin terms vanish identically

    FilterBank unit = b;
    unit.a0.assign(cfg.half() + 1, 0.0);
    unit.a0[0] = 1.0;
    for (double w : {0.0, 0.1, 0.5, 2.0}) CHECK(amplitude_response(unit, 0, w) == 1.0);
}

TEST_CASE("amplitude response equals the expanded-tap summation") {
    const SystemConfig cfg = default_cfg();
    const FilterBank b = hand_bank(cfg, 7);
    const auto h0 = expand_even(b.a0, cfg.half());
    const cplx direct = taps_response(h0, cfg.half(), 0.3);
    CHECK(std::abs(direct.imag()) < 1e-12);
    CHECK(amplitude_response(b, 0, 0.3) == doctest::Approx(direct.real()).epsilon(1e-12));
}

TEST_CASE("tap DTFT matches A0, jA1, A2 on a 1024-point grid") {
    const SystemConfig cfg = default_cfg();
    const FilterBank b = hand_bank(cfg, 9);
    const auto h0 = expand_even(b.a0, cfg.half());
    const auto h1 = expand_odd(b.a1, cfg.half());
    const auto h2 = expand_even(b.a2, cfg.half());
    double worst = 0.0;
    for (int i = 0; i < 1024; ++i) {
        const double w = -kPi + 2.0 * kPi * i / 1024.0;
        worst = std::max(worst, std::abs(taps_response(h0, cfg.half(), w) -
                                         cplx(amplitude_response(b, 0, w), 0.0)));
        worst = std::max(worst, std::abs(taps_response(h1, cfg.half(), w) -
                                         cplx(0.0, amplitude_response(b, 1, w))));
        worst = std::max(worst, std::abs(taps_response(h2, cfg.half(), w) -
                                         cplx(amplitude_response(b, 2, w), 0.0)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("hyperbolic response: trivial cases and direct summation oracle") {
    const SystemConfig cfg = default_cfg();
    const FilterBank b = hand_bank(cfg, 13);
    CHECK(hyperbolic_response(b, 1, 0.0) == 0.0);

    FilterBank unit = b;
    unit.a0.assign(cfg.half() + 1, 0.0);
    unit.a0[0] = 1.0;
    CHECK(hyperbolic_response(unit, 0, 0.02) == 1.0);

    // direct summation of the expanded taps against e^{-sigma T m}
    const double sigma = 4.0;
    const double s = sigma * cfg.t_s;
    const auto h0 = expand_even(b.a0, cfg.half());
    const auto h1 = expand_odd(b.a1, cfg.half());
    double acc0 = 0.0, acc1 = 0.0;
    for (int m = -cfg.half(); m <= cfg.half(); ++m) {
        acc0 += h0[m + cfg.half()] * std::exp(-s * m);
        acc1 += h1[m + cfg.half()] * std::exp(-s * m);
    }
    CHECK(hyperbolic_response(b, 0, s) == doctest::Approx(acc0).epsilon(1e-12));
    // odd taps applied to a decaying exponential give -A1h
    CHECK(-hyperbolic_response(b, 1, s) == doctest::Approx(acc1).epsilon(1e-12));

    CHECK_THROWS_AS(hyperbolic_response(b, 0, 30.0), std::domain_error);
}

TEST_CASE("chirp and Gaussian responses match brute-force filtering") {
    const SystemConfig cfg = default_cfg();
    const FilterBank b = hand_bank(cfg, 15);
    const double alpha = 2.0 * kPi * 10.0;
    const double c = alpha * cfg.t_s * cfg.t_s;

    CHECK(chirp_response(b, 0, 0.0).real() ==
          doctest::Approx(amplitude_response(b, 0, 0.0)).epsilon(1e-14));

    Window zc(cfg.window_len());
    for (int m = -cfg.half(); m <= cfg.half(); ++m)
        zc[m + cfg.half()] = std::polar(1.0, 0.5 * c * m * m);
    const RawEstimates r = apply_filter_bank(zc, b);
    CHECK(std::abs(r.z - chirp_response(b, 0, c)) < 1e-12);
    CHECK(std::abs(r.z2 - chirp_response(b, 2, c)) < 1e-12);
    CHECK(std::abs(r.z1) == 0.0);  // even window, odd taps: exact zero

    const double g = 110.0 * cfg.t_s * cfg.t_s;
    Window zg(cfg.window_len());
    for (int m = -cfg.half(); m <= cfg.half(); ++m)
        zg[m + cfg.half()] = std::exp(-0.5 * g * m * m);
    const RawEstimates rg = apply_filter_bank(zg, b);
    CHECK(std::abs(rg.z - cplx(gaussian_response(b, 0, g), 0.0)) < 1e-12);
    CHECK(std::abs(rg.z2 - cplx(gaussian_response(b, 2, g), 0.0)) < 1e-12);
}

TEST_CASE("constant window: unit phasor, zero derivatives") {
    const SystemConfig cfg = default_cfg();
    const FilterBank b = hand_bank(cfg, 21);
    const cplx c0 = std::polar(0.8, 1.2);
    Window z(cfg.window_len(), c0);
    const RawEstimates r = apply_filter_bank(z, b);
    REQUIRE(r.valid);
    CHECK(std::abs(r.z - c0) < 1e-12);
    CHECK(std::abs(r.omega) < 1e-12);
    CHECK(std::abs(r.sigma) < 1e-12);
    CHECK(std::abs(r.alpha) < 1e-12);
    CHECK(std::abs(r.gamma) < 1e-12);
}

TEST_CASE("pure off-nominal window reproduces the response-ratio estimates") {
    const SystemConfig cfg = default_cfg();
    const FilterBank b = hand_bank(cfg, 23);
    const double ws = 2.0 * kPi * 5.0;
    Window z(cfg.window_len());
    for (int m = -cfg.half(); m <= cfg.half(); ++m)
        z[m + cfg.half()] = std::polar(1.0, ws * cfg.t_s * m);
    const RawEstimates r = apply_filter_bank(z, b);
    REQUIRE(r.valid);
    const double want =
        amplitude_response(b, 1, ws * cfg.t_s) / amplitude_response(b, 0, ws * cfg.t_s);
    CHECK(r.omega == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::abs(r.sigma) < 1e-9);
}

TEST_CASE("decaying-exponential window reproduces the hyperbolic ratio") {
    const SystemConfig cfg = default_cfg();
    const FilterBank b = hand_bank(cfg, 25);
    const double sigma = 1.0;
    Window z(cfg.window_len());
    for (int m = -cfg.half(); m <= cfg.half(); ++m)
        z[m + cfg.half()] = std::exp(-sigma * cfg.t_s * m);
    const RawEstimates r = apply_filter_bank(z, b);
    REQUIRE(r.valid);
    const double want = hyperbolic_response(b, 1, sigma * cfg.t_s) /
                        hyperbolic_response(b, 0, sigma * cfg.t_s);
    CHECK(r.sigma == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::abs(r.omega) < 1e-9);
}

TEST_CASE("filtering is linear and invariant to phase rotation and scale") {
    const SystemConfig cfg = default_cfg();
    const FilterBank b = hand_bank(cfg, 27);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Window z1(cfg.window_len()), z2(cfg.window_len());
    for (int i = 0; i < cfg.window_len(); ++i) {
        z1[i] = cplx(u(rng), u(rng)) + cplx(3.0, 0.0);  // keep |z| away from the guard
        z2[i] = cplx(u(rng), u(rng));
    }
    const cplx c1(1.3, -0.2), c2(0.1, 0.7);
    Window mix(cfg.window_len());
    for (int i = 0; i < cfg.window_len(); ++i) mix[i] = c1 * z1[i] + c2 * z2[i];
    const RawEstimates ra = apply_filter_bank(z1, b);
    const RawEstimates rb = apply_filter_bank(z2, b);
    const RawEstimates rm = apply_filter_bank(mix, b);
    CHECK(std::abs(rm.z - (c1 * ra.z + c2 * rb.z)) < 1e-12);
    CHECK(std::abs(rm.z1 - (c1 * ra.z1 + c2 * rb.z1)) < 1e-12);
    CHECK(std::abs(rm.z2 - (c1 * ra.z2 + c2 * rb.z2)) < 1e-12);

    // rotation/scale invariance of the ratio estimates
    const cplx rot = std::polar(2.5, 0.9);
    Window zr(cfg.window_len());
    for (int i = 0; i < cfg.window_len(); ++i) zr[i] = rot * z1[i];
    const RawEstimates rr = apply_filter_bank(zr, b);
    CHECK(rr.omega == doctest::Approx(ra.omega).epsilon(1e-10));
    CHECK(rr.sigma == doctest::Approx(ra.sigma).epsilon(1e-10));
    CHECK(rr.alpha == doctest::Approx(ra.alpha).epsilon(1e-10));
    CHECK(rr.gamma == doctest::Approx(ra.gamma).epsilon(1e-10));
    CHECK(std::abs(rr.z - rot * ra.z) < 1e-12);
}

TEST_CASE("division guard marks near-zero phasors invalid") {
    const SystemConfig cfg = default_cfg();
    const FilterBank b = hand_bank(cfg, 31);
    Window z(cfg.window_len(), cplx(0.0, 0.0));
    CHECK_FALSE(apply_filter_bank(z, b).valid);

    // alternating window nulls the DC filter but keeps window RMS large
    FilterBank dc = b;
    dc.a0.assign(cfg.half() + 1, 0.0);
    dc.a0[0] = 1.0;
    Window za(cfg.window_len());
    for (int i = 0; i < cfg.window_len(); ++i) za[i] = cplx(0.0, 0.0);
    za[cfg.half()] = cplx(1e-12, 0.0);
    za[0] = cplx(1.0, 0.0);
    CHECK_FALSE(apply_filter_bank(za, dc).valid);
}

TEST_CASE("bank JSON round trip preserves coefficients exactly") {
    const SystemConfig cfg = default_cfg();
    FilterBank b = hand_bank(cfg, 33);
    b.m_harmonics = 11;
    b.provenance = "adapted";
    b.design_meta = {{"note", 1.5}};
    const FilterBank back = bank_from_json(bank_to_json(b));
    CHECK(back.n == b.n);
    CHECK(back.t_s == b.t_s);
    CHECK(back.f0 == b.f0);
    CHECK(back.m_harmonics == b.m_harmonics);
    CHECK(back.provenance == b.provenance);
    CHECK(back.a0 == b.a0);
    CHECK(back.a1 == b.a1);
    CHECK(back.a2 == b.a2);
}

TEST_CASE("check_prototype flags missing harmonic zeros") {
    const SystemConfig cfg = default_cfg();
    FilterBank b = hand_bank(cfg, 35);
    b.m_harmonics = 3;  // hand bank has no harmonic zeros
    CHECK_THROWS_AS(check_prototype(b), std::runtime_error);
}
