#include "sac/filter_bank.hpp"

#include <cmath>
#include <stdexcept>

namespace sac {

void FilterBank::check_shape() const {
    if (n <= 0 || n % 2 != 0)
        throw std::invalid_argument("FilterBank: order must be positive and even");
    const size_t he = static_cast<size_t>(n / 2 + 1);
    const size_t ho = static_cast<size_t>(n / 2);
    if (a0.size() != he || a1.size() != ho || a2.size() != he)
        throw std::invalid_argument("FilterBank: coefficient length mismatch");
}

namespace {

const std::vector<double>& pick_even(const FilterBank& bank, int which) {
    if (which == 0) return bank.a0;
    if (which == 2) return bank.a2;
    throw std::invalid_argument("filter index must be 0 or 2 for an even-tap response");
}

} // namespace

double amplitude_response(const FilterBank& bank, int which, double w) {
    const int half = bank.half();
    if (which == 1) {
        double acc = 0.0;
        for (int m = 1; m <= half; ++m) acc += bank.a1[m - 1] * std::sin(w * m);
        return acc;
    }
    const auto& a = pick_even(bank, which);
    double acc = a[0];
    for (int m = 1; m <= half; ++m) acc += a[m] * std::cos(w * m);
    return acc;
}

double hyperbolic_response(const FilterBank& bank, int which, double s) {
    const int half = bank.half();
    if (std::abs(s) * half > 700.0)
        throw std::domain_error("hyperbolic_response: damping out of representable range");
    if (which == 1) {
        double acc = 0.0;
        for (int m = 1; m <= half; ++m) acc += bank.a1[m - 1] * std::sinh(s * m);
        return acc;
    }
    const auto& a = pick_even(bank, which);
    double acc = a[0];
    for (int m = 1; m <= half; ++m) acc += a[m] * std::cosh(s * m);
    return acc;
}

std::complex<double> chirp_response(const FilterBank& bank, int which, double c) {
    const auto& a = pick_even(bank, which);
    cplx acc = a[0];
    for (int m = 1; m <= bank.half(); ++m)
        acc += a[m] * std::polar(1.0, 0.5 * c * m * m);
    return acc;
}

double gaussian_response(const FilterBank& bank, int which, double g) {
    const auto& a = pick_even(bank, which);
    double acc = a[0];
    for (int m = 1; m <= bank.half(); ++m)
        acc += a[m] * std::exp(-0.5 * g * m * m);
    return acc;
}

RawEstimates apply_filter_bank(std::span<const cplx> window, const FilterBank& bank,
                               double z_guard_rel) {
    const int half = bank.half();
    if (static_cast<int>(window.size()) != bank.n + 1)
        throw std::invalid_argument("apply_filter_bank: window length mismatch");

    const cplx* zc = window.data() + half;  // zc[m], m = -half..half
    cplx z = bank.a0[0] * zc[0];
    cplx z1 = 0.0;
    cplx z2 = bank.a2[0] * zc[0];
    double power = std::norm(zc[0]);
    for (int m = 1; m <= half; ++m) {
        const cplx even = 0.5 * (zc[m] + zc[-m]);
        const cplx odd = 0.5 * (zc[m] - zc[-m]);
        z += bank.a0[m] * even;
        z1 += bank.a1[m - 1] * odd;
        z2 += bank.a2[m] * even;
        power += std::norm(zc[m]) + std::norm(zc[-m]);
    }

    RawEstimates out;
    out.z = z;
    out.z1 = z1;
    out.z2 = z2;
    const double rms = std::sqrt(power / static_cast<double>(window.size()));
    if (std::abs(z) < z_guard_rel * rms || !(std::abs(z) > 0.0)) {
        out.valid = false;  // near-zero phasor: derivative ratios would be meaningless
        return out;
    }
    const cplx r1 = z1 / z;
    const cplx r2 = z2 / z;
    out.omega = r1.imag();
    out.sigma = -r1.real();
    out.alpha = r2.imag() - 2.0 * r1.real() * r1.imag();
    out.gamma = -r2.real() + r1.real() * r1.real() - r1.imag() * r1.imag();
    out.valid = std::isfinite(out.omega) && std::isfinite(out.alpha) &&
                std::isfinite(out.sigma) && std::isfinite(out.gamma);
    return out;
}

nlohmann::json bank_to_json(const FilterBank& bank) {
    nlohmann::json j;
    j["n"] = bank.n;
    j["t"] = bank.t_s;
    j["f0"] = bank.f0;
    j["m_harmonics"] = bank.m_harmonics;
    j["a0"] = bank.a0;
    j["a1"] = bank.a1;
    j["a2"] = bank.a2;
    nlohmann::json meta = bank.design_meta.is_null() ? nlohmann::json::object() : bank.design_meta;
    meta["provenance"] = bank.provenance;
    j["design_meta"] = meta;
    return j;
}

FilterBank bank_from_json(const nlohmann::json& j) {
    FilterBank bank;
    bank.n = j.at("n").get<int>();
    bank.t_s = j.at("t").get<double>();
    bank.f0 = j.at("f0").get<double>();
    bank.m_harmonics = j.at("m_harmonics").get<int>();
    bank.a0 = j.at("a0").get<std::vector<double>>();
    bank.a1 = j.at("a1").get<std::vector<double>>();
    bank.a2 = j.at("a2").get<std::vector<double>>();
    if (j.contains("design_meta")) {
        bank.design_meta = j.at("design_meta");
        if (bank.design_meta.contains("provenance"))
            bank.provenance = bank.design_meta.at("provenance").get<std::string>();
    }
    bank.check_shape();
    return bank;
}

void check_prototype(const FilterBank& bank, double tol) {
    bank.check_shape();
    const double w0t = 2.0 * std::numbers::pi * bank.f0 * bank.t_s;
    if (std::abs(amplitude_response(bank, 0, 0.0) - 1.0) > tol)
        throw std::runtime_error("prototype check: A0(0) != 1");
    if (std::abs(amplitude_response(bank, 2, 0.0)) > tol)
        throw std::runtime_error("prototype check: A2(0) != 0");
    for (int l = 1; l <= bank.m_harmonics; ++l) {
        for (int i : {0, 1, 2}) {
            if (std::abs(amplitude_response(bank, i, l * w0t)) > tol)
                throw std::runtime_error("prototype check: harmonic zero missing at order " +
                                         std::to_string(l) + " (filter " + std::to_string(i) + ")");
        }
    }
}

} // namespace sac
