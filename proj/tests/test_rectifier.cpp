#include "p2h/rectifier.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace p2h;

namespace {

const double kPi = std::numbers::pi;

// Direct O(N) Fourier sum of one period, sine-referenced RMS phasor.
std::complex<double> direct_dft(const Waveform& w, int h) {
    const std::size_t n = w.sample_count();
    std::complex<double> acc{};
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        acc += w.samples[k] * std::polar(1.0, -h * theta);
    }
    return std::complex<double>(0.0, 1.0) * acc * std::sqrt(2.0) / static_cast<double>(n);
}

double wrap(double a) { return std::remainder(a, 2.0 * kPi); }

const RectifierParams kParams{};
const PolarizationCurve kCurve{};

}  // namespace

TEST_CASE("stack voltage") {
    CHECK(stack_voltage(kCurve, 0.0) == doctest::Approx(kCurve.n_cell * kCurve.u_rev));
    CHECK(stack_voltage(kCurve, 3000.0) < stack_voltage(kCurve, 5000.0));
    CHECK_THROWS_AS(stack_voltage(kCurve, -1.0), std::invalid_argument);

    // Calibrated stack power at 7 kA lands within 10% of 4.5 MW.
    CHECK(stack_power(kCurve, 7000.0) == doctest::Approx(4.5e6).epsilon(0.10));

    double prev = stack_voltage(kCurve, 0.0);
    for (double i = 50.0; i <= 8000.0; i += 50.0) {
        const double u = stack_voltage(kCurve, i);
        CHECK(u > prev);
        prev = u;
    }
}

TEST_CASE("stack power is convex") {
    const double step = 25.0;
    for (double i = 2000.0; i <= 7000.0 - 2 * step; i += step) {
        const double d2 = stack_power(kCurve, i + 2 * step) - 2 * stack_power(kCurve, i + step) + stack_power(kCurve, i);
        CHECK(d2 > 0.0);
    }
}

TEST_CASE("operating point residuals") {
    for (double i = 2000.0; i <= 7000.0; i += 250.0) {
        const auto op = solve_operating_point(kParams, kCurve, i);
        for (double r : operating_point_residuals(kParams, kCurve, op)) {
            CHECK(std::abs(r) <= 1e-9);
        }
        CHECK(op.alpha > 0.0);
        CHECK(op.gamma > 0.0);
    }
}

TEST_CASE("operating point orientation") {
    const auto lo = solve_operating_point(kParams, kCurve, 2000.0);
    const auto hi = solve_operating_point(kParams, kCurve, 7000.0);
    CHECK(lo.alpha > hi.alpha);
    CHECK(lo.gamma < hi.gamma);
}

TEST_CASE("zero commutation reactance") {
    RectifierParams p = kParams;
    p.x_c = 0.0;
    const auto op = solve_operating_point(p, kCurve, 4000.0);
    CHECK(op.gamma == 0.0);
    CHECK(op.delta_u == 0.0);
    for (double r : operating_point_residuals(p, kCurve, op)) {
        CHECK(std::abs(r) <= 1e-9);
    }
}

TEST_CASE("no operating point when the AC voltage is too low") {
    RectifierParams p = kParams;
    p.u_ac = 3000.0;
    CHECK_THROWS_AS(solve_operating_point(p, kCurve, 7000.0), NoOperatingPointError);
    try {
        solve_operating_point(p, kCurve, 7000.0);
    } catch (const NoOperatingPointError& e) {
        CHECK(e.current() == 7000.0);
    }
}

TEST_CASE("waveform shape") {
    const auto op = solve_operating_point(kParams, kCurve, 4500.0);
    const auto w = synthesize_ac_waveform(op, 8192);
    REQUIRE(w.sample_count() == 8192);
    double mean = 0.0;
    for (double v : w.samples) {
        mean += v;
    }
    CHECK(std::abs(mean / 8192.0) < 1e-9 * op.i_fund);
    for (std::size_t k = 0; k < 4096; ++k) {
        CHECK(w.samples[k + 4096] == doctest::Approx(-w.samples[k]).epsilon(1e-12).scale(op.i_fund));
    }
    const auto f = harmonic_phasor_fft(w, 1);
    CHECK(f.magnitude() == doctest::Approx(op.i_fund).epsilon(0.005));
    for (int h = 2; h <= 50; h += 2) {
        CHECK(harmonic_phasor_fft(w, h).magnitude() < 1e-9 * op.i_fund);
    }
    CHECK_THROWS(synthesize_ac_waveform(op, 1000));
}

TEST_CASE("fft agrees with a direct Fourier sum") {
    const auto op = solve_operating_point(kParams, kCurve, 3300.0);
    const auto w = synthesize_ac_waveform(op, 4096);
    for (int h : {1, 5, 23, 25, 47, 49}) {
        const auto a = harmonic_phasor_fft(w, h).value;
        const auto b = direct_dft(w, h);
        CHECK(std::abs(a - b) <= 1e-9 * op.i_fund);
    }
}

TEST_CASE("fft of a pure sinusoid") {
    const std::size_t n = 4096;
    const double amp = 123.0;
    Waveform w;
    for (std::size_t k = 0; k < n; ++k) {
        w.samples.push_back(std::sqrt(2.0) * amp * std::sin(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n)));
    }
    CHECK(harmonic_phasor_fft(w, 1).magnitude() == doctest::Approx(amp).epsilon(1e-12));
    CHECK(std::abs(harmonic_phasor_fft(w, 1).phase()) < 1e-12);
    for (int h = 2; h <= 60; ++h) {
        CHECK(harmonic_phasor_fft(w, h).magnitude() < 1e-9 * amp);
    }
    CHECK_THROWS_AS(harmonic_phasor_fft(w, 1500), AliasingError);
}

TEST_CASE("ideal waveform follows the 1/h series") {
    RectifierParams p = kParams;
    p.x_c = 0.0;
    const auto op = solve_operating_point(p, kCurve, 5000.0);
    const auto w = synthesize_ac_waveform(op);
    const double i1 = std::abs(direct_dft(w, 1));
    for (int h : {23, 25, 47, 49}) {
        CHECK(std::abs(direct_dft(w, h)) / i1 == doctest::Approx(1.0 / h).epsilon(1e-4));
        CHECK(harmonic_phasor_analytic(op, h).magnitude() / op.i_fund == doctest::Approx(1.0 / h).epsilon(1e-12));
    }
}

TEST_CASE("non-characteristic orders vanish") {
    const auto op = solve_operating_point(kParams, kCurve, 6000.0);
    const auto spec = harmonic_spectrum(synthesize_ac_waveform(op), 60);
    for (const auto& ph : spec) {
        if (!is_characteristic_order(ph.order)) {
            CHECK(ph.magnitude() <= 1e-6 * spec.front().magnitude());
        }
    }
    CHECK_THROWS_AS(harmonic_phasor_analytic(op, 5), UnsupportedOrderError);
    CHECK_THROWS_AS(harmonic_phasor_analytic(op, 24), UnsupportedOrderError);
    CHECK(is_characteristic_order(71));
    CHECK_FALSE(is_characteristic_order(35));
}

TEST_CASE("analytic phasors track the fft over the current range") {
    for (double i = 2000.0; i <= 7000.0; i += 250.0) {
        const auto op = solve_operating_point(kParams, kCurve, i);
        const auto spec = harmonic_spectrum(synthesize_ac_waveform(op), 49);
        for (int h : {1, 23, 25, 47, 49}) {
            const auto a = harmonic_phasor_analytic(op, h);
            const auto f = spec[static_cast<std::size_t>(h - 1)];
            CHECK(std::abs(a.magnitude() / f.magnitude() - 1.0) <= 1e-3);
            CHECK(std::abs(wrap(a.phase() - f.phase())) <= 0.1 * kPi / 180.0);
        }
    }
}

TEST_CASE("cancellation pair") {
    ElectrolyzerSpec spec;
    const auto a = harmonic_at_current(spec, 3000.0, 23);
    const auto b = harmonic_at_current(spec, 4900.0, 23);
    const double larger = std::max(a.magnitude(), b.magnitude());
    CHECK(std::abs(a.value + b.value) <= 0.05 * larger);
    CHECK(std::abs(std::abs(wrap(a.phase() - b.phase())) - kPi) <= 10.0 * kPi / 180.0);
    CHECK(harmonic_at_current(spec, 0.0, 23).magnitude() == 0.0);
}

TEST_CASE("hydrogen production") {
    CHECK(hydrogen_rate(kCurve, 1.0, 0.0) == 0.0);
    const double expected = 350.0 * 7000.0 / (2.0 * 96485.0);
    CHECK(hydrogen_rate(kCurve, 1.0, 7000.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(12.70).epsilon(1e-3));
    CHECK(hydrogen_rate(kCurve, 0.9, 4000.0) == doctest::Approx(2.0 * hydrogen_rate(kCurve, 0.9, 2000.0)));
    CHECK(hydrogen_mass_rate(kCurve, 1.0, 7000.0) == doctest::Approx(expected * 2.016e-3 * 3600.0));
}

TEST_CASE("efficiency ordering") {
    const double even = p2h_efficiency(kCurve, 1.0, 3950.0);
    const double split = 0.5 * (p2h_efficiency(kCurve, 1.0, 3000.0) + p2h_efficiency(kCurve, 1.0, 4900.0));
    CHECK(even > split);
    ElectrolyzerSpec spec;
    const std::vector<double> pair{3000.0, 4900.0};
    const std::vector<double> same{3950.0, 3950.0};
    CHECK(plant_efficiency(spec, same) > plant_efficiency(spec, pair));
    CHECK(plant_efficiency(spec, same) == doctest::Approx(0.578).epsilon(0.015 / 0.578));
    CHECK(plant_efficiency(spec, pair) == doctest::Approx(0.572).epsilon(0.015 / 0.572));
}

TEST_CASE("even split maximizes hydrogen at fixed power") {
    auto current_for = [&](double power) {
        double lo = 0.0, hi = 10000.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (stack_power(kCurve, mid) < power ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    // Scan splits of each total stack power on a 5 A grid of I1.
    for (double total = 4.0e6; total <= 8.0e6; total += 1.0e6) {
        double best_sum = 0.0, best_i1 = 0.0;
        for (double i1 = 2000.0; i1 <= 7000.0; i1 += 5.0) {
            const double rest = total - stack_power(kCurve, i1);
            if (rest < stack_power(kCurve, 2000.0)) {
                break;
            }
            const double i2 = current_for(rest);
            if (i2 <= 7000.0 && i1 + i2 > best_sum) {
                best_sum = i1 + i2;
                best_i1 = i1;
            }
        }
        const double half = current_for(0.5 * total);
        CHECK(std::abs(best_i1 - half) <= 5.0);
        CHECK(2.0 * half >= best_sum - 1e-6);
    }
}
