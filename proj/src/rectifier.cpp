#include "p2h/rectifier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <mutex>
#include <numbers>

namespace p2h {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sinc(double x) {
    if (std::abs(x) < 1e-8) {
        return 1.0 - x * x / 6.0;
    }
    return std::sin(x) / x;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Mean of the unit sawtooth (x mod 2pi) over the window [x - width, x].
double smoothed_sawtooth(double x, double width) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    if (width <= 0.0) {
        return r;
    }
    if (r >= width) {
        return r - 0.5 * width;
    }
    const double before = width - r;
    return (before * (kTwoPi - 0.5 * before) + 0.5 * r * r) / width;
}

// Step heights of the ideal 24-step wave follow cos(theta_k) so that only the
// orders h = 24k +- 1 survive.
class SteppedCurrent {
public:
    SteppedCurrent(const OperatingPoint& op, int pulses)
        : pulses_(pulses), alpha_(op.alpha), gamma_(op.gamma) {
        const double amplitude =
            4.0 * kPi * op.i_fund / (std::sqrt(2.0) * pulses * sinc(0.5 * op.gamma));
        heights_.resize(static_cast<std::size_t>(pulses));
        for (int k = 0; k < pulses; ++k) {
            heights_[static_cast<std::size_t>(k)] = amplitude * std::cos(kTwoPi * k / pulses);
        }
        for (int k = 0; k < pulses; ++k) {
            const double start = kTwoPi * k / pulses + alpha_;
            breakpoints_.push_back(wrap(start));
            if (gamma_ > 0.0) {
                breakpoints_.push_back(wrap(start + gamma_));
            }
        }
        std::sort(breakpoints_.begin(), breakpoints_.end());
    }

    double operator()(double theta) const {
        double sum = 0.0;
        for (int k = 0; k < pulses_; ++k) {
            const double onset = kTwoPi * k / pulses_ + alpha_;
            sum += heights_[static_cast<std::size_t>(k)] * smoothed_sawtooth(theta - onset, gamma_);
        }
        return -sum / kTwoPi;
    }

    // Exact mean over [lo, hi]; the current is piecewise linear between breakpoints.
    double mean(double lo, double hi) const {
        std::vector<double> knots{lo};
        const double base = std::floor(lo / kTwoPi) * kTwoPi;
        for (int wrap_count = 0; wrap_count < 2; ++wrap_count) {
            for (double b : breakpoints_) {
                const double x = base + wrap_count * kTwoPi + b;
                if (x > lo && x < hi) {
                    knots.push_back(x);
                }
            }
        }
        knots.push_back(hi);
        std::sort(knots.begin(), knots.end());
        double integral = 0.0;
        for (std::size_t i = 1; i < knots.size(); ++i) {
            const double a = knots[i - 1];
            const double b = knots[i];
            if (b <= a) {
                continue;
            }
            // Evaluate just inside each segment so jump discontinuities at
            // gamma = 0 are attributed to the correct side.
            const double eps = 1e-12 * (b - a);
            integral += 0.5 * (b - a) * ((*this)(a + eps) + (*this)(b - eps));
        }
        return integral / (hi - lo);
    }

private:
    static double wrap(double x) {
        double r = std::fmod(x, kTwoPi);
        return r < 0.0 ? r + kTwoPi : r;
    }

    int pulses_;
    double alpha_;
    double gamma_;
    std::vector<double> heights_;
    std::vector<double> breakpoints_;
};

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

void RectifierParams::validate() const {
    if (!(u_ac > 0.0)) {
        throw std::invalid_argument("rectifier: u_ac must be positive");
    }
    if (!(turn_ratio > 0.0)) {
        throw std::invalid_argument("rectifier: turn_ratio must be positive");
    }
    if (!(x_c >= 0.0)) {
        throw std::invalid_argument("rectifier: x_c must be non-negative");
    }
    if (pulse_number != kPulseNumber) {
        throw std::invalid_argument("rectifier: only 24-pulse rectifiers are modelled");
    }
}

void PolarizationCurve::validate() const {
    if (n_cell < 1) {
        throw std::invalid_argument("polarization curve: n_cell must be >= 1");
    }
    if (r_ohm < 0.0 || s_act < 0.0 || t_act < 0.0) {
        throw std::invalid_argument("polarization curve: coefficients must be non-negative");
    }
}

void ElectrolyzerSpec::validate() const {
    rectifier.validate();
    curve.validate();
    if (!(eta_faraday > 0.0 && eta_faraday <= 1.0)) {
        throw std::invalid_argument("electrolyzer: eta_faraday must be in (0, 1]");
    }
    if (!(aux_power >= 0.0)) {
        throw std::invalid_argument("electrolyzer: aux_power must be non-negative");
    }
    if (!(i_min > 0.0 && i_max > i_min)) {
        throw std::invalid_argument("electrolyzer: require 0 < i_min < i_max");
    }
}

bool is_characteristic_order(int h, int pulse_number) {
    if (h == 1) {
        return true;
    }
    if (h < 1) {
        return false;
    }
    const int r = h % pulse_number;
    return r == 1 || r == pulse_number - 1;
}

double stack_voltage(const PolarizationCurve& curve, double current) {
    if (current < 0.0) {
        throw std::invalid_argument(fmt::format("stack_voltage: negative current {}", current));
    }
    const double cell = curve.u_rev + curve.r_ohm * current +
                        curve.s_act * std::log10(curve.t_act * current + 1.0);
    return curve.n_cell * cell;
}

double stack_power(const PolarizationCurve& curve, double current) {
    return stack_voltage(curve, current) * current;
}

OperatingPoint solve_operating_point(const RectifierParams& params, const PolarizationCurve& curve,
                                     double current) {
    params.validate();
    curve.validate();
    if (!(current > 0.0)) {
        throw std::invalid_argument(
            fmt::format("solve_operating_point: current must be positive, got {}", current));
    }
    OperatingPoint op;
    op.current = current;
    op.u_stack = stack_voltage(curve, current);
    op.delta_u = 3.0 / kPi * params.x_c * current;

    // Adding and subtracting the voltage balance and the overlap relation
    // isolates cos(alpha) and cos(alpha + gamma).
    const double ud0 = params.ideal_dc_voltage();
    const double cos_alpha = (op.u_stack + op.delta_u) / ud0;
    const double cos_end = (op.u_stack - op.delta_u) / ud0;
    if (cos_alpha > 1.0) {
        throw NoOperatingPointError(
            current, fmt::format("no operating point at I = {:.1f} A: required cos(alpha) = {:.6f} "
                                 "exceeds 1 (AC voltage too low for the stack voltage {:.1f} V)",
                                 current, cos_alpha, op.u_stack));
    }
    if (cos_end <= -1.0) {
        throw NoOperatingPointError(
            current, fmt::format("no operating point at I = {:.1f} A: commutation does not "
                                 "complete (alpha + gamma >= pi)",
                                 current));
    }
    op.alpha = std::acos(cos_alpha);
    op.gamma = std::acos(cos_end) - op.alpha;
    op.i_fund = 2.0 * op.u_stack * current /
                (std::sqrt(3.0) * params.u_ac * (cos_alpha + cos_end));
    return op;
}

std::array<double, 3> operating_point_residuals(const RectifierParams& params,
                                                const PolarizationCurve& curve,
                                                const OperatingPoint& op) {
    const double ud0 = params.ideal_dc_voltage();
    const double u_stack = stack_voltage(curve, op.current);
    const double ca = std::cos(op.alpha);
    const double cag = std::cos(op.alpha + op.gamma);
    const double voltage = (ud0 * ca - op.delta_u - u_stack) / u_stack;
    const double drop_ref = 3.0 / kPi * params.x_c * op.current;
    const double overlap = std::abs((ca - cag) - 2.0 * drop_ref / ud0) +
                           std::abs(op.delta_u - drop_ref) / u_stack;
    const double power = (std::sqrt(3.0) * params.u_ac * op.i_fund * 0.5 * (ca + cag) -
                          u_stack * op.current) /
                         (u_stack * op.current);
    return {std::abs(voltage), overlap, std::abs(power)};
}

Waveform synthesize_ac_waveform(const OperatingPoint& op, std::size_t sample_count) {
    if (!is_power_of_two(sample_count) || sample_count < 4096) {
        throw std::invalid_argument(fmt::format(
            "synthesize_ac_waveform: sample_count must be a power of two >= 4096, got {}",
            sample_count));
    }
    if (op.gamma < 0.0 || op.alpha < 0.0 || op.i_fund < 0.0) {
        throw std::invalid_argument("synthesize_ac_waveform: invalid operating point");
    }
    if (op.gamma >= kTwoPi / 2.0) {
        throw std::invalid_argument("synthesize_ac_waveform: overlap too large");
    }
    const SteppedCurrent current(op, kPulseNumber);
    const double step = kTwoPi / static_cast<double>(sample_count);
    Waveform w;
    w.samples.resize(sample_count);
    for (std::size_t m = 0; m < sample_count; ++m) {
        const double centre = step * static_cast<double>(m);
        w.samples[m] = current.mean(centre - 0.5 * step, centre + 0.5 * step);
    }
    return w;
}

std::vector<HarmonicPhasor> harmonic_spectrum(const Waveform& w, int max_order) {
    const std::size_t n = w.sample_count();
    if (!is_power_of_two(n) || n < 4) {
        throw std::invalid_argument("harmonic_spectrum: sample count must be a power of two");
    }
    if (max_order < 1) {
        throw std::invalid_argument("harmonic_spectrum: max_order must be >= 1");
    }
    if (static_cast<std::size_t>(max_order) * 4 > n) {
        throw AliasingError(fmt::format(
            "order {} too close to the Nyquist limit of a {}-sample waveform", max_order, n));
    }
    std::vector<double> in(w.samples.begin(), w.samples.end());
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    // Bin X_h = N c_h; the sine-referenced RMS phasor is j sqrt(2) c_h.
    const double scale = std::sqrt(2.0) / static_cast<double>(n);
    std::vector<HarmonicPhasor> result;
    result.reserve(static_cast<std::size_t>(max_order));
    for (int h = 1; h <= max_order; ++h) {
        const std::complex<double> bin(out[static_cast<std::size_t>(h)][0],
                                       out[static_cast<std::size_t>(h)][1]);
        result.push_back({h, std::complex<double>(0.0, 1.0) * bin * scale});
    }
    return result;
}

HarmonicPhasor harmonic_phasor_fft(const Waveform& w, int h) {
    if (h < 1) {
        throw std::invalid_argument(fmt::format("harmonic_phasor_fft: invalid order {}", h));
    }
    return harmonic_spectrum(w, h).back();
}

HarmonicPhasor harmonic_phasor_analytic(const OperatingPoint& op, int h) {
    if (!is_characteristic_order(h)) {
        throw UnsupportedOrderError(
            fmt::format("order {} is not a characteristic order of a 24-pulse rectifier", h));
    }
    const double ratio = sinc(0.5 * h * op.gamma) / (h * sinc(0.5 * op.gamma));
    return {h, std::polar(op.i_fund * ratio, -h * op.displacement())};
}

HarmonicPhasor harmonic_at_current(const ElectrolyzerSpec& spec, double current, int h) {
    if (current <= 0.0) {
        return {h, {}};
    }
    return harmonic_phasor_analytic(solve_operating_point(spec.rectifier, spec.curve, current), h);
}

double hydrogen_rate(const PolarizationCurve& curve, double eta_faraday, double current) {
    if (current < 0.0) {
        throw std::invalid_argument("hydrogen_rate: negative current");
    }
    return eta_faraday * curve.n_cell * current / (2.0 * kFaraday);
}

double hydrogen_mass_rate(const PolarizationCurve& curve, double eta_faraday, double current) {
    return hydrogen_rate(curve, eta_faraday, current) * kH2MolarMass * 3600.0;
}

double p2h_efficiency(const PolarizationCurve& curve, double eta_faraday, double current,
                      double aux_power, double lhv) {
    if (current <= 0.0) {
        return 0.0;
    }
    return hydrogen_rate(curve, eta_faraday, current) * lhv /
           (stack_power(curve, current) + aux_power);
}

double plant_efficiency(const ElectrolyzerSpec& spec, std::span<const double> currents) {
    double h2_power = 0.0;
    double input = 0.0;
    for (double current : currents) {
        if (current <= 0.0) {
            continue;
        }
        h2_power += hydrogen_rate(spec.curve, spec.eta_faraday, current) * kH2LowerHeatingValue;
        input += stack_power(spec.curve, current) + spec.aux_power;
    }
    return input > 0.0 ? h2_power / input : 0.0;
}

}  // namespace p2h
