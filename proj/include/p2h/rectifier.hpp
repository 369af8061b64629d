#pragma once

// Thyristor-rectifier (24-pulse) operating point and characteristic harmonic
// currents of an electrolyzer load.
//
// Conventions used throughout the library:
//   * angles are in radians, currents in A, voltages in V, powers in W;
//   * theta = 0 is the rising zero crossing of the phase-a PCC voltage;
//   * a harmonic phasor X of order h is an RMS phasor describing the
//     component sqrt(2) |X| sin(h theta + arg X) of the phase-a current.

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2h {

inline constexpr double kFaraday = 96485.0;          // C/mol
inline constexpr double kH2LowerHeatingValue = 241.8e3;  // J/mol
inline constexpr double kH2MolarMass = 2.016e-3;     // kg/mol
inline constexpr double kBridgeVoltageFactor = 2.4435;
inline constexpr int kPulseNumber = 24;

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// AC voltage too low to deliver the stack voltage at the requested current.
class NoOperatingPointError : public ModelError {
public:
    NoOperatingPointError(double current, const std::string& what)
        : ModelError(what), current_(current) {}
    double current() const noexcept { return current_; }

private:
    double current_;
};

class UnsupportedOrderError : public ModelError {
public:
    using ModelError::ModelError;
};

class AliasingError : public ModelError {
public:
    using ModelError::ModelError;
};

struct RectifierParams {
    double u_ac = 10e3;         // AC bus line voltage
    double turn_ratio = 33.338;  // K
    double x_c = 5.7814e-3;     // commutation reactance referred to the DC side
    int pulse_number = kPulseNumber;
    double rated_stack_power = 5e6;

    /// No-load DC voltage at alpha = 0, 2.4435 U_ac / K.
    double ideal_dc_voltage() const { return kBridgeVoltageFactor * u_ac / turn_ratio; }
    void validate() const;
};

/// Alkaline stack law u_cell(I) = u_rev + r_ohm I + s_act log10(t_act I + 1).
/// Defaults are the calibrated values documented in README.md.
struct PolarizationCurve {
    int n_cell = 350;
    double u_rev = 1.30249;
    double r_ohm = 3.49997e-5;
    double s_act = 0.452227;
    double t_act = 1.154825e-3;

    void validate() const;
};

struct OperatingPoint {
    double current = 0.0;  // DC electrolytic current
    double alpha = 0.0;    // firing angle
    double gamma = 0.0;    // commutation overlap
    double u_stack = 0.0;
    double i_fund = 0.0;   // RMS fundamental AC current
    double delta_u = 0.0;  // commutation voltage drop

    /// Displacement of the fundamental behind the voltage, alpha + gamma/2.
    double displacement() const { return alpha + 0.5 * gamma; }
};

struct HarmonicPhasor {
    int order = 1;
    std::complex<double> value{};

    double magnitude() const { return std::abs(value); }
    double phase() const { return std::arg(value); }
};

/// One fundamental period of the phase-a current, uniformly sampled.
struct Waveform {
    std::vector<double> samples;

    std::size_t sample_count() const { return samples.size(); }
};

/// Bundles everything needed to turn a DC current into PCC harmonics.
struct ElectrolyzerSpec {
    RectifierParams rectifier;
    PolarizationCurve curve;
    double eta_faraday = 1.0;
    double aux_power = 0.5e6;
    double i_min = 2000.0;
    double i_max = 7000.0;

    void validate() const;
};

bool is_characteristic_order(int h, int pulse_number = kPulseNumber);

double stack_voltage(const PolarizationCurve& curve, double current);
double stack_power(const PolarizationCurve& curve, double current);

OperatingPoint solve_operating_point(const RectifierParams& params, const PolarizationCurve& curve,
                                     double current);

/// Relative residuals of the DC voltage balance, the commutation drop relation
/// and the AC/DC power balance at `op`.
std::array<double, 3> operating_point_residuals(const RectifierParams& params,
                                                const PolarizationCurve& curve,
                                                const OperatingPoint& op);

inline constexpr std::size_t kDefaultSampleCount = 16384;

/// 24-step phase current with linear commutation ramps of width gamma, scaled
/// so that its RMS fundamental equals op.i_fund. Each sample is the mean of
/// the current over its sampling interval.
Waveform synthesize_ac_waveform(const OperatingPoint& op,
                                std::size_t sample_count = kDefaultSampleCount);

HarmonicPhasor harmonic_phasor_fft(const Waveform& w, int h);

/// All phasors of orders 1..max_order from a single transform.
std::vector<HarmonicPhasor> harmonic_spectrum(const Waveform& w, int max_order);

/// Closed-form Fourier coefficient of the linear-ramp 24-step current.
HarmonicPhasor harmonic_phasor_analytic(const OperatingPoint& op, int h);

/// Harmonic phasor at the PCC for one electrolyzer drawing `current`.
HarmonicPhasor harmonic_at_current(const ElectrolyzerSpec& spec, double current, int h);

/// Hydrogen molar production rate (mol/s) from Faraday's law.
double hydrogen_rate(const PolarizationCurve& curve, double eta_faraday, double current);

/// Hydrogen mass flow in kg/h.
double hydrogen_mass_rate(const PolarizationCurve& curve, double eta_faraday, double current);

/// LHV hydrogen power over total electrolyzer power (stack plus auxiliaries).
double p2h_efficiency(const PolarizationCurve& curve, double eta_faraday, double current,
                      double aux_power = 0.5e6, double lhv = kH2LowerHeatingValue);

/// Plant-level efficiency of several units: total LHV power over total input power.
double plant_efficiency(const ElectrolyzerSpec& spec, std::span<const double> currents);

}  // namespace p2h
