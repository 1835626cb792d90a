// dynamics.hpp — Driven unitary dynamics: oscillating drive Hamiltonians, an
// adaptive RKF45 propagator for matrix-valued ODEs, rotating-wave error
// quantification, pulsed-control accuracy across the field axis, idealized
// pulse protocols (nutation, Hahn echo, inversion recovery) with fits, echo
// refocusing checks, and free-induction-decay lineshapes.
//
// All times are us, frequencies rad/us. States evolve in the lab frame under
// d rho/dt = i [rho, H]; global phase never enters (density operators only).

#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nespin/noise.hpp"
#include "nespin/spectra.hpp"
#include "nespin/timeseries.hpp"

namespace nespin {

// Sense of the transverse drive field. Right-handed rotates Fx toward Fy;
// linear is the cosine quadrature alone (both rotating terms retained).
enum class DrivePolarization { right_handed, left_handed, linear };

// Monochromatic transverse drive with a square envelope. Couples through
// F = S + dg I so electron and nucleus are driven with their natural
// relative strength.
struct DriveSpec {
    double omega1 = 0.0;  // drive amplitude, rad/us
    double omega = 0.0;   // carrier frequency, rad/us
    DrivePolarization polarization = DrivePolarization::right_handed;
    double phase = 0.0;     // carrier phase at t = 0, rad
    double start = 0.0;     // envelope turn-on, us
    double duration = 0.0;  // envelope length, us

    void validate() const;  // DomainError on omega1 <= 0, omega < 0 or duration <= 0
    bool active(double t) const { return t >= start && t < start + duration; }
};

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 1.0;    // us
    double min_step = 1e-12;  // us; going below raises IntegrationError

    void validate() const;  // DomainError unless all > 0 and min_step <= max_step
};

// omega1 f(t) [cos(omega t + phase) Fx +/- sin(omega t + phase) Fy] for
// right/left handed, cosine term alone for linear. Zero outside the envelope.
Matrix drive_hamiltonian(const SpinSystemParams& p, const DriveSpec& d, double t);

// Adaptive Runge-Kutta-Fehlberg 4(5): propagates the 5th-order solution,
// controls the max entrywise error |y5 - y4| against
// abs_tol + rel_tol |y5|. hermitize restores y = (y + y^dag)/2 after each
// accepted step. Throws IntegrationError when the step underflows min_step.
Matrix integrate_rkf45(const std::function<Matrix(double, const Matrix&)>& rhs,
                       Matrix y0, double t0, double t1, const IntegratorConfig& cfg = {},
                       bool hermitize = false);

// Lab-frame evolution under the static Hamiltonian plus drive over [t0, t1].
DensityOperator evolve(const SpinSystemParams& p, FieldPoint f, const DriveSpec& d,
                       const DensityOperator& rho0, double t0, double t1,
                       const IntegratorConfig& cfg = {});

// Same evolution sampled on a grid: values are Re tr(observable rho(t)).
// times must start at or after t0.
TimeSeries evolve_observed(const SpinSystemParams& p, FieldPoint f, const DriveSpec& d,
                           const DensityOperator& rho0, const Matrix& observable,
                           double t0, const std::vector<double>& times,
                           const IntegratorConfig& cfg = {});

struct RwaErrorPoint {
    double ratio = 0.0;     // omega1 / (8 omega0)
    double distance = 0.0;  // trace distance from the rotating-wave target
};

// Exact linear-drive pi flip versus the rotating-wave prediction on a
// two-level system of splitting omega0: drives at omega1 = 8 omega0 ratio for
// tau = 4 pi / omega1 from the excited state and reports the trace distance
// from the ground projector. ratio = 0 is the closed rotating-wave limit and
// returns 0 without integrating.
std::vector<RwaErrorPoint> rwa_error(double omega0, const std::vector<double>& ratios,
                                     const IntegratorConfig& cfg = {});

struct ControlPoint {
    double b0 = 0.0;             // T
    double trace_distance = 0.0; // achieved D(rho_final, target projector)
    bool skipped = false;        // no usable resonance at this field
};

// Resonant selective pi flip on one transition at each listed field: drives
// circularly with the chirality the transition couples to, amplitude set so
// the on-resonance flip rate equals rabi, for tau = pi / (2 rabi), starting
// from the upper-m member (or the m-1 member when start_lower). Fields where
// the matrix element or the splitting vanishes come back skipped.
std::vector<ControlPoint> control_accuracy(const SpinSystemParams& p,
                                           const std::vector<double>& b0_list,
                                           TransitionLabel target, double rabi,
                                           bool start_lower = false,
                                           const IntegratorConfig& cfg = {});

enum class ProtocolScheme { nutation, hahn_t2, t1 };

// Decoherence applied across a wait window [t_start, t_start + tau]. The
// window start matters only for time-inhomogeneous envelopes.
using WaitChannel = std::function<KrausChannel(double t_start, double tau)>;

inline constexpr double no_decay = std::numeric_limits<double>::infinity();

WaitChannel unitary_wait();
// Dephasing with cumulative coherence e^{-t/t2 - (t/ts)^n}.
WaitChannel dephasing_wait(double t2, double ts = no_decay, double n = 2.0);
// Amplitude damping toward the ground state at rate 1/t1.
WaitChannel damping_wait(double t1);

struct FitResult {
    std::string model;           // "exponential", "exp_stretched", "exp_recovery",
                                 // "frequency_peak" or "none"
    std::vector<double> params;
    double rms = 0.0;            // residual in readout units
    bool fit_failed = false;
};

struct ProtocolResult {
    ProtocolScheme scheme = ProtocolScheme::hahn_t2;
    std::vector<double> schedule_us;  // tau per shot
    std::vector<double> sx, sy;       // readouts per shot
    FitResult fit;
};

// Idealized two-level pulse sequences with instantaneous pulses and channel
// waits. Readout is <sigma_x>, <sigma_y> after the sequence.
//   nutation: rotate about y by rate tau from |0>, wait tau, read. Fit:
//             dominant discrete-cosine peak of sx (params {omega, bin_width};
//             requires a uniform schedule).
//   hahn_t2:  pi/2 prepare (+x), wait tau, pi about x, wait tau, read at
//             2 tau. Fit: log-linear A e^{-t/t2} e^{-(t/ts)^2} on the echo
//             amplitude against t = 2 tau; reported as "exponential"
//             {A, t2} when the stretched term is negligible over the
//             schedule, else "exp_stretched" {A, t2, ts}.
//   t1:       prepare excited, wait tau, pi/2 readout mapping z to x. Fit:
//             c + a e^{-t/t1} with t1 from a golden-section search
//             (params {c, a, t1}).
// Schedules must be nonempty, nonnegative and strictly increasing; fits
// need at least four shots, else fit_failed with model "none".
ProtocolResult run_protocol(ProtocolScheme scheme, const WaitChannel& wait,
                            const std::vector<double>& schedule,
                            double nutation_rate = 0.0);

enum class EchoEnvironment { static_detuning_ensemble, ising_bath_spin, linear_drift };

// Worst-case trace distance between the input and the Hahn-echoed output
// (wait tau, pi about x, wait tau, pi about x) over the four cardinal qubit
// states.
//   static_detuning_ensemble: channel averaged over `samples` detunings drawn
//     from mt19937(seed); refocusing is exact, the return is roundoff.
//   ising_bath_spin: sigma_z x sigma_z coupling (1 rad/us) to one bath spin in
//     a random pure state; the flip conjugates the coupling away exactly.
//   linear_drift: detuning ramp t * 1 rad/us^2, integrated numerically; the
//     residual phase k tau^2 survives the echo, so the distance ~ tau^2.
double hahn_echo_check(EchoEnvironment env, double tau, int samples = 100,
                       unsigned seed = 7);

enum class LineshapeKind { homogeneous, inhomogeneous };

// Free induction decay cos(omega0 t) enveloped by e^{-alpha t} (homogeneous)
// or e^{-(alpha t)^2/2} (inhomogeneous), with its absorption lineshape both in
// closed form (unit-area Lorentzian of HWHM alpha / unit-area Gaussian of
// width alpha) and as the numeric one-sided cosine transform of the sampled
// decay. Spectra are sampled on 801 points across omega0 +- 8 alpha.
struct Lineshape {
    TimeSeries fid;
    TimeSeries spectrum_analytic;
    TimeSeries spectrum_numeric;
};
Lineshape fid_lineshape(LineshapeKind kind, double omega0, double alpha,
                        const std::vector<double>& tgrid);

} // namespace nespin
