// spectra.hpp — Magnetic-resonance transitions between adjacent m-subspaces:
// frequencies, dipole rates, resonance-field solving, frequency stationary
// points, frequency gaps and Rabi frequencies.
//
// A transition label (kind, m) names the pair {level in subspace m, level in
// subspace m-1}; the kind fixes the branch of each member: pp (+,+), mm (-,-),
// pm (+,-), mp (-,+). All frequencies are magnitudes |E_i - E_j| in rad/us.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nespin/breitrabi.hpp"

namespace nespin {

enum class TransitionKind { pp, mm, pm, mp };

struct TransitionLabel {
    TransitionKind kind = TransitionKind::pm;
    int two_m = 0;  // m of the upper-m member

    bool operator==(const TransitionLabel&) const = default;
};

const char* kind_name(TransitionKind kind);
Branch upper_branch(TransitionKind kind);  // branch of the m member
Branch lower_branch(TransitionKind kind);  // branch of the m-1 member

// "pm:m=-4" (m printed as exact rational, see m_label).
std::string transition_name(TransitionLabel t);
TransitionLabel parse_transition(const std::string& name);

bool transition_valid(const SpinSystemParams& p, TransitionLabel t);

// Every valid label, kinds in order pp, mm, pm, mp, m ascending within a
// kind. Counts per kind: 2I, 2I, 2I+1, 2I-1.
std::vector<TransitionLabel> all_transitions(const SpinSystemParams& p);

// |E_m - E_{m-1}| between the two labelled levels.
double transition_frequency(const SpinSystemParams& p, FieldPoint f, TransitionLabel t);

// d|E_i - E_j|/dB0, exact via <gamma_e Sz - gamma_n Iz> on each member.
double transition_frequency_gradient(const SpinSystemParams& p, FieldPoint f, TransitionLabel t);

// eta = <phi_j|Sx|phi_i>, xi = <phi_j|Ix|phi_i> (both real in this basis).
struct TransitionElements {
    double eta = 0.0;
    double xi = 0.0;
};
TransitionElements transition_elements(const SpinSystemParams& p, FieldPoint f,
                                       TransitionLabel t);

// 4|<phi_j|(Sx + dg Ix)|phi_i>|^2, normalized so a fully allowed high-field
// electron transition is 1.
double transition_rate(const SpinSystemParams& p, FieldPoint f, TransitionLabel t);

// omega1 * |eta + dg xi|: the on-resonance flip rate under a circularly
// polarized drive of strength omega1.
double rabi_frequency(const SpinSystemParams& p, FieldPoint f, TransitionLabel t,
                      double omega1);

// Chirality: +1 when the higher-energy member has the larger m (right-handed
// drive couples), -1 otherwise.
int parity_sign(const SpinSystemParams& p, FieldPoint f, TransitionLabel t);

enum class Polarization { circular, linear };

// Smallest |Omega_target - Omega'| over the other valid transitions; circular
// polarization restricts candidates to the target's chirality.
double frequency_gap(const SpinSystemParams& p, FieldPoint f, TransitionLabel t,
                     Polarization pol);

// All B0 in [b0_lo, b0_hi] where the transition frequency equals omega,
// located by a sign-change scan and refined to |dOmega| <= 1e-6 * omega.
std::vector<FieldPoint> resonance_fields(const SpinSystemParams& p, double omega,
                                         TransitionLabel t, double b0_lo, double b0_hi,
                                         int grid = 2001);

struct SpectrumLine {
    FieldPoint field;
    TransitionLabel transition;
    double frequency = 0.0;      // rad/us at the resonance field
    double relative_rate = 0.0;  // transition_rate there
};

// Union of resonance_fields over every valid transition, sorted by field
// (ties by label order).
std::vector<SpectrumLine> cw_spectrum(const SpinSystemParams& p, double omega,
                                      double b0_lo, double b0_hi, int grid = 2001);

enum class StationaryKind { minimum, maximum };

struct FrequencyStationaryPoint {
    FieldPoint field;
    StationaryKind kind = StationaryKind::minimum;
};

// Roots of dOmega/dB0 in (b0_lo, b0_hi], classified by the slope's sign
// change. b0_hi <= 0 selects the default window 100*A_iso/gamma_e.
std::vector<FrequencyStationaryPoint> fsp_exact(const SpinSystemParams& p, TransitionLabel t,
                                                double b0_lo = 0.0, double b0_hi = -1.0,
                                                int grid = 2001);

// Closed-form field of the small-delta-gamma limit, valid for
// -I+3/2 <= m <= 0; empty when no non-negative solution exists.
std::optional<FieldPoint> fsp_limit_closed_form(const SpinSystemParams& p, int two_m,
                                                StationaryKind kind);

} // namespace nespin
