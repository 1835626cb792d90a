// noise.hpp — Open-system machinery: qubit Kraus channels, Markovian Z/X
// Lindblad generators built from frequency components of the electron spin
// coupling, closed-form dephasing and depolarisation rates, optimal working
// points, steady states and exact small-bath coherence.
//
// Generators act on density operators written in the free-Hamiltonian
// eigenbasis (ascending energy, same order as eigen_analytic). Superoperators
// use column stacking: vec(A rho B) = (B^T kron A) vec(rho).

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "nespin/spectra.hpp"
#include "nespin/timeseries.hpp"

namespace nespin {

enum class NoiseAxis { z, x };

inline constexpr double adiabatic_chi = std::numeric_limits<double>::infinity();

// Electron-spin coupling to a fluctuating field along one axis. The Gaussian
// correlation function gives each frequency component S(Omega) the weight
// e^{-chi Omega^2}; chi = adiabatic_chi is a discrete flag keeping only the
// Omega = 0 component rather than a numerical limit.
struct NoiseSpec {
    NoiseAxis axis = NoiseAxis::z;
    double v = 0.0;    // coupling strength, rad/us
    double chi = 0.0;  // correlation parameter, us^2

    void validate() const;  // DomainError on v < 0 or chi < 0
    bool adiabatic() const { return std::isinf(chi); }
    double weight(double omega) const;  // e^{-chi omega^2}; adiabatic: 1 at 0, else 0
};

// Completely positive trace-preserving map given by Kraus operators.
struct KrausChannel {
    std::vector<Matrix> kraus;

    DensityOperator apply(const DensityOperator& rho) const;
    double completeness_defect() const;  // max-norm of sum K^dag K - 1
};

// lambda(tau) = (1 - e^{-tau/t2})/2 applied as {1, sigma_z} mixture.
KrausChannel dephasing_channel(double tau, double t2);
// lambda(tau) = (3/4)(1 - e^{-4 gamma tau}) split equally over the three Paulis.
KrausChannel depolarising_channel(double tau, double gamma);
// Decay toward the first basis vector; matrices in the (ground, excited)
// ordering. Transverse coherence decays at half the population rate.
KrausChannel amplitude_damping_channel(double tau, double t1);
// Convex mixture of unitaries with weights summing to one.
KrausChannel random_unitary_channel(const std::vector<double>& probabilities,
                                    const std::vector<Matrix>& unitaries);

struct LindbladGenerator {
    Eigen::Index dim = 0;
    Matrix superop;           // dim^2 x dim^2, column-stacking convention
    Matrix hamiltonian_part;  // diagonal energies of the eigenbasis, rad/us
    NoiseSpec spec;

    // -Re <<E_ab| L |E_ab>> for the unit coherence E_ab = |a><b|.
    double coherence_decay_rate(Eigen::Index a, Eigen::Index b) const;
};

// Jump operators are the Bohr-frequency components of Sz (x) 1 in the
// eigenbasis, weighted by V^2 e^{-chi Omega^2}. Frequencies closer than
// 1e-9 * A_iso share one component. interaction_picture drops the coherent
// commutator term, leaving dissipation only.
LindbladGenerator lindblad_z(const SpinSystemParams& p, FieldPoint f, const NoiseSpec& spec,
                             bool interaction_picture = true);

// Same construction restricted to the four levels {phi+-_m, phi+-_{m-1}} in
// that basis order. When m-1 is the edge subspace the missing branch keeps a
// decoupled zero row so the operator algebra stays four-dimensional.
LindbladGenerator lindblad_z_truncated(const SpinSystemParams& p, FieldPoint f, int two_m,
                                       const NoiseSpec& spec,
                                       bool interaction_picture = true);

// X-axis coupling has no Omega = 0 component, so the adiabatic flag is
// meaningless here: ModeError.
LindbladGenerator lindblad_x(const SpinSystemParams& p, FieldPoint f, const NoiseSpec& spec,
                             bool interaction_picture = true);

// exp(t superop) applied to vec(rho0). The output is re-validated: trace
// within 1e-8 of one, eigenvalues above -1e-6 (harder violations raise
// GeneratorError), then clamped and renormalized.
DensityOperator evolve_lindblad(const LindbladGenerator& g, const DensityOperator& rho0,
                                double t);

// Expectation series tr(obs rho(t)) over the grid, reusing the matrix
// exponential across equal time increments.
TimeSeries evolve_lindblad_series(const LindbladGenerator& g, const DensityOperator& rho0,
                                  const Matrix& observable, const std::vector<double>& times);

// Closed-form Markovian rates for a superposition across the labelled
// transition. Opposite-branch pairs (pm, mp) dephase through the sum of the
// two cos(theta); same-branch pairs (pp, mm) through the difference.
struct PredictedRates {
    double t2_rate = 0.0;        // rad/us
    double t1_rate_upper = 0.0;  // depolarisation of subspace m
    double t1_rate_lower = 0.0;  // depolarisation of subspace m-1
    double owp_distance = 0.0;   // |cos theta_m +- cos theta_{m-1}| / 2
};

PredictedRates predicted_rates(const SpinSystemParams& p, FieldPoint f, TransitionLabel t,
                               const NoiseSpec& spec);

// Readout tr[sigma_z^{01} rho(t)] when each member of the superposition
// depolarises within its own m subspace at its own rate.
double effective_depolarisation_signal(const PredictedRates& r, double p_upper,
                                       double p_lower, double t);

// Field where the dephasing bracket of the labelled transition vanishes;
// exists only for -I + 3/2 <= m <= 0 and opposite-branch kinds.
std::optional<FieldPoint> owp_find(const SpinSystemParams& p, TransitionLabel t,
                                   double b0_hi = 200.0);

// Hermitian, trace-orthonormal basis of the generator's kernel
// (|eigenvalue| <= 1e-8 V^2, or <= 1e-12 when V = 0). GeneratorError when
// empty.
std::vector<Matrix> steady_basis(const LindbladGenerator& g);

// Valid density operators spanning the kernel: the maximally mixed state
// plus one admixture per non-identity basis direction.
std::vector<DensityOperator> steady_states(const LindbladGenerator& g);

// Basis change helpers between the product basis and the eigenbasis order
// used by the generators.
Matrix to_eigen_basis(const EigenSystem& sys, const Matrix& rho_product);
Matrix to_product_basis(const EigenSystem& sys, const Matrix& rho_eigen);

// Bath of n_spins spin-1/2 objects coupled to the electron spin. Only the
// z coupling enters the pure-decoherence unitaries; x/y couplings are kept
// for completeness of the description.
struct BathSpec {
    int n_spins = 0;
    Matrix bath_hamiltonian;
    Matrix coupling_z;
    Matrix coupling_x;
    Matrix coupling_y;
    DensityOperator initial_state{Matrix::Identity(1, 1)};

    void validate() const;  // SizeError above 8 spins, DimensionError on mismatch
};

// L(tau) = sum_i P(i) |<chi_i| U_a(tau)^dag U_b(tau) |chi_i>| with
// U_{a/b} = exp(-i tau (H_B + <Sz>_{a/b} B_z)), the coherence envelope of an
// equal superposition across the transition. hahn_echo interleaves the two
// conditional unitaries over tau/2 halves.
TimeSeries bath_coherence(const SpinSystemParams& p, FieldPoint f, TransitionLabel t,
                          const BathSpec& bath, const std::vector<double>& tgrid,
                          bool hahn_echo = false);

} // namespace nespin
