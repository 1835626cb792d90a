// breitrabi.hpp — Static model of one donor: Hamiltonian in the product
// basis, analytic adiabatic eigensystem, dense-diagonalization oracle,
// cancellation resonances, energy stationary points, level-ordering phases.
//
// Product basis: |m_S> (x) |m_I>, electron row first (m_S = +1/2 then
// -1/2), nuclear rows descending m_I = I..-I. The total magnetisation
// m = m_S + m_I is conserved, so every eigenvector touches at most two
// basis states. Half-integers are carried as doubled integers (two_m)
// so quantum numbers stay exact.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nespin/materials.hpp"
#include "nespin/spinalg.hpp"

namespace nespin {

struct FieldPoint {
    double b0 = 0.0;  // tesla

    FieldPoint() = default;
    explicit FieldPoint(double b) : b0(b) {
        if (!(b >= 0.0)) throw DomainError("FieldPoint: b0 must be >= 0");
    }
};

enum class Branch { minus, plus };

inline const char* branch_symbol(Branch b) { return b == Branch::plus ? "+" : "-"; }

// Exact rational rendering of m = two_m/2 ("-7/2", "0", "3").
std::string m_label(int two_m);

// W_m, O_m, eps_m, R_m, theta_m of the m-subspace Hamiltonian. At the edge
// subspaces |m| = I+1/2 the operator is one-dimensional: O_m = 0, R_m is
// set to W_m (sign kept) and theta_m = 0 exactly.
struct SubspaceParams {
    double w = 0.0;
    double o = 0.0;
    double eps = 0.0;
    double r = 0.0;
    double theta = 0.0;
};

SubspaceParams subspace_params(const SpinSystemParams& p, FieldPoint f, int two_m);

struct AdiabaticLevel {
    int two_m = 0;
    Branch branch = Branch::minus;
    double theta = 0.0;
    double a = 1.0;  // cos(theta/2)
    double b = 0.0;  // sin(theta/2)
    double energy = 0.0;   // rad/us
    int sorted_index = 0;  // 1-based, 1 = ground state
};

// plus is absent at m = -(I+1/2), minus at m = +(I+1/2).
bool level_exists(const SpinSystemParams& p, int two_m, Branch branch);

struct EigenSystem {
    double b0 = 0.0;
    std::vector<AdiabaticLevel> levels;  // ascending energy
    std::vector<Vector> vectors;         // parallel to levels, product basis

    Eigen::Index dim() const { return static_cast<Eigen::Index>(levels.size()); }
    const AdiabaticLevel& level(int two_m, Branch branch) const;
    const Vector& vector(int two_m, Branch branch) const;
};

Matrix hamiltonian_matrix(const SpinSystemParams& p, FieldPoint f);

EigenSystem eigen_analytic(const SpinSystemParams& p, FieldPoint f);

// Independent oracle: dense Hermitian diagonalization of the same operator,
// with levels matched to (m, branch) labels by maximal overlap against the
// analytic vectors. Degenerate clusters are resolved by projecting the
// analytic vectors onto the numeric eigenspace. Throws LabelMatchError when
// the best overlap falls below 0.9.
EigenSystem eigen_numeric(const SpinSystemParams& p, FieldPoint f);

enum class ResonanceKind { type_i, type_ii };

// Field of the W_m = 0 (type I) or W_m = O_m (type II) cancellation
// resonance; nullopt when the solution would sit at negative field.
std::optional<FieldPoint> cancellation_resonance(const SpinSystemParams& p, int two_m,
                                                 ResonanceKind kind);

// Field where dE/dB0 vanishes for an interior level, found by bisection on
// the monotone cos(theta_m); nullopt when the branch has no stationary point.
std::optional<FieldPoint> energy_stationary_field(const SpinSystemParams& p, int two_m,
                                                  Branch branch);

enum class OrderingPhase { low_phase, high_phase };

// low_phase iff E+_m > E+_{m-1} for every adjacent pair of plus levels.
OrderingPhase energy_ordering_phase(const SpinSystemParams& p, FieldPoint f);

// Full-space spin operators S_i (x) 1 and 1 (x) I_i in the product basis.
struct ProductOperators {
    Matrix sx, sy, sz, ix, iy, iz;
};

ProductOperators product_operators(const SpinSystemParams& p);

nlohmann::json eigensystem_to_json(const EigenSystem& sys);
EigenSystem eigensystem_from_json(const nlohmann::json& j);

} // namespace nespin
