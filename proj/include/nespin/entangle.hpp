#pragma once

// Entanglement quantifiers for eigenstates and thermal ensembles of the
// coupled electron-nuclear system.

#include "nespin/breitrabi.hpp"
#include "nespin/spinalg.hpp"

namespace nespin {

struct ThermalSpec {
    double temperature_k = 0.0; // >= 0; zero selects the degenerate ground-space mix

    void validate() const {
        if (!(temperature_k >= 0.0))
            throw DomainError("ThermalSpec: temperature must be >= 0 K");
    }
};

// Entropy of entanglement -a^2 log2 a^2 - b^2 log2 b^2 of one adiabatic
// eigenstate; 0 for the stretched product states, 1 where the subspace
// mixing is maximal.
double eigenstate_entanglement(const SpinSystemParams& p, FieldPoint f, int two_m,
                               Branch branch);

// exp(-H0 / kB T) / Z. At T = 0 returns the normalized projector onto the
// ground space (levels within 1e-12 * A_iso of the minimum energy).
DensityOperator thermal_state(const SpinSystemParams& p, FieldPoint f,
                              const ThermalSpec& spec);

// Wootters concurrence of a two-qubit state.
double concurrence(const DensityOperator& rho);

// Negativity (trace-norm of the partial transpose minus one) normalized by
// min(d_a, d_b) - 1 so maximally entangled states score 1. Zero does not
// certify separability beyond 2x2 and 2x3.
double negativity(const DensityOperator& rho, SubsystemDims dims);

} // namespace nespin
