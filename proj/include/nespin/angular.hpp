// angular.hpp — Spin-J operators in the |m_J> basis, ordered m_J = J..-J.
// The descending ordering matches the |+1/2>-first convention used for
// product states throughout the library.

#pragma once

#include "nespin/spinalg.hpp"

namespace nespin {

struct SpinQuantumNumber {
    int two_j = 0;  // J = two_j/2; dimension = two_j + 1

    double j() const { return two_j / 2.0; }
    Eigen::Index dim() const { return two_j + 1; }
};

struct SpinOperators {
    Matrix jx, jy, jz, jplus, jminus;
};

SpinOperators spin_operators(SpinQuantumNumber j);

} // namespace nespin
