#include "nespin/angular.hpp"

#include <cmath>

namespace nespin {

SpinOperators spin_operators(SpinQuantumNumber jq) {
    if (jq.two_j < 0)
        throw DomainError("spin_operators: two_j must be non-negative");
    const Eigen::Index d = jq.dim();
    const double j = jq.j();

    SpinOperators ops;
    ops.jz = Matrix::Zero(d, d);
    ops.jplus = Matrix::Zero(d, d);
    // Row r holds m_J = J - r. J+|m> = sqrt(J(J+1) - m(m+1))|m+1>, so the
    // raising operator connects row r+1 (m) to row r (m+1).
    for (Eigen::Index r = 0; r < d; ++r) {
        const double m = j - static_cast<double>(r);
        ops.jz(r, r) = m;
        if (r + 1 < d) {
            const double m_below = m - 1.0;
            ops.jplus(r, r + 1) = std::sqrt(j * (j + 1.0) - m_below * (m_below + 1.0));
        }
    }
    ops.jminus = ops.jplus.adjoint();
    ops.jx = 0.5 * (ops.jplus + ops.jminus);
    ops.jy = complexd(0, -0.5) * (ops.jplus - ops.jminus);
    return ops;
}

} // namespace nespin
