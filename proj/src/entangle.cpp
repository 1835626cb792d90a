#include "nespin/entangle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "nespin/units.hpp"

namespace nespin {

namespace {

double binary_entropy_term(double prob) {
    return prob > 0.0 ? -prob * std::log2(prob) : 0.0;
}

} // namespace

double eigenstate_entanglement(const SpinSystemParams& p, FieldPoint f, int two_m,
                               Branch branch) {
    if (!level_exists(p, two_m, branch))
        throw DomainError("eigenstate_entanglement: level (" + m_label(two_m) + ", " +
                          branch_symbol(branch) + ") does not exist");
    const SubspaceParams sp = subspace_params(p, f, two_m);
    const double a2 = std::cos(0.5 * sp.theta) * std::cos(0.5 * sp.theta);
    return binary_entropy_term(a2) + binary_entropy_term(1.0 - a2);
}

DensityOperator thermal_state(const SpinSystemParams& p, FieldPoint f,
                              const ThermalSpec& spec) {
    spec.validate();
    const EigenSystem sys = eigen_analytic(p, f);
    const int d = sys.dim();

    double e_min = sys.levels.front().energy;
    for (const AdiabaticLevel& lvl : sys.levels) e_min = std::min(e_min, lvl.energy);

    std::vector<double> weight(sys.levels.size());
    double z = 0.0;
    if (spec.temperature_k == 0.0) {
        for (std::size_t k = 0; k < sys.levels.size(); ++k) {
            weight[k] = sys.levels[k].energy - e_min <= 1e-12 * p.a_iso ? 1.0 : 0.0;
            z += weight[k];
        }
    } else {
        const double beta = 1.0 / (units::boltzmann_rad_us_per_k * spec.temperature_k);
        for (std::size_t k = 0; k < sys.levels.size(); ++k) {
            weight[k] = std::exp(-(sys.levels[k].energy - e_min) * beta);
            z += weight[k];
        }
    }

    Matrix rho = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < sys.levels.size(); ++k) {
        if (weight[k] == 0.0) continue;
        rho += (weight[k] / z) * (sys.vectors[k] * sys.vectors[k].adjoint());
    }
    rho = 0.5 * (rho + dagger(rho));
    return DensityOperator(rho);
}

double concurrence(const DensityOperator& rho) {
    if (rho.dim() != 4)
        throw DimensionError("concurrence: defined for two qubits (dim 4)");
    const Matrix yy = kron(sigma_y(), sigma_y());
    const Matrix r = rho.matrix();
    const Matrix m = r * yy * r.conjugate() * yy;

    Eigen::ComplexEigenSolver<Matrix> solver(m, false);
    std::array<double, 4> lambda{};
    for (int k = 0; k < 4; ++k)
        lambda[k] = std::sqrt(std::max(0.0, solver.eigenvalues()(k).real()));
    std::sort(lambda.begin(), lambda.end(), std::greater<>());

    const double c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
    return std::clamp(c, 0.0, 1.0);
}

double negativity(const DensityOperator& rho, SubsystemDims dims) {
    const Matrix pt = partial_transpose(rho.matrix(), dims, Keep::A);
    const Eigen::VectorXd ev = hermitian_eigenvalues(pt);
    const double trace_norm = ev.cwiseAbs().sum();
    const int dmin = std::min(dims.d_a, dims.d_b);
    return std::max(0.0, (trace_norm - 1.0) / (dmin - 1));
}

} // namespace nespin
