// spinalg.hpp — Dense complex linear algebra and quantum-state primitives.
// All operators are Eigen dense complex matrices in a fixed basis; the
// DensityOperator wrapper enforces trace, Hermiticity and positivity at
// construction so downstream code never has to re-check.

#pragma once

#include <complex>

#include <Eigen/Dense>

#include "nespin/errors.hpp"

namespace nespin {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using complexd = std::complex<double>;

// Tolerances, relative to unit-trace normalization. Well above double
// eigensolver noise at dim <= 400, far below any physical scale here.
inline constexpr double htol = 1e-10;  // Hermiticity
inline constexpr double ttol = 1e-9;   // trace deviation
inline constexpr double ptol = 1e-9;   // negative-eigenvalue allowance

struct SubsystemDims {
    Eigen::Index d_a = 0;
    Eigen::Index d_b = 0;
};

enum class Keep { A, B };

Matrix identity(Eigen::Index d);
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();

Matrix kron(const Matrix& a, const Matrix& b);
Matrix dagger(const Matrix& a);
Matrix projector(const Vector& v);

bool is_hermitian(const Matrix& a, double tol = htol);

// Eigenvalues of a Hermitian matrix, ascending. Throws DomainError if the
// input is not Hermitian within htol (imaginary parts are never dropped
// silently).
Eigen::VectorXd hermitian_eigenvalues(const Matrix& a);

// f(A) for Hermitian A via eigendecomposition. Eigenvalues below zero but
// within -ptol are clamped to 0 before sqrt/log.
Matrix matrix_sqrt_psd(const Matrix& a);

class DensityOperator {
public:
    explicit DensityOperator(Matrix m);
    const Matrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    Matrix m_;
};

DensityOperator partial_trace(const DensityOperator& rho, SubsystemDims dims, Keep keep);
Matrix partial_trace_matrix(const Matrix& m, SubsystemDims dims, Keep keep);
Matrix partial_transpose(const Matrix& m, SubsystemDims dims, Keep which);

double trace_distance(const DensityOperator& r1, const DensityOperator& r2);
double fidelity(const DensityOperator& r1, const DensityOperator& r2);
double purity(const DensityOperator& rho);
double von_neumann_entropy(const DensityOperator& rho, double base = 2.0);

// Same metrics on raw matrices, for inner loops that build states they
// already know are valid.
double trace_distance_matrix(const Matrix& a, const Matrix& b);

} // namespace nespin
