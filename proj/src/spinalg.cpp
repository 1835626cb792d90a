#include "nespin/spinalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace nespin {

Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0, complexd(0, -1), complexd(0, 1), 0;
    return m;
}

Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix dagger(const Matrix& a) { return a.adjoint(); }

Matrix projector(const Vector& v) { return v * v.adjoint(); }

bool is_hermitian(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& a) {
    if (!is_hermitian(a))
        throw DomainError("hermitian_eigenvalues: matrix is not Hermitian within htol");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

Matrix matrix_sqrt_psd(const Matrix& a) {
    if (!is_hermitian(a))
        throw DomainError("matrix_sqrt_psd: matrix is not Hermitian within htol");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < 0.0) {
            if (ev(i) < -ptol)
                throw DomainError("matrix_sqrt_psd: eigenvalue below -ptol");
            ev(i) = 0.0;
        }
    }
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

DensityOperator::DensityOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
        throw DimensionError("DensityOperator: matrix must be square and non-empty");
    if (std::abs(m_.trace() - complexd(1.0, 0.0)) > ttol)
        throw DomainError("DensityOperator: trace deviates from 1 beyond ttol");
    if (!is_hermitian(m_))
        throw DomainError("DensityOperator: matrix is not Hermitian within htol");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -ptol)
        throw DomainError("DensityOperator: negative eigenvalue beyond ptol");
}

Matrix partial_trace_matrix(const Matrix& m, SubsystemDims dims, Keep keep) {
    if (dims.d_a < 1 || dims.d_b < 1 || m.rows() != dims.d_a * dims.d_b || m.rows() != m.cols())
        throw DimensionError("partial_trace: operator dimension is not d_a*d_b");
    if (keep == Keep::A) {
        Matrix out = Matrix::Zero(dims.d_a, dims.d_a);
        for (Eigen::Index i = 0; i < dims.d_a; ++i)
            for (Eigen::Index j = 0; j < dims.d_a; ++j)
                for (Eigen::Index k = 0; k < dims.d_b; ++k)
                    out(i, j) += m(i * dims.d_b + k, j * dims.d_b + k);
        return out;
    }
    Matrix out = Matrix::Zero(dims.d_b, dims.d_b);
    for (Eigen::Index k = 0; k < dims.d_b; ++k)
        for (Eigen::Index l = 0; l < dims.d_b; ++l)
            for (Eigen::Index i = 0; i < dims.d_a; ++i)
                out(k, l) += m(i * dims.d_b + k, i * dims.d_b + l);
    return out;
}

DensityOperator partial_trace(const DensityOperator& rho, SubsystemDims dims, Keep keep) {
    return DensityOperator(partial_trace_matrix(rho.matrix(), dims, keep));
}

Matrix partial_transpose(const Matrix& m, SubsystemDims dims, Keep which) {
    if (dims.d_a < 1 || dims.d_b < 1 || m.rows() != dims.d_a * dims.d_b || m.rows() != m.cols())
        throw DimensionError("partial_transpose: operator dimension is not d_a*d_b");
    Matrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < dims.d_a; ++i)
        for (Eigen::Index j = 0; j < dims.d_a; ++j)
            for (Eigen::Index k = 0; k < dims.d_b; ++k)
                for (Eigen::Index l = 0; l < dims.d_b; ++l) {
                    if (which == Keep::A)
                        out(j * dims.d_b + k, i * dims.d_b + l) = m(i * dims.d_b + k, j * dims.d_b + l);
                    else
                        out(i * dims.d_b + l, j * dims.d_b + k) = m(i * dims.d_b + k, j * dims.d_b + l);
                }
    return out;
}

double trace_distance_matrix(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("trace_distance: dimension mismatch");
    Matrix diff = a - b;
    diff = 0.5 * (diff + diff.adjoint());  // discard solver-noise skew
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityOperator& r1, const DensityOperator& r2) {
    return trace_distance_matrix(r1.matrix(), r2.matrix());
}

double fidelity(const DensityOperator& r1, const DensityOperator& r2) {
    if (r1.dim() != r2.dim())
        throw DimensionError("fidelity: dimension mismatch");
    Matrix s = matrix_sqrt_psd(r1.matrix());
    Matrix inner = s * r2.matrix() * s;
    inner = 0.5 * (inner + inner.adjoint());
    return matrix_sqrt_psd(inner).trace().real();
}

double purity(const DensityOperator& rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

double von_neumann_entropy(const DensityOperator& rho, double base) {
    if (!(base > 1.0))
        throw DomainError("von_neumann_entropy: base must exceed 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double p = es.eigenvalues()(i);
        if (p > 0.0) s -= p * std::log(p);
    }
    return s / std::log(base);
}

} // namespace nespin
