#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "nespin/entangle.hpp"
#include "nespin/units.hpp"

using namespace nespin;

namespace {

Vector random_pure_state(std::mt19937& rng, int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(dim);
    for (int k = 0; k < dim; ++k) v(k) = complexd(gauss(rng), gauss(rng));
    return v / v.norm();
}

DensityOperator random_mixed_state(std::mt19937& rng, int dim, int rank) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Matrix rho = Matrix::Zero(dim, dim);
    double total = 0.0;
    for (int r = 0; r < rank; ++r) {
        const double w = uni(rng) + 1e-3;
        const Vector v = random_pure_state(rng, dim);
        rho += w * (v * v.adjoint());
        total += w;
    }
    rho /= total;
    rho = 0.5 * (rho + dagger(rho));
    return DensityOperator(rho);
}

Matrix random_unitary(std::mt19937& rng, int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = complexd(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    return q;
}

DensityOperator bell_phi_plus() {
    Vector v(4);
    v << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    return DensityOperator(v * v.adjoint());
}

} // namespace

TEST_CASE("eigenstate entanglement reference points") {
    const SpinSystemParams bi = si_bi();

    // Stretched product states stay separable at every field.
    for (double b : {0.0, 0.05, 0.5, 5.0}) {
        CHECK(eigenstate_entanglement(bi, FieldPoint(b), 10, Branch::plus) == 0.0);
        CHECK(eigenstate_entanglement(bi, FieldPoint(b), -10, Branch::minus) == 0.0);
    }

    // Where the longitudinal invariant W vanishes the subspace is an equal
    // mixture and the entropy hits its maximum.
    auto res = cancellation_resonance(bi, -2, ResonanceKind::type_i);
    REQUIRE(res.has_value());
    CHECK(eigenstate_entanglement(bi, *res, -2, Branch::plus) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eigenstate_entanglement(bi, FieldPoint(0.0), 0, Branch::minus) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // High field disentangles everything.
    CHECK(eigenstate_entanglement(bi, FieldPoint(500.0), 0, Branch::plus) < 1e-3);
    CHECK_THROWS_AS(eigenstate_entanglement(bi, FieldPoint(1.0), 10, Branch::minus),
                    DomainError);
}

TEST_CASE("entropy route check against the reduced density operator") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ub(0.0, 1.0);
    for (const SpinSystemParams& p : {si_p(), si_bi()}) {
        const SubsystemDims dims{2, p.two_i + 1};
        for (int rep = 0; rep < 4; ++rep) {
            FieldPoint f(ub(rng));
            const EigenSystem sys = eigen_analytic(p, f);
            for (const AdiabaticLevel& lvl : sys.levels) {
                const Vector& v = sys.vector(lvl.two_m, lvl.branch);
                const DensityOperator reduced =
                    partial_trace(DensityOperator(v * v.adjoint()), dims, Keep::A);
                const double via_entropy = von_neumann_entropy(reduced);
                const double closed =
                    eigenstate_entanglement(p, f, lvl.two_m, lvl.branch);
                CHECK(std::abs(via_entropy - closed) < 1e-12);
            }
        }
    }
}

TEST_CASE("thermal state limits") {
    const SpinSystemParams bi = si_bi();
    FieldPoint f(0.1);

    const DensityOperator hot = thermal_state(bi, f, {1e9});
    const Matrix uniform = Matrix::Identity(20, 20) / 20.0;
    CHECK(trace_distance_matrix(hot.matrix(), uniform) < 1e-9);

    // Non-degenerate ground state: the cold limit is its projector, and the
    // explicit T = 0 branch agrees with a sub-microkelvin evaluation.
    const EigenSystem sys = eigen_analytic(bi, f);
    const Vector& ground = sys.vectors[0];
    CHECK(sys.levels[0].sorted_index == 1);
    const DensityOperator cold = thermal_state(bi, f, {1e-6});
    CHECK(trace_distance_matrix(cold.matrix(), ground * ground.adjoint()) < 1e-9);
    const DensityOperator zero = thermal_state(bi, f, {0.0});
    CHECK(trace_distance_matrix(zero.matrix(), cold.matrix()) < 1e-9);

    CHECK_THROWS_AS(thermal_state(bi, f, {-1.0}), DomainError);
}

TEST_CASE("thermal state commutes with the free Hamiltonian") {
    for (const SpinSystemParams& p : {si_p(), si_bi()}) {
        FieldPoint f(0.17);
        const Matrix h = hamiltonian_matrix(p, f);
        const Matrix rho = thermal_state(p, f, {0.05}).matrix();
        CHECK((h * rho - rho * h).cwiseAbs().maxCoeff() < 1e-9 * p.a_iso);
    }
}

TEST_CASE("zero-field zero-temperature mix spans the lower multiplet") {
    // At B0 = 0 the ground space is the 2I-fold degenerate lower multiplet, so
    // the T = 0 branch returns its uniform mixture rather than a projector.
    const SpinSystemParams bi = si_bi();
    const DensityOperator rho = thermal_state(bi, FieldPoint(0.0), {0.0});
    CHECK(purity(rho) == doctest::Approx(1.0 / 9.0).epsilon(1e-10));
    const Matrix h = hamiltonian_matrix(bi, FieldPoint(0.0));
    const double e = (h * rho.matrix()).trace().real();
    CHECK(e == doctest::Approx(-bi.a_iso * 0.5 * (4.5 + 1.0) * 1.0).epsilon(1e-10));
}

TEST_CASE("concurrence reference values") {
    Vector prod(4);
    prod << 1.0, 0.0, 0.0, 0.0;
    CHECK(concurrence(DensityOperator(prod * prod.adjoint())) == doctest::Approx(0.0));
    CHECK(concurrence(bell_phi_plus()) == doctest::Approx(1.0).epsilon(1e-12));

    auto werner = [](double p) {
        Matrix rho = p * bell_phi_plus().matrix() + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
        return DensityOperator(rho);
    };
    CHECK(concurrence(werner(0.5)) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(concurrence(werner(1.0 / 3.0)) == doctest::Approx(0.0));
    CHECK(concurrence(werner(0.2)) == doctest::Approx(0.0));

    const Matrix big = Matrix::Identity(8, 8) / 8.0;
    CHECK_THROWS_AS(concurrence(DensityOperator(big)), DimensionError);
}

TEST_CASE("concurrence is invariant under local unitaries") {
    std::mt19937 rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        const DensityOperator rho = random_mixed_state(rng, 4, 2);
        const Matrix u = kron(random_unitary(rng, 2), random_unitary(rng, 2));
        const DensityOperator rotated(u * rho.matrix() * dagger(u));
        CHECK(std::abs(concurrence(rho) - concurrence(rotated)) < 1e-8);
    }
}

TEST_CASE("negativity reference values and transpose-side symmetry") {
    CHECK(negativity(bell_phi_plus(), {2, 2}) == doctest::Approx(1.0).epsilon(1e-12));

    Vector up(2), down(2);
    up << 1.0, 0.0;
    down << 0.0, 1.0;
    Matrix sep = 0.5 * kron((up * up.adjoint()).eval(), (down * down.adjoint()).eval()) +
                 0.5 * kron((down * down.adjoint()).eval(), (up * up.adjoint()).eval());
    CHECK(negativity(DensityOperator(sep), {2, 2}) < 1e-12);

    std::mt19937 rng(37);
    for (int rep = 0; rep < 20; ++rep) {
        const DensityOperator rho = random_mixed_state(rng, 6, 3);
        const SubsystemDims dims{2, 3};
        const double via_a = negativity(rho, dims);
        const Matrix pt_b = partial_transpose(rho.matrix(), dims, Keep::B);
        const double norm_b = hermitian_eigenvalues(pt_b).cwiseAbs().sum();
        const double via_b = std::max(0.0, (norm_b - 1.0) / 1.0);
        CHECK(std::abs(via_a - via_b) < 1e-10);
    }

    CHECK_THROWS_AS(negativity(bell_phi_plus(), {2, 3}), DimensionError);
}

TEST_CASE("concurrence bounds the negativity on random two-qubit states") {
    std::mt19937 rng(41);
    for (int rep = 0; rep < 300; ++rep) {
        const DensityOperator rho = random_mixed_state(rng, 4, 1 + rep % 4);
        const double c = concurrence(rho);
        const double n = negativity(rho, {2, 2});
        const double lower = std::sqrt((1.0 - c) * (1.0 - c) + c * c) - (1.0 - c);
        CHECK(n >= lower - 1e-7);
        CHECK(n <= c + 1e-7);
    }
}

TEST_CASE("cold Si:P thermal state approaches the singlet") {
    const SpinSystemParams p = si_p();
    FieldPoint tiny(1e-4);

    const double c_cold = concurrence(thermal_state(p, tiny, {5e-4}));
    CHECK(c_cold > 0.99);
    const double c_mid = concurrence(thermal_state(p, tiny, {2e-3}));
    const double c_warm = concurrence(thermal_state(p, tiny, {1e-2}));
    CHECK(c_cold > c_mid);
    CHECK(c_mid > c_warm);

    // Field, like temperature, destroys the thermal entanglement.
    CHECK(concurrence(thermal_state(p, FieldPoint(0.5), {2e-3})) < c_mid);

    // T = 0 at vanishing field: the ground state is the rotated singlet.
    const double c_zero = concurrence(thermal_state(p, tiny, {0.0}));
    CHECK(c_zero > 0.999);
}

TEST_CASE("Si:Bi thermal negativity versus temperature at zero field") {
    // The lower multiplet mix pins N at its T -> 0 value; raising T only adds
    // states from the upper multiplet (including the separable stretched
    // pair), so the negativity decays monotonically and vanishes when the
    // ensemble approaches the uniform mixture.
    const SpinSystemParams bi = si_bi();
    const SubsystemDims dims{2, 10};
    FieldPoint zero(0.0);

    const double n0 = negativity(thermal_state(bi, zero, {1e-3}), dims);
    CHECK(n0 == doctest::Approx(0.2).epsilon(1e-6));

    double prev = n0;
    bool decreasing = true;
    for (double t_mk : {30.0, 60.0, 100.0, 200.0}) {
        const double n = negativity(thermal_state(bi, zero, {t_mk * 1e-3}), dims);
        if (n > prev + 1e-9) decreasing = false;
        prev = n;
    }
    CHECK(decreasing);
    CHECK(prev < 1e-6);

    // At fields inside the entangled regime the cold value reflects the
    // ground state phi-(m=4): N = 2 a b there.
    FieldPoint low(0.1);
    const SubspaceParams sp = subspace_params(bi, low, 8);
    const double expected = std::sin(sp.theta);
    const double n_low = negativity(thermal_state(bi, low, {1e-4}), dims);
    CHECK(n_low == doctest::Approx(expected).epsilon(1e-6));
}
