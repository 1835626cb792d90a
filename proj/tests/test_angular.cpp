#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nespin/angular.hpp"

using namespace nespin;

TEST_CASE("spin one half reproduces the pauli matrices over two") {
    SpinOperators s = spin_operators({1});
    CHECK((s.jx - 0.5 * sigma_x()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((s.jy - 0.5 * sigma_y()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((s.jz - 0.5 * sigma_z()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("jz is diagonal descending and dimension matches") {
    SpinOperators s = spin_operators({9});
    REQUIRE(s.jz.rows() == 10);
    for (int r = 0; r < 10; ++r) CHECK(s.jz(r, r).real() == doctest::Approx(4.5 - r));
    CHECK(s.jz.cwiseAbs().sum() == doctest::Approx(s.jz.diagonal().cwiseAbs().sum()));
}

TEST_CASE("ladder operators act with the standard coefficients") {
    // J=1: J+ |m=-1> = sqrt(2) |m=0>. Basis order m = 1, 0, -1.
    SpinOperators s = spin_operators({2});
    Vector bottom = Vector::Zero(3);
    bottom(2) = 1.0;
    Vector raised = s.jplus * bottom;
    CHECK(std::abs(raised(1) - std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(raised(0)) < 1e-15);
    CHECK(std::abs(raised(2)) < 1e-15);

    CHECK((s.jminus - dagger(s.jplus)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("jplus annihilates the top state") {
    for (int two_j : {1, 2, 5, 9}) {
        SpinOperators s = spin_operators({two_j});
        Vector top = Vector::Zero(two_j + 1);
        top(0) = 1.0;
        CHECK((s.jplus * top).norm() == doctest::Approx(0.0));
        CHECK(s.jplus.col(0).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("commutation relations and casimir") {
    const complexd i_unit(0.0, 1.0);
    for (int two_j = 1; two_j <= 9; ++two_j) {
        SpinOperators s = spin_operators({two_j});
        auto comm = [](const Matrix& a, const Matrix& b) { return a * b - b * a; };
        CHECK((comm(s.jx, s.jy) - i_unit * s.jz).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((comm(s.jy, s.jz) - i_unit * s.jx).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((comm(s.jz, s.jx) - i_unit * s.jy).cwiseAbs().maxCoeff() < 1e-12);

        const double j = two_j / 2.0;
        Matrix casimir = s.jx * s.jx + s.jy * s.jy + s.jz * s.jz;
        CHECK((casimir - j * (j + 1.0) * identity(two_j + 1)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("operators are hermitian and negative spin is rejected") {
    SpinOperators s = spin_operators({3});
    CHECK(is_hermitian(s.jx));
    CHECK(is_hermitian(s.jy));
    CHECK(is_hermitian(s.jz));
    CHECK_THROWS_AS(spin_operators({-1}), DomainError);
}
