#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qev/numerics.hpp"

using namespace qev;

TEST_CASE("solve_linear on the identity returns the right-hand side") {
    Matrix A = Matrix::Identity(5, 5);
    Matrix B = Matrix::Random(5, 3);
    SolveResult r = solve_linear(A, B);
    CHECK((r.X - B).norm() < 1e-14);
    CHECK(r.condition < 10.0);
}

TEST_CASE("solve_linear recovers a hand-computed 2x2 solution") {
    Matrix A(2, 2);
    A << cplx(2, 0), cplx(1, 0), cplx(0, 0), cplx(3, 0);
    Matrix b(2, 1);
    b << cplx(5, 0), cplx(6, 0);
    // x2 = 2, x1 = (5 - 2)/2 = 1.5
    SolveResult r = solve_linear(A, b);
    CHECK(std::abs(r.X(0, 0) - 1.5) < 1e-14);
    CHECK(std::abs(r.X(1, 0) - 2.0) < 1e-14);
}

TEST_CASE("solve_linear residual check on a seeded 9x9 system") {
    std::mt19937 rng(7);
    std::normal_distribution<double> d;
    Matrix A(9, 9);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) A(i, j) = cplx(d(rng), d(rng));
    Matrix B(9, 2);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 2; ++j) B(i, j) = cplx(d(rng), d(rng));
    SolveResult r = solve_linear(A, B);
    CHECK((A * r.X - B).norm() < 1e-10 * B.norm());
}

TEST_CASE("solve_linear rejects a singular system") {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = 1.0;
    A(1, 1) = 1.0;  // rank 2
    Matrix B = Matrix::Identity(3, 3);
    CHECK_THROWS(solve_linear(A, B));
}

TEST_CASE("eig_decompose reproduces a diagonal spectrum") {
    Matrix A = Matrix::Zero(4, 4);
    A(0, 0) = cplx(1, 0);
    A(1, 1) = cplx(2, 1);
    A(2, 2) = cplx(-3, 0);
    A(3, 3) = cplx(0, -1);
    EigResult r = eig_decompose(A);
    std::vector<double> got, want = {1.0, std::abs(cplx(2, 1)), 3.0, 1.0};
    for (int k = 0; k < 4; ++k) got.push_back(std::abs(r.values(k)));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (int k = 0; k < 4; ++k) CHECK(std::abs(got[k] - want[k]) < 1e-12);
    for (int k = 0; k < 4; ++k)
        CHECK((A * r.vectors.col(k) - r.values(k) * r.vectors.col(k)).norm() <
              1e-12);
}

TEST_CASE("condition_estimate matches singular value ratio on a known matrix") {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 10.0;
    A(1, 1) = 0.1;
    CHECK(std::abs(condition_estimate(A) - 100.0) < 1e-10);
}

TEST_CASE("periodic trapezoid rule integrates constants exactly") {
    auto one = [](double, double) { return cplx(1.0, 0.0); };
    const cplx v = trapezoid_2d(one, 16, 16, 1.0, 0.7);
    CHECK(std::abs(v - cplx(0.7, 0.0)) < 1e-14);
}

TEST_CASE("periodic trapezoid rule annihilates pure Fourier modes") {
    auto mode = [](double x, double y) {
        return std::exp(cplx(0.0, 2.0 * pi * x)) *
               std::exp(cplx(0.0, 2.0 * pi * y / 0.9));
    };
    const cplx v = trapezoid_2d(mode, 12, 12, 1.0, 0.9);
    CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("trapezoid grid offset shifts the sample points") {
    // For a resolved smooth periodic integrand the offset must not
    // change the value (spectral accuracy).
    auto f = [](double x, double y) {
        return std::exp(std::cos(2.0 * pi * x) + std::sin(2.0 * pi * y));
    };
    const cplx a = trapezoid_2d(f, 48, 48, 1.0, 1.0);
    const cplx b = trapezoid_2d(f, 48, 48, 1.0, 1.0, 0.003, 0.007);
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
}

TEST_CASE("winding number counts planted theta zeros") {
    const cplx tau(0.0, 1.0);
    ModelParams p;
    p.tau = tau;
    const cplx z1(0.3, 0.0), z2 = cplx(0.7, 0.0) + 0.2 * tau;
    auto f = [&](cplx u) { return bracket(u - z1, p) * bracket(u - z2, p); };
    Rectangle R{cplx(0.01, 0.01), 1.0, 1.0};
    CHECK(winding_number(f, R) == 2);
}

TEST_CASE("find_zeros_in_rectangle recovers planted zeros to 1e-10") {
    const cplx tau(0.0, 1.0);
    ModelParams p;
    p.tau = tau;
    const cplx z1(0.3, 0.0), z2 = cplx(0.7, 0.0) + 0.2 * tau;
    auto f = [&](cplx u) { return bracket(u - z1, p) * bracket(u - z2, p); };
    Rectangle R{cplx(0.01, 0.01), 1.0, 1.0};
    auto zeros = find_zeros_in_rectangle(f, R, 2, 1e-12);
    REQUIRE(zeros.size() == 2);
    std::sort(zeros.begin(), zeros.end(),
              [](const cplx& a, const cplx& b) { return a.real() < b.real(); });
    // z1 sits below the offset corner, so its in-rectangle representative
    // is the lattice translate z1 + tau.
    CHECK(std::abs(zeros[0] - (z1 + tau)) < 1e-10);
    CHECK(std::abs(zeros[1] - z2) < 1e-10);
}

TEST_CASE("find_zeros_in_rectangle flags an expected-count mismatch") {
    const cplx tau(0.0, 1.0);
    ModelParams p;
    p.tau = tau;
    auto f = [&](cplx u) { return bracket(u - cplx(0.5, 0.3), p); };
    Rectangle R{cplx(0.01, 0.01), 1.0, 1.0};
    CHECK_THROWS(find_zeros_in_rectangle(f, R, 3, 1e-12));
}

TEST_CASE("zero finding survives a zero close to the contour") {
    const cplx tau(0.0, 1.0);
    ModelParams p;
    p.tau = tau;
    // Planted zero 1e-3 from the left edge of the search box.
    const cplx z0(0.011, 0.45);
    auto f = [&](cplx u) { return bracket(u - z0, p); };
    Rectangle R{cplx(0.01, 0.01), 1.0, 1.0};
    auto zeros = find_zeros_in_rectangle(f, R, 1, 1e-12);
    REQUIRE(zeros.size() == 1);
    CHECK(std::abs(zeros[0] - z0) < 1e-9);
}
