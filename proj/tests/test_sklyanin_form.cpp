#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qev/lattice.hpp"
#include "qev/sklyanin_form.hpp"

using namespace qev;

namespace {

ModelParams make_params(double l, double eta, double tau_im = 1.0) {
    ModelParams p;
    p.tau = cplx(0.0, tau_im);
    p.eta = eta;
    p.l = l;
    p.N = 2;
    p.validate();
    return p;
}

double rel(const cplx& a, const cplx& b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("mu kernel is symmetric in its two arguments") {
    ModelParams p = make_params(0.5, 0.15);
    const cplx z(0.23, 0.41), w(0.57, 0.12);
    CHECK(rel(mu_kernel(z, w, p), mu_kernel(w, z, p)) < 1e-12);
}

TEST_CASE("Gram matrix is Hermitian positive definite") {
    for (auto [l, eta] : {std::pair{0.5, 0.15}, {1.0, 0.11}}) {
        ModelParams p = make_params(l, eta);
        ThetaBasis basis(p, 1);
        GramMatrix gram = gram_matrix(basis);
        CHECK((gram.G - gram.G.adjoint()).norm() < 1e-10 * gram.G.norm());
        Eigen::SelfAdjointEigenSolver<Matrix> es(gram.G);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        CHECK(gram.convergence_estimate < 1e-10);
    }
}

TEST_CASE("inner product matches the Gram matrix on basis pairs") {
    ModelParams p = make_params(0.5, 0.15);
    ThetaBasis basis(p, 1);
    GramMatrix gram = gram_matrix(basis);
    Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
    e0(0) = 1.0;
    e1(1) = 1.0;
    CHECK(rel(sklyanin_inner(e0, e1, basis, 128, 128), gram.G(0, 1)) < 1e-8);
}

TEST_CASE("orthonormal frame factorises the Gram matrix") {
    ModelParams p = make_params(1.0, 0.11);
    ThetaBasis basis(p, 1);
    GramMatrix gram = gram_matrix(basis);
    OrthonormalFrame fr = orthonormal_frame(gram);
    CHECK((fr.R.adjoint() * fr.R - gram.G).norm() < 1e-10 * gram.G.norm());
    CHECK((fr.R * fr.R_inverse - Matrix::Identity(3, 3)).norm() < 1e-10);
}

TEST_CASE("generators are self-adjoint for the elliptic inner product") {
    for (auto [l, eta] : {std::pair{0.5, 0.15}, {1.0, 0.11}}) {
        ModelParams p = make_params(l, eta);
        ThetaBasis basis(p, 1);
        RepMatrices R = rep_matrices(p, basis);
        GramMatrix gram = gram_matrix(basis);
        for (int a = 0; a < 4; ++a) {
            const Matrix lhs = gram.G * R.S[a];
            CHECK((lhs - Matrix(R.S[a].adjoint() * gram.G)).norm() <
                  1e-6 * std::max(1.0, lhs.norm()));
        }
    }
}

TEST_CASE("elliptic binomial coefficients expand one bracket family in two") {
    ModelParams p = make_params(1.0, 0.11);
    const cplx a(0.27, 0.0), b(0.58, 0.0), c(-0.31, 0.0);
    for (int k = 0; k <= p.two_l(); ++k) {
        for (int s = 0; s < 5; ++s) {
            const cplx z(0.11 + 0.13 * s, 0.07 + 0.05 * s);
            cplx rhs = 0.0;
            double scale = 1e-300;
            for (int n = 0; n <= k; ++n) {
                const cplx term = elliptic_binomial(n, k, a, b, c, p) *
                                  za_bracket_k(z, b, n, p) *
                                  za_bracket_k(z, c, k - n, p);
                rhs += term;
                scale = std::max(scale, std::abs(term));
            }
            CHECK(std::abs(za_bracket_k(z, a, k, p) - rhs) < 1e-9 * scale);
        }
    }
}

TEST_CASE("degenerate binomial cases collapse to one") {
    ModelParams p = make_params(0.5, 0.15);
    const cplx a(0.27, 0.0), b(0.58, 0.0), c(-0.31, 0.0);
    // k = 0 expansion is the empty product on both sides.
    CHECK(rel(elliptic_binomial(0, 0, a, b, c, p), cplx(1.0, 0.0)) < 1e-12);
    // The k = 1 decomposition [z;a] = C_0 [z;c] + C_1 [z;b] solved
    // directly from two sample points matches the closed form.
    const cplx z1(0.13, 0.21), z2(0.47, 0.08);
    Matrix M(2, 2);
    M << za_bracket(z1, c, p), za_bracket(z1, b, p), za_bracket(z2, c, p),
        za_bracket(z2, b, p);
    Vector rhs(2);
    rhs << za_bracket(z1, a, p), za_bracket(z2, a, p);
    Vector sol = M.partialPivLu().solve(rhs);
    CHECK(rel(sol(0), elliptic_binomial(0, 1, a, b, c, p)) < 1e-9);
    CHECK(rel(sol(1), elliptic_binomial(1, 1, a, b, c, p)) < 1e-9);
}

TEST_CASE("extremal change-of-basis coefficient against a collocation oracle") {
    ModelParams p = make_params(1.0, 0.11);
    const int Nn = p.two_l();
    const cplx a(0.23, 0.0), b(-0.17, 0.0), c(0.41, 0.0), d(-0.53, 0.0);
    ThetaBasis basis_cd(p, 5, c, d);
    // The top component of [z;a]_N over the (c,d) basis is the extremal
    // coefficient.
    Vector coeffs =
        basis_cd.expand([&](cplx z) { return za_bracket_k(z, a, Nn, p); });
    CHECK(rel(coeffs(Nn), extremal_6j(a, b, c, d, Nn, p)) < 1e-9);
    // It does not depend on the second parameter of the source basis.
    CHECK(rel(extremal_6j(a, b, c, d, Nn, p),
              extremal_6j(a, b + 0.29, c, d, Nn, p)) < 1e-12);
    // Identical bases: the coefficient is exactly one.
    CHECK(rel(extremal_6j(a, b, a, d, Nn, p), cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("closed-form dual pairing against direct quadrature") {
    ModelParams p = make_params(0.5, 0.15);
    const int Nn = p.two_l();
    const cplx c(0.19, 0.0), d(-0.37, 0.0);
    const cplx A = -std::conj(d) + (1.0 - Nn) * p.eta + (p.tau + 1.0) / 2.0;
    const cplx B = -std::conj(c) + (1.0 - Nn) * p.eta - (p.tau + 1.0) / 2.0;
    const double t = p.tau.imag();
    for (int m = 0; m <= Nn; ++m)
        for (int k = 0; k <= Nn; ++k) {
            auto f = [&](double x, double y) {
                const cplx z(x, y);
                const cplx dual = za_bracket_k(z, A, m, p) *
                                  za_bracket_k(z, B, Nn - m, p);
                const cplx e = za_bracket_k(z, c, k, p) *
                               za_bracket_k(z, d, Nn - k, p);
                return std::conj(dual) * e * mu_kernel(z, std::conj(z), p);
            };
            const cplx numeric =
                trapezoid_2d(f, 128, 128, 1.0, t, 0.5 / 128.0, 0.5 * t / 128.0);
            const cplx closed = dual_pairing_closed_form(k, m, c, d, Nn, p);
            const double scale =
                std::abs(dual_pairing_closed_form(k, k, c, d, Nn, p));
            CHECK(std::abs(numeric - closed) < 1e-6 * std::max(scale, 1e-300));
            if (m != k) CHECK(std::abs(closed) == 0.0);
        }
}

TEST_CASE("pseudo-vacuum pairing closed form against the Gram matrix") {
    ModelParams p = make_params(0.5, 0.15);
    ThetaBasis basis(p, 1);
    GramMatrix gram = gram_matrix(basis);
    const cplx u(0.21, 0.05), up(0.47, -0.03);
    const cplx v(0.13, 0.0), vp(0.39, 0.0), lam(0.53, 0.0), lamp(0.31, 0.0);
    for (int s : {1, -1})
        for (int sp : {1, -1}) {
            const Vector f =
                omega_vector(double(s) * lam, -std::conj(u), double(s) * v, basis);
            const Vector g =
                omega_vector(double(sp) * lamp, up, double(sp) * vp, basis);
            const cplx numeric = (f.adjoint() * gram.G * g)(0, 0);
            const cplx closed =
                omega_pair_closed_form(u, up, v, vp, lam, lamp, s, sp, p);
            CHECK(rel(numeric, closed) < 1e-6);
        }
}
