#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qev/representation.hpp"

using namespace qev;

namespace {

ModelParams make_params(double l, int N, double tau_im, double eta) {
    ModelParams p;
    p.tau = cplx(0.0, tau_im);
    p.eta = eta;
    p.l = l;
    p.N = N;
    p.validate();
    return p;
}

double rel(const Matrix& A, const Matrix& B) {
    return (A - B).norm() / std::max(1.0, std::max(A.norm(), B.norm()));
}

}  // namespace

TEST_CASE("collocation basis reproduces its own basis functions") {
    ModelParams p = make_params(1.0, 2, 1.0, 0.11);
    ThetaBasis basis(p, 1);
    REQUIRE(basis.dim() == 3);
    for (int k = 0; k < basis.dim(); ++k) {
        Vector c = basis.expand([&](cplx z) { return basis.eval(k, z); });
        for (int j = 0; j < basis.dim(); ++j)
            CHECK(std::abs(c(j) - (j == k ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("expansion round-trips a random combination") {
    ModelParams p = make_params(0.5, 2, 1.0, 0.15);
    ThetaBasis basis(p, 3);
    Vector c0(2);
    c0 << cplx(0.3, -1.1), cplx(2.0, 0.7);
    Vector c = basis.expand([&](cplx z) { return basis.eval_vector(c0, z); });
    CHECK((c - c0).norm() < 1e-11 * c0.norm());
}

TEST_CASE("expansion rejects a function outside the spanned space") {
    ModelParams p = make_params(0.5, 2, 1.0, 0.15);
    ThetaBasis basis(p, 1);
    // An odd function cannot lie in the even-theta span.
    CHECK_THROWS(basis.expand([&](cplx z) { return theta11(z, p.tau); }));
}

TEST_CASE("difference operators map the basis into itself") {
    ModelParams p = make_params(1.0, 2, 1.0, 0.11);
    ThetaBasis basis(p, 2);
    for (int a = 0; a < 4; ++a)
        for (int k = 0; k < basis.dim(); ++k) {
            auto g = difference_op(a, [&, k](cplx z) { return basis.eval(k, z); }, p);
            CHECK_NOTHROW(basis.expand(g));
        }
}

TEST_CASE("quadratic exchange relations of the generator matrices") {
    for (auto [l, eta] : {std::pair{0.5, 0.15}, {1.0, 0.11}, {1.5, 0.07}}) {
        ModelParams p = make_params(l, 2, l == 1.5 ? 0.9 : 1.0, eta);
        ThetaBasis basis(p, 1);
        RepMatrices R = rep_matrices(p, basis);
        CHECK(commutation_residual(R, p) < 1e-9);
    }
}

TEST_CASE("generator matrices do not depend on the collocation seed") {
    ModelParams p = make_params(1.0, 2, 1.0, 0.11);
    ThetaBasis b1(p, 1), b2(p, 17);
    RepMatrices R1 = rep_matrices(p, b1), R2 = rep_matrices(p, b2);
    for (int a = 0; a < 4; ++a) CHECK(rel(R1.S[a], R2.S[a]) < 1e-9);
}

TEST_CASE("spin-1/2 generators reduce to scaled Pauli matrices") {
    // In the pair f1 = theta00(2z,2tau) - theta10(2z,2tau),
    // f2 = theta00 + theta10 the four generators act as
    // theta11(2 eta) sigma^a.
    ModelParams p = make_params(0.5, 2, 1.0, 0.15);
    const cplx I(0.0, 1.0);
    auto f = [&](int i, cplx z) {
        const cplx a = theta(0, 0, 2.0 * z, 2.0 * p.tau);
        const cplx b = theta(1, 0, 2.0 * z, 2.0 * p.tau);
        return i == 0 ? a - b : a + b;
    };
    const cplx z1(0.137, 0.211), z2(0.391, 0.068);
    Eigen::Matrix2cd C;
    C << f(0, z1), f(1, z1), f(0, z2), f(1, z2);
    const Eigen::Matrix2cd Cinv = C.inverse();
    const cplx s = theta11(2.0 * p.eta, p.tau);
    const Eigen::Matrix2cd sig[4] = {
        (Eigen::Matrix2cd() << 1, 0, 0, 1).finished(),
        (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(),
        (Eigen::Matrix2cd() << 0, -I, I, 0).finished(),
        (Eigen::Matrix2cd() << 1, 0, 0, -1).finished()};
    for (int a = 0; a < 4; ++a) {
        Eigen::Matrix2cd M;
        for (int i = 0; i < 2; ++i) {
            auto g = difference_op(a, [&, i](cplx z) { return f(i, z); }, p);
            const Eigen::Vector2cd vals(g(z1), g(z2));
            M.col(i) = Cinv * vals;
        }
        CHECK((M - s * sig[a]).norm() < 1e-10 * std::abs(s) * sig[a].norm());
    }
}

TEST_CASE("half-period intertwiners: involution, exchange and conjugation") {
    for (auto [l, eta] : {std::pair{0.5, 0.15}, {1.0, 0.11}}) {
        ModelParams p = make_params(l, 2, 1.0, eta);
        ThetaBasis basis(p, 1);
        RepMatrices R = rep_matrices(p, basis);
        UMatrices U = u_matrices(p, basis);
        const Matrix id = Matrix::Identity(p.site_dim(), p.site_dim());
        const double sgn = p.two_l() % 2 == 0 ? 1.0 : -1.0;
        for (int a = 1; a <= 3; ++a) {
            const double sc = std::max(U[a].norm() * U[a].norm(), 1.0);
            CHECK((U[a] * U[a] - sgn * id).norm() < 1e-10 * sc);
        }
        const double sc = std::max(U.U1.norm() * U.U3.norm(), 1.0);
        CHECK((U.U1 * U.U3 - sgn * U.U3 * U.U1).norm() < 1e-10 * sc);
        CHECK((U.U3 * U.U1 - U.U2).norm() < 1e-10 * sc);
        // U_a^{-1} S^b U_a = +- S^b with sign + iff b in {0, a}.
        for (int a = 1; a <= 3; ++a) {
            const Matrix Uinv = U[a].inverse();
            for (int b = 0; b < 4; ++b) {
                const double eps = (b == 0 || b == a) ? 1.0 : -1.0;
                const double scale =
                    std::max(Uinv.norm() * R.S[b].norm() * U[a].norm(), 1.0);
                CHECK((Uinv * R.S[b] * U[a] - eps * R.S[b]).norm() < 1e-10 * scale);
            }
        }
    }
}
