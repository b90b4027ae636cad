#include "qev/sklyanin_form.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qev {

cplx mu_kernel(const cplx& z, const cplx& w, const ModelParams& params) {
    const cplx num =
        theta11(2.0 * z, params.tau) * theta11(2.0 * w, params.tau);
    cplx den = 1.0;
    const int tl = params.two_l();
    for (int j = 0; j <= tl + 1; ++j) {
        const double shift = (2.0 * j - tl - 1.0) * params.eta;
        const cplx f1 = theta(0, 0, z + w + shift, params.tau);
        const cplx f2 = theta(0, 0, z - w + shift, params.tau);
        if (std::abs(f1) < 1e-8 || std::abs(f2) < 1e-8)
            throw std::runtime_error(
                "mu_kernel: denominator factor near zero at j=" + std::to_string(j) +
                ", z=" + std::to_string(z.real()) + "+" + std::to_string(z.imag()) +
                "i, w=" + std::to_string(w.real()) + "+" + std::to_string(w.imag()) +
                "i");
        den *= f1 * f2;
    }
    return num / den;
}

namespace {

// Gram matrix on a fixed (possibly half-step shifted) grid.
Matrix gram_on_grid(const ThetaBasis& basis, int nx, int ny, bool shifted) {
    const ModelParams& p = basis.params();
    const int d = basis.dim();
    const double t = p.tau.imag();
    const double hx = 1.0 / nx, hy = t / ny;
    const double x0 = shifted ? 0.5 * hx : 0.0;
    const double y0 = shifted ? 0.5 * hy : 0.0;
    Matrix G = Matrix::Zero(d, d);
    Vector e(d);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const cplx z(x0 + i * hx, y0 + j * hy);
            for (int k = 0; k < d; ++k) e(k) = basis.eval(k, z);
            const cplx mu = mu_kernel(z, std::conj(z), p);
            G.noalias() += mu * (e.conjugate() * e.transpose());
        }
    return G * (hx * hy);
}

Matrix gram_with_retry(const ThetaBasis& basis, int nx, int ny) {
    try {
        return gram_on_grid(basis, nx, ny, false);
    } catch (const std::runtime_error&) {
        // Grid hit a kernel pole; a half-step offset dodges it once.
        return gram_on_grid(basis, nx, ny, true);
    }
}

}  // namespace

cplx sklyanin_inner(const Vector& f_coeffs, const Vector& g_coeffs,
                    const ThetaBasis& basis, int nx, int ny) {
    if (nx < 32 || ny < 32)
        throw std::invalid_argument("sklyanin_inner: grid must be at least 32x32");
    const ModelParams& p = basis.params();
    const double t = p.tau.imag();
    auto integrand = [&](double x, double y) {
        const cplx z(x, y);
        return std::conj(basis.eval_vector(f_coeffs, z)) *
               basis.eval_vector(g_coeffs, z) * mu_kernel(z, std::conj(z), p);
    };
    try {
        return trapezoid_2d(integrand, nx, ny, 1.0, t);
    } catch (const std::runtime_error&) {
        return trapezoid_2d(integrand, nx, ny, 1.0, t, 0.5 / nx, 0.5 * t / ny);
    }
}

GramMatrix gram_matrix(const ThetaBasis& basis, int nx, int ny, double rel_tol) {
    Matrix G = gram_with_retry(basis, nx, ny);
    double change = 1.0;
    while (true) {
        const Matrix G2 = gram_with_retry(basis, 2 * nx, 2 * ny);
        change = (G2 - G).norm() / std::max(G2.norm(), 1e-300);
        G = G2;
        nx *= 2;
        ny *= 2;
        if (change < rel_tol || nx >= 1024) break;
    }
    if (change >= rel_tol)
        throw std::runtime_error(
            "gram_matrix: quadrature did not converge (relative change " +
            std::to_string(change) + " at 1024^2)");
    if ((G - G.adjoint()).norm() > 1e-8 * G.norm())
        throw std::runtime_error("gram_matrix: result is not Hermitian");
    G = 0.5 * (G + Matrix(G.adjoint()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::runtime_error("gram_matrix: Gram matrix is not positive definite");
    return GramMatrix{G, nx, ny, change};
}

OrthonormalFrame orthonormal_frame(const GramMatrix& gram) {
    Eigen::LLT<Matrix> llt(gram.G);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "orthonormal_frame: factorization failed (Gram not positive definite)");
    OrthonormalFrame f;
    f.R = llt.matrixL().adjoint();  // G = R^H R with R upper triangular
    f.R_inverse = f.R.inverse();
    return f;
}

cplx elliptic_binomial(int n, int k, const cplx& a, const cplx& b, const cplx& c,
                       const ModelParams& p) {
    if (n < 0 || n > k)
        throw std::invalid_argument("elliptic_binomial: need 0 <= n <= k");
    const double eta = p.eta;
    const cplx num = bracket_k(cplx(2.0 * eta), k, p) * bracket_k(a - c, n, p) *
                     bracket_k(a + c + 2.0 * (k - n) * eta, n, p) *
                     bracket_k(a - b, k - n, p) *
                     bracket_k(a + b + 2.0 * n * eta, k - n, p);
    const cplx den = bracket_k(cplx(2.0 * eta), n, p) *
                     bracket_k(cplx(2.0 * eta), k - n, p) *
                     bracket_k(b - c + 2.0 * (n - k) * eta, n, p) *
                     bracket_k(c - b - 2.0 * n * eta, k - n, p) *
                     bracket_k(b + c, k, p);
    if (std::abs(den) < 1e-250)
        throw std::runtime_error("elliptic_binomial: non-generic parameters (denominator ~ 0)");
    return num / den;
}

cplx extremal_6j(const cplx& a, const cplx& /*b*/, const cplx& c, const cplx& d,
                 int Nn, const ModelParams& p) {
    const cplx den = za_bracket_k(d, c, Nn, p);
    if (std::abs(den) < 1e-250)
        throw std::runtime_error("extremal_6j: degenerate (c,d) basis, [d;c]_N ~ 0");
    return za_bracket_k(d, a, Nn, p) / den;
}

cplx dual_pairing_constant(int Nn, const ModelParams& p) {
    const cplx I(0.0, 1.0);
    cplx prod = 1.0;
    for (int j = 1;; ++j) {
        const cplx q2j = std::exp(2.0 * j * I * pi * p.tau);
        if (std::abs(q2j) < 1e-16) break;
        const cplx f = 1.0 - q2j;
        prod *= f * f * f;
    }
    const cplx den = bracket(cplx(2.0 * (Nn + 1) * p.eta), p) * prod;
    if (std::abs(den) < 1e-250)
        throw std::runtime_error("dual_pairing_constant: non-generic eta");
    // The overall exponent is pinned by direct quadrature of the pairing:
    // the naive 3*tau/4 normalisation is off by exp(-pi i tau (Nn+2)/2),
    // uniformly in the index and the (c,d) parameters.
    const cplx expo = (0.75 - 0.5 * (Nn + 2)) * I * pi * p.tau;
    return -2.0 * p.eta * std::exp(expo) / den;
}

cplx dual_pairing_closed_form(int k, int m, const cplx& c, const cplx& d, int Nn,
                              const ModelParams& p) {
    if (k != m) return 0.0;
    const cplx I(0.0, 1.0);
    const double eta = p.eta;
    const int N = Nn;
    const cplx cd = c - d;
    const cplx den1 = bracket(cd + 2.0 * (2 * k - N) * eta, p);
    const cplx den2 = bracket_k(cplx(-2.0 * N * eta), k, p) *
                      bracket_k(cd - 2.0 * N * eta, k, p);
    if (std::abs(den1) < 1e-250 || std::abs(den2) < 1e-250)
        throw std::runtime_error("dual_pairing_closed_form: non-generic parameters");
    const cplx gamma_k = std::exp(0.5 * I * pi * double(N) * (p.tau - 1.0)) *
                         bracket(cd - 2.0 * N * eta, p) / den1 *
                         bracket_k(cplx(2.0 * eta), k, p) *
                         bracket_k(cd + 2.0 * eta, k, p) / den2 *
                         bracket_k(cd + 2.0 * (1 - N) * eta, N, p) *
                         bracket_k(c + d, N, p);
    const cplx phase =
        std::exp(2.0 * I * pi *
                 (-d * double(k) + c * double(N - k) - double(N) * (1.0 + p.tau) / 4.0));
    return dual_pairing_constant(N, p) * phase * gamma_k;
}

cplx omega_pair_closed_form(const cplx& u, const cplx& up, const cplx& v,
                            const cplx& vp, const cplx& lam, const cplx& lamp,
                            int s, int sp, const ModelParams& p) {
    if (std::abs(s) != 1 || std::abs(sp) != 1)
        throw std::invalid_argument("omega_pair_closed_form: signs must be +-1");
    const cplx I(0.0, 1.0);
    const int tl = p.two_l();
    const double l = p.l, eta = p.eta;
    const cplx w1 = 0.5 * (lamp - std::conj(lam)) +
                    0.5 * (double(sp) * up + double(s) * u) +
                    double(sp - s) * l * eta + 0.5 * (-vp + std::conj(v));
    const cplx w2 = 0.5 * (lamp + std::conj(lam)) +
                    0.5 * (double(sp) * up - double(s) * u) +
                    double(sp + s) * l * eta - 2.0 * (tl - 1) * eta +
                    0.5 * (-vp - std::conj(v));
    cplx prod = 1.0;
    // The two products carry different index offsets: w2 already contains
    // the -2(2l-1) eta shift, so its offsets run upward from (2l-1) eta.
    for (int j = 0; j < tl; ++j) {
        prod *= theta(0, 0, w1 + (2.0 * j - tl + 1.0) * eta, p.tau) *
                theta(0, 0, w2 + (2.0 * j + tl - 1.0) * eta, p.tau);
    }
    return dual_pairing_constant(tl, p) * std::exp(I * pi * l * p.tau) * prod;
}

}  // namespace qev
