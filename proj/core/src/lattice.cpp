#include "qev/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>

namespace qev {

Vector chain_tensor(const std::vector<Vector>& site_vectors) {
    if (site_vectors.empty())
        throw std::invalid_argument("chain_tensor: empty site list");
    Vector out = site_vectors.front();
    for (std::size_t j = 1; j < site_vectors.size(); ++j) {
        // site j+1 becomes the slower digit
        out = Eigen::kroneckerProduct(site_vectors[j], out).eval();
    }
    return out;
}

Matrix site_embed(const Matrix& A, int site, const ModelParams& params) {
    if (site < 1 || site > params.N)
        throw std::invalid_argument("site_embed: site index out of range");
    const int d = params.site_dim();
    long lower = 1, upper = 1;
    for (int j = 1; j < site; ++j) lower *= d;
    for (int j = site + 1; j <= params.N; ++j) upper *= d;
    const Matrix il = Matrix::Identity(lower, lower);
    const Matrix iu = Matrix::Identity(upper, upper);
    return Eigen::kroneckerProduct(iu, Eigen::kroneckerProduct(A, il).eval()).eval();
}

Matrix tensor_power(const Matrix& A, int N) {
    Matrix out = A;
    for (int j = 1; j < N; ++j) out = Eigen::kroneckerProduct(A, out).eval();
    return out;
}

std::array<cplx, 4> w_weights(const cplx& u0, const ModelParams& p, bool r_shift) {
    const cplx u = r_shift ? u0 + p.eta : u0;
    const cplx d0 = theta11(p.eta, p.tau);
    const cplx d1 = theta(1, 0, p.eta, p.tau);
    const cplx d2 = theta(0, 0, p.eta, p.tau);
    const cplx d3 = theta(0, 1, p.eta, p.tau);
    if (std::abs(d0) < 1e-12 || std::abs(d1) < 1e-12 || std::abs(d2) < 1e-12 ||
        std::abs(d3) < 1e-12)
        throw std::runtime_error("w_weights: degenerate eta (vanishing theta denominator)");
    return {theta11(u, p.tau) / d0, theta(1, 0, u, p.tau) / d1,
            theta(0, 0, u, p.tau) / d2, theta(0, 1, u, p.tau) / d3};
}

LOperator l_operator(const cplx& u, const RepMatrices& R, const ModelParams& p) {
    const auto w = w_weights(u, p);
    const cplx I(0.0, 1.0);
    LOperator L;
    L.mm = w[0] * R.S[0] + w[3] * R.S[3];
    L.mp = w[1] * R.S[1] - I * w[2] * R.S[2];
    L.pm = w[1] * R.S[1] + I * w[2] * R.S[2];
    L.pp = w[0] * R.S[0] - w[3] * R.S[3];
    return L;
}

namespace {

Matrix pauli(int a) {
    Matrix s(2, 2);
    const cplx I(0.0, 1.0);
    switch (a) {
        case 0: s << 1, 0, 0, 1; break;
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, -I, I, 0; break;
        default: s << 1, 0, 0, -1;
    }
    return s;
}

}  // namespace

double rll_residual(const cplx& u, const cplx& v, const RepMatrices& R,
                    const ModelParams& p) {
    const int d = p.site_dim();
    const auto wu = w_weights(u, p);
    const auto wv = w_weights(v, p);
    const auto wr = w_weights(u - v, p, /*r_shift=*/true);
    const long dim = d * 4;
    Matrix L12 = Matrix::Zero(dim, dim), L13 = Matrix::Zero(dim, dim),
           R23 = Matrix::Zero(dim, dim);
    const Matrix id2 = Matrix::Identity(2, 2);
    const Matrix idd = Matrix::Identity(d, d);
    for (int a = 0; a < 4; ++a) {
        const Matrix sa = pauli(a);
        L12 += wv[a] * Eigen::kroneckerProduct(
                           R.S[a], Eigen::kroneckerProduct(sa, id2).eval()).eval();
        L13 += wu[a] * Eigen::kroneckerProduct(
                           R.S[a], Eigen::kroneckerProduct(id2, sa).eval()).eval();
        R23 += wr[a] * Eigen::kroneckerProduct(
                           idd, Eigen::kroneckerProduct(sa, sa).eval()).eval();
    }
    const Matrix lhs = L12 * L13 * R23;
    const Matrix rhs = R23 * L13 * L12;
    return (lhs - rhs).norm() / std::max({lhs.norm(), rhs.norm(), 1e-300});
}

Matrix transfer_matrix(const cplx& u, const RepMatrices& R, const ModelParams& p) {
    const long dim = p.chain_dim();
    if (dim > 4096)
        throw std::runtime_error("transfer_matrix: chain dimension " +
                                 std::to_string(dim) + " exceeds the dense guard 4096");
    const LOperator L = l_operator(u, R, p);
    // Monodromy blocks on the growing chain space, site 1 innermost.
    std::array<Matrix, 4> M;  // (--, -+, +-, ++) row-major
    M[0] = L.mm;
    M[1] = L.mp;
    M[2] = L.pm;
    M[3] = L.pp;
    for (int site = 2; site <= p.N; ++site) {
        std::array<Matrix, 4> next;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                Matrix acc;
                for (int m = 0; m < 2; ++m) {
                    Matrix term =
                        Eigen::kroneckerProduct(L.block(r, m), M[2 * m + c]).eval();
                    if (m == 0)
                        acc = std::move(term);
                    else
                        acc += term;
                }
                next[2 * r + c] = std::move(acc);
            }
        M = std::move(next);
    }
    return M[0] + M[3];
}

GaugeMatrix gauge_matrix(const cplx& lambda, const cplx& v, const ModelParams& p) {
    const cplx half_tau = 0.5 * p.tau;
    GaugeMatrix g;
    g.lambda = lambda;
    g.v = v;
    g.M(0, 0) = -theta(0, 0, 0.5 * (lambda - v), half_tau);
    g.M(0, 1) = -theta(0, 0, 0.5 * (lambda + v), half_tau);
    g.M(1, 0) = theta(0, 1, 0.5 * (lambda - v), half_tau);
    g.M(1, 1) = theta(0, 1, 0.5 * (lambda + v), half_tau);
    if (std::abs(g.M.determinant()) < 1e-10)
        throw std::runtime_error("gauge_matrix: near-singular M at lambda=" +
                                 std::to_string(lambda.real()) +
                                 ", v=" + std::to_string(v.real()));
    return g;
}

TwistedL twisted_l(const cplx& lambda, const cplx& lambda_p, const cplx& u,
                   const cplx& v, const RepMatrices& R, const ModelParams& p) {
    const GaugeMatrix Ml = gauge_matrix(lambda, v, p);
    const GaugeMatrix Mr = gauge_matrix(lambda_p, v, p);
    const Eigen::Matrix2cd Minv = Ml.M.inverse();
    const LOperator L = l_operator(u, R, p);
    auto entry = [&](int r, int c) {
        Matrix out = Matrix::Zero(L.mm.rows(), L.mm.cols());
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out += Minv(r, i) * L.block(i, j) * Mr.M(j, c);
        return out;
    };
    return TwistedL{entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1)};
}

Vector omega_vector(const cplx& lambda, const cplx& u, const cplx& v,
                    const ThetaBasis& basis) {
    const ModelParams& p = basis.params();
    const int tl = p.two_l();
    const cplx shift = 0.5 * (lambda + u - v) + (-p.l + 1.0) * p.eta;
    return basis.expand([&](cplx z) {
        return bracket_k(z + shift, tl, p) * bracket_k(-z + shift, tl, p);
    });
}

Vector intertwiner_vector(const cplx& lambda, double m, const cplx& u,
                          const cplx& v, const ThetaBasis& basis) {
    const ModelParams& p = basis.params();
    const int lpm = static_cast<int>(std::lround(p.l + m));
    const int lmm = static_cast<int>(std::lround(p.l - m));
    if (lpm < 0 || lmm < 0 || lpm + lmm != p.two_l())
        throw std::invalid_argument("intertwiner_vector: m must lie in {-l, ..., l}");
    const cplx lambda_p = lambda + 4.0 * m * p.eta;
    const cplx s1 = 0.5 * (lambda + u - v) + (-p.l + 1.0) * p.eta;
    const cplx s2 = 0.5 * (lambda_p + u - v) + (-p.l + 1.0) * p.eta;
    return basis.expand([&](cplx z) {
        return bracket_k(z + s1, lpm, p) * bracket_k(-z + s1, lpm, p) *
               bracket_k(z + s2, lmm, p) * bracket_k(-z + s2, lmm, p);
    });
}

double vacuum_action_residual(const cplx& lambda, const cplx& u, const cplx& v,
                              int sign, const RepMatrices& R,
                              const ThetaBasis& basis, const ModelParams& p) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("vacuum_action_residual: sign must be +-1");
    const double s = sign;
    const double leta4 = 4.0 * p.l * p.eta;
    const TwistedL T = twisted_l(lambda + s * leta4, lambda, u, v, R, p);
    const Vector w = omega_vector(s * lambda, u, s * v, basis);
    const Vector w_minus = omega_vector(s * lambda - 2.0 * p.eta, u, s * v, basis);
    const Vector w_plus = omega_vector(s * lambda + 2.0 * p.eta, u, s * v, basis);

    const cplx ca = 2.0 * bracket(u + 2.0 * p.l * p.eta, p);
    const cplx dd = bracket(lambda + s * leta4, p);
    if (std::abs(dd) < 1e-12)
        throw std::runtime_error("vacuum_action_residual: [lambda +- 4 l eta] ~ 0");
    const cplx cd = 2.0 * bracket(u - 2.0 * p.l * p.eta, p) * bracket(lambda, p) / dd;

    double worst = 0.0;
    auto rel = [&](const Vector& lhs, const Vector& rhs) {
        return (lhs - rhs).norm() / std::max({lhs.norm(), rhs.norm(), 1e-300});
    };
    worst = std::max(worst, rel(T.alpha * w, ca * w_minus));
    worst = std::max(worst, (T.gamma * w).norm() /
                                std::max({(T.gamma.norm() * w.norm()), 1e-300}));
    worst = std::max(worst, rel(T.delta * w, cd * w_plus));
    return worst;
}

}  // namespace qev
