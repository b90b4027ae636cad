#include "qev/representation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace qev {

namespace {

// Long-double construction path for the generator and intertwiner
// matrices: the raw theta basis is skewed (Gram condition grows as eta
// shrinks), so double-precision collocation leaves ~1e-9 noise in
// derived identities. Building the columns in extended precision and
// casting at the end removes that floor.
using ldbl = long double;
using cplxl = std::complex<ldbl>;
using MatL = Eigen::Matrix<cplxl, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<cplxl, Eigen::Dynamic, 1>;

constexpr ldbl pil = 3.14159265358979323846264338327950288L;

cplxl theta_long(int a, int b, const cplxl& z, const cplxl& tau) {
    const ldbl t = tau.imag();
    int trunc = 1 + static_cast<int>(std::ceil(
        std::sqrt(24.0L * std::log(10.0L) / (pil * t))));
    trunc += static_cast<int>(std::ceil(std::abs(z.imag()) / t));
    const cplxl i_pi(0.0L, pil);
    cplxl s = 0.0L;
    for (int n = trunc; n >= -trunc; --n) {
        const ldbl m = 0.5L * a + n;
        s += std::exp(i_pi * (m * m * tau) + 2.0L * i_pi * m * (0.5L * b + z));
    }
    return s;
}

struct LongCtx {
    cplxl tau, a, b;
    ldbl eta, l;
    int tl;
    std::vector<cplxl> pts;
    VecL rscale;
    MatL colloc;
    Eigen::ColPivHouseholderQR<MatL> qr;

    cplxl bracket(const cplxl& z) const { return theta_long(1, 1, z, tau); }
    cplxl bracket_k(const cplxl& z, int k) const {
        cplxl prod = 1.0L;
        for (int j = 0; j < k; ++j) prod *= bracket(z + 2.0L * j * eta);
        return prod;
    }
    cplxl eval(int k, const cplxl& z) const {
        return bracket_k(z + a, k) * bracket_k(-z + a, k) *
               bracket_k(z + b, tl - k) * bracket_k(-z + b, tl - k);
    }
    Vector expand(const std::function<cplxl(cplxl)>& f) const {
        const int rows = static_cast<int>(pts.size());
        VecL rhs(rows);
        for (int m = 0; m < rows; ++m) rhs(m) = f(pts[m]) * rscale(m);
        const VecL c = qr.solve(rhs);
        if ((colloc * c - rhs).norm() >
            1e-12L * std::max<ldbl>(rhs.norm(), 1e-300L))
            throw std::runtime_error(
                "ThetaBasis: extended-precision expansion left the theta space");
        Vector out(c.size());
        for (int k = 0; k < c.size(); ++k)
            out(k) = cplx(double(c(k).real()), double(c(k).imag()));
        return out;
    }
};

LongCtx make_long_ctx(const ThetaBasis& basis) {
    const ModelParams& p = basis.params();
    LongCtx ctx;
    ctx.tau = cplxl(ldbl(p.tau.real()), ldbl(p.tau.imag()));
    ctx.a = cplxl(ldbl(basis.a_param().real()), ldbl(basis.a_param().imag()));
    ctx.b = cplxl(ldbl(basis.b_param().real()), ldbl(basis.b_param().imag()));
    ctx.eta = ldbl(p.eta);
    ctx.l = ldbl(p.l);
    ctx.tl = p.two_l();
    for (const auto& z : basis.collocation_points())
        ctx.pts.emplace_back(ldbl(z.real()), ldbl(z.imag()));
    const int rows = static_cast<int>(ctx.pts.size());
    const int d = ctx.tl + 1;
    ctx.colloc.resize(rows, d);
    ctx.rscale.resize(rows);
    for (int m = 0; m < rows; ++m) {
        for (int k = 0; k < d; ++k) ctx.colloc(m, k) = ctx.eval(k, ctx.pts[m]);
        const ldbl rn = ctx.colloc.row(m).norm();
        ctx.rscale(m) = rn > 1e-300L ? 1.0L / rn : 1.0L;
        ctx.colloc.row(m) *= ctx.rscale(m);
    }
    ctx.qr.compute(ctx.colloc);
    return ctx;
}

cplxl s_factor_long(int a, const cplxl& w, const LongCtx& ctx) {
    switch (a) {
        case 0: return theta_long(1, 1, cplxl(ctx.eta), ctx.tau) *
                       theta_long(1, 1, 2.0L * w, ctx.tau);
        case 1: return theta_long(1, 0, cplxl(ctx.eta), ctx.tau) *
                       theta_long(1, 0, 2.0L * w, ctx.tau);
        case 2: return cplxl(0.0L, 1.0L) *
                       theta_long(0, 0, cplxl(ctx.eta), ctx.tau) *
                       theta_long(0, 0, 2.0L * w, ctx.tau);
        default: return theta_long(0, 1, cplxl(ctx.eta), ctx.tau) *
                        theta_long(0, 1, 2.0L * w, ctx.tau);
    }
}

double lattice_distance(const cplx& z, const cplx& tau) {
    const double t = tau.imag();
    const double dx = z.real() - std::round(z.real());
    const double dy = z.imag() / t - std::round(z.imag() / t);
    return std::hypot(dx, dy * t);
}

void check_genericity(const cplx& a, const cplx& b, const ModelParams& p) {
    const int n = p.two_l();
    for (int j = 1 - n; j <= n - 1; ++j)
        if (lattice_distance(a - b + 2.0 * j * p.eta, p.tau) < 1e-3)
            throw std::invalid_argument(
                "ThetaBasis: a-b+2j eta too close to the period lattice (j=" +
                std::to_string(j) + ")");
    for (int j = 0; j <= n - 1; ++j)
        if (lattice_distance(a + b + 2.0 * j * p.eta, p.tau) < 1e-3)
            throw std::invalid_argument(
                "ThetaBasis: a+b+2j eta too close to the period lattice (j=" +
                std::to_string(j) + ")");
}

}  // namespace

ThetaBasis::ThetaBasis(const ModelParams& params, unsigned seed, cplx a_param,
                       cplx b_param)
    : params_(params), a_(a_param), b_(b_param), seed_(seed) {
    params_.validate();
    check_genericity(a_, b_, params_);
    const int d = dim();
    const int rows = 3 * d + 2;  // oversampled least-squares fit
    const double t = params_.tau.imag();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(0.05, 0.95);
    std::uniform_real_distribution<double> uy(0.05 * t, 0.45 * t);
    double best_cond = std::numeric_limits<double>::infinity();
    std::vector<cplx> best_points, best_fresh;
    Matrix best_colloc;
    Eigen::VectorXd best_scale;
    for (int attempt = 0; attempt < 20; ++attempt) {
        points_.clear();
        fresh_points_.clear();
        auto draw = [&]() {
            for (int guard = 0; guard < 1000; ++guard) {
                const cplx z(ux(rng), uy(rng));
                if (std::abs(theta11(2.0 * z, params_.tau)) >= 1e-3) return z;
            }
            throw std::runtime_error("ThetaBasis: could not draw collocation points");
        };
        for (int m = 0; m < rows; ++m) points_.push_back(draw());
        for (int m = 0; m < 3; ++m) fresh_points_.push_back(draw());
        colloc_.resize(rows, d);
        for (int m = 0; m < rows; ++m)
            for (int k = 0; k < d; ++k) colloc_(m, k) = eval(k, points_[m]);
        // Row equilibration keeps points where the basis is small from
        // being swamped by large-magnitude rows in the fit.
        row_scale_.resize(rows);
        for (int m = 0; m < rows; ++m) {
            const double rn = colloc_.row(m).norm();
            row_scale_(m) = rn > 1e-300 ? 1.0 / rn : 1.0;
            colloc_.row(m) *= row_scale_(m);
        }
        Eigen::JacobiSVD<Matrix> svd(colloc_);
        condition_ = svd.singularValues()(0) /
                     std::max(svd.singularValues()(d - 1), 1e-300);
        if (condition_ < best_cond) {
            best_cond = condition_;
            best_points = points_;
            best_fresh = fresh_points_;
            best_colloc = colloc_;
            best_scale = row_scale_;
        }
    }
    if (best_cond >= 1e8)
        throw std::runtime_error(
            "ThetaBasis: collocation matrix stayed ill-conditioned after 20 "
            "resamples (condition " + std::to_string(best_cond) + ")");
    points_ = std::move(best_points);
    fresh_points_ = std::move(best_fresh);
    colloc_ = std::move(best_colloc);
    row_scale_ = std::move(best_scale);
    condition_ = best_cond;
    qr_.compute(colloc_);
}

cplx ThetaBasis::eval(int k, const cplx& z) const {
    if (k < 0 || k > params_.two_l())
        throw std::invalid_argument("ThetaBasis::eval: index out of range");
    return za_bracket_k(z, a_, k, params_) *
           za_bracket_k(z, b_, params_.two_l() - k, params_);
}

cplx ThetaBasis::eval_vector(const Vector& c, const cplx& z) const {
    cplx s = 0.0;
    for (int k = 0; k < dim(); ++k) s += c(k) * eval(k, z);
    return s;
}

Vector ThetaBasis::expand(const std::function<cplx(cplx)>& f) const {
    const int rows = static_cast<int>(points_.size());
    Vector rhs(rows);
    double scale = 1.0;
    for (int m = 0; m < rows; ++m) {
        rhs(m) = f(points_[m]) * row_scale_(m);
        scale = std::max(scale, std::abs(rhs(m)));
    }
    Vector c = qr_.solve(rhs);
    if ((colloc_ * c - rhs).norm() > 1e-8 * std::max(rhs.norm(), 1e-300))
        throw std::runtime_error(
            "ThetaBasis::expand: function is not in the theta space "
            "(least-squares residual too large)");
    for (const auto& z : fresh_points_) {
        const cplx fv = f(z);
        scale = std::max(scale, std::abs(fv));
        if (std::abs(eval_vector(c, z) - fv) > 1e-8 * scale)
            throw std::runtime_error(
                "ThetaBasis::expand: function is not in the theta space "
                "(fresh-point residual " +
                std::to_string(std::abs(eval_vector(c, z) - fv) / scale) + ")");
    }
    return c;
}

std::function<cplx(cplx)> difference_op(int a, std::function<cplx(cplx)> f,
                                        const ModelParams& params) {
    if (a < 0 || a > 3) throw std::invalid_argument("difference_op: a must be 0..3");
    const ModelParams p = params;
    return [a, f = std::move(f), p](cplx z) -> cplx {
        const cplx den = theta11(2.0 * z, p.tau);
        if (std::abs(den) < 1e-8)
            throw std::runtime_error(
                "difference_op: evaluation too close to a zero of theta11(2z) at z = " +
                std::to_string(z.real()) + "+" + std::to_string(z.imag()) + "i");
        auto s = [&](cplx w) -> cplx {
            switch (a) {
                case 0: return theta11(p.eta, p.tau) * theta11(2.0 * w, p.tau);
                case 1: return theta(1, 0, p.eta, p.tau) * theta(1, 0, 2.0 * w, p.tau);
                case 2:
                    return cplx(0.0, 1.0) * theta(0, 0, p.eta, p.tau) *
                           theta(0, 0, 2.0 * w, p.tau);
                default: return theta(0, 1, p.eta, p.tau) * theta(0, 1, 2.0 * w, p.tau);
            }
        };
        const double leta = p.l * p.eta;
        return (s(z - leta) * f(z + p.eta) - s(-z - leta) * f(z - p.eta)) / den;
    };
}

RepMatrices rep_matrices(const ModelParams& params, const ThetaBasis& basis) {
    (void)params;
    const int d = basis.dim();
    const LongCtx ctx = make_long_ctx(basis);
    RepMatrices R;
    for (int a = 0; a < 4; ++a) {
        R.S[a].resize(d, d);
        for (int k = 0; k < d; ++k) {
            auto g = [&, a, k](cplxl z) -> cplxl {
                const cplxl den = theta_long(1, 1, 2.0L * z, ctx.tau);
                const cplxl leta = ctx.l * ctx.eta;
                return (s_factor_long(a, z - leta, ctx) * ctx.eval(k, z + ctx.eta) -
                        s_factor_long(a, -z - leta, ctx) * ctx.eval(k, z - ctx.eta)) /
                       den;
            };
            R.S[a].col(k) = ctx.expand(g);
        }
    }
    return R;
}

double commutation_residual(const RepMatrices& R, const ModelParams& params) {
    auto wsq = [&](int a, cplx u) {
        cplx w;
        switch (a) {
            case 0: w = theta11(u, params.tau) / theta11(params.eta, params.tau); break;
            case 1:
                w = theta(1, 0, u, params.tau) / theta(1, 0, params.eta, params.tau);
                break;
            case 2:
                w = theta(0, 0, u, params.tau) / theta(0, 0, params.eta, params.tau);
                break;
            default:
                w = theta(0, 1, u, params.tau) / theta(0, 1, params.eta, params.tau);
        }
        return w * w;
    };
    auto J = [&](int alpha, int beta, int gamma, cplx u) {
        const cplx den = wsq(gamma, u) - wsq(0, u);
        if (std::abs(den) < 1e-12)
            throw std::runtime_error("commutation_residual: degenerate eta, J denominator ~ 0");
        return (wsq(alpha, u) - wsq(beta, u)) / den;
    };
    // u-independence of the structure constants
    const cplx u1(0.3, 0.0), u2(0.7, 0.0);
    const int cyc[3][3] = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}};
    for (const auto& c : cyc)
        if (std::abs(J(c[0], c[1], c[2], u1) - J(c[0], c[1], c[2], u2)) > 1e-9)
            throw std::runtime_error(
                "commutation_residual: structure constants depend on the spectral parameter");
    const cplx I(0.0, 1.0);
    // Global scale: relations whose two sides both vanish (e.g. the
    // S^0-central ones at l=1/2) must not be judged noise-over-noise.
    double scale = 0.0;
    for (int a = 0; a < 4; ++a) scale = std::max(scale, R.S[a].norm());
    double jmax = 1.0;
    for (const auto& c : cyc)
        jmax = std::max(jmax, std::abs(J(c[0], c[1], c[2], u1)));
    const double sc = std::max(scale * scale * jmax, 1e-300);
    double worst = 0.0;
    auto comm = [](const Matrix& A, const Matrix& B) { return A * B - B * A; };
    auto anti = [](const Matrix& A, const Matrix& B) { return A * B + B * A; };
    for (const auto& c : cyc) {
        const int al = c[0], be = c[1], ga = c[2];
        const Matrix lhs1 = comm(R.S[al], R.S[0]);
        // Structure constant carries the indices of the anticommutator pair:
        // J(beta,gamma) with denominator W_alpha^2 - W_0^2.
        const Matrix rhs1 = -I * J(be, ga, al, u1) * anti(R.S[be], R.S[ga]);
        worst = std::max(worst, (lhs1 - rhs1).norm() / sc);
        const Matrix lhs2 = comm(R.S[al], R.S[be]);
        const Matrix rhs2 = I * anti(R.S[0], R.S[ga]);
        worst = std::max(worst, (lhs2 - rhs2).norm() / sc);
    }
    return worst;
}

UMatrices u_matrices(const ModelParams& params, const ThetaBasis& basis) {
    (void)params;
    const int d = basis.dim();
    const LongCtx ctx = make_long_ctx(basis);
    const cplxl I(0.0L, 1.0L);
    const cplxl ph = std::exp(I * pil * ctx.l);
    UMatrices U;
    U.U1.resize(d, d);
    U.U3.resize(d, d);
    MatL U1l(d, d), U3l(d, d);
    for (int k = 0; k < d; ++k) {
        auto u1f = [&, k](cplxl z) { return ph * ctx.eval(k, z + 0.5L); };
        U.U1.col(k) = ctx.expand(u1f);
        auto u3f = [&, k](cplxl z) {
            return ph * std::exp(I * pil * ctx.l * (4.0L * z + ctx.tau)) *
                   ctx.eval(k, z + 0.5L * ctx.tau);
        };
        U.U3.col(k) = ctx.expand(u3f);
    }
    // U2 = U3 U1, multiplied in extended precision before the cast.
    for (int r = 0; r < d; ++r)
        for (int k = 0; k < d; ++k) {
            U1l(r, k) = cplxl(ldbl(U.U1(r, k).real()), ldbl(U.U1(r, k).imag()));
            U3l(r, k) = cplxl(ldbl(U.U3(r, k).real()), ldbl(U.U3(r, k).imag()));
        }
    const MatL U2l = U3l * U1l;
    U.U2.resize(d, d);
    for (int r = 0; r < d; ++r)
        for (int k = 0; k < d; ++k)
            U.U2(r, k) = cplx(double(U2l(r, k).real()), double(U2l(r, k).imag()));
    return U;
}

}  // namespace qev
