#include "qev/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qev {

std::vector<Sector> sector_decomposition(const Matrix& U1_chain,
                                         const Matrix& U3_chain,
                                         const ModelParams& params) {
    const long dim = params.chain_dim();
    if (U1_chain.rows() != dim || U3_chain.rows() != dim)
        throw std::invalid_argument("sector_decomposition: dimension mismatch");
    const Matrix id = Matrix::Identity(dim, dim);
    const double scale = std::max(U1_chain.norm() * U3_chain.norm(), 1e-300);
    if ((U1_chain * U3_chain - U3_chain * U1_chain).norm() > 1e-10 * scale)
        throw std::runtime_error("sector_decomposition: U1 and U3 chains do not commute");
    const double s1sq = std::max(U1_chain.squaredNorm(), double(dim));
    const double s3sq = std::max(U3_chain.squaredNorm(), double(dim));
    if ((U1_chain * U1_chain - id).norm() > 1e-9 * s1sq ||
        (U3_chain * U3_chain - id).norm() > 1e-9 * s3sq)
        throw std::runtime_error(
            "sector_decomposition: chain involution squared differs from identity "
            "(eigenvalues not +-1)");
    std::vector<Sector> sectors;
    long total = 0;
    for (int nu1 = 0; nu1 <= 1; ++nu1)
        for (int nu3 = 0; nu3 <= 1; ++nu3) {
            const double s1 = nu1 == 0 ? 1.0 : -1.0;
            const double s3 = nu3 == 0 ? 1.0 : -1.0;
            const Matrix P = 0.25 * (id + s1 * U1_chain) * (id + s3 * U3_chain);
            const long d = std::lround(P.trace().real());
            Sector sec;
            sec.nu1 = nu1;
            sec.nu3 = nu3;
            sec.dimension = static_cast<int>(d);
            if (d > 0) {
                Eigen::ColPivHouseholderQR<Matrix> qr(P);
                Matrix Q = qr.householderQ();
                sec.basis = Q.leftCols(d);
                const double r1 = (U1_chain * sec.basis - s1 * sec.basis).norm();
                const double r3 = (U3_chain * sec.basis - s3 * sec.basis).norm();
                const double b1 = std::max(U1_chain.norm(), 1.0) * std::sqrt(double(d));
                const double b3 = std::max(U3_chain.norm(), 1.0) * std::sqrt(double(d));
                if (r1 > 1e-9 * b1 || r3 > 1e-9 * b3)
                    throw std::runtime_error(
                        "sector_decomposition: projector range is not a joint eigenspace");
            }
            total += d;
            sectors.push_back(std::move(sec));
        }
    if (total != dim)
        throw std::runtime_error("sector_decomposition: sector dimensions sum to " +
                                 std::to_string(total) + " != " + std::to_string(dim));
    return sectors;
}

namespace {

std::vector<std::vector<int>> cluster_by_gap(const Vector& vals, double gap) {
    std::vector<std::vector<int>> clusters;
    std::vector<bool> used(vals.size(), false);
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (used[i]) continue;
        std::vector<int> c{static_cast<int>(i)};
        used[i] = true;
        for (Eigen::Index j = i + 1; j < vals.size(); ++j)
            if (!used[j] && std::abs(vals(i) - vals(j)) < gap) {
                c.push_back(static_cast<int>(j));
                used[j] = true;
            }
        clusters.push_back(std::move(c));
    }
    return clusters;
}

// Splits the span of the (orthonormal) columns of V by the operator A.
// Returns refined vectors; leftover degeneracy is passed to the caller.
void split_cluster(const Matrix& V, const std::vector<OperatorFn>& probes,
                   std::size_t level, const cplx& probe_u, double gap,
                   std::vector<Vector>& out) {
    if (V.cols() == 1) {
        out.push_back(V.col(0));
        return;
    }
    if (level >= probes.size())
        throw std::runtime_error(
            "joint_eigenbasis: unresolved degenerate cluster of size " +
            std::to_string(V.cols()) + " after all probes");
    const Matrix A = V.adjoint() * probes[level](probe_u) * V;
    Eigen::ComplexEigenSolver<Matrix> es(A);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("joint_eigenbasis: probe eigensolver failed");
    const auto clusters = cluster_by_gap(es.eigenvalues(), gap);
    for (const auto& c : clusters) {
        Matrix W(V.rows(), c.size());
        for (std::size_t k = 0; k < c.size(); ++k)
            W.col(k) = V * es.eigenvectors().col(c[k]);
        // Re-orthonormalize before recursing.
        Eigen::HouseholderQR<Matrix> qr(W);
        Matrix Wq = Matrix(qr.householderQ()).leftCols(c.size());
        split_cluster(Wq, probes, level + 1, probe_u, gap, out);
    }
}

}  // namespace

std::vector<EigenPair> joint_eigenbasis(const OperatorFn& T, const OperatorFn& Q,
                                        const std::vector<Sector>& sectors,
                                        const cplx& u_probe1, const cplx& u_probe2,
                                        double gap_tol) {
    std::vector<EigenPair> out;
    const Matrix T1 = T(u_probe1);
    for (const auto& sec : sectors) {
        if (sec.dimension == 0) continue;
        const Matrix& B = sec.basis;
        const Matrix Tr = B.adjoint() * T1 * B;
        Eigen::ComplexEigenSolver<Matrix> es(Tr);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("joint_eigenbasis: sector eigensolver failed");
        const auto clusters = cluster_by_gap(es.eigenvalues(), gap_tol);
        std::vector<OperatorFn> probes = {
            [&](cplx u) { return T(u); },
            [&](cplx u) { return Q(u); },
        };
        std::vector<Vector> sector_vecs;
        for (const auto& c : clusters) {
            std::vector<Vector> vecs;
            if (c.size() == 1) {
                vecs.push_back(B * es.eigenvectors().col(c[0]));
            } else {
                Matrix W(B.rows(), c.size());
                for (std::size_t k = 0; k < c.size(); ++k)
                    W.col(k) = B * es.eigenvectors().col(c[k]);
                Eigen::HouseholderQR<Matrix> qr(W);
                Matrix Wq = Matrix(qr.householderQ()).leftCols(c.size());
                // level 0 probe = T at the second point, then Q.
                std::vector<OperatorFn> degen_probes = {
                    [&](cplx) { return T(u_probe2); },
                    [&](cplx u) { return Q(u); },
                };
                split_cluster(Wq, degen_probes, 0, u_probe1, gap_tol, vecs);
            }
            for (auto& w : vecs) {
                w.normalize();
                sector_vecs.push_back(std::move(w));
            }
        }
        for (auto& w : sector_vecs)
            out.push_back(EigenPair{std::move(w), Vector(), sec.nu1, sec.nu3});
    }
    // Matching left eigenvectors: the left eigenbasis is the
    // inverse-adjoint of the full right eigenbasis. The duality must be
    // global — the sectors are ranges of oblique (non-Hermitian)
    // projectors, so a left eigenvector is not the within-sector dual of
    // its right partner.
    const long dim = out.empty() ? 0 : out.front().vec.size();
    if (static_cast<long>(out.size()) != dim)
        throw std::runtime_error("joint_eigenbasis: eigenvector count " +
                                 std::to_string(out.size()) +
                                 " != space dimension " + std::to_string(dim));
    Matrix V(dim, dim);
    for (long k = 0; k < dim; ++k) V.col(k) = out[k].vec;
    Eigen::PartialPivLU<Matrix> lu(V);
    const Matrix W = lu.inverse().adjoint();
    if (!W.allFinite())
        throw std::runtime_error(
            "joint_eigenbasis: right eigenbasis is numerically singular, no left "
            "eigenbasis available");
    for (long k = 0; k < dim; ++k) out[k].left = W.col(k);
    return out;
}

ScalarFn rayleigh_eval(OperatorFn A, Vector w) {
    const cplx nrm = w.squaredNorm();
    return [A = std::move(A), w = std::move(w), nrm](cplx u) -> cplx {
        return (w.adjoint() * A(u) * w)(0) / nrm;
    };
}

namespace {

// Roots are reported inside the fundamental rectangle, so the sum rule
// holds only up to a lattice vector m + n tau. Folding a root by tau
// multiplies q by a factor e^{-2 pi i u} (times a constant), so the
// product representation q(u) = C e^{kappa pi i u} prod [u - u_j] uses
// the branch-corrected exponent kappa = nu1 - 2n.
int product_form_exponent(const std::vector<cplx>& roots, int nu1, int nu3,
                          const ModelParams& p) {
    cplx sum = 0.0;
    for (const auto& r : roots) sum += r;
    const cplx target = -0.5 * nu1 * p.tau + 0.5 * nu3;
    const int n = static_cast<int>(std::lround((sum - target).imag() / p.tau.imag()));
    return nu1 - 2 * n;
}

}  // namespace

BetheRoots bethe_roots(const ScalarFn& q, const EigenPair& pair,
                       const ModelParams& p) {
    const int count = static_cast<int>(std::lround(p.N * p.l));
    const double delta = 1e-3;
    const double t = p.tau.imag();
    BetheRoots roots;
    roots.nu1 = pair.nu1;
    roots.nu3 = pair.nu3;
    // Roots sitting a hair from the rectangle boundary (lattice-point
    // roots do, with the canonical corner offset) defeat the contour
    // integration; retry with generic offsets and fold the roots back
    // into the canonical cell.
    const double offsets[] = {delta, 0.0173, 0.0571, 0.1237};
    std::exception_ptr last_err;
    bool found = false;
    for (const double off : offsets) {
        Rectangle R{cplx(off, off * t), 1.0, t};
        try {
            // q is a low-order entire function; a light contour with the
            // adaptive phase refinement is plenty.
            roots.roots = find_zeros_in_rectangle(q, R, count, 1e-10, 256);
            found = true;
            break;
        } catch (const std::exception&) {
            last_err = std::current_exception();
        }
    }
    if (!found) std::rethrow_exception(last_err);
    for (auto& r : roots.roots) {
        r -= std::floor((r.real() - delta) / 1.0);
        r -= p.tau * std::floor((r.imag() - delta * t) / t);
    }
    std::sort(roots.roots.begin(), roots.roots.end(), [](const cplx& a, const cplx& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    // Local scale and residuals over a probe grid away from the roots.
    double scale = 0.0;
    std::vector<cplx> probes;
    for (int k = 0; k < 16; ++k) {
        const cplx u(0.031 + k * 0.059, p.tau.imag() * (0.13 + 0.045 * (k % 7)));
        probes.push_back(u);
        scale = std::max(scale, std::abs(q(u)));
    }
    for (const auto& r : roots.roots)
        roots.max_q_residual =
            std::max(roots.max_q_residual, std::abs(q(r)) / std::max(scale, 1e-300));
    // Constancy of q(u) / (e^{kappa pi i u} prod [u - u_j]).
    const cplx I(0.0, 1.0);
    const int kappa = product_form_exponent(roots.roots, pair.nu1, pair.nu3, p);
    std::vector<cplx> ratios;
    for (const auto& u : probes) {
        cplx prod = std::exp(double(kappa) * I * pi * u);
        for (const auto& r : roots.roots) prod *= bracket(u - r, p);
        ratios.push_back(q(u) / prod);
    }
    cplx mean = 0.0;
    for (const auto& r : ratios) mean += r;
    mean /= double(ratios.size());
    for (const auto& r : ratios)
        roots.form_residual =
            std::max(roots.form_residual, std::abs(r - mean) / std::abs(mean));
    return roots;
}

double sum_rule_residual(const BetheRoots& roots, const ModelParams& p) {
    cplx sum = 0.0;
    for (const auto& r : roots.roots) sum += r;
    const cplx target = -0.5 * roots.nu1 * p.tau + 0.5 * roots.nu3;
    const cplx d = sum - target;
    const double t = p.tau.imag();
    const double dx = d.real() - std::round(d.real());
    const double dy = d.imag() / t - std::round(d.imag() / t);
    return std::hypot(dx, dy * t);
}

double bethe_equation_residual(const BetheRoots& roots, const ModelParams& p) {
    const std::size_t n = roots.roots.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            if (std::abs(roots.roots[j] - roots.roots[k]) < 1e-6)
                throw std::runtime_error(
                    "bethe_equation_residual: colliding roots (degenerate solution)");
    // Exact string solutions put a vanishing bracket into the equation
    // (e.g. a root pair a distance 2 eta apart, or a root where one of
    // the h factors is zero); the relation degenerates to 0/0 there.
    for (std::size_t j = 0; j < n; ++j) {
        const cplx uj = roots.roots[j];
        if (std::abs(bracket(uj + 2.0 * p.l * p.eta, p)) < 1e-6 ||
            std::abs(bracket(uj - 2.0 * p.l * p.eta, p)) < 1e-6)
            throw std::runtime_error(
                "bethe_equation_residual: h factor vanishes at a root "
                "(degenerate solution)");
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            const cplx d = uj - roots.roots[k];
            if (std::abs(bracket(d + 2.0 * p.eta, p)) < 1e-6 ||
                std::abs(bracket(d - 2.0 * p.eta, p)) < 1e-6)
                throw std::runtime_error(
                    "bethe_equation_residual: roots form an exact 2-eta string "
                    "(degenerate solution)");
        }
    }
    const cplx I(0.0, 1.0);
    const int kappa = product_form_exponent(roots.roots, roots.nu1, roots.nu3, p);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const cplx uj = roots.roots[j];
        const cplx lhs = std::pow(bracket(uj + 2.0 * p.l * p.eta, p) /
                                      bracket(uj - 2.0 * p.l * p.eta, p),
                                  p.N);
        cplx rhs = std::exp(4.0 * kappa * I * pi * p.eta);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            rhs *= bracket(uj - roots.roots[k] + 2.0 * p.eta, p) /
                   bracket(uj - roots.roots[k] - 2.0 * p.eta, p);
        }
        worst = std::max(worst,
                         std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs)}));
    }
    return worst;
}

cplx bethe_eigenvalue_formula(const cplx& u, const BetheRoots& roots,
                              const ModelParams& p) {
    const cplx I(0.0, 1.0);
    const int kappa = product_form_exponent(roots.roots, roots.nu1, roots.nu3, p);
    cplx prod_m = 1.0, prod_p = 1.0;
    for (const auto& r : roots.roots) {
        const cplx den = bracket(u - r, p);
        prod_m *= bracket(u - r - 2.0 * p.eta, p) / den;
        prod_p *= bracket(u - r + 2.0 * p.eta, p) / den;
    }
    const cplx a = std::pow(2.0 * bracket(u + 2.0 * p.l * p.eta, p), p.N) *
                   std::exp(-2.0 * kappa * I * pi * p.eta) * prod_m;
    const cplx b = std::pow(2.0 * bracket(u - 2.0 * p.l * p.eta, p), p.N) *
                   std::exp(2.0 * kappa * I * pi * p.eta) * prod_p;
    return a + b;
}

double eigenvalue_reconstruction_residual(const ScalarFn& lambda_eval,
                                          const BetheRoots& roots,
                                          const std::vector<cplx>& u_grid,
                                          const ModelParams& p) {
    double worst = 0.0;
    for (const auto& u : u_grid) {
        bool near_root = false;
        for (const auto& r : roots.roots)
            if (std::abs(u - r) < 1e-3) near_root = true;
        if (near_root) continue;  // skipped with warning upstream
        const cplx lv = lambda_eval(u);
        const cplx lf = bethe_eigenvalue_formula(u, roots, p);
        worst = std::max(worst, std::abs(lv - lf) / std::max(std::abs(lv), 1e-300));
    }
    return worst;
}

}  // namespace qev
