#include "qev/q_operator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace qev {

std::vector<std::vector<int>> sigma_sequences(int N) {
    if (N <= 0 || N % 2 != 0)
        throw std::invalid_argument(
            "sigma_sequences: N must be a positive even integer (the construction "
            "does not cover odd chain lengths)");
    std::vector<std::vector<int>> out;
    std::vector<int> seq(N, -1);
    // lexicographic enumeration over {-1,+1}^N, keeping balanced ones
    while (true) {
        int sum = 0;
        for (int s : seq) sum += s;
        if (sum == 0) out.push_back(seq);
        int j = N - 1;
        while (j >= 0 && seq[j] == 1) seq[j--] = -1;
        if (j < 0) break;
        seq[j] = 1;
    }
    return out;
}

std::vector<cplx> lambda_sequence(const cplx& lambda, const std::vector<int>& sigma,
                                 const ModelParams& p) {
    std::vector<cplx> lam(sigma.size() + 1);
    lam[0] = lambda;
    for (std::size_t j = 0; j < sigma.size(); ++j)
        lam[j + 1] = lam[j] + 4.0 * sigma[j] * p.l * p.eta;
    return lam;
}

cplx h_pm(const cplx& u, int sign, const ModelParams& p) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("h_pm: sign must be +-1");
    const cplx base = 2.0 * bracket(u - double(sign) * 2.0 * p.l * p.eta, p);
    return std::pow(base, p.N);
}

Vector phi_column(const cplx& u, const ColumnSpec& spec, const ThetaBasis& basis,
                  const ModelParams& p) {
    if (static_cast<int>(spec.sigma.size()) != p.N)
        throw std::invalid_argument("phi_column: sigma length != N");
    const auto lam = lambda_sequence(spec.lambda, spec.sigma, p);
    std::vector<Vector> sites(p.N);
    for (int j = 0; j < p.N; ++j) {
        const double s = spec.sigma[j];
        sites[j] = omega_vector(s * lam[j], u, s * spec.v, basis);
    }
    return chain_tensor(sites);
}

Matrix build_qr(const cplx& u, const std::vector<ColumnSpec>& specs,
                const ThetaBasis& basis, const ModelParams& p) {
    const long dim = p.chain_dim();
    if (static_cast<long>(specs.size()) != dim)
        throw std::invalid_argument("build_qr: need (2l+1)^N column specs");
    Matrix Q(dim, dim);
    for (long k = 0; k < dim; ++k) Q.col(k) = phi_column(u, specs[k], basis, p);
    return Q;
}

Matrix build_ql(const cplx& u, const std::vector<ColumnSpec>& specs,
                const ThetaBasis& basis, const Matrix& gram_chain,
                const ModelParams& p) {
    const Matrix qr = build_qr(-std::conj(u), specs, basis, p);
    return qr.adjoint() * gram_chain;
}

cplx phi_pairing(const cplx& u, const cplx& up, const ColumnSpec& spec,
                 const ColumnSpec& spec_p, const ThetaBasis& basis,
                 const GramMatrix& gram, const ModelParams& p) {
    const auto lam = lambda_sequence(spec.lambda, spec.sigma, p);
    const auto lam_p = lambda_sequence(spec_p.lambda, spec_p.sigma, p);
    cplx prod = 1.0;
    for (int j = 0; j < p.N; ++j) {
        const double s = spec.sigma[j], sp = spec_p.sigma[j];
        const Vector f = omega_vector(s * lam[j], -std::conj(u), s * spec.v, basis);
        const Vector g = omega_vector(sp * lam_p[j], up, sp * spec_p.v, basis);
        prod *= cplx((f.adjoint() * gram.G * g)(0, 0));
    }
    return prod;
}

namespace {

bool spec_equal(const ColumnSpec& a, const ColumnSpec& b) {
    return a.sigma == b.sigma && std::abs(a.v - b.v) < 1e-12 &&
           std::abs(a.lambda - b.lambda) < 1e-12;
}

// Rejects lambda values whose induced sequence hits a gauge singularity
// or a zero of [lambda_j].
bool spec_generic(const ColumnSpec& spec, const ModelParams& p) {
    const auto lam = lambda_sequence(spec.lambda, spec.sigma, p);
    for (const auto& L : lam) {
        if (std::abs(bracket(L, p)) < 1e-3) return false;
        try {
            (void)gauge_matrix(L, spec.v, p);
            (void)gauge_matrix(-L, -spec.v, p);
        } catch (const std::runtime_error&) {
            return false;
        }
    }
    return true;
}

}  // namespace

QFamily try_make_q_family(const ModelParams& p, const ThetaBasis& basis,
                          unsigned seed, int u0_candidates) {
    const long dim = p.chain_dim();
    const auto sigmas = sigma_sequences(p.N);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> real01(0.07, 0.93);

    double best_cond = std::numeric_limits<double>::infinity();
    std::vector<ColumnSpec> best_specs;
    cplx best_u0_all;
    Matrix best_qr0_all;
    for (int attempt = 0; attempt < 20; ++attempt) {
        std::vector<ColumnSpec> specs;
        int guard = 0;
        while (static_cast<long>(specs.size()) < dim && guard < 10000) {
            ++guard;
            ColumnSpec s;
            s.v = cplx(real01(rng), 0.0);
            s.lambda = cplx(real01(rng), 0.0);
            s.sigma = sigmas[specs.size() % sigmas.size()];
            if (!spec_generic(s, p)) continue;
            bool dup = false;
            for (const auto& t : specs) dup = dup || spec_equal(s, t);
            if (dup) continue;
            specs.push_back(std::move(s));
        }
        if (static_cast<long>(specs.size()) < dim) continue;

        // u0 scan: keep the candidate with the smallest condition estimate.
        cplx best_u0;
        double cond_here = std::numeric_limits<double>::infinity();
        Matrix best_qr0;
        for (int c = 0; c < u0_candidates; ++c) {
            const cplx u0(real01(rng), 0.3 * p.tau.imag() * real01(rng));
            const Matrix qr0 = build_qr(u0, specs, basis, p);
            const double cond = condition_estimate(qr0);
            if (cond < cond_here) {
                cond_here = cond;
                best_u0 = u0;
                best_qr0 = qr0;
            }
        }
        if (cond_here < best_cond) {
            best_cond = cond_here;
            best_specs = specs;
            best_u0_all = best_u0;
            best_qr0_all = best_qr0;
        }
        if (cond_here < 1e8) {
            QFamily fam;
            fam.specs = std::move(specs);
            fam.u0 = best_u0;
            fam.qr0_inverse = best_qr0.inverse();
            fam.condition_estimate = cond_here;
            fam.invertible = true;
            return fam;
        }
    }
    if (best_specs.empty())
        throw std::runtime_error(
            "try_make_q_family: could not draw a full set of generic column specs");
    QFamily fam;
    fam.specs = std::move(best_specs);
    fam.u0 = best_u0_all;
    fam.qr0_inverse =
        Eigen::CompleteOrthogonalDecomposition<Matrix>(best_qr0_all).pseudoInverse();
    fam.condition_estimate = best_cond;
    fam.invertible = false;
    return fam;
}

QFamily make_q_family(const ModelParams& p, const ThetaBasis& basis, unsigned seed,
                      int u0_candidates) {
    QFamily fam = try_make_q_family(p, basis, seed, u0_candidates);
    if (!fam.invertible)
        throw std::runtime_error(
            "make_q_family: Q_R(u0) stayed rank-deficient after 20 resamples; best "
            "condition estimate " + std::to_string(fam.condition_estimate));
    return fam;
}

Matrix build_q(const cplx& u, const QFamily& family, const ThetaBasis& basis,
               const ModelParams& p) {
    if (!family.invertible)
        throw std::runtime_error(
            "build_q: Q_R(u0) is rank-deficient, the normalising inverse does not "
            "exist (condition estimate " +
            std::to_string(family.condition_estimate) + ")");
    return build_qr(u, family.specs, basis, p) * family.qr0_inverse;
}

}  // namespace qev
