// Construction of Q_R, Q_L and the Q-operator from families of
// pseudo-vacuum tensor columns.
#ifndef QEV_Q_OPERATOR_HPP
#define QEV_Q_OPERATOR_HPP

#include "qev/lattice.hpp"
#include "qev/sklyanin_form.hpp"

namespace qev {

// All balanced +-1 sequences of length N (lexicographic, -1 < +1).
std::vector<std::vector<int>> sigma_sequences(int N);

// lambda_1 = lambda, lambda_{j+1} = lambda_j + 4 sigma_j l eta;
// returns N+1 values with lambda_{N+1} = lambda_1.
std::vector<cplx> lambda_sequence(const cplx& lambda,
                                 const std::vector<int>& sigma,
                                 const ModelParams& params);

struct ColumnSpec {
    cplx v;
    cplx lambda;
    std::vector<int> sigma;
};

// h_+- (sign = +1 / -1) = (2 [u -+ 2 l eta])^N
cplx h_pm(const cplx& u, int sign, const ModelParams& params);

// Tensor column g_N (x) ... (x) g_1 with g_j = omega_{sigma_j lambda_j}(u; sigma_j v).
Vector phi_column(const cplx& u, const ColumnSpec& spec, const ThetaBasis& basis,
                  const ModelParams& params);

// Matrix whose k-th column is phi_column(u, specs[k]).
Matrix build_qr(const cplx& u, const std::vector<ColumnSpec>& specs,
                const ThetaBasis& basis, const ModelParams& params);

// Q_L(u) = adjoint of Q_R(-conj(u)) w.r.t. the chain Sklyanin form
// (gram_chain = per-site Gram tensored over N sites).
Matrix build_ql(const cplx& u, const std::vector<ColumnSpec>& specs,
                const ThetaBasis& basis, const Matrix& gram_chain,
                const ModelParams& params);

// Pairing < phi(-conj(u); spec), phi(u'; spec') > via per-site factors.
cplx phi_pairing(const cplx& u, const cplx& up, const ColumnSpec& spec,
                 const ColumnSpec& spec_p, const ThetaBasis& basis,
                 const GramMatrix& gram, const ModelParams& params);

struct QFamily {
    std::vector<ColumnSpec> specs;
    cplx u0;
    // True inverse of Q_R(u0) when well conditioned; otherwise the
    // Moore-Penrose pseudo-inverse of the best-conditioned candidate.
    Matrix qr0_inverse;
    double condition_estimate = 0.0;
    bool invertible = true;
};

// Seeded spec sampler + u0 scan: draws (2l+1)^N distinct column specs,
// scans u0 candidates and keeps the best-conditioned Q_R(u0); resamples
// (up to 20 times) while the condition estimate is above 1e8. Never
// throws on rank deficiency: if every attempt stays ill conditioned the
// best family is returned with invertible = false and a pseudo-inverse
// in qr0_inverse. (For N = 2 chains with l >= 1 the columns span only
// an 8l-dimensional subspace, so this outcome is structural, not a
// sampling accident.)
QFamily try_make_q_family(const ModelParams& params, const ThetaBasis& basis,
                          unsigned seed, int u0_candidates = 8);

// Same sampler, but rank deficiency is an error carrying the best
// condition estimate seen.
QFamily make_q_family(const ModelParams& params, const ThetaBasis& basis,
                      unsigned seed, int u0_candidates = 8);

// Q(u) = Q_R(u) Q_R(u0)^{-1}
Matrix build_q(const cplx& u, const QFamily& family, const ThetaBasis& basis,
               const ModelParams& params);

}  // namespace qev

#endif
