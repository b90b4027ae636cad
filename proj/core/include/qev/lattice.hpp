// L-operators, Baxter R-matrix, transfer matrix, gauge transformations
// and pseudo-vacuum vectors on the (2l+1)^N-dimensional chain.
#ifndef QEV_LATTICE_HPP
#define QEV_LATTICE_HPP

#include "qev/representation.hpp"

namespace qev {

// Chain index convention: site j (1-based) contributes digit k_j with
// weight (2l+1)^(j-1), matching the ordering V_N (x) ... (x) V_1.

// Tensor product of per-site vectors, ordered site 1 ... site N.
Vector chain_tensor(const std::vector<Vector>& site_vectors);

// Embeds a single-site operator at site j (1-based) of an N-site chain.
Matrix site_embed(const Matrix& A, int site, const ModelParams& params);

// A^{(x)N}
Matrix tensor_power(const Matrix& A, int N);

// The four theta ratios W_a(u); with r_shift the argument is u + eta.
std::array<cplx, 4> w_weights(const cplx& u, const ModelParams& params,
                              bool r_shift = false);

// 2x2 auxiliary-space block decomposition of L(u) = sum_a W_a(u) S^a (x) sigma^a.
struct LOperator {
    Matrix mm, mp, pm, pp;  // (--, -+, +-, ++)
    const Matrix& block(int r, int c) const {
        return r == 0 ? (c == 0 ? mm : mp) : (c == 0 ? pm : pp);
    }
};

LOperator l_operator(const cplx& u, const RepMatrices& R, const ModelParams& params);

// Relative defect of L12(v) L13(u) R23(u-v) = R23(u-v) L13(u) L12(v).
double rll_residual(const cplx& u, const cplx& v, const RepMatrices& R,
                    const ModelParams& params);

// T(u) = tr_0 L_N(u) ... L_1(u), assembled as a 2x2 block product over
// sites. Guarded to chain dimension <= 4096.
Matrix transfer_matrix(const cplx& u, const RepMatrices& R,
                       const ModelParams& params);

struct GaugeMatrix {
    Eigen::Matrix2cd M;
    cplx lambda, v;
};

// The 2x2 half-modulus theta matrix M_lambda(v).
GaugeMatrix gauge_matrix(const cplx& lambda, const cplx& v,
                         const ModelParams& params);

// Entries of M_lambda(v)^{-1} L(u) M_lambda'(v) as single-site matrices.
struct TwistedL {
    Matrix alpha, beta, gamma, delta;
};

TwistedL twisted_l(const cplx& lambda, const cplx& lambda_p, const cplx& u,
                   const cplx& v, const RepMatrices& R, const ModelParams& params);

// Local pseudo-vacuum omega_lambda(u; v) as a coefficient vector:
// [z + (lambda+u-v)/2 + (-l+1) eta]_{2l} [-z + (lambda+u-v)/2 + (-l+1) eta]_{2l}
Vector omega_vector(const cplx& lambda, const cplx& u, const cplx& v,
                    const ThetaBasis& basis);

// Intertwining vector with half-integer weight m in {-l, ..., l};
// m = l reduces to omega_vector.
Vector intertwiner_vector(const cplx& lambda, double m, const cplx& u,
                          const cplx& v, const ThetaBasis& basis);

// Max relative residual of the alpha/gamma/delta action relations on the
// pseudo-vacuum for the chosen sign branch (+1 or -1).
double vacuum_action_residual(const cplx& lambda, const cplx& u, const cplx& v,
                              int sign, const RepMatrices& R,
                              const ThetaBasis& basis, const ModelParams& params);

}  // namespace qev

#endif
