// Hermitian structure on the representation space: the elliptic-kernel
// inner product, Gram matrices, orthonormal frames, and the closed
// forms for elliptic binomials, extremal 6j-symbols and dual pairings.
#ifndef QEV_SKLYANIN_FORM_HPP
#define QEV_SKLYANIN_FORM_HPP

#include "qev/representation.hpp"

namespace qev {

// mu(z, w) = theta11(2z) theta11(2w) /
//            prod_{j=0}^{2l+1} theta00(z+w+(2j-2l-1)eta) theta00(z-w+(2j-2l-1)eta)
cplx mu_kernel(const cplx& z, const cplx& w, const ModelParams& params);

// <f, g> = int_0^1 dx int_0^{Im tau} dy  conj(f(z)) g(z) mu(z, zbar),
// conjugate-linear in f. Coefficients are w.r.t. the given basis.
cplx sklyanin_inner(const Vector& f_coeffs, const Vector& g_coeffs,
                    const ThetaBasis& basis, int nx = 64, int ny = 64);

struct GramMatrix {
    Matrix G;
    int nx = 0, ny = 0;
    double convergence_estimate = 0.0;  // relative change at the last doubling
};

// Pairwise inner products of the basis vectors. Doubles the grid until
// successive values agree below rel_tol (cap 1024 per direction);
// positive definiteness is asserted. The trapezoid rule converges
// spectrally here, so the tight default costs one extra doubling.
GramMatrix gram_matrix(const ThetaBasis& basis, int nx = 64, int ny = 64,
                       double rel_tol = 1e-12);

// Upper-triangular R with G = R^H R; in frame coordinates c' = R c the
// form is the standard Hermitian dot product.
struct OrthonormalFrame {
    Matrix R;
    Matrix R_inverse;
    Matrix to_frame(const Matrix& A) const { return R * A * R_inverse; }
};

OrthonormalFrame orthonormal_frame(const GramMatrix& G);

// Elliptic binomial coefficient C_n^k(a,b,c) of the expansion
// [z;a]_k = sum_n C_n^k(a,b,c) [z;b]_n [z;c]_{k-n}.
cplx elliptic_binomial(int n, int k, const cplx& a, const cplx& b, const cplx& c,
                       const ModelParams& params);

// Extremal change-of-basis coefficient [d;a]_N / [d;c]_N between the
// bases e^N_k(z;a,b) and e^N_k(z;c,d).
cplx extremal_6j(const cplx& a, const cplx& b, const cplx& c, const cplx& d,
                 int Nn, const ModelParams& params);

// Closed form of the diagonal pairing
// < e^N_m(z; -conj(d)+(1-N)eta+(tau+1)/2, -conj(c)+(1-N)eta-(tau+1)/2),
//   e^N_k(z; c, d) >  (zero off the diagonal).
cplx dual_pairing_closed_form(int k, int m, const cplx& c, const cplx& d, int Nn,
                              const ModelParams& params);

// The constant prefactor of the dual pairing (depends on tau, eta, N only).
cplx dual_pairing_constant(int Nn, const ModelParams& params);

// Closed form of < omega_{s lam}(-conj(u); s v), omega_{s' lam'}(u'; s' v') >:
// a product of 4l theta00 factors times the pairing constant.
cplx omega_pair_closed_form(const cplx& u, const cplx& up, const cplx& v,
                            const cplx& vp, const cplx& lam, const cplx& lamp,
                            int s, int sp, const ModelParams& params);

}  // namespace qev

#endif
