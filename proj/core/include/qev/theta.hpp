// Theta-function kernel: series evaluation of theta_ab and the bracket
// products [z]_k, [z;a]_k that every other layer consumes.
#ifndef QEV_THETA_HPP
#define QEV_THETA_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qev {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Global model parameters: elliptic modulus tau (purely imaginary),
// anisotropy eta, spin l (2l a positive integer), even chain length N.
struct ModelParams {
    cplx tau{0.0, 1.0};
    double eta = 0.15;
    double l = 0.5;
    int N = 2;
    int series_truncation = 0;  // 0 = adaptive
    double tol = 1e-9;

    int two_l() const { return static_cast<int>(std::lround(2.0 * l)); }
    int site_dim() const { return two_l() + 1; }
    // (2l+1)^N
    long chain_dim() const {
        long d = 1;
        for (int j = 0; j < N; ++j) d *= site_dim();
        return d;
    }
    void validate() const;
};

// Smallest truncation index M with exp(-pi Im(tau) (M-1)^2) < 1e-18,
// widened by |Im z| / Im tau to keep the dropped tail below machine scale
// when the argument leaves the fundamental strip.
int theta_truncation(const cplx& tau, const cplx& z);

// theta_ab(z, tau) = sum_n exp(pi i (a/2+n)^2 tau + 2 pi i (a/2+n)(b/2+z)),
// a, b in {0, 1}.
cplx theta(int a, int b, const cplx& z, const cplx& tau, int trunc = 0);

// [z] = theta_11(z, tau)
inline cplx theta11(const cplx& z, const cplx& tau, int trunc = 0) {
    return theta(1, 1, z, tau, trunc);
}

inline cplx bracket(const cplx& z, const ModelParams& p) {
    return theta11(z, p.tau, p.series_truncation);
}

// [z]_k = [z][z+2 eta] ... [z+2(k-1) eta],  [z]_0 = 1
cplx bracket_k(const cplx& z, int k, const ModelParams& p);

// [z;a] = [z+a][-z+a]
inline cplx za_bracket(const cplx& z, const cplx& a, const ModelParams& p) {
    return bracket(z + a, p) * bracket(-z + a, p);
}

// [z;a]_k = [z+a]_k [-z+a]_k
cplx za_bracket_k(const cplx& z, const cplx& a, int k, const ModelParams& p);

}  // namespace qev

#endif
