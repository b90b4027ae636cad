#include "qev/theta.hpp"

#include <string>

namespace qev {

void ModelParams::validate() const {
    if (std::abs(tau.real()) > 1e-14 || tau.imag() <= 0.0)
        throw std::invalid_argument("tau must be purely imaginary with Im(tau) > 0");
    const int tl = two_l();
    if (tl <= 0 || std::abs(2.0 * l - tl) > 1e-12)
        throw std::invalid_argument("l must be a positive half-integer");
    if (std::abs(eta) > 1.0 / (2.0 * (tl + 1)) + 1e-14)
        throw std::invalid_argument("|eta| must not exceed 1/(2(2l+1))");
    if (N <= 0 || N % 2 != 0)
        throw std::invalid_argument("N must be a positive even integer (odd N unsupported)");
    if (std::abs(N * l - std::lround(N * l)) > 1e-12)
        throw std::invalid_argument("N*l must be an integer");
    if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
    if (series_truncation < 0) throw std::invalid_argument("series_truncation must be >= 0");
}

int theta_truncation(const cplx& tau, const cplx& z) {
    const double t = tau.imag();
    // exp(-pi t (M-1)^2) < 1e-18
    int m = 1 + static_cast<int>(std::ceil(std::sqrt(18.0 * std::log(10.0) / (pi * t))));
    m += static_cast<int>(std::ceil(std::abs(z.imag()) / t));
    return m;
}

cplx theta(int a, int b, const cplx& z, const cplx& tau, int trunc) {
    if (tau.imag() <= 0.0)
        throw std::domain_error("theta: Im(tau) must be positive, got " +
                                std::to_string(tau.imag()));
    if (trunc <= 0) trunc = theta_truncation(tau, z);
    const cplx i_pi(0.0, pi);
    cplx s = 0.0;
    // Summed from the tails inward so the small terms accumulate first.
    for (int n = trunc; n >= -trunc; --n) {
        const double m = 0.5 * a + n;
        s += std::exp(i_pi * (m * m * tau) + 2.0 * i_pi * m * (0.5 * b + z));
    }
    return s;
}

cplx bracket_k(const cplx& z, int k, const ModelParams& p) {
    if (k < 0) throw std::invalid_argument("bracket_k: k must be >= 0");
    cplx prod = 1.0;
    for (int j = 0; j < k; ++j) prod *= bracket(z + 2.0 * j * p.eta, p);
    return prod;
}

cplx za_bracket_k(const cplx& z, const cplx& a, int k, const ModelParams& p) {
    return bracket_k(z + a, k, p) * bracket_k(-z + a, k, p);
}

}  // namespace qev
