// Spin-l representation of the Sklyanin algebra as explicit
// (2l+1)x(2l+1) matrices in a collocated theta basis, plus the
// intertwiners U_a.
#ifndef QEV_REPRESENTATION_HPP
#define QEV_REPRESENTATION_HPP

#include <array>
#include <functional>
#include <vector>

#include "qev/numerics.hpp"
#include "qev/theta.hpp"

namespace qev {

// Basis e^{2l}_k(z; a, b) = [z;a]_k [z;b]_{2l-k} of the (2l+1)-dimensional
// space of even theta functions, realised through seeded collocation.
class ThetaBasis {
  public:
    ThetaBasis(const ModelParams& params, unsigned seed = 1,
               cplx a_param = cplx(0.2313, 0.0), cplx b_param = cplx(-0.4177, 0.0));

    int dim() const { return params_.site_dim(); }
    const ModelParams& params() const { return params_; }
    cplx a_param() const { return a_; }
    cplx b_param() const { return b_; }
    unsigned seed() const { return seed_; }
    double condition() const { return condition_; }
    const std::vector<cplx>& collocation_points() const { return points_; }

    // e^{2l}_k(z; a, b)
    cplx eval(int k, const cplx& z) const;
    // value of the function with coefficient vector c at z
    cplx eval_vector(const Vector& c, const cplx& z) const;

    // Coefficients of f in the basis; the expansion is re-checked at 3
    // fresh points and an off-space image raises an error.
    Vector expand(const std::function<cplx(cplx)>& f) const;

  private:
    ModelParams params_;
    cplx a_, b_;
    unsigned seed_;
    std::vector<cplx> points_;        // oversampled collocation points
    std::vector<cplx> fresh_points_;  // 3 membership-check points
    Matrix colloc_;                   // colloc_(m, k) = e_k(z_m), row-equilibrated
    Eigen::VectorXd row_scale_;
    Eigen::ColPivHouseholderQR<Matrix> qr_;
    double condition_ = 0.0;
};

// z |-> [s_a(z - l eta) f(z + eta) - s_a(-z - l eta) f(z - eta)] / theta11(2z)
std::function<cplx(cplx)> difference_op(int a, std::function<cplx(cplx)> f,
                                        const ModelParams& params);

struct RepMatrices {
    std::array<Matrix, 4> S;  // S[a], a = 0..3
};

// Matrices of the four generators in the given basis.
RepMatrices rep_matrices(const ModelParams& params, const ThetaBasis& basis);

// Max relative residual of the six quadratic commutation relations;
// also verifies that the structure constants J do not depend on the
// spectral parameter.
double commutation_residual(const RepMatrices& R, const ModelParams& params);

struct UMatrices {
    Matrix U1, U2, U3;
    const Matrix& operator[](int a) const {
        return a == 1 ? U1 : (a == 2 ? U2 : U3);
    }
};

// Half-period shift intertwiners: U1 f(z) = e^{pi i l} f(z + 1/2),
// U3 f(z) = e^{pi i l} e^{pi i l (4z + tau)} f(z + tau/2), U2 = U3 U1.
UMatrices u_matrices(const ModelParams& params, const ThetaBasis& basis);

}  // namespace qev

#endif
