// Dense complex linear algebra, periodic 2-D quadrature and
// argument-principle zero finding.
#ifndef QEV_NUMERICS_HPP
#define QEV_NUMERICS_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "qev/theta.hpp"

namespace qev {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct SolveResult {
    Matrix X;
    double condition;  // 1 / rcond estimate
};

// Solves A X = B, re-verifies the residual and reports a condition
// estimate. Throws if the condition estimate exceeds the cap or the
// residual check fails.
SolveResult solve_linear(const Matrix& A, const Matrix& B,
                         double cond_cap = 1e10, double tol = 1e-9);

// Condition estimate (largest/smallest singular value) of a square matrix.
double condition_estimate(const Matrix& A);

struct EigResult {
    Vector values;
    Matrix vectors;  // unit-norm columns
};

// Eigendecomposition with a defect-residual check ||A v - lambda v||.
EigResult eig_decompose(const Matrix& A, double tol = 1e-8);

// Uniform-grid trapezoid rule on a periodic cell [0,xp) x [0,yp).
// Spectrally accurate for smooth doubly periodic integrands.
// x0, y0 shift the whole grid (used to dodge near-singular points).
cplx trapezoid_2d(const std::function<cplx(double, double)>& f, int nx, int ny,
                  double x_period, double y_period, double x0 = 0.0,
                  double y0 = 0.0);

struct Rectangle {
    cplx corner;   // lower-left
    double width;
    double height;
};

// Winding number of f around the boundary of R by phase accumulation;
// segments are refined until each phase step is below pi/2.
int winding_number(const std::function<cplx(cplx)>& f, const Rectangle& R,
                   int points_per_edge = 1024);

// All zeros of an analytic f inside R: winding count on the boundary,
// recursive subdivision to isolate, damped Newton (central-difference
// derivative) to refine. Throws on winding/refinement mismatch.
// expected_count = -1 means unknown.
std::vector<cplx> find_zeros_in_rectangle(const std::function<cplx(cplx)>& f,
                                          Rectangle R, int expected_count = -1,
                                          double tol = 1e-10,
                                          int points_per_edge = 1024);

}  // namespace qev

#endif
