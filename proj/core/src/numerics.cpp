#include "qev/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qev {

double condition_estimate(const Matrix& A) {
    Eigen::JacobiSVD<Matrix> svd(A);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0.0;
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

SolveResult solve_linear(const Matrix& A, const Matrix& B, double cond_cap,
                         double tol) {
    if (A.rows() != A.cols())
        throw std::invalid_argument("solve_linear: A must be square");
    if (A.rows() != B.rows())
        throw std::invalid_argument("solve_linear: dimension mismatch");
    Eigen::PartialPivLU<Matrix> lu(A);
    const double rcond = lu.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond
                                    : std::numeric_limits<double>::infinity();
    if (cond > cond_cap)
        throw std::runtime_error(
            "solve_linear: ill-conditioned system, condition estimate " +
            std::to_string(cond));
    SolveResult r{lu.solve(B), cond};
    const double bnorm = B.norm();
    const double res = (A * r.X - B).norm();
    if (!std::isfinite(res))
        throw std::runtime_error(
            "solve_linear: non-finite solution (singular system)");
    if (res > tol * std::max(1.0, bnorm))
        throw std::runtime_error("solve_linear: residual check failed, ||AX-B|| = " +
                                 std::to_string(res));
    return r;
}

EigResult eig_decompose(const Matrix& A, double tol) {
    if (A.rows() != A.cols())
        throw std::invalid_argument("eig_decompose: A must be square");
    Eigen::ComplexEigenSolver<Matrix> es(A);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eig_decompose: eigensolver did not converge");
    EigResult r{es.eigenvalues(), es.eigenvectors()};
    for (Eigen::Index k = 0; k < r.vectors.cols(); ++k)
        r.vectors.col(k).normalize();
    const double scale = std::max(1.0, A.norm());
    for (Eigen::Index k = 0; k < r.vectors.cols(); ++k) {
        const double defect =
            (A * r.vectors.col(k) - r.values(k) * r.vectors.col(k)).norm();
        if (defect > tol * scale)
            throw std::runtime_error("eig_decompose: defect residual " +
                                     std::to_string(defect) + " exceeds tolerance");
    }
    return r;
}

cplx trapezoid_2d(const std::function<cplx(double, double)>& f, int nx, int ny,
                  double x_period, double y_period, double x0, double y0) {
    if (nx <= 0 || ny <= 0)
        throw std::invalid_argument("trapezoid_2d: grid sizes must be positive");
    const double hx = x_period / nx, hy = y_period / ny;
    cplx s = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const cplx v = f(x0 + i * hx, y0 + j * hy);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) ||
                std::abs(v) > 1e300)
                throw std::runtime_error(
                    "trapezoid_2d: integrand out of dynamic range at grid point (" +
                    std::to_string(x0 + i * hx) + ", " + std::to_string(y0 + j * hy) +
                    ")");
            s += v;
        }
    return s * hx * hy;
}

namespace {

struct BoundaryZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Phase increment along a parametrised segment, refining until each
// step is below pi/2.
double phase_delta(const std::function<cplx(cplx)>& f, const cplx& za,
                   const cplx& zb, cplx fa, cplx fb, int depth) {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < 0.5 * pi) return d;
    if (depth > 48)
        throw BoundaryZero("zero on or extremely near the contour at z ~ " +
                           std::to_string(za.real()) + "+" +
                           std::to_string(za.imag()) + "i");
    const cplx zm = 0.5 * (za + zb);
    const cplx fm = f(zm);
    if (std::abs(fm) == 0.0) throw BoundaryZero("exact zero on the contour");
    return phase_delta(f, za, zm, fa, fm, depth + 1) +
           phase_delta(f, zm, zb, fm, fb, depth + 1);
}

double contour_phase(const std::function<cplx(cplx)>& f, const Rectangle& R,
                     int ppe, double* median_mag = nullptr) {
    const cplx c = R.corner;
    const cplx corners[5] = {c, c + cplx(R.width, 0.0),
                             c + cplx(R.width, R.height), c + cplx(0.0, R.height),
                             c};
    std::vector<cplx> zs, fs;
    zs.reserve(4 * ppe + 1);
    for (int e = 0; e < 4; ++e)
        for (int k = 0; k < ppe; ++k) {
            const double t = static_cast<double>(k) / ppe;
            zs.push_back(corners[e] + t * (corners[e + 1] - corners[e]));
        }
    zs.push_back(corners[4]);
    fs.reserve(zs.size());
    std::vector<double> mags;
    for (const auto& z : zs) {
        const cplx v = f(z);
        if (std::abs(v) == 0.0) throw BoundaryZero("exact zero on the contour");
        fs.push_back(v);
        mags.push_back(std::abs(v));
    }
    if (median_mag) {
        std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
        *median_mag = mags[mags.size() / 2];
    }
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < zs.size(); ++k)
        total += phase_delta(f, zs[k], zs[k + 1], fs[k], fs[k + 1], 0);
    return total;
}

int winding_impl(const std::function<cplx(cplx)>& f, const Rectangle& R, int ppe,
                 double* median_mag = nullptr) {
    const double total = contour_phase(f, R, ppe, median_mag);
    const double w = total / (2.0 * pi);
    const long rounded = std::lround(w);
    if (std::abs(w - rounded) > 0.25)
        throw std::runtime_error("winding_number: non-integral phase total " +
                                 std::to_string(w));
    return static_cast<int>(rounded);
}

bool inside(const Rectangle& R, const cplx& z, double slack = 0.0) {
    return z.real() >= R.corner.real() - slack &&
           z.real() <= R.corner.real() + R.width + slack &&
           z.imag() >= R.corner.imag() - slack &&
           z.imag() <= R.corner.imag() + R.height + slack;
}

cplx newton_refine(const std::function<cplx(cplx)>& f, cplx u, double tol,
                   double scale) {
    for (int it = 0; it < 200; ++it) {
        const cplx fu = f(u);
        if (std::abs(fu) < tol * scale) return u;
        const double h = 1e-6 * (1.0 + std::abs(u));
        const cplx df = (f(u + h) - f(u - h)) / (2.0 * h);
        if (std::abs(df) == 0.0) break;
        cplx step = fu / df;
        double damp = 1.0;
        cplx next = u - step;
        for (int b = 0; b < 12 && std::abs(f(next)) > std::abs(fu); ++b) {
            damp *= 0.5;
            next = u - damp * step;
        }
        if (std::abs(next - u) < 1e-16 * (1.0 + std::abs(u)) &&
            std::abs(f(next)) < std::sqrt(tol) * scale)
            return next;
        u = next;
    }
    if (std::abs(f(u)) < std::sqrt(tol) * scale) return u;  // flat local scale
    throw std::runtime_error("find_zeros_in_rectangle: Newton refinement stalled");
}

void subdivide(const std::function<cplx(cplx)>& f, const Rectangle& R, int ppe,
               double tol, double scale, int depth, std::vector<cplx>& out) {
    int w;
    try {
        w = winding_impl(f, R, ppe);
    } catch (const BoundaryZero&) {
        if (depth == 0) throw;
        // Grow the box slightly; the parent count check catches duplicates.
        Rectangle R2{R.corner - cplx(1e-4 * R.width, 1e-4 * R.height),
                     R.width * 1.0002, R.height * 1.0002};
        w = winding_impl(f, R2, ppe);
    }
    if (w == 0) return;
    if (w == 1 || depth > 24) {
        const cplx center = R.corner + cplx(0.5 * R.width, 0.5 * R.height);
        const cplx z = newton_refine(f, center, tol, scale);
        // A start far from the zero can converge to an equivalent zero
        // outside the box (e.g. a lattice translate); localise further.
        if (inside(R, z, 1e-7) || depth > 24) {
            out.push_back(z);
            return;
        }
    }
    Rectangle a = R, b = R;
    if (R.width >= R.height) {
        a.width = 0.5 * R.width;
        b.width = R.width - a.width;
        b.corner = R.corner + cplx(a.width, 0.0);
    } else {
        a.height = 0.5 * R.height;
        b.height = R.height - a.height;
        b.corner = R.corner + cplx(0.0, a.height);
    }
    subdivide(f, a, std::max(64, ppe / 2), tol, scale, depth + 1, out);
    subdivide(f, b, std::max(64, ppe / 2), tol, scale, depth + 1, out);
}

}  // namespace

int winding_number(const std::function<cplx(cplx)>& f, const Rectangle& R,
                   int points_per_edge) {
    return winding_impl(f, R, points_per_edge);
}

std::vector<cplx> find_zeros_in_rectangle(const std::function<cplx(cplx)>& f,
                                          Rectangle R, int expected_count,
                                          double tol, int points_per_edge) {
    int w = 0;
    double scale = 1.0;
    for (int attempt = 0;; ++attempt) {
        try {
            w = winding_impl(f, R, points_per_edge, &scale);
            break;
        } catch (const BoundaryZero&) {
            if (attempt >= 1) throw;
            const double off = tol * 100.0 * (1.0 + std::abs(R.corner)) + 1e-7;
            R.corner -= cplx(off, off);
        }
    }
    if (expected_count >= 0 && w != expected_count)
        throw std::runtime_error("find_zeros_in_rectangle: winding number " +
                                 std::to_string(w) + " != expected count " +
                                 std::to_string(expected_count));
    std::vector<cplx> zeros;
    if (w == 0) return zeros;
    subdivide(f, R, points_per_edge, tol, scale, 0, zeros);
    // Deduplicate refinements that converged to the same zero.
    std::vector<cplx> unique;
    for (const auto& z : zeros) {
        bool dup = false;
        for (const auto& u : unique)
            if (std::abs(z - u) < 1e-7) dup = true;
        if (!dup && inside(R, z, 1e-7)) unique.push_back(z);
    }
    if (static_cast<int>(unique.size()) != w)
        throw std::runtime_error(
            "find_zeros_in_rectangle: refined " + std::to_string(unique.size()) +
            " zeros but the winding number is " + std::to_string(w));
    return unique;
}

}  // namespace qev
