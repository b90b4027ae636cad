// Sector decomposition by the involutions U_a^{(x)N}, joint
// diagonalization of the commuting family, Bethe-root extraction and
// the spectral identities (sum rule, Bethe equation, eigenvalue form).
#ifndef QEV_SPECTRA_HPP
#define QEV_SPECTRA_HPP

#include "qev/q_operator.hpp"

namespace qev {

using OperatorFn = std::function<Matrix(cplx)>;
using ScalarFn = std::function<cplx(cplx)>;

struct Sector {
    int nu1 = 0, nu3 = 0;
    Matrix basis;  // orthonormal columns spanning the joint eigenspace
    int dimension = 0;
};

// Four joint (+-1, +-1) eigenspaces of U1^{(x)N}, U3^{(x)N}; dimensions
// sum to the chain dimension.
std::vector<Sector> sector_decomposition(const Matrix& U1_chain,
                                         const Matrix& U3_chain,
                                         const ModelParams& params);

struct EigenPair {
    Vector vec;   // right eigenvector of the commuting family
    Vector left;  // matching left eigenvector (left^H T(u) = Lambda(u) left^H)
    int nu1 = 0, nu3 = 0;
};

// Simultaneous eigenvectors of the commuting family within each sector:
// diagonalize T(u1); split degenerate clusters (gap < gap_tol) with
// T(u2), then with Q(u1).
std::vector<EigenPair> joint_eigenbasis(const OperatorFn& T, const OperatorFn& Q,
                                        const std::vector<Sector>& sectors,
                                        const cplx& u_probe1, const cplx& u_probe2,
                                        double gap_tol = 1e-6);

// u -> (w^H A(u) w) / (w^H w); an eigenvalue evaluator when w is an
// eigenvector of the family.
ScalarFn rayleigh_eval(OperatorFn A, Vector w);

struct BetheRoots {
    std::vector<cplx> roots;  // Nl zeros in the fundamental rectangle
    int nu1 = 0, nu3 = 0;
    double max_q_residual = 0.0;  // |q(u_j)| relative to the local scale
    double form_residual = 0.0;   // constancy defect of q / (e^{nu1 pi i u} prod [u-u_j])
};

// Zeros of q(u) over the fundamental rectangle (corner offset by
// delta = 1e-3 to dodge boundary zeros); exactly N*l of them.
BetheRoots bethe_roots(const ScalarFn& q, const EigenPair& pair,
                       const ModelParams& params);

// Lattice-modular distance of sum(u_j) from -nu1 tau/2 + nu3/2.
double sum_rule_residual(const BetheRoots& roots, const ModelParams& params);

// Max relative defect of
// ([u_j+2l eta]/[u_j-2l eta])^N = e^{4 nu1 pi i eta} prod_{k!=j} [u_j-u_k+2eta]/[u_j-u_k-2eta].
double bethe_equation_residual(const BetheRoots& roots, const ModelParams& params);

// Transfer-matrix eigenvalue reconstructed from the roots.
cplx bethe_eigenvalue_formula(const cplx& u, const BetheRoots& roots,
                              const ModelParams& params);

// Max over the grid of |Lambda(u) - Lambda_formula(u)| / |Lambda(u)|;
// grid points within 1e-3 of a root are skipped.
double eigenvalue_reconstruction_residual(const ScalarFn& lambda_eval,
                                          const BetheRoots& roots,
                                          const std::vector<cplx>& u_grid,
                                          const ModelParams& params);

}  // namespace qev

#endif
