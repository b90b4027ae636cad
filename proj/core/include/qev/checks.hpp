// Residual-check campaigns shared by the CLI and the acceptance runner.
#ifndef QEV_CHECKS_HPP
#define QEV_CHECKS_HPP

#include <functional>

#include "qev/report.hpp"
#include "qev/spectra.hpp"

namespace qev {

// Worker cap: QOP_WORKERS if set, else hardware concurrency.
unsigned worker_count();

// Runs the tasks on the pool; results keep task order. The first
// exception thrown by a task is rethrown after the pool drains.
std::vector<CheckRecord> run_tasks(
    const std::vector<std::function<CheckRecord()>>& tasks);

// Theta-function laws, representation matrices, intertwiners, the
// Hermitian form and the closed-form pairings.
Report verify_algebra(const RunConfig& cfg);

// L-operators, transfer matrix, gauge twists and pseudo-vacua.
Report verify_lattice(const RunConfig& cfg);

// Q_R / Q_L / Q construction and their commutation relations.
Report verify_qop(const RunConfig& cfg);

// Sector decomposition, Bethe roots and the spectral identities.
Report run_spectra(const RunConfig& cfg);

}  // namespace qev

#endif
