// Run configuration, residual check records and machine-readable
// reports (JSON + CSV).
#ifndef QEV_REPORT_HPP
#define QEV_REPORT_HPP

#include <map>
#include <string>
#include <vector>

#include "qev/theta.hpp"

namespace qev {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double tau_im = 1.0;
    double eta = 0.15;
    double l = 0.5;
    int n = 2;
    unsigned seed = 1;
    int grid_nx = 64, grid_ny = 64;
    std::map<std::string, double> tolerances;
    int u0_candidates = 8;
    std::string report_path;

    ModelParams params() const;
    // Named bound with built-in defaults: theta 1e-12, algebra 1e-9,
    // pauli 1e-10, quadrature 1e-6, binomial 1e-9, qop 1e-6 (scaled by
    // the Q_R(u0) condition estimate), spectra 1e-5.
    double tol(const std::string& name) const;
};

RunConfig load_config(const std::string& path);

struct CheckRecord {
    std::string id;
    std::string anchor;  // identity label ("plumbing" for infrastructure)
    std::string params;
    double residual = 0.0;
    double bound = 0.0;
    bool pass = false;
};

inline CheckRecord make_record(std::string id, std::string anchor,
                               std::string params, double residual, double bound) {
    return CheckRecord{std::move(id), std::move(anchor), std::move(params),
                       residual, bound, residual <= bound};
}

struct BetheRootRow {
    int sector_nu1 = 0, sector_nu3 = 0;
    int eigen_index = 0, root_index = 0;
    double re_u = 0.0, im_u = 0.0;
    double q_residual = 0.0;
};

struct Report {
    std::vector<RunConfig> configs;
    std::vector<CheckRecord> checks;
    std::map<std::string, double> condition_estimates;
    std::vector<BetheRootRow> bethe_roots;

    bool all_pass() const;
    void sort_records();  // worker-independent ordering
    std::string to_json() const;
    static Report from_json_file(const std::string& path);
    static Report merge(const std::vector<Report>& parts);
};

void write_text_file(const std::string& path, const std::string& content);
std::string bethe_roots_csv(const std::vector<BetheRootRow>& rows);

}  // namespace qev

#endif
