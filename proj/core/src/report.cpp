#include "qev/report.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace qev {

using ordered_json = nlohmann::ordered_json;

ModelParams RunConfig::params() const {
    ModelParams p;
    p.tau = cplx(0.0, tau_im);
    p.eta = eta;
    p.l = l;
    p.N = n;
    p.validate();
    return p;
}

double RunConfig::tol(const std::string& name) const {
    auto it = tolerances.find(name);
    if (it != tolerances.end()) return it->second;
    static const std::map<std::string, double> defaults = {
        {"theta", 1e-12},   {"algebra", 1e-9}, {"pauli", 1e-10},
        {"quadrature", 1e-6}, {"binomial", 1e-9}, {"qop", 1e-6},
        {"tqr", 1e-8},      {"spectra", 1e-5},
    };
    auto jt = defaults.find(name);
    if (jt == defaults.end()) throw ConfigError("unknown tolerance name: " + name);
    return jt->second;
}

namespace {

ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    j["tau_im"] = c.tau_im;
    j["eta"] = c.eta;
    j["l"] = c.l;
    j["n"] = c.n;
    j["seed"] = c.seed;
    j["grid"] = {c.grid_nx, c.grid_ny};
    j["tolerances"] = c.tolerances;
    j["u0_candidates"] = c.u0_candidates;
    if (!c.report_path.empty()) j["report_path"] = c.report_path;
    return j;
}

RunConfig config_from_json(const ordered_json& j) {
    RunConfig c;
    for (const auto& [key, val] : j.items()) {
        try {
            if (key == "tau_im") c.tau_im = val.get<double>();
            else if (key == "eta") c.eta = val.get<double>();
            else if (key == "l") c.l = val.get<double>();
            else if (key == "n") c.n = val.get<int>();
            else if (key == "seed") c.seed = val.get<unsigned>();
            else if (key == "grid") {
                if (!val.is_array() || val.size() != 2)
                    throw ConfigError("field 'grid' must be an array [nx, ny]");
                c.grid_nx = val[0].get<int>();
                c.grid_ny = val[1].get<int>();
            } else if (key == "tolerances") {
                c.tolerances = val.get<std::map<std::string, double>>();
            } else if (key == "u0_candidates") c.u0_candidates = val.get<int>();
            else if (key == "report_path") c.report_path = val.get<std::string>();
            else throw ConfigError("unknown config field: '" + key + "'");
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("malformed value for config field '" + key + "'");
        }
    }
    if (c.tau_im <= 0.0) throw ConfigError("field 'tau_im' must be positive");
    if (c.n <= 0 || c.n % 2 != 0)
        throw ConfigError("field 'n' must be a positive even integer");
    if (std::abs(2.0 * c.l - std::lround(2.0 * c.l)) > 1e-12 || c.l <= 0.0)
        throw ConfigError("field 'l' must be a positive half-integer");
    if (std::abs(c.eta) > 0.5 / (2.0 * c.l + 1.0))
        throw ConfigError("field 'eta' violates |eta| <= 1/(2(2l+1))");
    const double nl = c.n * c.l;
    if (std::abs(nl - std::lround(nl)) > 1e-12)
        throw ConfigError("fields 'n' and 'l' must have integer product n*l");
    if (c.grid_nx < 8 || c.grid_ny < 8)
        throw ConfigError("field 'grid' entries must be >= 8");
    if (c.u0_candidates < 1)
        throw ConfigError("field 'u0_candidates' must be >= 1");
    return c;
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    return config_from_json(j);
}

bool Report::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckRecord& r) { return r.pass; });
}

void Report::sort_records() {
    std::sort(checks.begin(), checks.end(),
              [](const CheckRecord& a, const CheckRecord& b) {
                  if (a.id != b.id) return a.id < b.id;
                  return a.params < b.params;
              });
    std::sort(bethe_roots.begin(), bethe_roots.end(),
              [](const BetheRootRow& a, const BetheRootRow& b) {
                  return std::tie(a.sector_nu1, a.sector_nu3, a.eigen_index,
                                  a.root_index) <
                         std::tie(b.sector_nu1, b.sector_nu3, b.eigen_index,
                                  b.root_index);
              });
}

std::string Report::to_json() const {
    ordered_json j;
    j["configs"] = ordered_json::array();
    for (const auto& c : configs) j["configs"].push_back(config_to_json(c));
    j["checks"] = ordered_json::array();
    for (const auto& r : checks) {
        ordered_json c;
        c["id"] = r.id;
        c["anchor"] = r.anchor;
        c["params"] = r.params;
        c["residual"] = r.residual;
        c["bound"] = r.bound;
        c["pass"] = r.pass;
        j["checks"].push_back(std::move(c));
    }
    j["condition_estimates"] = condition_estimates;
    j["bethe_roots"] = ordered_json::array();
    for (const auto& r : bethe_roots) {
        ordered_json c;
        c["sector_nu1"] = r.sector_nu1;
        c["sector_nu3"] = r.sector_nu3;
        c["eigen_index"] = r.eigen_index;
        c["root_index"] = r.root_index;
        c["re_u"] = r.re_u;
        c["im_u"] = r.im_u;
        c["q_residual"] = r.q_residual;
        j["bethe_roots"].push_back(std::move(c));
    }
    j["all_pass"] = all_pass();
    return j.dump(2) + "\n";
}

Report Report::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open report file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("report parse error in " + path + ": " + e.what());
    }
    Report rep;
    try {
        for (const auto& c : j.value("configs", ordered_json::array()))
            rep.configs.push_back(config_from_json(c));
        for (const auto& c : j.value("checks", ordered_json::array())) {
            CheckRecord r;
            r.id = c.at("id").get<std::string>();
            r.anchor = c.at("anchor").get<std::string>();
            r.params = c.at("params").get<std::string>();
            r.residual = c.at("residual").get<double>();
            r.bound = c.at("bound").get<double>();
            r.pass = c.at("pass").get<bool>();
            rep.checks.push_back(std::move(r));
        }
        if (j.contains("condition_estimates"))
            rep.condition_estimates =
                j["condition_estimates"].get<std::map<std::string, double>>();
        for (const auto& c : j.value("bethe_roots", ordered_json::array())) {
            BetheRootRow r;
            r.sector_nu1 = c.at("sector_nu1").get<int>();
            r.sector_nu3 = c.at("sector_nu3").get<int>();
            r.eigen_index = c.at("eigen_index").get<int>();
            r.root_index = c.at("root_index").get<int>();
            r.re_u = c.at("re_u").get<double>();
            r.im_u = c.at("im_u").get<double>();
            r.q_residual = c.at("q_residual").get<double>();
            rep.bethe_roots.push_back(r);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("report schema error in " + path + ": " + e.what());
    }
    return rep;
}

Report Report::merge(const std::vector<Report>& parts) {
    Report out;
    for (const auto& p : parts) {
        out.configs.insert(out.configs.end(), p.configs.begin(), p.configs.end());
        out.checks.insert(out.checks.end(), p.checks.begin(), p.checks.end());
        for (const auto& [k, v] : p.condition_estimates)
            out.condition_estimates[k] = v;
        out.bethe_roots.insert(out.bethe_roots.end(), p.bethe_roots.begin(),
                               p.bethe_roots.end());
    }
    // Order the configs too, so that merged output does not depend on
    // the order in which the parts were given.
    std::sort(out.configs.begin(), out.configs.end(),
              [](const RunConfig& a, const RunConfig& b) {
                  return config_to_json(a).dump() < config_to_json(b).dump();
              });
    out.sort_records();
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::string bethe_roots_csv(const std::vector<BetheRootRow>& rows) {
    std::ostringstream out;
    out << "sector_nu1,sector_nu3,eigen_index,root_index,re_u,im_u,q_residual\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.sector_nu1 << ',' << r.sector_nu3 << ',' << r.eigen_index << ','
            << r.root_index << ',' << r.re_u << ',' << r.im_u << ','
            << r.q_residual << '\n';
    return out.str();
}

}  // namespace qev
