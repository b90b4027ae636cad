#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "qev/report.hpp"

using namespace qev;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string("/tmp/qev_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("config loading: defaults, overrides and validation") {
    const std::string path = write_temp(
        "cfg_ok.json",
        R"({"tau_im": 1.0, "eta": 0.15, "l": 0.5, "n": 2, "seed": 3})");
    RunConfig cfg = load_config(path);
    CHECK(cfg.seed == 3);
    CHECK(cfg.grid_nx == 64);
    ModelParams p = cfg.params();
    CHECK(p.N == 2);
    CHECK(p.chain_dim() == 4);
    // Built-in tolerance table.
    CHECK(cfg.tol("theta") == 1e-12);
    CHECK(cfg.tol("spectra") == 1e-5);
    CHECK_THROWS_AS((void)cfg.tol("no_such_bound"), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("config loading rejects out-of-scope models with a named field") {
    const std::string path = write_temp(
        "cfg_odd.json",
        R"({"tau_im": 1.0, "eta": 0.15, "l": 0.5, "n": 3, "seed": 1})");
    try {
        load_config(path);
        FAIL("expected a config error for odd n");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("'n'") != std::string::npos);
        CHECK(std::string(e.what()).find("even") != std::string::npos);
    }
    std::remove(path.c_str());
    const std::string bad = write_temp(
        "cfg_bad.json",
        R"({"tau_im": 1.0, "eta": 0.15, "l": 0.5, "n": 2, "bogus": 7})");
    CHECK_THROWS_AS(load_config(bad), ConfigError);
    std::remove(bad.c_str());
}

TEST_CASE("reports serialise deterministically and round-trip") {
    Report r;
    r.checks.push_back(make_record("beta", "anchor-b", "p", 1e-10, 1e-9));
    r.checks.push_back(make_record("alpha", "anchor-a", "p", 2e-9, 1e-9));
    r.condition_estimates["qr_u0"] = 17.25;
    BetheRootRow row;
    row.sector_nu1 = 1;
    row.re_u = 0.25;
    r.bethe_roots.push_back(row);
    r.sort_records();
    CHECK(r.checks.front().id == "alpha");
    CHECK_FALSE(r.all_pass());  // alpha exceeds its bound

    const std::string j1 = r.to_json();
    const std::string j2 = r.to_json();
    CHECK(j1 == j2);

    const std::string path = write_temp("report_roundtrip.json", j1);
    Report back = Report::from_json_file(path);
    REQUIRE(back.checks.size() == 2);
    CHECK(back.checks[0].id == "alpha");
    CHECK(back.checks[0].residual == r.checks[0].residual);
    CHECK(back.condition_estimates.at("qr_u0") == 17.25);
    REQUIRE(back.bethe_roots.size() == 1);
    CHECK(back.bethe_roots[0].re_u == 0.25);
    std::remove(path.c_str());
}

TEST_CASE("merging reports unions the records with stable ordering") {
    Report a, b;
    a.checks.push_back(make_record("zeta", "z", "p", 0.0, 1.0));
    b.checks.push_back(make_record("alpha", "a", "p", 0.0, 1.0));
    b.checks.push_back(make_record("mid", "m", "p", 5.0, 1.0));
    Report m = Report::merge({a, b});
    REQUIRE(m.checks.size() == 3);
    CHECK(m.checks[0].id == "alpha");
    CHECK(m.checks[2].id == "zeta");
    CHECK_FALSE(m.all_pass());
    // Merge order of the parts does not matter.
    Report m2 = Report::merge({b, a});
    CHECK(m.to_json() == m2.to_json());
}

TEST_CASE("root table serialises as CSV with a header row") {
    BetheRootRow row;
    row.sector_nu1 = 1;
    row.sector_nu3 = 0;
    row.eigen_index = 2;
    row.root_index = 0;
    row.re_u = 0.5;
    row.im_u = 0.25;
    row.q_residual = 1e-11;
    const std::string csv = bethe_roots_csv({row});
    CHECK(csv.find("sector_nu1,sector_nu3,eigen_index,root_index,re_u,im_u,"
                   "q_residual\n") == 0);
    CHECK(csv.find("1,0,2,0,") != std::string::npos);
}
