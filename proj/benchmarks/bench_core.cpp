// Micro-benchmarks for the hot paths: theta series, basis expansion,
// transfer-matrix assembly, column-matrix construction and quadrature.
#include <benchmark/benchmark.h>

#include "qev/q_operator.hpp"

using namespace qev;

namespace {

ModelParams make_params(double l, int N, double eta) {
    ModelParams p;
    p.tau = cplx(0.0, 1.0);
    p.eta = eta;
    p.l = l;
    p.N = N;
    p.validate();
    return p;
}

void bm_theta11(benchmark::State& state) {
    const cplx tau(0.0, 1.0);
    cplx z(0.31, 0.17);
    for (auto _ : state) {
        benchmark::DoNotOptimize(theta11(z, tau));
        z += cplx(1e-6, 0.0);
    }
}
BENCHMARK(bm_theta11);

void bm_basis_expand(benchmark::State& state) {
    ModelParams p = make_params(state.range(0) / 2.0, 2, 0.05);
    ThetaBasis basis(p, 1);
    for (auto _ : state) {
        Vector c = basis.expand([&](cplx z) { return basis.eval(0, z); });
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(bm_basis_expand)->Arg(1)->Arg(2)->Arg(3);

void bm_transfer_matrix(benchmark::State& state) {
    ModelParams p = make_params(0.5, int(state.range(0)), 0.15);
    ThetaBasis basis(p, 1);
    RepMatrices R = rep_matrices(p, basis);
    cplx u(0.31, 0.07);
    for (auto _ : state) {
        benchmark::DoNotOptimize(transfer_matrix(u, R, p));
        u += cplx(1e-6, 0.0);
    }
}
BENCHMARK(bm_transfer_matrix)->Arg(2)->Arg(4);

void bm_build_qr(benchmark::State& state) {
    ModelParams p = make_params(0.5, int(state.range(0)), 0.15);
    ThetaBasis basis(p, 1);
    QFamily family = try_make_q_family(p, basis, 1, 2);
    cplx u(0.27, 0.09);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_qr(u, family.specs, basis, p));
        u += cplx(1e-6, 0.0);
    }
}
BENCHMARK(bm_build_qr)->Arg(2)->Arg(4);

void bm_gram_matrix(benchmark::State& state) {
    ModelParams p = make_params(state.range(0) / 2.0, 2, 0.05);
    ThetaBasis basis(p, 1);
    for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(basis));
}
BENCHMARK(bm_gram_matrix)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
