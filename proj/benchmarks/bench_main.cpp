#include "bpgd/certify.hpp"
#include "bpgd/model.hpp"
#include "bpgd/oracle.hpp"
#include "bpgd/prox.hpp"
#include "bpgd/solver.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace bpgd;

ParametrizedModel desk_model(int n, int m, int l, int N) {
  const Mat A = 0.3 * Mat::Identity(n, n) + 0.1 * Mat::Ones(n, n);
  const Mat B = Mat::Ones(n, m);
  const Mat E = 0.5 * Mat::Ones(n, l);
  return special_case(A, B, E, Mat::Identity(n, n), Mat::Identity(m, m), Mat::Identity(n, n), N,
                      Vec::Ones(n));
}

void BM_Condense(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const ParametrizedModel model = desk_model(3, 2, 2, N);
  const Vec p = Vec::Constant(2, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(condense(model, p));
  }
}
BENCHMARK(BM_Condense)->Arg(4)->Arg(8)->Arg(16);

void BM_InnerStep(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const ParametrizedModel model = desk_model(3, 2, 2, N);
  const Vec p = Vec::Constant(2, 0.5);
  const CondensedQP qp = condense(model, p);
  const int dim = static_cast<int>(qp.g.size());
  const ProxOperator box = ProxOperator::box(Vec::Constant(dim, -2.0), Vec::Constant(dim, 2.0));
  Vec u = Vec::Zero(dim);
  for (auto _ : state) {
    u = inner_step(qp, box, 0.05, u);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_InnerStep)->Arg(4)->Arg(8)->Arg(16);

void BM_RunBilevel(benchmark::State& state) {
  const ParametrizedModel model = desk_model(2, 1, 1, 4);
  const ProxOperator prox_p = ProxOperator::box(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
  const ProxOperator prox_u = ProxOperator::box(Vec::Constant(4, -3.0), Vec::Constant(4, 3.0));
  SolverConfig cfg;
  cfg.mu = 0.02;
  cfg.nu = 0.1;
  cfg.kappa = static_cast<int>(state.range(0));
  cfg.max_outer = 200;
  cfg.stop_tol = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_bilevel(model, prox_p, prox_u, cfg, Vec::Zero(1), Vec::Zero(4)));
  }
}
BENCHMARK(BM_RunBilevel)->Arg(5)->Arg(20);

void BM_SolveInnerExact(benchmark::State& state) {
  const ParametrizedModel model = desk_model(3, 2, 2, 8);
  const ProxOperator prox_u = ProxOperator::box(Vec::Constant(16, -2.0), Vec::Constant(16, 2.0));
  const Oracle oracle(model, prox_u, OracleConfig{});
  const Vec p = Vec::Constant(2, 0.25);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle.solve_inner(p));
  }
}
BENCHMARK(BM_SolveInnerExact);

}  // namespace

BENCHMARK_MAIN();
