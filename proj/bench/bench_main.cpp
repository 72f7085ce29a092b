// OpenMP kernels against their single-threaded references.

#include <benchmark/benchmark.h>

#include "sginf/ensembles.hpp"
#include "sginf/field_expr.hpp"
#include "sginf/parabolic.hpp"

namespace {

using namespace sginf;

struct PdeFixture {
  pde::GridOperator op;
  pde::Propagator prop;
  RealMatrix columns;

  explicit PdeFixture(double spacing)
      : op(pde::assemble_operator(pde::Grid(1, 6.0, spacing),
                                  pde::PotentialSpec(FieldExpr::parse("0.5+1/(1+x^2)"), FieldExpr::parse("0.3"), 1.0))),
        prop(op, 0.01, pde::Scheme::ImplicitEuler),
        columns(RealMatrix::Identity(op.size(), op.size())) {}
};

const PdeFixture& fixture(double spacing) {
  static const PdeFixture coarse(0.2), fine(0.1);
  return spacing > 0.15 ? coarse : fine;
}

void BM_Advance(benchmark::State& state) {
  const auto& f = fixture(state.range(0) == 0 ? 0.2 : 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(f.prop.advance(f.columns, 10));
  state.SetLabel(std::to_string(f.op.size()) + " columns");
}

void BM_AdvanceSerial(benchmark::State& state) {
  const auto& f = fixture(state.range(0) == 0 ? 0.2 : 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(f.prop.advance_serial(f.columns, 10));
  state.SetLabel(std::to_string(f.op.size()) + " columns");
}

void BM_Ensemble(benchmark::State& state) {
  const auto kind = static_cast<ensemble::Kind>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ensemble::run(kind, 200, 1));
  state.SetLabel(ensemble::to_string(kind));
}

void BM_EnsembleSerial(benchmark::State& state) {
  const auto kind = static_cast<ensemble::Kind>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ensemble::run_serial(kind, 200, 1));
  state.SetLabel(ensemble::to_string(kind));
}

}  // namespace

BENCHMARK(BM_Advance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdvanceSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleSerial)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
