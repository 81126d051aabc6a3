// Serial against OpenMP enumeration on an unsatisfiable query, so every
// point of the input domain is visited.

#include <benchmark/benchmark.h>

#include "pybmc/solver.hpp"

namespace {

using namespace pybmc;

Expr bv32(long v) { return Expr::integer(32, v); }
Expr sle(const Expr& a, const Expr& b) { return Expr::make(Op::Sle, Sort::boolean(), {a, b}); }
Expr conj(std::vector<Expr> xs) { return Expr::make(Op::And, Sort::boolean(), std::move(xs)); }

// x, y in [0, 2^(bits/2)) and the property x * y + x != -1, which no pair in
// range violates.
Vc full_scan(int bits) {
  const long side = 1L << (bits / 2);
  const Expr x = Expr::symbol("main@x", Sort::bitvec(32), 0);
  const Expr y = Expr::symbol("main@y", Sort::bitvec(32), 0);
  Vc vc;
  vc.inputs = {x, y};
  vc.symbols = {x, y};
  vc.assumptions = {conj({sle(bv32(0), x), sle(x, bv32(side - 1)), sle(bv32(0), y), sle(y, bv32(side - 1))})};
  const Expr value = Expr::make(Op::Add, Sort::bitvec(32), {Expr::make(Op::Mul, Sort::bitvec(32), {x, y}), x});
  vc.property = Expr::make(Op::Not, Sort::boolean(), {Expr::make(Op::Eq, Sort::boolean(), {value, bv32(-1)})});
  vc.text = "x * y + x != -1";
  return vc;
}

void BM_OracleSerial(benchmark::State& state) {
  const Vc vc = full_scan(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_oracle(vc).status);
  state.SetItemsProcessed(state.iterations() * (int64_t{1} << state.range(0)));
}

void BM_OracleParallel(benchmark::State& state) {
  const Vc vc = full_scan(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(solve_oracle_parallel(vc, threads).status);
  state.SetItemsProcessed(state.iterations() * (int64_t{1} << state.range(0)));
}

}  // namespace

BENCHMARK(BM_OracleSerial)->Arg(10)->Arg(15)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)
    ->ArgsProduct({{10, 15, 20}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
