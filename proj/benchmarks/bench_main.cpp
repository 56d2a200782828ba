#include <benchmark/benchmark.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "sheetaudit/audit.hpp"
#include "sheetaudit/compare.hpp"
#include "sheetaudit/faultlab.hpp"
#include "sheetaudit/grid.hpp"
#include "sheetaudit/oracle.hpp"

namespace {

using namespace sheetaudit;

const std::filesystem::path kFixtures = SHEETAUDIT_FIXTURE_DIR;

ModelInputs sample_inputs(int years) {
  ModelInputs in;
  in.plant_size = 1000;
  in.derate = 0.8;
  in.irradiance = NumericSeries{118, 127, 151, 160, 172, 175, 181, 176, 159, 141, 120, 112};
  in.start_month = 1;
  in.model_years = years;
  in.ppa_price = 0.08;
  in.om_cost = 0.02;
  in.degradation_rate = 0.005;
  in.inflation_rate = 0.02;
  return in;
}

void BM_RunModel(benchmark::State& state) {
  ModelInputs in = sample_inputs(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_model(in));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 12);
}
BENCHMARK(BM_RunModel)->Arg(5)->Arg(30);

void BM_IsClose(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(0, 1e4);
  std::vector<double> a, b;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    a.push_back(d(rng));
    b.push_back(i % 7 == 0 ? d(rng) : a.back());
  }
  NumericSeries x(a), y(b);
  for (auto _ : state) benchmark::DoNotOptimize(isclose(x, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IsClose)->Arg(60)->Arg(360)->Arg(100000);

void BM_OpenXlsx(benchmark::State& state) {
  const auto path = kFixtures / "pristine.xlsx";
  for (auto _ : state) benchmark::DoNotOptimize(open_workbook(path));
}
BENCHMARK(BM_OpenXlsx);

void BM_AuditFixture(benchmark::State& state) {
  BindingSpec spec = load_binding_spec(kFixtures / "stale_net_gen.spec.json");
  GridBook book = open_workbook(*spec.workbook);
  for (auto _ : state) benchmark::DoNotOptimize(audit(book, spec));
}
BENCHMARK(BM_AuditFixture);

void BM_InjectAndAudit(benchmark::State& state) {
  ModelInputs in = sample_inputs(30);
  BindingSpec layout;
  layout.inputs = in;
  int row = 10;
  for (Node n : kAllNodes) {
    Binding b;
    b.node = n;
    b.target = AnchoredTarget{CellRef{"Model", row++, 7}, Orientation::kRow};
    layout.bindings.push_back(b);
  }
  GridBook book = build_consistent_gridbook(in, layout);
  FaultSpec f;
  f.kind = FaultKind::kScaleError;
  f.node = Node::kNetGen;
  f.parameter = 1.1;
  f.propagate = true;
  for (auto _ : state) {
    ++f.seed;
    benchmark::DoNotOptimize(audit(inject(book, f, layout).book, layout));
  }
}
BENCHMARK(BM_InjectAndAudit);

}  // namespace

BENCHMARK_MAIN();
