#include <benchmark/benchmark.h>

#include "fcc/audit/audit_log.hpp"
#include "fcc/ingest/generator.hpp"
#include "fcc/investigate/optimizer.hpp"
#include "fcc/orchestrate/engine.hpp"

namespace {

fcc::ingest::SyntheticStream stream_of(std::size_t n) {
  fcc::ingest::GeneratorConfig cfg;
  cfg.n_transactions = n;
  cfg.n_wallets = std::max<std::size_t>(n / 5, 200);
  cfg.n_collections = std::max<std::size_t>(n / 100, 10);
  return fcc::ingest::generate_synthetic(cfg);
}

void BM_Generate(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(stream_of(static_cast<std::size_t>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
  const auto stream = stream_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    fcc::orchestrate::Engine eng;
    benchmark::DoNotOptimize(eng.run_pipeline(stream.events));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Pipeline)->Arg(10'000)->Arg(50'000)->Unit(benchmark::kMillisecond);

void BM_AuditAppend(benchmark::State& state) {
  fcc::audit::AuditLog log;
  fcc::audit::AuditEntry e;
  e.action = "TRANSITION";
  e.case_id = "CASE-000001";
  e.rationale = "NEW -> TRIAGED on ALERTS_AGGREGATED: benchmark";
  e.input_digest = fcc::audit::digest_of("x");
  for (auto _ : state) benchmark::DoNotOptimize(log.append(e));
}
BENCHMARK(BM_AuditAppend);

void BM_AuditVerify(benchmark::State& state) {
  fcc::audit::AuditLog log;
  fcc::audit::AuditEntry e;
  e.action = "INVESTIGATE";
  e.rationale = "benchmark record";
  e.input_digest = fcc::audit::digest_of("x");
  for (int i = 0; i < state.range(0); ++i) log.append(e);
  for (auto _ : state) benchmark::DoNotOptimize(log.verify());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AuditVerify)->Arg(10'000);

void BM_OptimizeThreshold(benchmark::State& state) {
  std::vector<fcc::investigate::FeedbackRecord> history(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < history.size(); ++i) {
    history[i].case_id = "CASE-" + std::to_string(i);
    history[i].case_score = static_cast<int>((i * 37) % 101);
    history[i].analyst_label = i % 3 == 0 ? fcc::investigate::AnalystLabel::FalsePositive
                                          : fcc::investigate::AnalystLabel::ConfirmedSuspicious;
  }
  fcc::investigate::OptimizerState st;
  st.grid_step = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fcc::investigate::optimize_threshold(history, st));
}
BENCHMARK(BM_OptimizeThreshold)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
