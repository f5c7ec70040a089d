#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "gardener/block_partition.hpp"
#include "gardener/oracle_compare.hpp"
#include "gardener/scan.hpp"
#include "gardener/stats.hpp"
#include "gardener/tensor_store.hpp"

namespace {

using namespace gardener;

void BM_HistogramEntropy(benchmark::State& state) {
  const auto values = testing::normal_samples(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    const Histogram h = build_histogram(values, 256);
    benchmark::DoNotOptimize(weight_number_entropy(h));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HistogramEntropy)->Range(1 << 10, 1 << 22);

void BM_Moments(benchmark::State& state) {
  const auto values = testing::normal_samples(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(basic_stats(values));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Moments)->Range(1 << 10, 1 << 22);

void BM_Kendall(benchmark::State& state) {
  const auto a = testing::normal_samples(static_cast<std::size_t>(state.range(0)), 3);
  const auto b = testing::normal_samples(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(kendall(a, b));
}
BENCHMARK(BM_Kendall)->Arg(12)->Arg(48)->Arg(192);

class ScaledModel : public benchmark::Fixture {
 public:
  void SetUp(const benchmark::State& state) override {
    testing::VitSpec spec;
    spec.dim = static_cast<int>(state.range(0));
    path = dir / "bench.safetensors";
    write_checkpoint(testing::synthetic_vit(spec), path);
  }

  testing::TempDir dir;
  std::filesystem::path path;
};

BENCHMARK_DEFINE_F(ScaledModel, ReadAllTensors)(benchmark::State& state) {
  std::uint64_t bytes = 0;
  for (auto _ : state) {
    const Checkpoint ckpt = read_checkpoint(path);
    for (const auto& ti : ckpt.tensors()) benchmark::DoNotOptimize(ckpt.bytes(ti.name));
    bytes = ckpt.bytes_read_from_disk();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes));
}
BENCHMARK_REGISTER_F(ScaledModel, ReadAllTensors)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_DEFINE_F(ScaledModel, ScanWithMutualInformation)(benchmark::State& state) {
  std::uint64_t params = 0;
  for (auto _ : state) {
    const Checkpoint ckpt = read_checkpoint(path);
    const BlockModel model = partition_blocks(ckpt, {});
    benchmark::DoNotOptimize(scan_model(model, ckpt, {}, true));
    params = model.block_params();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * params));
}
BENCHMARK_REGISTER_F(ScaledModel, ScanWithMutualInformation)
    ->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
