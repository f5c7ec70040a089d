#include "fixtures.hpp"

#include <atomic>
#include <random>
#include <stdexcept>

#include <unistd.h>

#include "published.hpp"

namespace gardener::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("gardener-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<double> normal_samples(std::size_t n, std::uint64_t seed, double mean, double stddev) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(mean, stddev);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

std::uint64_t vit_block_params(int dim) {
  const auto d = static_cast<std::uint64_t>(dim);
  return 12 * d * d + 13 * d;
}

namespace {

struct Layer {
  std::string suffix;
  Shape shape;
  double mean;
  double stddev;
};

std::vector<Layer> block_layers(std::uint64_t d, double w) {
  const std::uint64_t h = 4 * d;
  return {
      {"norm1.weight", {d}, 1.0, 0.05},        {"norm1.bias", {d}, 0.0, 0.01},
      {"attn.qkv.weight", {3 * d, d}, 0.0, w}, {"attn.qkv.bias", {3 * d}, 0.0, 0.01},
      {"attn.proj.weight", {d, d}, 0.0, w},    {"attn.proj.bias", {d}, 0.0, 0.01},
      {"norm2.weight", {d}, 1.0, 0.05},        {"norm2.bias", {d}, 0.0, 0.01},
      {"mlp.fc1.weight", {h, d}, 0.0, w},      {"mlp.fc1.bias", {h}, 0.0, 0.01},
      {"mlp.fc2.weight", {d, h}, 0.0, w},      {"mlp.fc2.bias", {d}, 0.0, 0.01},
  };
}

void add_random(Checkpoint& ckpt, std::string name, DType dtype, Shape shape, double mean, double stddev,
                std::mt19937_64& rng) {
  std::normal_distribution<double> dist(mean, stddev);
  std::vector<double> v(element_count(shape));
  for (auto& x : v) x = dist(rng);
  ckpt.add(make_tensor(std::move(name), dtype, std::move(shape), v));
}

}  // namespace

Checkpoint synthetic_vit(const VitSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  const auto d = static_cast<std::uint64_t>(spec.dim);
  Checkpoint ckpt;
  std::uint64_t residual = 0;
  auto add_residual = [&](const std::string& name, Shape shape, double mean, double stddev) {
    residual += element_count(shape);
    add_random(ckpt, name, spec.dtype, std::move(shape), mean, stddev, rng);
  };
  add_residual("patch_embed.proj.weight", {d, static_cast<std::uint64_t>(spec.patch_in)}, 0.0, 0.02);
  add_residual("patch_embed.proj.bias", {d}, 0.0, 0.01);
  for (int b = 0; b < spec.blocks; ++b) {
    const double scale = spec.block_scale.empty() ? 1.0 : spec.block_scale.at(static_cast<std::size_t>(b));
    const std::string prefix = spec.prefix + "." + std::to_string(b + spec.index_base) + ".";
    for (const auto& layer : block_layers(d, 0.02 * scale)) {
      add_random(ckpt, prefix + layer.suffix, spec.dtype, layer.shape, layer.mean, layer.stddev, rng);
    }
  }
  add_residual("fc_norm.weight", {d}, 1.0, 0.05);
  add_residual("fc_norm.bias", {d}, 0.0, 0.01);
  add_residual("head.weight", {static_cast<std::uint64_t>(spec.classes), d}, 0.0, 0.02);
  add_residual("head.bias", {static_cast<std::uint64_t>(spec.classes)}, 0.0, 0.01);
  if (spec.total_params != 0) {
    const std::uint64_t blocks = vit_block_params(spec.dim) * static_cast<std::uint64_t>(spec.blocks);
    if (spec.total_params < blocks + residual) throw std::invalid_argument("total_params too small for layout");
    const std::uint64_t extra = spec.total_params - blocks - residual;
    if (extra != 0) add_residual("pos_embed", {1, extra}, 0.0, 0.02);
  }
  return ckpt;
}

VitSpec full_scale_spec() {
  VitSpec s;
  s.dim = 768;
  s.total_params = 86'600'000;
  return s;
}

VitSpec miniature_spec() {
  VitSpec s;
  s.dim = 9;
  s.patch_in = 12;
  s.classes = 10;
  return s;
}

Checkpoint distinct_value_checkpoint(const std::vector<int>& distinct, DType dtype) {
  Checkpoint ckpt;
  for (std::size_t b = 0; b < distinct.size(); ++b) {
    const int m = distinct[b];
    std::vector<double> v(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] = m == 1 ? 0.0 : -1.0 + 2.0 * j / (m - 1);
    ckpt.add(make_tensor("blocks." + std::to_string(b) + ".w", dtype, {static_cast<std::uint64_t>(m)}, v));
  }
  std::vector<double> head = {0.5, -0.25, 0.125};
  ckpt.add(make_tensor("head.weight", dtype, {3}, head));
  return ckpt;
}

std::vector<int> published_entropy_counts() {
  std::vector<int> counts;
  for (int r : testdata::kEntropyRank) counts.push_back(100 + 10 * (13 - r));
  return counts;
}

fs::path save(const Checkpoint& ckpt, const TempDir& dir, const std::string& name) {
  const fs::path p = dir / name;
  write_checkpoint(ckpt, p);
  return p;
}

Checkpoint random_checkpoint(std::uint64_t seed, int max_tensors) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static constexpr DType kTypes[] = {DType::F32, DType::F16, DType::BF16, DType::F64};
  Checkpoint ckpt;
  const int n = uniform(0, max_tensors);
  for (int i = 0; i < n; ++i) {
    Shape shape;
    const int rank = uniform(0, 3);
    for (int r = 0; r < rank; ++r) shape.push_back(static_cast<std::uint64_t>(uniform(0, 6)));
    const DType dtype = kTypes[uniform(0, 2) + (uniform(0, 9) == 0 ? 1 : 0)];
    std::uniform_real_distribution<double> dist(-4.0, 4.0);
    std::vector<double> v(element_count(shape));
    for (auto& x : v) x = dist(rng);
    ckpt.add(make_tensor("layer" + std::to_string(uniform(0, 99)) + "." + std::to_string(i) + ".w", dtype, shape, v));
  }
  const int meta = uniform(0, 3);
  for (int i = 0; i < meta; ++i) ckpt.metadata()["key" + std::to_string(i)] = "value " + std::to_string(uniform(0, 1000));
  return ckpt;
}

}  // namespace gardener::testing
