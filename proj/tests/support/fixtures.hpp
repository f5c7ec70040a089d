#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gardener/tensor_store.hpp"

namespace gardener::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// ViT-style layout: per block norm1, attn.qkv, attn.proj, norm2, mlp.fc1,
/// mlp.fc2 (weights and biases), i.e. 12 d^2 + 13 d parameters for an MLP
/// ratio of 4. Residual tensors (patch embedding, final norm, head) are
/// sized so the whole model holds `total_params` when that is non-zero.
struct VitSpec {
  int dim = 9;
  int blocks = 12;
  int index_base = 0;
  std::string prefix = "blocks";
  DType dtype = DType::F32;
  std::uint64_t seed = 1;
  std::uint64_t total_params = 0;
  int patch_in = 1536;  // 3 x 2 x 16 x 16 tubelet
  int classes = 400;
  /// Per-block weight std multiplier (empty: 0.02 for every block).
  std::vector<double> block_scale;
};

std::uint64_t vit_block_params(int dim);
Checkpoint synthetic_vit(const VitSpec& spec);

/// 12 blocks of 7,087,872 parameters and 1,545,536 residual ones: 86.6M.
VitSpec full_scale_spec();
/// Same layout at dim 9 (1,089 parameters per block) with a small residual.
VitSpec miniature_spec();

/// One tensor per block ("blocks.<i>.w", index base 0) holding
/// `distinct[l]` evenly spaced values over [-1, 1]. With K >= distinct[l]
/// every value owns a bin, so the weight-number entropy is ln(distinct[l]).
Checkpoint distinct_value_checkpoint(const std::vector<int>& distinct, DType dtype = DType::F32);

/// Distinct-value counts whose entropies order the blocks exactly like the
/// published entropy rank column.
std::vector<int> published_entropy_counts();

/// Writes `ckpt` to `dir / name` and returns the path.
std::filesystem::path save(const Checkpoint& ckpt, const TempDir& dir, const std::string& name);

/// Pseudo-random checkpoint for round-trip properties: 0..max_tensors
/// tensors of mixed F32/F16/BF16/F64 with random shapes and metadata.
Checkpoint random_checkpoint(std::uint64_t seed, int max_tensors = 50);

std::vector<double> normal_samples(std::size_t n, std::uint64_t seed, double mean = 0.0, double stddev = 1.0);

}  // namespace gardener::testing
