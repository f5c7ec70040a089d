#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gardener/tensor_store.hpp"

namespace gardener {

/// Locates the block index inside a tensor name. The regex must contain
/// exactly one capture group, which must capture a non-negative integer.
struct BlockPattern {
  std::string regex = R"(blocks\.(\d+)\.)";
  int index_base = 0;  // numbering used by the checkpoint itself (0 or 1)
};

struct Block {
  int id = 0;  // 1-based, contiguous 1..L
  std::vector<std::string> tensor_names;
  std::uint64_t param_count = 0;
};

/// Tensors of a checkpoint split into transformer blocks and everything else.
struct BlockModel {
  BlockPattern pattern;
  std::vector<Block> blocks;
  std::vector<std::string> residual;
  std::uint64_t residual_params = 0;

  int num_blocks() const noexcept { return static_cast<int>(blocks.size()); }
  /// Throws BlockNotFound outside 1..L.
  const Block& block(int id) const;
  std::uint64_t block_params() const noexcept;
  std::uint64_t total_params() const noexcept { return block_params() + residual_params; }

  friend bool operator==(const BlockModel& a, const BlockModel& b);
};

bool operator==(const Block& a, const Block& b);

/// Groups matching tensors by captured index, re-based to 1..L, in index
/// order; tensors keep checkpoint order within a block. Errors:
/// InvalidPattern, NoBlocksFound, NonContiguousBlocks, EmptyBlock.
BlockModel partition_blocks(const Checkpoint& ckpt, const BlockPattern& pattern);

/// Concatenated widened values of the block's tensors (length N_l).
std::vector<double> block_values(const BlockModel& model, const Checkpoint& ckpt, int block_id);

/// `name` with its captured block index replaced by `native_index`.
std::string replace_block_index(const std::string& name, const BlockPattern& pattern, int native_index);

}  // namespace gardener
