#include "gardener/block_partition.hpp"

#include <charconv>
#include <map>
#include <regex>

#include "gardener/error.hpp"

namespace gardener {
namespace {

std::regex compile(const BlockPattern& pattern) {
  if (pattern.index_base != 0 && pattern.index_base != 1) {
    fail(ErrorCode::InvalidPattern, "index base must be 0 or 1, got " + std::to_string(pattern.index_base));
  }
  std::regex re;
  try {
    re = std::regex(pattern.regex, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    fail(ErrorCode::InvalidPattern, "block pattern '" + pattern.regex + "' does not compile: " + e.what());
  }
  if (re.mark_count() != 1) {
    fail(ErrorCode::InvalidPattern, "block pattern '" + pattern.regex + "' must have exactly one capture group");
  }
  return re;
}

int parse_index(const std::string& text, const std::string& name, const BlockPattern& pattern) {
  int value = -1;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || value < 0) {
    fail(ErrorCode::InvalidPattern, "pattern '" + pattern.regex + "' captured '" + text + "' from tensor '" + name +
                                        "', which is not a non-negative integer");
  }
  return value;
}

}  // namespace

const Block& BlockModel::block(int id) const {
  if (id < 1 || id > num_blocks()) {
    fail(ErrorCode::BlockNotFound, "block " + std::to_string(id) + " not in 1.." + std::to_string(num_blocks()));
  }
  return blocks[static_cast<std::size_t>(id - 1)];
}

std::uint64_t BlockModel::block_params() const noexcept {
  std::uint64_t n = 0;
  for (const auto& b : blocks) n += b.param_count;
  return n;
}

bool operator==(const Block& a, const Block& b) {
  return a.id == b.id && a.tensor_names == b.tensor_names && a.param_count == b.param_count;
}

bool operator==(const BlockModel& a, const BlockModel& b) {
  return a.pattern.regex == b.pattern.regex && a.pattern.index_base == b.pattern.index_base &&
         a.blocks == b.blocks && a.residual == b.residual && a.residual_params == b.residual_params;
}

BlockModel partition_blocks(const Checkpoint& ckpt, const BlockPattern& pattern) {
  const std::regex re = compile(pattern);

  std::map<int, Block> by_native;
  BlockModel model;
  model.pattern = pattern;
  for (const auto& ti : ckpt.tensors()) {
    std::smatch m;
    if (std::regex_search(ti.name, m, re) && m[1].matched) {
      const int native = parse_index(m[1].str(), ti.name, pattern);
      Block& b = by_native[native];
      b.tensor_names.push_back(ti.name);
      b.param_count += ti.numel();
    } else {
      model.residual.push_back(ti.name);
      model.residual_params += ti.numel();
    }
  }
  if (by_native.empty()) {
    fail(ErrorCode::NoBlocksFound, "no tensor name matches block pattern '" + pattern.regex + "'");
  }

  int expected = pattern.index_base;
  for (auto& [native, block] : by_native) {
    if (native != expected) {
      fail(ErrorCode::NonContiguousBlocks, "block indices must run contiguously from " +
                                               std::to_string(pattern.index_base) + "; expected " +
                                               std::to_string(expected) + " but found " + std::to_string(native));
    }
    block.id = native - pattern.index_base + 1;
    if (block.param_count == 0) {
      fail(ErrorCode::EmptyBlock, "block " + std::to_string(block.id) + " holds no scalars");
    }
    model.blocks.push_back(std::move(block));
    ++expected;
  }
  return model;
}

std::vector<double> block_values(const BlockModel& model, const Checkpoint& ckpt, int block_id) {
  const Block& b = model.block(block_id);
  std::vector<double> out;
  out.reserve(b.param_count);
  for (const auto& name : b.tensor_names) {
    append_as_f64(ckpt.info(name).dtype, ckpt.bytes(name), out);
  }
  return out;
}

std::string replace_block_index(const std::string& name, const BlockPattern& pattern, int native_index) {
  const std::regex re = compile(pattern);
  std::smatch m;
  if (!std::regex_search(name, m, re) || !m[1].matched) {
    fail(ErrorCode::InvalidArgument, "tensor '" + name + "' does not match block pattern '" + pattern.regex + "'");
  }
  const auto pos = static_cast<std::size_t>(m.position(1));
  const auto len = static_cast<std::size_t>(m.length(1));
  return name.substr(0, pos) + std::to_string(native_index) + name.substr(pos + len);
}

}  // namespace gardener
