#pragma once

// Reader and writer for the length-prefixed tensor container:
//
//   [u64 little-endian header length N][N bytes of UTF-8 JSON][data buffer]
//
// The JSON header maps each tensor name to
//   {"dtype": "F32", "shape": [d0, d1, ...], "data_offsets": [begin, end]}
// with offsets relative to the start of the data buffer, plus an optional
// "__metadata__" object of string values.
//
// Reading is lazy: the header is parsed eagerly, tensor bytes are fetched
// from disk only when asked for.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gardener {

enum class DType : std::uint8_t { F64, F32, F16, BF16 };

std::size_t dtype_size(DType dtype) noexcept;
std::string_view dtype_name(DType dtype) noexcept;
/// Throws Error(UnsupportedDtype) for anything other than F64/F32/F16/BF16.
DType parse_dtype(std::string_view name);

using Shape = std::vector<std::uint64_t>;

std::uint64_t element_count(const Shape& shape) noexcept;

struct TensorInfo {
  std::string name;
  DType dtype = DType::F32;
  Shape shape;

  std::uint64_t numel() const noexcept { return element_count(shape); }
  std::uint64_t byte_size() const noexcept { return numel() * dtype_size(dtype); }

  friend bool operator==(const TensorInfo&, const TensorInfo&) = default;
};

struct TensorRecord {
  std::string name;
  DType dtype = DType::F32;
  Shape shape;
  std::vector<std::byte> data;

  std::uint64_t numel() const noexcept { return element_count(shape); }
  TensorInfo info() const { return {name, dtype, shape}; }

  friend bool operator==(const TensorRecord&, const TensorRecord&) = default;
};

/// Build a record from real values, rounding to the target dtype
/// (round-to-nearest-even for F16/BF16).
TensorRecord make_tensor(std::string name, DType dtype, Shape shape, std::span<const double> values);

/// Exact widening of every stored element to double. F16/BF16 infinities
/// and NaNs map to double infinities and NaNs.
std::vector<double> tensor_as_f64(const TensorRecord& rec);

/// Appends the widened values of a raw little-endian buffer to `out`.
void append_as_f64(DType dtype, std::span<const std::byte> bytes, std::vector<double>& out);

double f16_bits_to_double(std::uint16_t bits) noexcept;
double bf16_bits_to_double(std::uint16_t bits) noexcept;
std::uint16_t double_to_f16_bits(double value) noexcept;
std::uint16_t double_to_bf16_bits(double value) noexcept;

namespace detail {
struct ByteSource;
}

/// Ordered collection of named tensors plus string metadata. Copies are
/// cheap: tensor bytes are shared, immutable, and loaded on demand.
class Checkpoint {
 public:
  using Metadata = std::map<std::string, std::string>;

  Checkpoint();
  ~Checkpoint();
  Checkpoint(const Checkpoint&);
  Checkpoint& operator=(const Checkpoint&);
  Checkpoint(Checkpoint&&) noexcept;
  Checkpoint& operator=(Checkpoint&&) noexcept;

  std::size_t size() const noexcept { return infos_.size(); }
  bool empty() const noexcept { return infos_.empty(); }

  /// Tensor descriptors in container order.
  const std::vector<TensorInfo>& tensors() const noexcept { return infos_; }
  bool contains(std::string_view name) const;
  const TensorInfo& info(std::string_view name) const;

  /// Raw bytes of one tensor; reads from disk for file-backed tensors.
  std::vector<std::byte> bytes(std::string_view name) const;
  TensorRecord record(std::string_view name) const;
  std::vector<double> values(std::string_view name) const;

  /// Appends a tensor. Throws InvalidArgument on a duplicate name or when
  /// the byte length disagrees with shape and dtype.
  void add(TensorRecord rec);
  /// Appends `source_name` from `source` under `new_name` without copying bytes.
  void add_alias(std::string new_name, const Checkpoint& source, std::string_view source_name);

  Metadata& metadata() noexcept { return metadata_; }
  const Metadata& metadata() const noexcept { return metadata_; }

  std::uint64_t total_elements() const noexcept;

  /// Bytes fetched from the backing file(s) so far, across all copies that
  /// share a file. Zero for purely in-memory checkpoints.
  std::uint64_t bytes_read_from_disk() const noexcept;

  friend class CheckpointReader;

 private:
  std::size_t index_of(std::string_view name) const;

  std::vector<TensorInfo> infos_;
  std::vector<std::shared_ptr<const detail::ByteSource>> sources_;
  std::map<std::string, std::size_t, std::less<>> index_;
  Metadata metadata_;
};

/// Bit-for-bit comparison of order, descriptors, bytes and metadata.
bool identical(const Checkpoint& a, const Checkpoint& b);

Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Writes atomically (temp file + rename). Tensors are laid out contiguously
/// in checkpoint order; the header is space-padded to an 8-byte boundary.
void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

/// Serialized header JSON exactly as write_checkpoint would emit it (before padding).
std::string container_header_json(const Checkpoint& ckpt);

}  // namespace gardener
