#include "gardener/tensor_store.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "gardener/error.hpp"
#include "gardener/fileio.hpp"

namespace gardener {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kMaxHeaderBytes = 100ull << 20;

template <typename UInt>
UInt load_le(const std::byte* p) noexcept {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    v |= static_cast<UInt>(std::to_integer<unsigned>(p[i])) << (8 * i);
  }
  return v;
}

template <typename UInt>
void store_le(std::byte* p, UInt v) noexcept {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    p[i] = static_cast<std::byte>((v >> (8 * i)) & 0xFF);
  }
}

}  // namespace

std::size_t dtype_size(DType dtype) noexcept {
  switch (dtype) {
    case DType::F64: return 8;
    case DType::F32: return 4;
    case DType::F16:
    case DType::BF16: return 2;
  }
  return 0;
}

std::string_view dtype_name(DType dtype) noexcept {
  switch (dtype) {
    case DType::F64: return "F64";
    case DType::F32: return "F32";
    case DType::F16: return "F16";
    case DType::BF16: return "BF16";
  }
  return "?";
}

DType parse_dtype(std::string_view name) {
  if (name == "F64") return DType::F64;
  if (name == "F32") return DType::F32;
  if (name == "F16") return DType::F16;
  if (name == "BF16") return DType::BF16;
  fail(ErrorCode::UnsupportedDtype, "dtype '" + std::string(name) + "' is not one of F64, F32, F16, BF16");
}

std::uint64_t element_count(const Shape& shape) noexcept {
  std::uint64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

// ---------------------------------------------------------------------------
// Scalar conversions

double f16_bits_to_double(std::uint16_t bits) noexcept {
  const bool negative = (bits & 0x8000u) != 0;
  const unsigned exponent = (bits >> 10) & 0x1Fu;
  const unsigned mantissa = bits & 0x3FFu;
  double magnitude;
  if (exponent == 0) {
    magnitude = std::ldexp(static_cast<double>(mantissa), -24);
  } else if (exponent == 0x1F) {
    magnitude = mantissa == 0 ? std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::quiet_NaN();
  } else {
    magnitude = std::ldexp(static_cast<double>(mantissa | 0x400u), static_cast<int>(exponent) - 25);
  }
  return negative ? -magnitude : magnitude;
}

double bf16_bits_to_double(std::uint16_t bits) noexcept {
  return static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(bits) << 16));
}

std::uint16_t double_to_f16_bits(double value) noexcept {
  const std::uint16_t sign = std::signbit(value) ? 0x8000u : 0u;
  if (std::isnan(value)) return sign | 0x7E00u;
  const double a = std::fabs(value);
  if (a == 0.0) return sign;
  if (std::isinf(a)) return sign | 0x7C00u;
  int e = 0;
  const double m = std::frexp(a, &e);  // a = m * 2^e, m in [0.5, 1)
  int exponent = e - 1;
  if (exponent < -14) {
    const auto q = static_cast<std::uint32_t>(std::nearbyint(std::ldexp(a, 24)));
    return static_cast<std::uint16_t>(sign | q);
  }
  auto q = static_cast<std::uint32_t>(std::nearbyint(m * 2048.0));
  if (q == 2048) {
    q = 1024;
    ++exponent;
  }
  if (exponent + 15 >= 31) return sign | 0x7C00u;
  return static_cast<std::uint16_t>(sign | ((exponent + 15) << 10) | (q - 1024));
}

std::uint16_t double_to_bf16_bits(double value) noexcept {
  const std::uint16_t sign = std::signbit(value) ? 0x8000u : 0u;
  if (std::isnan(value)) return sign | 0x7FC0u;
  const double a = std::fabs(value);
  if (a == 0.0) return sign;
  if (std::isinf(a)) return sign | 0x7F80u;
  int e = 0;
  const double m = std::frexp(a, &e);
  int exponent = e - 1;
  if (exponent < -126) {
    const auto q = static_cast<std::uint32_t>(std::nearbyint(std::ldexp(a, 133)));
    return static_cast<std::uint16_t>(sign | q);
  }
  auto q = static_cast<std::uint32_t>(std::nearbyint(m * 256.0));
  if (q == 256) {
    q = 128;
    ++exponent;
  }
  if (exponent + 127 >= 255) return sign | 0x7F80u;
  return static_cast<std::uint16_t>(sign | ((exponent + 127) << 7) | (q - 128));
}

void append_as_f64(DType dtype, std::span<const std::byte> bytes, std::vector<double>& out) {
  const std::size_t width = dtype_size(dtype);
  const std::size_t n = bytes.size() / width;
  const std::byte* p = bytes.data();
  const std::size_t start = out.size();
  out.resize(start + n);
  double* dst = out.data() + start;
  switch (dtype) {
    case DType::F64:
      for (std::size_t i = 0; i < n; ++i) dst[i] = std::bit_cast<double>(load_le<std::uint64_t>(p + 8 * i));
      break;
    case DType::F32:
      for (std::size_t i = 0; i < n; ++i) dst[i] = std::bit_cast<float>(load_le<std::uint32_t>(p + 4 * i));
      break;
    case DType::F16:
      for (std::size_t i = 0; i < n; ++i) dst[i] = f16_bits_to_double(load_le<std::uint16_t>(p + 2 * i));
      break;
    case DType::BF16:
      for (std::size_t i = 0; i < n; ++i) dst[i] = bf16_bits_to_double(load_le<std::uint16_t>(p + 2 * i));
      break;
  }
}

std::vector<double> tensor_as_f64(const TensorRecord& rec) {
  std::vector<double> out;
  out.reserve(rec.numel());
  append_as_f64(rec.dtype, rec.data, out);
  return out;
}

TensorRecord make_tensor(std::string name, DType dtype, Shape shape, std::span<const double> values) {
  TensorRecord rec{std::move(name), dtype, std::move(shape), {}};
  if (values.size() != rec.numel()) {
    fail(ErrorCode::InvalidArgument, "tensor '" + rec.name + "': " + std::to_string(values.size()) +
                                         " values for shape with " + std::to_string(rec.numel()) + " elements");
  }
  const std::size_t width = dtype_size(dtype);
  rec.data.resize(values.size() * width);
  std::byte* p = rec.data.data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    switch (dtype) {
      case DType::F64: store_le(p + 8 * i, std::bit_cast<std::uint64_t>(values[i])); break;
      case DType::F32: store_le(p + 4 * i, std::bit_cast<std::uint32_t>(static_cast<float>(values[i]))); break;
      case DType::F16: store_le(p + 2 * i, double_to_f16_bits(values[i])); break;
      case DType::BF16: store_le(p + 2 * i, double_to_bf16_bits(values[i])); break;
    }
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Byte sources

namespace detail {

struct FileHandle {
  int fd = -1;
  std::string path;
  std::atomic<std::uint64_t> bytes_read{0};

  FileHandle(int fd_, std::string path_) : fd(fd_), path(std::move(path_)) {}
  ~FileHandle() {
    if (fd >= 0) ::close(fd);
  }
  FileHandle(const FileHandle&) = delete;
  FileHandle& operator=(const FileHandle&) = delete;

  void read_at(std::uint64_t offset, std::span<std::byte> out) {
    std::size_t done = 0;
    while (done < out.size()) {
      const ssize_t got = ::pread(fd, out.data() + done, out.size() - done, static_cast<off_t>(offset + done));
      if (got < 0 && errno == EINTR) continue;
      if (got <= 0) fail(ErrorCode::IoError, "short read from '" + path + "'");
      done += static_cast<std::size_t>(got);
    }
    bytes_read.fetch_add(out.size(), std::memory_order_relaxed);
  }
};

struct ByteSource {
  std::shared_ptr<const std::vector<std::byte>> owned;
  std::shared_ptr<FileHandle> file;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;

  std::vector<std::byte> load() const {
    if (owned) return *owned;
    std::vector<std::byte> out(length);
    file->read_at(offset, out);
    return out;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Checkpoint

Checkpoint::Checkpoint() = default;
Checkpoint::~Checkpoint() = default;
Checkpoint::Checkpoint(const Checkpoint&) = default;
Checkpoint& Checkpoint::operator=(const Checkpoint&) = default;
Checkpoint::Checkpoint(Checkpoint&&) noexcept = default;
Checkpoint& Checkpoint::operator=(Checkpoint&&) noexcept = default;

std::size_t Checkpoint::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorCode::InvalidArgument, "no tensor named '" + std::string(name) + "'");
  return it->second;
}

bool Checkpoint::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

const TensorInfo& Checkpoint::info(std::string_view name) const { return infos_[index_of(name)]; }

std::vector<std::byte> Checkpoint::bytes(std::string_view name) const { return sources_[index_of(name)]->load(); }

TensorRecord Checkpoint::record(std::string_view name) const {
  const std::size_t i = index_of(name);
  const TensorInfo& ti = infos_[i];
  return {ti.name, ti.dtype, ti.shape, sources_[i]->load()};
}

std::vector<double> Checkpoint::values(std::string_view name) const {
  const std::size_t i = index_of(name);
  std::vector<double> out;
  out.reserve(infos_[i].numel());
  append_as_f64(infos_[i].dtype, sources_[i]->load(), out);
  return out;
}

void Checkpoint::add(TensorRecord rec) {
  if (contains(rec.name)) fail(ErrorCode::InvalidArgument, "duplicate tensor name '" + rec.name + "'");
  const std::uint64_t expected = rec.numel() * dtype_size(rec.dtype);
  if (rec.data.size() != expected) {
    fail(ErrorCode::InvalidArgument, "tensor '" + rec.name + "' has " + std::to_string(rec.data.size()) +
                                         " bytes, shape and dtype require " + std::to_string(expected));
  }
  auto src = std::make_shared<detail::ByteSource>();
  src->length = rec.data.size();
  src->owned = std::make_shared<const std::vector<std::byte>>(std::move(rec.data));
  index_.emplace(rec.name, infos_.size());
  infos_.push_back({std::move(rec.name), rec.dtype, std::move(rec.shape)});
  sources_.push_back(std::move(src));
}

void Checkpoint::add_alias(std::string new_name, const Checkpoint& source, std::string_view source_name) {
  if (contains(new_name)) fail(ErrorCode::InvalidArgument, "duplicate tensor name '" + new_name + "'");
  const std::size_t i = source.index_of(source_name);
  TensorInfo ti = source.infos_[i];
  ti.name = new_name;
  index_.emplace(std::move(new_name), infos_.size());
  infos_.push_back(std::move(ti));
  sources_.push_back(source.sources_[i]);
}

std::uint64_t Checkpoint::total_elements() const noexcept {
  std::uint64_t n = 0;
  for (const auto& ti : infos_) n += ti.numel();
  return n;
}

std::uint64_t Checkpoint::bytes_read_from_disk() const noexcept {
  std::set<const detail::FileHandle*> seen;
  std::uint64_t total = 0;
  for (const auto& src : sources_) {
    if (src->file && seen.insert(src->file.get()).second) total += src->file->bytes_read.load();
  }
  return total;
}

bool identical(const Checkpoint& a, const Checkpoint& b) {
  if (a.tensors() != b.tensors() || a.metadata() != b.metadata()) return false;
  for (const auto& ti : a.tensors()) {
    if (a.bytes(ti.name) != b.bytes(ti.name)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Reading

class CheckpointReader {
 public:
  static Checkpoint read(const std::filesystem::path& path);
};

namespace {

std::uint64_t json_u64(const ordered_json& v, const std::string& what) {
  if (!v.is_number_unsigned()) {
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    fail(ErrorCode::ParseError, what + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

Checkpoint CheckpointReader::read(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) fail(ErrorCode::IoError, "cannot open '" + path.string() + "': " + std::strerror(errno));
  auto file = std::make_shared<detail::FileHandle>(fd, path.string());

  struct stat st {};
  if (::fstat(fd, &st) != 0) fail(ErrorCode::IoError, "cannot stat '" + path.string() + "'");
  const auto file_size = static_cast<std::uint64_t>(st.st_size);
  if (file_size < 8) fail(ErrorCode::ParseError, "'" + path.string() + "' is too short to hold a header");

  std::byte len_bytes[8];
  file->read_at(0, len_bytes);
  const auto header_len = load_le<std::uint64_t>(len_bytes);
  if (header_len > kMaxHeaderBytes || header_len > file_size - 8) {
    fail(ErrorCode::ParseError, "header length " + std::to_string(header_len) + " exceeds file size");
  }
  std::string header(header_len, '\0');
  file->read_at(8, std::as_writable_bytes(std::span<char>(header)));

  std::set<std::string> seen_keys;
  ordered_json::parser_callback_t guard = [&](int depth, ordered_json::parse_event_t event, ordered_json& parsed) {
    if (depth == 1 && event == ordered_json::parse_event_t::key) {
      const auto key = parsed.get<std::string>();
      if (!seen_keys.insert(key).second) fail(ErrorCode::ParseError, "duplicate header key '" + key + "'");
    }
    return true;
  };
  ordered_json doc;
  try {
    doc = ordered_json::parse(header, guard);
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed header JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::ParseError, "header JSON must be an object");

  const std::uint64_t data_start = 8 + header_len;
  const std::uint64_t buffer_size = file_size - data_start;

  Checkpoint ckpt;
  struct Span {
    std::uint64_t begin, end;
    std::string name;
  };
  std::vector<Span> spans;

  for (const auto& [key, entry] : doc.items()) {
    if (key == "__metadata__") {
      if (!entry.is_object()) fail(ErrorCode::ParseError, "__metadata__ must be an object");
      for (const auto& [mk, mv] : entry.items()) {
        if (!mv.is_string()) fail(ErrorCode::ParseError, "__metadata__ value for '" + mk + "' is not a string");
        ckpt.metadata_.emplace(mk, mv.get<std::string>());
      }
      continue;
    }
    if (!entry.is_object()) fail(ErrorCode::ParseError, "entry for tensor '" + key + "' is not an object");
    if (!entry.contains("dtype") || !entry["dtype"].is_string()) {
      fail(ErrorCode::ParseError, "tensor '" + key + "' has no dtype string");
    }
    if (!entry.contains("shape") || !entry["shape"].is_array()) {
      fail(ErrorCode::ParseError, "tensor '" + key + "' has no shape array");
    }
    if (!entry.contains("data_offsets") || !entry["data_offsets"].is_array() || entry["data_offsets"].size() != 2) {
      fail(ErrorCode::ParseError, "tensor '" + key + "' needs data_offsets [begin, end]");
    }
    TensorInfo ti;
    ti.name = key;
    ti.dtype = parse_dtype(entry["dtype"].get<std::string>());
    for (const auto& d : entry["shape"]) ti.shape.push_back(json_u64(d, "shape of '" + key + "'"));
    const std::uint64_t begin = json_u64(entry["data_offsets"][0], "data_offsets of '" + key + "'");
    const std::uint64_t end = json_u64(entry["data_offsets"][1], "data_offsets of '" + key + "'");
    if (end < begin || end > buffer_size) {
      fail(ErrorCode::CorruptContainer, "tensor '" + key + "' data_offsets [" + std::to_string(begin) + ", " +
                                            std::to_string(end) + ") fall outside the " +
                                            std::to_string(buffer_size) + "-byte data buffer");
    }
    if (end - begin != ti.byte_size()) {
      fail(ErrorCode::CorruptContainer, "tensor '" + key + "' spans " + std::to_string(end - begin) +
                                            " bytes but shape and dtype require " + std::to_string(ti.byte_size()));
    }
    spans.push_back({begin, end, key});

    auto src = std::make_shared<detail::ByteSource>();
    src->file = file;
    src->offset = data_start + begin;
    src->length = end - begin;
    ckpt.index_.emplace(ti.name, ckpt.infos_.size());
    ckpt.infos_.push_back(std::move(ti));
    ckpt.sources_.push_back(std::move(src));
  }

  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
  });
  const Span* furthest = nullptr;
  for (const auto& s : spans) {
    // Zero-length tensors occupy no bytes and cannot overlap anything.
    if (s.begin == s.end) continue;
    if (furthest && furthest->end > s.begin) {
      fail(ErrorCode::CorruptContainer,
           "tensor '" + s.name + "' overlaps tensor '" + furthest->name + "' in the data buffer");
    }
    if (!furthest || s.end > furthest->end) furthest = &s;
  }
  return ckpt;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return CheckpointReader::read(path); }

// ---------------------------------------------------------------------------
// Writing

std::string container_header_json(const Checkpoint& ckpt) {
  ordered_json doc = ordered_json::object();
  if (!ckpt.metadata().empty()) {
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : ckpt.metadata()) meta[k] = v;
    doc["__metadata__"] = std::move(meta);
  }
  std::uint64_t offset = 0;
  for (const auto& ti : ckpt.tensors()) {
    ordered_json entry = ordered_json::object();
    entry["dtype"] = std::string(dtype_name(ti.dtype));
    entry["shape"] = ti.shape;
    entry["data_offsets"] = {offset, offset + ti.byte_size()};
    offset += ti.byte_size();
    doc[ti.name] = std::move(entry);
  }
  return doc.dump();
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::string header = container_header_json(ckpt);
  while ((8 + header.size()) % 8 != 0) header.push_back(' ');

  AtomicFile out(path);
  std::byte len_bytes[8];
  store_le<std::uint64_t>(len_bytes, header.size());
  out.write({reinterpret_cast<const char*>(len_bytes), 8});
  out.write(header);
  for (const auto& ti : ckpt.tensors()) {
    const auto data = ckpt.bytes(ti.name);
    out.write({reinterpret_cast<const char*>(data.data()), data.size()});
  }
  out.commit();
}

}  // namespace gardener
