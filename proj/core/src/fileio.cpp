#include "gardener/fileio.hpp"

#include <atomic>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "gardener/error.hpp"

namespace gardener {
namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& target) {
  static std::atomic<unsigned> counter{0};
  auto name = target.filename().string();
  name += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  return target.parent_path() / name;
}

}  // namespace

AtomicFile::AtomicFile(std::filesystem::path target)
    : target_(std::move(target)), temp_(temp_sibling(target_)) {
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) fail(ErrorCode::IoError, "cannot open '" + temp_.string() + "' for writing");
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(temp_, ec);
  }
}

void AtomicFile::write(std::string_view bytes) {
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out_) fail(ErrorCode::IoError, "write to '" + temp_.string() + "' failed");
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) fail(ErrorCode::IoError, "flush of '" + temp_.string() + "' failed");
  out_.close();
  std::error_code ec;
  std::filesystem::rename(temp_, target_, ec);
  if (ec) {
    std::filesystem::remove(temp_, ec);
    fail(ErrorCode::IoError, "cannot move output into place at '" + target_.string() + "'");
  }
  committed_ = true;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  AtomicFile file(path);
  file.write(contents);
  file.commit();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace gardener
