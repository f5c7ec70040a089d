#pragma once

#include <filesystem>
#include <fstream>
#include <string_view>

namespace gardener {

/// Output file that only appears at its final path once commit() succeeds.
/// Bytes go to a sibling temp file which is renamed over the target; an
/// uncommitted AtomicFile removes its temp file on destruction.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target);
  ~AtomicFile();

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ofstream& stream() { return out_; }
  void write(std::string_view bytes);
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace gardener
