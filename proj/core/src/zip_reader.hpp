#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace sheetaudit::detail {

// Read-only view of a ZIP archive held in memory. Supports stored and
// deflated entries; encrypted and ZIP64 archives are rejected.
class ZipArchive {
 public:
  ZipArchive(std::string_view bytes, std::string origin);

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  // Inflated contents of `name`, or nullopt when the entry is absent.
  std::optional<std::string> read(const std::string& name) const;

 private:
  struct Entry {
    std::uint16_t method = 0;
    std::uint16_t flags = 0;
    std::uint32_t crc = 0;
    std::uint32_t compressed_size = 0;
    std::uint32_t uncompressed_size = 0;
    std::uint32_t local_header_offset = 0;
  };

  std::string_view bytes_;
  std::string origin_;
  std::map<std::string, Entry> entries_;
};

}  // namespace sheetaudit::detail
