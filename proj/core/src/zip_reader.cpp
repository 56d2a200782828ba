#include "zip_reader.hpp"

#include <zlib.h>

#include <cstring>

#include "sheetaudit/errors.hpp"

namespace sheetaudit::detail {

namespace {

constexpr std::uint32_t kEndOfCentralDir = 0x06054b50;
constexpr std::uint32_t kCentralDirEntry = 0x02014b50;
constexpr std::uint32_t kLocalHeader = 0x04034b50;

std::uint16_t le16(std::string_view b, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                    (static_cast<unsigned char>(b[off + 1]) << 8));
}

std::uint32_t le32(std::string_view b, std::size_t off) {
  return static_cast<std::uint32_t>(le16(b, off)) |
         (static_cast<std::uint32_t>(le16(b, off + 2)) << 16);
}

}  // namespace

ZipArchive::ZipArchive(std::string_view bytes, std::string origin)
    : bytes_(bytes), origin_(std::move(origin)) {
  auto corrupt = [&](const std::string& what) {
    return Error(ErrorKind::kNotAWorkbook, origin_ + ": " + what);
  };
  if (bytes_.size() < 22) throw corrupt("truncated ZIP container");

  // The end-of-central-directory record sits in the last 22 + 65535 bytes.
  std::size_t eocd = std::string_view::npos;
  std::size_t lowest = bytes_.size() > 22 + 0xFFFF ? bytes_.size() - 22 - 0xFFFF : 0;
  for (std::size_t pos = bytes_.size() - 22 + 1; pos-- > lowest;) {
    if (le32(bytes_, pos) == kEndOfCentralDir) {
      eocd = pos;
      break;
    }
  }
  if (eocd == std::string_view::npos) throw corrupt("missing ZIP end-of-central-directory record");

  std::uint16_t count = le16(bytes_, eocd + 10);
  std::uint32_t dir_size = le32(bytes_, eocd + 12);
  std::uint32_t dir_offset = le32(bytes_, eocd + 16);
  if (count == 0xFFFF || dir_offset == 0xFFFFFFFF) {
    throw Error(ErrorKind::kUnsupportedFeature, origin_ + ": ZIP64 containers are not supported");
  }
  if (static_cast<std::uint64_t>(dir_offset) + dir_size > bytes_.size()) {
    throw corrupt("central directory lies outside the file");
  }

  std::size_t pos = dir_offset;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (pos + 46 > bytes_.size() || le32(bytes_, pos) != kCentralDirEntry) {
      throw corrupt("malformed central directory entry " + std::to_string(i));
    }
    Entry e;
    e.flags = le16(bytes_, pos + 8);
    e.method = le16(bytes_, pos + 10);
    e.crc = le32(bytes_, pos + 16);
    e.compressed_size = le32(bytes_, pos + 20);
    e.uncompressed_size = le32(bytes_, pos + 24);
    std::uint16_t name_len = le16(bytes_, pos + 28);
    std::uint16_t extra_len = le16(bytes_, pos + 30);
    std::uint16_t comment_len = le16(bytes_, pos + 32);
    e.local_header_offset = le32(bytes_, pos + 42);
    if (pos + 46 + name_len > bytes_.size()) throw corrupt("truncated entry name");
    std::string name(bytes_.substr(pos + 46, name_len));
    entries_.emplace(std::move(name), e);
    pos += 46 + static_cast<std::size_t>(name_len) + extra_len + comment_len;
  }
}

std::optional<std::string> ZipArchive::read(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) return std::nullopt;
  const Entry& e = it->second;
  if (e.flags & 0x1) {
    throw Error(ErrorKind::kUnsupportedFeature, origin_ + ": part " + name + " is encrypted");
  }
  std::size_t pos = e.local_header_offset;
  if (pos + 30 > bytes_.size() || le32(bytes_, pos) != kLocalHeader) {
    throw Error(ErrorKind::kNotAWorkbook, origin_ + ": bad local header for part " + name);
  }
  std::size_t data = pos + 30 + le16(bytes_, pos + 26) + le16(bytes_, pos + 28);
  if (data + e.compressed_size > bytes_.size()) {
    throw Error(ErrorKind::kNotAWorkbook, origin_ + ": part " + name + " is truncated");
  }
  std::string_view raw = bytes_.substr(data, e.compressed_size);

  std::string out;
  if (e.method == 0) {
    out.assign(raw);
  } else if (e.method == 8) {
    out.resize(e.uncompressed_size);
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
      throw Error(ErrorKind::kNotAWorkbook, origin_ + ": zlib init failed for part " + name);
    }
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
    zs.avail_in = static_cast<uInt>(raw.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    std::size_t produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != e.uncompressed_size) {
      throw Error(ErrorKind::kNotAWorkbook, origin_ + ": corrupt deflate stream in part " + name);
    }
  } else {
    throw Error(ErrorKind::kUnsupportedFeature, origin_ + ": part " + name +
                                                    " uses compression method " + std::to_string(e.method));
  }
  std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size())));
  if (crc != e.crc) {
    throw Error(ErrorKind::kNotAWorkbook, origin_ + ": CRC mismatch in part " + name);
  }
  return out;
}

}  // namespace sheetaudit::detail
