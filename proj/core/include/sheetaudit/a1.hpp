#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace sheetaudit {

inline constexpr std::int32_t kMaxRows = 1'048'576;
inline constexpr std::int32_t kMaxCols = 16'384;

enum class Orientation { kRow, kCol };

std::string_view orientation_name(Orientation orientation);

// A single cell. An empty sheet means "unqualified"; callers resolve it
// against a workbook (see grid.hpp).
struct CellRef {
  std::string sheet;
  std::int32_t row = 1;
  std::int32_t col = 1;

  friend bool operator==(const CellRef&, const CellRef&) = default;
  friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

// Inclusive rectangle. Constructed through make_range, which normalizes the
// corners so top_left <= bottom_right on both axes.
struct RangeRef {
  std::string sheet;
  CellRef top_left;
  CellRef bottom_right;

  std::int64_t rows() const { return bottom_right.row - top_left.row + 1; }
  std::int64_t cols() const { return bottom_right.col - top_left.col + 1; }
  std::int64_t size() const { return rows() * cols(); }
  bool is_single_cell() const { return rows() == 1 && cols() == 1; }
  bool contains(const CellRef& cell) const;
  bool overlaps(const RangeRef& other) const;

  friend bool operator==(const RangeRef&, const RangeRef&) = default;
};

RangeRef make_range(const CellRef& a, const CellRef& b);

using A1Ref = std::variant<CellRef, RangeRef>;

// Parses "[sheet!][$]COL[$]ROW[:[$]COL[$]ROW]". Sheet names may be quoted
// ('My Sheet'!A1, with '' escaping a quote). Dollar signs are accepted and
// discarded. Throws Error(kParseError) with the failing character position.
A1Ref parse_a1(std::string_view text);

// Like parse_a1 but insists on a single cell.
CellRef parse_cell(std::string_view text);

// Like parse_a1 but promotes a single cell to a 1x1 range.
RangeRef parse_range(std::string_view text);

// Bijective base-26: 1 -> "A", 26 -> "Z", 27 -> "AA". Throws kDomainError
// for col < 1.
std::string col_to_letters(std::int64_t col);
std::int64_t letters_to_col(std::string_view letters);

// Absolute address without a sheet prefix: "$G$41", "$H$41:$BN$41".
std::string absolute_address(const CellRef& cell);
std::string absolute_address(const RangeRef& range);

// Absolute address with the sheet prefix when the ref carries one; the
// inverse of parse_a1.
std::string format_a1(const CellRef& cell);
std::string format_a1(const RangeRef& range);

std::string quote_sheet_name(std::string_view sheet);

// Moves `steps` cells along the orientation. Throws kDomainError when the
// result leaves the grid.
CellRef displace(const CellRef& anchor, Orientation orientation, std::int64_t steps);

}  // namespace sheetaudit
