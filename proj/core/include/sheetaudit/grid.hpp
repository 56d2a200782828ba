#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sheetaudit/a1.hpp"
#include "sheetaudit/series.hpp"

namespace sheetaudit {

// A cached cell value as stored in the file. Empty is distinct from
// Number(0); numbers keep the stored double bit-for-bit.
class CellValue {
 public:
  enum class Kind { kEmpty, kNumber, kText, kBool, kError };

  CellValue() = default;
  static CellValue number(double v);
  static CellValue text(std::string v);
  static CellValue boolean(bool v);
  static CellValue error(std::string code);

  Kind kind() const { return static_cast<Kind>(value_.index()); }
  bool is_empty() const { return kind() == Kind::kEmpty; }
  bool is_number() const { return kind() == Kind::kNumber; }

  double as_number() const;
  const std::string& as_text() const;
  bool as_bool() const;
  const std::string& as_error() const;

  // Short human form for diagnostics: "Number(500)", "Text(\"x\")", "Empty".
  std::string describe() const;

  friend bool operator==(const CellValue&, const CellValue&) = default;

 private:
  struct Text {
    std::string value;
    friend bool operator==(const Text&, const Text&) = default;
  };
  struct ErrorCode {
    std::string code;
    friend bool operator==(const ErrorCode&, const ErrorCode&) = default;
  };
  std::variant<std::monostate, double, Text, bool, ErrorCode> value_;
};

std::string_view cell_kind_name(CellValue::Kind kind);

// Sparse grid keyed by (row, col). Cells never set read as Empty.
class Sheet {
 public:
  using Key = std::pair<std::int32_t, std::int32_t>;

  explicit Sheet(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  const CellValue& at(std::int32_t row, std::int32_t col) const;
  const std::map<Key, CellValue>& cells() const { return cells_; }
  const std::map<Key, std::string>& formulas() const { return formulas_; }
  std::optional<std::string> formula(std::int32_t row, std::int32_t col) const;

  // Storing Empty erases the cell.
  void set(std::int32_t row, std::int32_t col, CellValue value);
  void set_formula(std::int32_t row, std::int32_t col, std::string formula);

  friend bool operator==(const Sheet&, const Sheet&) = default;

 private:
  std::string name_;
  std::map<Key, CellValue> cells_;
  std::map<Key, std::string> formulas_;
};

// Parsed workbook: ordered sheets plus workbook-level defined names. Read-only
// once constructed; the constructor rejects zero sheets, duplicate sheet names
// and names that do not resolve inside an existing sheet.
class GridBook {
 public:
  GridBook(std::vector<Sheet> sheets, std::map<std::string, RangeRef> names);

  const std::vector<Sheet>& sheets() const { return sheets_; }
  std::vector<std::string> sheet_names() const;
  bool has_sheet(std::string_view name) const;
  const Sheet& sheet(std::string_view name) const;  // kUnknownSheet
  const std::map<std::string, RangeRef>& defined_names() const { return names_; }

  // "" resolves to the first sheet; any other unknown name is kUnknownSheet.
  const std::string& resolve_sheet_name(std::string_view name) const;

  // Returns a new book with `edits` applied; *this is unchanged.
  GridBook with_cells(const std::vector<std::pair<CellRef, CellValue>>& edits) const;
  GridBook with_names(const std::map<std::string, RangeRef>& extra) const;

  friend bool operator==(const GridBook&, const GridBook&) = default;

 private:
  std::vector<Sheet> sheets_;
  std::map<std::string, RangeRef> names_;
};

// Loads an OOXML package (.xlsx/.xlsm) or gridbook-JSON, sniffed from the
// leading bytes. Formula cells carry their cached result.
GridBook open_workbook(const std::filesystem::path& path);
GridBook load_workbook_bytes(std::string_view bytes, std::string_view origin);

// {"sheets": {"Model": {"A1": 1.5, "B1": "label", "C1": {"error": "#N/A"}}},
//  "names": {"plant_size": "Model!$D$18"}}
GridBook load_gridbook_json(std::string_view text);
// Deterministic gridbook-JSON: workbook sheet order, row-major cell keys,
// shortest round-trip doubles.
std::string dump_gridbook_json(const GridBook& book);

CellValue read_cell(const GridBook& book, const CellRef& ref);

struct ReadMode {
  std::optional<std::size_t> count;  // nullopt = expand until first Empty

  static ReadMode expand() { return {}; }
  static ReadMode fixed(std::size_t n) { return ReadMode{n}; }
};

NumericSeries read_series(const GridBook& book, const CellRef& anchor, Orientation orientation,
                          ReadMode mode);

// All cells of a range in row-major order; every cell must be a Number.
NumericSeries read_range(const GridBook& book, const RangeRef& range);

RangeRef resolve_name(const GridBook& book, std::string_view name);

// Sorted list of cells whose stored values differ between two books with the
// same sheets.
std::vector<CellRef> diff_cells(const GridBook& a, const GridBook& b);

}  // namespace sheetaudit
