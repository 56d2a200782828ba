#include "sheetaudit/grid.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sheetaudit/errors.hpp"
#include "xlsx_reader.hpp"

namespace sheetaudit {

using json = nlohmann::json;

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void check_type(const CellValue& v, CellValue::Kind want) {
  if (v.kind() != want) {
    throw Error(ErrorKind::kTypeMismatch, "cell holds " + v.describe() + ", expected " +
                                              std::string(cell_kind_name(want)));
  }
}

std::string cell_label(const std::string& sheet, std::int32_t row, std::int32_t col) {
  return format_a1(CellRef{sheet, row, col});
}

}  // namespace

// ---------------------------------------------------------------- CellValue

CellValue CellValue::number(double v) {
  CellValue c;
  c.value_ = v;
  return c;
}

CellValue CellValue::text(std::string v) {
  CellValue c;
  c.value_ = Text{std::move(v)};
  return c;
}

CellValue CellValue::boolean(bool v) {
  CellValue c;
  c.value_ = v;
  return c;
}

CellValue CellValue::error(std::string code) {
  CellValue c;
  c.value_ = ErrorCode{std::move(code)};
  return c;
}

double CellValue::as_number() const {
  check_type(*this, Kind::kNumber);
  return std::get<double>(value_);
}

const std::string& CellValue::as_text() const {
  check_type(*this, Kind::kText);
  return std::get<Text>(value_).value;
}

bool CellValue::as_bool() const {
  check_type(*this, Kind::kBool);
  return std::get<bool>(value_);
}

const std::string& CellValue::as_error() const {
  check_type(*this, Kind::kError);
  return std::get<ErrorCode>(value_).code;
}

std::string CellValue::describe() const {
  switch (kind()) {
    case Kind::kEmpty: return "Empty";
    case Kind::kNumber: return "Number(" + shortest(std::get<double>(value_)) + ")";
    case Kind::kText: return "Text(\"" + std::get<Text>(value_).value + "\")";
    case Kind::kBool: return std::get<bool>(value_) ? "Bool(true)" : "Bool(false)";
    case Kind::kError: return "Error(" + std::get<ErrorCode>(value_).code + ")";
  }
  return "?";
}

std::string_view cell_kind_name(CellValue::Kind kind) {
  switch (kind) {
    case CellValue::Kind::kEmpty: return "Empty";
    case CellValue::Kind::kNumber: return "Number";
    case CellValue::Kind::kText: return "Text";
    case CellValue::Kind::kBool: return "Bool";
    case CellValue::Kind::kError: return "Error";
  }
  return "?";
}

// ---------------------------------------------------------------- Sheet

const CellValue& Sheet::at(std::int32_t row, std::int32_t col) const {
  static const CellValue kEmpty;
  auto it = cells_.find({row, col});
  return it == cells_.end() ? kEmpty : it->second;
}

std::optional<std::string> Sheet::formula(std::int32_t row, std::int32_t col) const {
  auto it = formulas_.find({row, col});
  if (it == formulas_.end()) return std::nullopt;
  return it->second;
}

void Sheet::set(std::int32_t row, std::int32_t col, CellValue value) {
  if (row < 1 || row > kMaxRows || col < 1 || col > kMaxCols) {
    throw Error(ErrorKind::kDomainError, "cell (" + std::to_string(row) + ", " +
                                             std::to_string(col) + ") is outside the grid");
  }
  if (value.is_empty()) {
    cells_.erase({row, col});
  } else {
    cells_[{row, col}] = std::move(value);
  }
}

void Sheet::set_formula(std::int32_t row, std::int32_t col, std::string formula) {
  formulas_[{row, col}] = std::move(formula);
}

// ---------------------------------------------------------------- GridBook

GridBook::GridBook(std::vector<Sheet> sheets, std::map<std::string, RangeRef> names)
    : sheets_(std::move(sheets)), names_(std::move(names)) {
  if (sheets_.empty()) throw Error(ErrorKind::kNotAWorkbook, "workbook has no sheets");
  std::set<std::string> seen;
  for (const Sheet& s : sheets_) {
    if (!seen.insert(s.name()).second) {
      throw Error(ErrorKind::kNotAWorkbook, "duplicate sheet name \"" + s.name() + "\"");
    }
  }
  for (const auto& [name, range] : names_) {
    if (!seen.count(range.sheet)) {
      throw Error(ErrorKind::kNotAWorkbook,
                  "defined name \"" + name + "\" refers to missing sheet \"" + range.sheet + "\"");
    }
    if (range.top_left.sheet != range.sheet || range.bottom_right.sheet != range.sheet) {
      throw Error(ErrorKind::kNotAWorkbook, "defined name \"" + name + "\" spans sheets");
    }
  }
}

std::vector<std::string> GridBook::sheet_names() const {
  std::vector<std::string> out;
  for (const Sheet& s : sheets_) out.push_back(s.name());
  return out;
}

bool GridBook::has_sheet(std::string_view name) const {
  return std::any_of(sheets_.begin(), sheets_.end(),
                     [&](const Sheet& s) { return s.name() == name; });
}

const Sheet& GridBook::sheet(std::string_view name) const {
  for (const Sheet& s : sheets_) {
    if (s.name() == name) return s;
  }
  std::string available;
  for (const Sheet& s : sheets_) available += (available.empty() ? "" : ", ") + s.name();
  throw Error(ErrorKind::kUnknownSheet,
              "no sheet \"" + std::string(name) + "\" (available: " + available + ")");
}

const std::string& GridBook::resolve_sheet_name(std::string_view name) const {
  if (name.empty()) return sheets_.front().name();
  return sheet(name).name();
}

GridBook GridBook::with_cells(const std::vector<std::pair<CellRef, CellValue>>& edits) const {
  std::vector<Sheet> sheets = sheets_;
  for (const auto& [ref, value] : edits) {
    const std::string& name = resolve_sheet_name(ref.sheet);
    auto it = std::find_if(sheets.begin(), sheets.end(),
                           [&](const Sheet& s) { return s.name() == name; });
    it->set(ref.row, ref.col, value);
  }
  return GridBook(std::move(sheets), names_);
}

GridBook GridBook::with_names(const std::map<std::string, RangeRef>& extra) const {
  std::map<std::string, RangeRef> names = names_;
  for (const auto& [k, v] : extra) names.insert_or_assign(k, v);
  return GridBook(sheets_, std::move(names));
}

// ---------------------------------------------------------------- loading

GridBook load_gridbook_json(std::string_view text) {
  // ordered_json keeps the sheets in file order.
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw Error(ErrorKind::kNotAWorkbook, std::string("gridbook-JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("sheets") || !doc["sheets"].is_object()) {
    throw Error(ErrorKind::kNotAWorkbook, "gridbook-JSON: missing \"sheets\" object");
  }
  std::vector<Sheet> sheets;
  for (const auto& [sheet_name, cells] : doc["sheets"].items()) {
    if (!cells.is_object()) {
      throw Error(ErrorKind::kNotAWorkbook, "gridbook-JSON: sheet \"" + sheet_name + "\" is not an object");
    }
    Sheet sheet(sheet_name);
    for (const auto& [addr, value] : cells.items()) {
      CellRef ref;
      try {
        ref = parse_cell(addr);
      } catch (const Error& e) {
        throw Error(ErrorKind::kNotAWorkbook,
                    "gridbook-JSON: sheet \"" + sheet_name + "\": " + e.message());
      }
      if (!ref.sheet.empty()) {
        throw Error(ErrorKind::kNotAWorkbook, "gridbook-JSON: cell key \"" + addr + "\" must not name a sheet");
      }
      if (value.is_number()) {
        sheet.set(ref.row, ref.col, CellValue::number(value.get<double>()));
      } else if (value.is_string()) {
        sheet.set(ref.row, ref.col, CellValue::text(value.get<std::string>()));
      } else if (value.is_boolean()) {
        sheet.set(ref.row, ref.col, CellValue::boolean(value.get<bool>()));
      } else if (value.is_object() && value.size() == 1 && value.contains("error") &&
                 value["error"].is_string()) {
        sheet.set(ref.row, ref.col, CellValue::error(value["error"].get<std::string>()));
      } else if (!value.is_null()) {
        throw Error(ErrorKind::kNotAWorkbook,
                    "gridbook-JSON: unsupported value at " + sheet_name + "!" + addr);
      }
    }
    sheets.push_back(std::move(sheet));
  }
  std::map<std::string, RangeRef> names;
  if (doc.contains("names")) {
    if (!doc["names"].is_object()) {
      throw Error(ErrorKind::kNotAWorkbook, "gridbook-JSON: \"names\" must be an object");
    }
    for (const auto& [name, target] : doc["names"].items()) {
      if (!target.is_string()) {
        throw Error(ErrorKind::kNotAWorkbook, "gridbook-JSON: name \"" + name + "\" must map to a string");
      }
      RangeRef range;
      try {
        range = parse_range(target.get<std::string>());
      } catch (const Error& e) {
        throw Error(ErrorKind::kNotAWorkbook, "gridbook-JSON: name \"" + name + "\": " + e.message());
      }
      if (range.sheet.empty()) {
        throw Error(ErrorKind::kNotAWorkbook, "gridbook-JSON: name \"" + name + "\" needs a sheet prefix");
      }
      names.emplace(name, range);
    }
  }
  return GridBook(std::move(sheets), std::move(names));
}

std::string dump_gridbook_json(const GridBook& book) {
  // ordered_json keeps the workbook's sheet order; cell keys are emitted in
  // row-major grid order.
  nlohmann::ordered_json doc;
  doc["sheets"] = nlohmann::ordered_json::object();
  for (const Sheet& sheet : book.sheets()) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::object();
    for (const auto& [key, value] : sheet.cells()) {
      std::string addr = col_to_letters(key.second) + std::to_string(key.first);
      switch (value.kind()) {
        case CellValue::Kind::kNumber: cells[addr] = value.as_number(); break;
        case CellValue::Kind::kText: cells[addr] = value.as_text(); break;
        case CellValue::Kind::kBool: cells[addr] = value.as_bool(); break;
        case CellValue::Kind::kError: cells[addr] = {{"error", value.as_error()}}; break;
        case CellValue::Kind::kEmpty: break;
      }
    }
    doc["sheets"][sheet.name()] = std::move(cells);
  }
  if (!book.defined_names().empty()) {
    nlohmann::ordered_json names = nlohmann::ordered_json::object();
    for (const auto& [name, range] : book.defined_names()) names[name] = format_a1(range);
    doc["names"] = std::move(names);
  }
  return doc.dump(2) + "\n";
}

GridBook load_workbook_bytes(std::string_view bytes, std::string_view origin) {
  static constexpr std::string_view kZipMagic{"PK\x03\x04", 4};
  static constexpr std::string_view kCfbMagic{"\xD0\xCF\x11\xE0", 4};
  if (bytes.substr(0, 4) == kZipMagic) return detail::load_xlsx(bytes, origin);
  if (bytes.substr(0, 4) == kCfbMagic) {
    throw Error(ErrorKind::kUnsupportedFeature,
                std::string(origin) + ": compound-file container (encrypted or legacy .xls workbook)");
  }
  auto first = std::find_if(bytes.begin(), bytes.end(),
                            [](char c) { return !std::isspace(static_cast<unsigned char>(c)); });
  if (first != bytes.end() && *first == '{') return load_gridbook_json(bytes);
  throw Error(ErrorKind::kNotAWorkbook,
              std::string(origin) + ": neither a ZIP package nor gridbook-JSON");
}

GridBook open_workbook(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::kFileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kFileNotFound, path.string() + " (unreadable)");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_workbook_bytes(bytes, path.string());
}

// ---------------------------------------------------------------- reading

CellValue read_cell(const GridBook& book, const CellRef& ref) {
  return book.sheet(book.resolve_sheet_name(ref.sheet)).at(ref.row, ref.col);
}

NumericSeries read_series(const GridBook& book, const CellRef& anchor, Orientation orientation,
                          ReadMode mode) {
  const Sheet& sheet = book.sheet(book.resolve_sheet_name(anchor.sheet));
  std::vector<double> out;
  const std::int64_t limit = orientation == Orientation::kRow ? kMaxCols - anchor.col + 1
                                                              : kMaxRows - anchor.row + 1;
  for (std::int64_t i = 0; i < limit; ++i) {
    if (mode.count && out.size() == *mode.count) break;
    std::int32_t row = anchor.row;
    std::int32_t col = anchor.col;
    if (orientation == Orientation::kRow) {
      col += static_cast<std::int32_t>(i);
    } else {
      row += static_cast<std::int32_t>(i);
    }
    const CellValue& v = sheet.at(row, col);
    if (v.is_empty()) {
      if (i == 0) {
        throw Error(ErrorKind::kTypeMismatch,
                    cell_label(sheet.name(), row, col) + " is Empty; anchor must be a Number");
      }
      if (mode.count) {
        throw Error(ErrorKind::kLengthError, "found " + std::to_string(out.size()) +
                                                 " cells, needed " + std::to_string(*mode.count) +
                                                 " from " + cell_label(sheet.name(), anchor.row, anchor.col));
      }
      break;
    }
    if (!v.is_number()) {
      throw Error(ErrorKind::kTypeMismatch,
                  cell_label(sheet.name(), row, col) + " holds " + v.describe());
    }
    out.push_back(v.as_number());
  }
  if (mode.count && out.size() < *mode.count) {
    throw Error(ErrorKind::kLengthError, "found " + std::to_string(out.size()) + " cells, needed " +
                                             std::to_string(*mode.count) + " before the grid edge");
  }
  return NumericSeries(std::move(out));
}

NumericSeries read_range(const GridBook& book, const RangeRef& range) {
  const Sheet& sheet = book.sheet(book.resolve_sheet_name(range.sheet));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(range.size()));
  for (std::int32_t r = range.top_left.row; r <= range.bottom_right.row; ++r) {
    for (std::int32_t c = range.top_left.col; c <= range.bottom_right.col; ++c) {
      const CellValue& v = sheet.at(r, c);
      if (!v.is_number()) {
        throw Error(ErrorKind::kTypeMismatch, cell_label(sheet.name(), r, c) + " holds " + v.describe());
      }
      out.push_back(v.as_number());
    }
  }
  return NumericSeries(std::move(out));
}

RangeRef resolve_name(const GridBook& book, std::string_view name) {
  auto it = book.defined_names().find(std::string(name));
  if (it != book.defined_names().end()) return it->second;
  std::string available;
  for (const auto& [n, r] : book.defined_names()) available += (available.empty() ? "" : ", ") + n;
  throw Error(ErrorKind::kUnknownName, "no defined name \"" + std::string(name) +
                                           "\" (available: " + (available.empty() ? "none" : available) + ")");
}

std::vector<CellRef> diff_cells(const GridBook& a, const GridBook& b) {
  std::vector<CellRef> out;
  for (const Sheet& sa : a.sheets()) {
    const Sheet& sb = b.sheet(sa.name());
    std::set<Sheet::Key> keys;
    for (const auto& [k, v] : sa.cells()) keys.insert(k);
    for (const auto& [k, v] : sb.cells()) keys.insert(k);
    for (const Sheet::Key& k : keys) {
      if (!(sa.at(k.first, k.second) == sb.at(k.first, k.second))) {
        out.push_back(CellRef{sa.name(), k.first, k.second});
      }
    }
  }
  return out;
}

}  // namespace sheetaudit
