#include "sheetaudit/a1.hpp"

#include <algorithm>
#include <cctype>

#include "sheetaudit/errors.hpp"

namespace sheetaudit {

namespace {

[[noreturn]] void parse_fail(std::string_view text, std::size_t pos,
                             std::string_view what) {
  throw Error(ErrorKind::kParseError,
              std::string(what) + " at position " + std::to_string(pos) +
                  " in \"" + std::string(text) + "\"");
}

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class A1Parser {
 public:
  explicit A1Parser(std::string_view text) : text_(text) {}

  A1Ref parse() {
    if (text_.empty()) parse_fail(text_, 0, "empty reference");
    std::string sheet = parse_sheet_prefix();
    CellRef first = parse_cell_body(sheet);
    if (pos_ == text_.size()) return first;
    if (text_[pos_] != ':') parse_fail(text_, pos_, "unexpected character");
    ++pos_;
    std::size_t second_start = pos_;
    std::string second_sheet = parse_sheet_prefix();
    if (!second_sheet.empty() && second_sheet != sheet) {
      parse_fail(text_, second_start, "range corners name different sheets");
    }
    CellRef second = parse_cell_body(sheet);
    if (pos_ != text_.size()) parse_fail(text_, pos_, "trailing characters");
    return make_range(first, second);
  }

 private:
  // Consumes "sheet!" when present; returns "" otherwise.
  std::string parse_sheet_prefix() {
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      std::size_t start = pos_;
      ++pos_;
      std::string name;
      while (true) {
        if (pos_ >= text_.size()) parse_fail(text_, start, "unterminated quoted sheet name");
        char c = text_[pos_];
        if (c == '\'') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
            name.push_back('\'');
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        name.push_back(c);
        ++pos_;
      }
      if (name.empty()) parse_fail(text_, start, "empty sheet name");
      if (pos_ >= text_.size() || text_[pos_] != '!') parse_fail(text_, pos_, "expected '!'");
      ++pos_;
      return name;
    }
    std::size_t bang = text_.find('!', pos_);
    std::size_t colon = text_.find(':', pos_);
    if (bang == std::string_view::npos || (colon != std::string_view::npos && colon < bang)) {
      return {};
    }
    if (bang == pos_) parse_fail(text_, pos_, "empty sheet name");
    std::string name(text_.substr(pos_, bang - pos_));
    pos_ = bang + 1;
    return name;
  }

  CellRef parse_cell_body(const std::string& sheet) {
    if (pos_ < text_.size() && text_[pos_] == '$') ++pos_;
    std::size_t letters_start = pos_;
    std::int64_t col = 0;
    while (pos_ < text_.size() && is_letter(text_[pos_])) {
      col = col * 26 + (std::toupper(static_cast<unsigned char>(text_[pos_])) - 'A' + 1);
      if (col > kMaxCols) parse_fail(text_, letters_start, "column beyond XFD");
      ++pos_;
    }
    if (pos_ == letters_start) parse_fail(text_, pos_, "expected column letters");
    if (pos_ < text_.size() && text_[pos_] == '$') ++pos_;
    std::size_t digits_start = pos_;
    std::int64_t row = 0;
    while (pos_ < text_.size() && is_digit(text_[pos_])) {
      row = row * 10 + (text_[pos_] - '0');
      if (row > kMaxRows) parse_fail(text_, digits_start, "row beyond 1048576");
      ++pos_;
    }
    if (pos_ == digits_start) parse_fail(text_, pos_, "expected row digits");
    if (row == 0) parse_fail(text_, digits_start, "row must be >= 1");
    return CellRef{sheet, static_cast<std::int32_t>(row), static_cast<std::int32_t>(col)};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool needs_quotes(std::string_view sheet) {
  if (sheet.empty()) return true;
  if (is_digit(sheet.front())) return true;
  return !std::all_of(sheet.begin(), sheet.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.';
  });
}

}  // namespace

std::string_view orientation_name(Orientation orientation) {
  return orientation == Orientation::kRow ? "row" : "col";
}

bool RangeRef::contains(const CellRef& cell) const {
  return cell.row >= top_left.row && cell.row <= bottom_right.row &&
         cell.col >= top_left.col && cell.col <= bottom_right.col;
}

bool RangeRef::overlaps(const RangeRef& other) const {
  if (sheet != other.sheet) return false;
  return top_left.row <= other.bottom_right.row && other.top_left.row <= bottom_right.row &&
         top_left.col <= other.bottom_right.col && other.top_left.col <= bottom_right.col;
}

RangeRef make_range(const CellRef& a, const CellRef& b) {
  RangeRef r;
  r.sheet = a.sheet;
  r.top_left = CellRef{a.sheet, std::min(a.row, b.row), std::min(a.col, b.col)};
  r.bottom_right = CellRef{a.sheet, std::max(a.row, b.row), std::max(a.col, b.col)};
  return r;
}

A1Ref parse_a1(std::string_view text) { return A1Parser(text).parse(); }

CellRef parse_cell(std::string_view text) {
  A1Ref ref = parse_a1(text);
  if (auto* cell = std::get_if<CellRef>(&ref)) return *cell;
  throw Error(ErrorKind::kParseError,
              "expected a single cell, got range \"" + std::string(text) + "\"");
}

RangeRef parse_range(std::string_view text) {
  A1Ref ref = parse_a1(text);
  if (auto* cell = std::get_if<CellRef>(&ref)) return make_range(*cell, *cell);
  return std::get<RangeRef>(ref);
}

std::string col_to_letters(std::int64_t col) {
  if (col < 1) {
    throw Error(ErrorKind::kDomainError, "column index must be >= 1, got " + std::to_string(col));
  }
  std::string out;
  while (col > 0) {
    --col;
    out.push_back(static_cast<char>('A' + col % 26));
    col /= 26;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::int64_t letters_to_col(std::string_view letters) {
  if (letters.empty()) throw Error(ErrorKind::kParseError, "empty column letters");
  std::int64_t col = 0;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (!is_letter(letters[i])) parse_fail(letters, i, "non-letter in column");
    col = col * 26 + (std::toupper(static_cast<unsigned char>(letters[i])) - 'A' + 1);
    if (col > kMaxCols) parse_fail(letters, i, "column beyond XFD");
  }
  return col;
}

std::string absolute_address(const CellRef& cell) {
  return "$" + col_to_letters(cell.col) + "$" + std::to_string(cell.row);
}

std::string absolute_address(const RangeRef& range) {
  if (range.is_single_cell()) return absolute_address(range.top_left);
  return absolute_address(range.top_left) + ":" + absolute_address(range.bottom_right);
}

std::string quote_sheet_name(std::string_view sheet) {
  if (!needs_quotes(sheet)) return std::string(sheet);
  std::string out = "'";
  for (char c : sheet) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string format_a1(const CellRef& cell) {
  if (cell.sheet.empty()) return absolute_address(cell);
  return quote_sheet_name(cell.sheet) + "!" + absolute_address(cell);
}

std::string format_a1(const RangeRef& range) {
  if (range.sheet.empty()) return absolute_address(range);
  return quote_sheet_name(range.sheet) + "!" + absolute_address(range);
}

CellRef displace(const CellRef& anchor, Orientation orientation, std::int64_t steps) {
  CellRef out = anchor;
  if (orientation == Orientation::kRow) {
    std::int64_t col = anchor.col + steps;
    if (col < 1 || col > kMaxCols) {
      throw Error(ErrorKind::kDomainError,
                  "column " + std::to_string(col) + " is outside the grid");
    }
    out.col = static_cast<std::int32_t>(col);
  } else {
    std::int64_t row = anchor.row + steps;
    if (row < 1 || row > kMaxRows) {
      throw Error(ErrorKind::kDomainError, "row " + std::to_string(row) + " is outside the grid");
    }
    out.row = static_cast<std::int32_t>(row);
  }
  return out;
}

}  // namespace sheetaudit
