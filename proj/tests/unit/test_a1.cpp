#include <gtest/gtest.h>

#include <random>

#include "sheetaudit/a1.hpp"
#include "sheetaudit/errors.hpp"

namespace sheetaudit {
namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorKind::kSpecError;
}

TEST(A1, ParsesPlainCell) {
  CellRef c = parse_cell("G41");
  EXPECT_EQ(c.row, 41);
  EXPECT_EQ(c.col, 7);
  EXPECT_EQ(c.sheet, "");
}

TEST(A1, ParsesAbsoluteRange) {
  RangeRef r = parse_range("$H$41:$BN$41");
  EXPECT_EQ(r.top_left.col, 8);
  EXPECT_EQ(r.bottom_right.col, 66);
  EXPECT_EQ(r.top_left.row, 41);
  EXPECT_EQ(r.size(), 59);
}

TEST(A1, DoubleLetterColumn) { EXPECT_EQ(parse_cell("AA1").col, 27); }

TEST(A1, LowercaseAccepted) { EXPECT_EQ(parse_cell("bn41").col, 66); }

TEST(A1, SheetQualified) {
  CellRef c = parse_cell("Model!$D$26");
  EXPECT_EQ(c.sheet, "Model");
  EXPECT_EQ(c.row, 26);
  RangeRef r = parse_range("'Cash Flow'!A1:B2");
  EXPECT_EQ(r.sheet, "Cash Flow");
  EXPECT_EQ(format_a1(r), "'Cash Flow'!$A$1:$B$2");
  EXPECT_EQ(parse_cell("'It''s'!C3").sheet, "It's");
}

TEST(A1, RangeCornersNormalized) {
  RangeRef r = parse_range("C5:A1");
  EXPECT_EQ(absolute_address(r), "$A$1:$C$5");
}

TEST(A1, SingleCellPromotedToRange) {
  RangeRef r = parse_range("B2");
  EXPECT_TRUE(r.is_single_cell());
}

TEST(A1, ParseCellRejectsRange) {
  EXPECT_EQ(kind_of([] { parse_cell("A1:B2"); }), ErrorKind::kParseError);
}

TEST(A1, MalformedInputs) {
  for (const char* bad : {"", "41", "G", "G0", "1G", "G41:", "!A1", "A1B", "XFE1", "A1048577", "'Open!A1",
                          "A-1", "$$A1"}) {
    EXPECT_EQ(kind_of([&] { parse_a1(bad); }), ErrorKind::kParseError) << bad;
  }
}

TEST(A1, ParseErrorNamesPosition) {
  try {
    parse_a1("G4x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(e.message().find("position 2"), std::string::npos) << e.message();
  }
}

TEST(A1, GridCorners) {
  CellRef last = parse_cell("XFD1048576");
  EXPECT_EQ(last.col, kMaxCols);
  EXPECT_EQ(last.row, kMaxRows);
}

TEST(A1, ColumnLetters) {
  EXPECT_EQ(col_to_letters(1), "A");
  EXPECT_EQ(col_to_letters(26), "Z");
  EXPECT_EQ(col_to_letters(27), "AA");
  EXPECT_EQ(col_to_letters(66), "BN");
  EXPECT_EQ(col_to_letters(702), "ZZ");
  EXPECT_EQ(col_to_letters(703), "AAA");
  EXPECT_EQ(col_to_letters(16384), "XFD");
  EXPECT_EQ(kind_of([] { col_to_letters(0); }), ErrorKind::kDomainError);
  EXPECT_EQ(kind_of([] { col_to_letters(-3); }), ErrorKind::kDomainError);
}

TEST(A1, AbsoluteAddresses) {
  EXPECT_EQ(absolute_address(CellRef{"Model", 41, 7}), "$G$41");
  EXPECT_EQ(absolute_address(make_range(CellRef{"", 41, 8}, CellRef{"", 41, 66})), "$H$41:$BN$41");
  EXPECT_EQ(format_a1(CellRef{"Model", 41, 7}), "Model!$G$41");
  EXPECT_EQ(format_a1(CellRef{"", 41, 7}), "$G$41");
}

TEST(A1, Displace) {
  CellRef g41{"Model", 41, 7};
  EXPECT_EQ(displace(g41, Orientation::kRow, 59), (CellRef{"Model", 41, 66}));
  EXPECT_EQ(displace(g41, Orientation::kCol, 2), (CellRef{"Model", 43, 7}));
  EXPECT_EQ(kind_of([&] { displace(g41, Orientation::kRow, -7); }), ErrorKind::kDomainError);
  EXPECT_EQ(kind_of([&] { displace(g41, Orientation::kRow, 16384); }), ErrorKind::kDomainError);
}

TEST(A1, RangeGeometry) {
  RangeRef a = parse_range("B2:D4");
  EXPECT_TRUE(a.contains(CellRef{"", 3, 3}));
  EXPECT_FALSE(a.contains(CellRef{"", 5, 3}));
  EXPECT_TRUE(a.overlaps(parse_range("D4:E9")));
  EXPECT_FALSE(a.overlaps(parse_range("E1:E9")));
  EXPECT_FALSE(parse_range("S!B2:D4").overlaps(parse_range("T!B2:D4")));
}

// Property: every column survives letters and back.
TEST(A1Property, ColumnBijectionOverFullWidth) {
  std::string prev;
  for (std::int64_t c = 1; c <= kMaxCols; ++c) {
    std::string letters = col_to_letters(c);
    ASSERT_EQ(letters_to_col(letters), c);
    // Bijective base-26 orders by length first, then lexicographically.
    ASSERT_TRUE(prev.size() < letters.size() || (prev.size() == letters.size() && prev < letters)) << c;
    prev = letters;
  }
}

TEST(A1Property, RandomRefsRoundTrip) {
  std::mt19937_64 rng(41);
  const char* sheets[] = {"", "Model", "Cash Flow", "It's", "2024"};
  for (int i = 0; i < 2000; ++i) {
    std::string sheet = sheets[rng() % 5];
    CellRef a{sheet, static_cast<std::int32_t>(1 + rng() % kMaxRows), static_cast<std::int32_t>(1 + rng() % kMaxCols)};
    CellRef b{sheet, static_cast<std::int32_t>(1 + rng() % kMaxRows), static_cast<std::int32_t>(1 + rng() % kMaxCols)};
    ASSERT_EQ(parse_cell(format_a1(a)), a);
    RangeRef r = make_range(a, b);
    ASSERT_EQ(parse_range(format_a1(r)), r) << format_a1(r);
  }
}

}  // namespace
}  // namespace sheetaudit
