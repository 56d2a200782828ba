#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sheetaudit/errors.hpp"
#include "sheetaudit/grid.hpp"

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

GridBook row_book() {
  Sheet s("Model");
  s.set(41, 7, CellValue::number(7007.75));
  s.set(41, 8, CellValue::number(5829.56));
  s.set(26, 4, CellValue::number(1));
  s.set(27, 4, CellValue::number(2));
  s.set(28, 4, CellValue::text("n/a"));
  s.set(2, 2, CellValue::text("label"));
  s.set(18, 4, CellValue::number(1000));
  RangeRef row = parse_range("Model!G41:H41");
  return GridBook({s, Sheet("Notes")}, {{"plant_size", parse_range("Model!$D$18")}, {"row", row}});
}

TEST(CellValue, KindsAndAccessors) {
  EXPECT_TRUE(CellValue().is_empty());
  EXPECT_EQ(CellValue::number(500).as_number(), 500);
  EXPECT_EQ(CellValue::text("x").as_text(), "x");
  EXPECT_TRUE(CellValue::boolean(true).as_bool());
  EXPECT_EQ(CellValue::error("#DIV/0!").as_error(), "#DIV/0!");
  EXPECT_EQ(kind_of([] { CellValue::text("x").as_number(); }), ErrorKind::kTypeMismatch);
  EXPECT_EQ(kind_of([] { CellValue().as_number(); }), ErrorKind::kTypeMismatch);
  EXPECT_NE(CellValue::number(0), CellValue());
  EXPECT_EQ(CellValue::number(500).describe(), "Number(500)");
  EXPECT_EQ(CellValue().describe(), "Empty");
}

TEST(SheetTest, SparseStorage) {
  Sheet s("S");
  s.set(3, 4, CellValue::number(1));
  EXPECT_EQ(s.at(3, 4), CellValue::number(1));
  EXPECT_TRUE(s.at(100, 100).is_empty());
  s.set(3, 4, CellValue());
  EXPECT_TRUE(s.cells().empty());
  EXPECT_THROW(s.set(0, 1, CellValue::number(1)), Error);
  EXPECT_THROW(s.set(1, kMaxCols + 1, CellValue::number(1)), Error);
}

TEST(GridBookTest, Construction) {
  EXPECT_EQ(kind_of([] { GridBook({}, {}); }), ErrorKind::kNotAWorkbook);
  EXPECT_EQ(kind_of([] { GridBook({Sheet("A"), Sheet("A")}, {}); }), ErrorKind::kNotAWorkbook);
  EXPECT_EQ(kind_of([] { GridBook({Sheet("A")}, {{"x", parse_range("B!A1")}}); }), ErrorKind::kNotAWorkbook);
  GridBook book = row_book();
  EXPECT_EQ(book.sheet_names(), (std::vector<std::string>{"Model", "Notes"}));
  EXPECT_EQ(book.resolve_sheet_name(""), "Model");
  EXPECT_EQ(kind_of([&] { book.sheet("Nope"); }), ErrorKind::kUnknownSheet);
}

TEST(GridBookTest, UnknownSheetListsAvailable) {
  try {
    row_book().sheet("Cash");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(e.message().find("Model"), std::string::npos);
    EXPECT_NE(e.message().find("Notes"), std::string::npos);
  }
}

TEST(ReadCell, PresentAbsentAndTypeAgnostic) {
  GridBook book = row_book();
  EXPECT_EQ(read_cell(book, parse_cell("Model!D18")), CellValue::number(1000));
  EXPECT_TRUE(read_cell(book, parse_cell("Z99")).is_empty());
  EXPECT_EQ(read_cell(book, parse_cell("B2")), CellValue::text("label"));
}

TEST(ReadSeries, ExpandStopsAtEmpty) {
  GridBook book = row_book();
  NumericSeries s = read_series(book, parse_cell("G41"), Orientation::kRow, ReadMode::expand());
  EXPECT_EQ(s, (NumericSeries{7007.75, 5829.56}));
}

TEST(ReadSeries, ExpandDownHitsText) {
  GridBook book = row_book();
  try {
    read_series(book, parse_cell("D26"), Orientation::kCol, ReadMode::expand());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTypeMismatch);
    EXPECT_NE(e.message().find("$D$28"), std::string::npos) << e.message();
  }
  EXPECT_EQ(read_series(book, parse_cell("D26"), Orientation::kCol, ReadMode::fixed(2)), (NumericSeries{1, 2}));
}

TEST(ReadSeries, EmptyAnchorAndShortFixed) {
  GridBook book = row_book();
  EXPECT_EQ(kind_of([&] { read_series(book, parse_cell("A1"), Orientation::kRow, ReadMode::expand()); }),
            ErrorKind::kTypeMismatch);
  EXPECT_EQ(kind_of([&] { read_series(book, parse_cell("G41"), Orientation::kRow, ReadMode::fixed(3)); }),
            ErrorKind::kLengthError);
  EXPECT_EQ(kind_of([&] { read_series(book, parse_cell("Cash!G41"), Orientation::kRow, ReadMode::expand()); }),
            ErrorKind::kUnknownSheet);
}

TEST(ReadSeries, ExpandDownTwelveIrradianceCells) {
  Sheet s("Model");
  for (int i = 0; i < 12; ++i) s.set(26 + i, 4, CellValue::number(100 + i));
  s.set(39, 4, CellValue::number(1));  // after a gap, not part of the block
  GridBook book({s}, {});
  NumericSeries irr = read_series(book, parse_cell("D26"), Orientation::kCol, ReadMode::expand());
  EXPECT_EQ(irr.size(), 12u);
  EXPECT_EQ(irr[11], 111);
}

TEST(ReadSeries, RunsToGridEdge) {
  Sheet s("S");
  s.set(1, kMaxCols - 1, CellValue::number(1));
  s.set(1, kMaxCols, CellValue::number(2));
  GridBook book({s}, {});
  EXPECT_EQ(read_series(book, CellRef{"", 1, kMaxCols - 1}, Orientation::kRow, ReadMode::expand()).size(), 2u);
}

TEST(Names, Resolve) {
  GridBook book = row_book();
  RangeRef r = resolve_name(book, "plant_size");
  EXPECT_TRUE(r.is_single_cell());
  EXPECT_EQ(read_range(book, r), (NumericSeries{1000}));
  EXPECT_EQ(read_range(book, resolve_name(book, "row")), (NumericSeries{7007.75, 5829.56}));
  try {
    resolve_name(book, "foo");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownName);
    EXPECT_NE(e.message().find("plant_size"), std::string::npos);
  }
}

TEST(ReadRange, RowMajorAndTyped) {
  Sheet s("S");
  s.set(1, 1, CellValue::number(1));
  s.set(1, 2, CellValue::number(2));
  s.set(2, 1, CellValue::number(3));
  s.set(2, 2, CellValue::number(4));
  GridBook book({s}, {});
  EXPECT_EQ(read_range(book, parse_range("A1:B2")), (NumericSeries{1, 2, 3, 4}));
  EXPECT_EQ(kind_of([&] { read_range(book, parse_range("A1:C1")); }), ErrorKind::kTypeMismatch);
}

TEST(GridbookJson, MinimalDocument) {
  GridBook book = load_gridbook_json(R"({"sheets":{"S":{"A1":1.5}}})");
  EXPECT_EQ(book.sheet_names(), (std::vector<std::string>{"S"}));
  EXPECT_EQ(read_cell(book, parse_cell("S!A1")), CellValue::number(1.5));
}

TEST(GridbookJson, AllKindsRoundTrip) {
  Sheet z("Zeta"), a("Alpha");
  z.set(1, 1, CellValue::number(0.1));
  z.set(1, 2, CellValue::text("x"));
  z.set(2, 1, CellValue::boolean(false));
  z.set(2, 2, CellValue::error("#DIV/0!"));
  a.set(5, 5, CellValue::number(-2.5e-300));
  GridBook book({z, a}, {{"n", parse_range("Alpha!E5")}});
  std::string text = dump_gridbook_json(book);
  GridBook back = load_gridbook_json(text);
  EXPECT_EQ(back, book);
  EXPECT_EQ(back.sheet_names(), (std::vector<std::string>{"Zeta", "Alpha"}));
  EXPECT_EQ(dump_gridbook_json(back), text);
}

TEST(GridbookJson, Rejections) {
  for (const char* bad : {"{", "[]", R"({"sheets":[]})", R"({"sheets":{"S":{"A0":1}}})",
                          R"({"sheets":{"S":{"T!A1":1}}})", R"({"sheets":{"S":{"A1":[1]}}})",
                          R"({"sheets":{"S":{}},"names":{"n":"A1"}})", R"({"sheets":{}})"}) {
    EXPECT_EQ(kind_of([&] { load_gridbook_json(bad); }), ErrorKind::kNotAWorkbook) << bad;
  }
}

TEST(Sniffing, ByLeadingBytes) {
  EXPECT_EQ(kind_of([] { load_workbook_bytes("hello", "x"); }), ErrorKind::kNotAWorkbook);
  EXPECT_EQ(kind_of([] { load_workbook_bytes(std::string("\xD0\xCF\x11\xE0\xA1\xB1\x1A\xE1", 8), "x"); }),
            ErrorKind::kUnsupportedFeature);
  EXPECT_EQ(load_workbook_bytes("  \n{\"sheets\":{\"S\":{}}}", "x").sheet_names().size(), 1u);
  EXPECT_EQ(kind_of([] { open_workbook("/nonexistent/book.xlsx"); }), ErrorKind::kFileNotFound);
}

TEST(Edits, WithCellsIsPureAndDiffable) {
  GridBook book = row_book();
  GridBook edited = book.with_cells({{parse_cell("Model!H41"), CellValue::number(1)},
                                     {parse_cell("Notes!A1"), CellValue::text("n")}});
  EXPECT_EQ(read_cell(book, parse_cell("Model!H41")), CellValue::number(5829.56));
  EXPECT_EQ(diff_cells(book, edited), (std::vector<CellRef>{parse_cell("Model!H41"), parse_cell("Notes!A1")}));
  EXPECT_TRUE(diff_cells(book, book).empty());
}

// Property: anchored expansion agrees with a naive cell-by-cell walk.
TEST(GridProperty, ExpandMatchesScan) {
  testing::Gen g(5);
  for (int trial = 0; trial < 300; ++trial) {
    Sheet s("S");
    for (int k = 0; k < 200; ++k) {
      auto r = static_cast<std::int32_t>(g.integer(1, 20));
      auto c = static_cast<std::int32_t>(g.integer(1, 20));
      s.set(r, c, CellValue::number(g.uniform(-1, 1)));
    }
    GridBook book({s}, {});
    auto r = static_cast<std::int32_t>(g.integer(1, 20));
    auto c = static_cast<std::int32_t>(g.integer(1, 20));
    bool right = g.coin();
    auto want = testing::expand_scan(s, r, c, right);
    if (want.empty()) {
      ASSERT_THROW(read_series(book, CellRef{"S", r, c}, right ? Orientation::kRow : Orientation::kCol,
                               ReadMode::expand()),
                   Error);
      continue;
    }
    ASSERT_EQ(read_series(book, CellRef{"S", r, c}, right ? Orientation::kRow : Orientation::kCol,
                          ReadMode::expand())
                  .to_vector(),
              want);
  }
}

TEST(GridProperty, JsonRoundTripIsBitExact) {
  testing::Gen g(55);
  for (int trial = 0; trial < 100; ++trial) {
    Sheet s("Model");
    for (int k = 0; k < 50; ++k) {
      double v = std::ldexp(g.uniform(-1, 1), static_cast<int>(g.integer(-1000, 1000)));
      s.set(static_cast<std::int32_t>(g.integer(1, 100)), static_cast<std::int32_t>(g.integer(1, 100)),
            CellValue::number(v));
    }
    GridBook book({s}, {});
    ASSERT_EQ(load_gridbook_json(dump_gridbook_json(book)), book);
  }
}

}  // namespace
}  // namespace sheetaudit
