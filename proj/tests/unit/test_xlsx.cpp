#include <gtest/gtest.h>

#include <fstream>
#include <iterator>

#include "oracles.hpp"
#include "sheetaudit/errors.hpp"
#include "sheetaudit/grid.hpp"
#include "sheetaudit/oracle.hpp"

namespace sheetaudit {
namespace {

const std::string kFixtures = SHEETAUDIT_FIXTURE_DIR;

std::string slurp(const std::string& name) {
  std::ifstream in(kFixtures + "/" + name, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorKind::kSpecError;
}

// Offsets of every central-directory header in a ZIP archive.
std::vector<std::size_t> central_headers(const std::string& zip) {
  std::vector<std::size_t> out;
  for (std::size_t at = zip.find("PK\x01\x02"); at != std::string::npos; at = zip.find("PK\x01\x02", at + 4)) {
    out.push_back(at);
  }
  return out;
}

TEST(Xlsx, MinimalFixture) {
  GridBook book = open_workbook(kFixtures + "/minimal.xlsx");
  EXPECT_EQ(book.sheet_names(), (std::vector<std::string>{"Model", "Notes"}));
  EXPECT_EQ(read_cell(book, parse_cell("Model!B2")), CellValue::number(500));
  EXPECT_EQ(read_cell(book, parse_cell("Notes!A1")), CellValue::text("scratch"));
  EXPECT_EQ(read_range(book, resolve_name(book, "answer")), (NumericSeries{500}));
}

TEST(Xlsx, ZeroSheetsRejected) {
  EXPECT_EQ(kind_of([] { open_workbook(kFixtures + "/zero_sheets.xlsx"); }), ErrorKind::kNotAWorkbook);
}

TEST(Xlsx, CompoundFileRejected) {
  EXPECT_EQ(kind_of([] { open_workbook(kFixtures + "/cfb_header.xls"); }), ErrorKind::kUnsupportedFeature);
}

TEST(Xlsx, PristineLayout) {
  GridBook book = open_workbook(kFixtures + "/pristine.xlsx");
  EXPECT_EQ(read_cell(book, parse_cell("D8")), CellValue::number(5));
  EXPECT_EQ(read_cell(book, parse_cell("D10")), CellValue::number(1));
  EXPECT_EQ(read_cell(book, parse_cell("D45")), CellValue::number(0.02));
  EXPECT_EQ(read_cell(book, parse_cell("B41")), CellValue::text("Nominal generation (kWh)"));
  EXPECT_EQ(read_cell(book, parse_cell("B21")), CellValue::text("O&M cost ($/kWh)"));

  NumericSeries irr = read_series(book, parse_cell("D26"), Orientation::kCol, ReadMode::expand());
  EXPECT_EQ(irr.size(), 12u);
  EXPECT_EQ(irr[0], 118);

  NumericSeries nom = read_series(book, parse_cell("G41"), Orientation::kRow, ReadMode::expand());
  ASSERT_EQ(nom.size(), 60u);
  EXPECT_EQ(nom[0], 1000 * 0.8 * 118);
  EXPECT_EQ(read_range(book, resolve_name(book, "ebitda_n")).size(), 60u);
  EXPECT_EQ(format_a1(resolve_name(book, "ebitda_n")), "Model!$G$56:$BN$56");
  EXPECT_EQ(format_a1(resolve_name(book, "plant_size")), "Model!$D$18");
  // Print areas are not data names.
  EXPECT_FALSE(book.defined_names().count("_xlnm.Print_Area"));
  // Pre-operations column of the inflation row.
  EXPECT_EQ(read_cell(book, parse_cell("F45")), CellValue::number(1));
}

TEST(Xlsx, FormulaCellsKeepCachedValuesAndText) {
  GridBook book = open_workbook(kFixtures + "/pristine.xlsx");
  const Sheet& s = book.sheet("Model");
  ASSERT_TRUE(s.formula(43, 7).has_value());
  EXPECT_EQ(*s.formula(43, 7), "G41/G42");
  EXPECT_TRUE(s.at(43, 7).is_number());
  EXPECT_FALSE(s.formula(18, 4).has_value());
}

TEST(Xlsx, CachedValuesMatchOracle) {
  GridBook book = open_workbook(kFixtures + "/pristine.xlsx");
  ModelInputs in;
  in.plant_size = 1000;
  in.derate = 0.8;
  in.irradiance = read_series(book, parse_cell("D26"), Orientation::kCol, ReadMode::expand());
  in.start_month = 1;
  in.model_years = 5;
  in.ppa_price = 0.08;
  in.om_cost = 0.02;
  in.degradation_rate = 0.005;
  in.inflation_rate = 0.02;
  ModelRun run = run_model(in);
  const std::pair<Node, int> rows[] = {{Node::kOpsMonths, 13}, {Node::kNomGen, 41}, {Node::kDegIndex, 42},
                                       {Node::kNetGen, 43},    {Node::kInfIndex, 45}, {Node::kEbitdaReal, 51},
                                       {Node::kEbitdaNominal, 56}};
  // The fixture's cached values come from numpy, whose pow can differ from
  // libm by an ulp.
  for (auto [node, row] : rows) {
    NumericSeries cached = read_series(book, CellRef{"Model", row, 7}, Orientation::kRow, ReadMode::expand());
    ASSERT_EQ(cached.size(), run.at(node).size()) << node_name(node);
    for (std::size_t i = 0; i < cached.size(); ++i) {
      EXPECT_LE(testing::rel_error(cached[i], run.at(node)[i]), 1e-15) << node_name(node) << "[" << i << "]";
    }
  }
}

TEST(Xlsx, EdgeCaseParts) {
  GridBook book = open_workbook(kFixtures + "/edge_cases.xlsx");
  EXPECT_EQ(book.sheet_names(), (std::vector<std::string>{"Data & Notes", "Second"}));
  auto at = [&](const char* a1) { return read_cell(book, parse_cell(std::string("'Data & Notes'!") + a1)); };
  EXPECT_EQ(at("A1"), CellValue::text("plain & simple"));
  EXPECT_EQ(at("B1"), CellValue::text("inline"));
  EXPECT_EQ(at("C1"), CellValue::boolean(true));
  EXPECT_EQ(at("D1"), CellValue::error("#DIV/0!"));
  EXPECT_EQ(at("E1"), CellValue::text("ab"));
  EXPECT_EQ(at("F1"), CellValue::number(-1.5e-3));
  EXPECT_TRUE(at("G1").is_empty());
  EXPECT_EQ(at("A2"), CellValue::number(10));
  EXPECT_EQ(at("B2"), CellValue::number(20));
  EXPECT_EQ(at("E2"), CellValue::number(50));
  EXPECT_EQ(at("F2"), CellValue::number(60));
  EXPECT_EQ(at("A5"), CellValue::text("rich text"));
  EXPECT_EQ(read_cell(book, parse_cell("Second!A1")), CellValue::number(42));
}

TEST(Xlsx, EdgeCaseNames) {
  GridBook book = open_workbook(kFixtures + "/edge_cases.xlsx");
  std::vector<std::string> names;
  for (const auto& [n, r] : book.defined_names()) names.push_back(n);
  // #REF!, constants, names on missing sheets and built-ins are dropped.
  EXPECT_EQ(names, (std::vector<std::string>{"local", "whole"}));
  // The workbook-scoped definition wins over the sheet-scoped one.
  EXPECT_EQ(read_range(book, resolve_name(book, "whole")), (NumericSeries{10, 20}));
}

TEST(Xlsx, SheetsInLoaderMatchGridbookJsonRoundTrip) {
  GridBook book = open_workbook(kFixtures + "/minimal.xlsx");
  GridBook back = load_gridbook_json(dump_gridbook_json(book));
  EXPECT_TRUE(diff_cells(book, back).empty());
  EXPECT_EQ(back.defined_names(), book.defined_names());
}

TEST(XlsxDamage, Truncated) {
  std::string bytes = slurp("pristine.xlsx");
  for (std::size_t keep : {std::size_t{4}, std::size_t{30}, bytes.size() / 2, bytes.size() - 10}) {
    EXPECT_EQ(kind_of([&] { load_workbook_bytes(bytes.substr(0, keep), "cut.xlsx"); }), ErrorKind::kNotAWorkbook)
        << keep;
  }
}

TEST(XlsxDamage, CrcMismatch) {
  std::string bytes = slurp("minimal.xlsx");
  // [Content_Types].xml is stored uncompressed at the very start.
  std::size_t at = bytes.find("<Types");
  ASSERT_NE(at, std::string::npos);
  bytes[at + 1] = 'X';
  try {
    load_workbook_bytes(bytes, "bad.xlsx");
  } catch (const Error& e) {
    // The content-types part is never read; a damaged worksheet would be.
    FAIL() << e.what();
  }
  std::string sheet = slurp("edge_cases.xlsx");
  std::size_t second = sheet.find("<sheetData><row r=\"1\"><c r=\"A1\"><v>42");
  ASSERT_NE(second, std::string::npos);
  sheet[second + 40] = '7';
  try {
    load_workbook_bytes(sheet, "bad.xlsx");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotAWorkbook);
    EXPECT_NE(std::string(e.what()).find("CRC"), std::string::npos) << e.what();
  }
}

TEST(XlsxDamage, EncryptedEntryRejected) {
  std::string bytes = slurp("minimal.xlsx");
  for (std::size_t at : central_headers(bytes)) bytes[at + 8] = static_cast<char>(bytes[at + 8] | 0x01);
  EXPECT_EQ(kind_of([&] { load_workbook_bytes(bytes, "enc.xlsx"); }), ErrorKind::kUnsupportedFeature);
}

TEST(XlsxDamage, UnknownCompressionRejected) {
  std::string bytes = slurp("minimal.xlsx");
  for (std::size_t at : central_headers(bytes)) bytes[at + 10] = 14;  // LZMA
  EXPECT_EQ(kind_of([&] { load_workbook_bytes(bytes, "lzma.xlsx"); }), ErrorKind::kUnsupportedFeature);
}

TEST(XlsxDamage, MalformedXml) {
  try {
    open_workbook(kFixtures + "/malformed_xml.xlsx");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotAWorkbook);
    EXPECT_NE(std::string(e.what()).find("sheet1.xml"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace sheetaudit
