#pragma once

#include <string_view>

#include "sheetaudit/grid.hpp"

namespace sheetaudit::detail {

// Reads an OOXML spreadsheet package: workbook.xml (sheets, defined names),
// the worksheet parts it references and sharedStrings.xml. Cells keep their
// cached values; formula text is retained alongside.
GridBook load_xlsx(std::string_view bytes, std::string_view origin);

}  // namespace sheetaudit::detail
