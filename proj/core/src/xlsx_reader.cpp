#include "xlsx_reader.hpp"

#include <expat.h>

#include <charconv>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sheetaudit/errors.hpp"
#include "zip_reader.hpp"

namespace sheetaudit::detail {

namespace {

using Attributes = std::map<std::string, std::string>;

std::string_view local_name(std::string_view qualified) {
  auto colon = qualified.rfind(':');
  return colon == std::string_view::npos ? qualified : qualified.substr(colon + 1);
}

// Thin callback wrapper around expat. Element and attribute names are passed
// through as written; handlers strip namespace prefixes where needed.
class XmlWalker {
 public:
  std::function<void(std::string_view, const Attributes&)> on_start;
  std::function<void(std::string_view)> on_end;
  std::function<void(std::string_view)> on_text;

  void parse(std::string_view xml, const std::string& part) {
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate(nullptr),
                                                                        &XML_ParserFree);
    XML_SetUserData(parser.get(), this);
    XML_SetElementHandler(parser.get(), &XmlWalker::start_thunk, &XmlWalker::end_thunk);
    XML_SetCharacterDataHandler(parser.get(), &XmlWalker::text_thunk);
    if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) ==
        XML_STATUS_ERROR) {
      if (pending_) std::rethrow_exception(pending_);
      throw Error(ErrorKind::kNotAWorkbook,
                  part + ": XML error at line " +
                      std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                      XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    if (pending_) std::rethrow_exception(pending_);
  }

 private:
  // Exceptions must not unwind through expat's C frames; park them and stop.
  template <typename Fn>
  static void guarded(void* self_ptr, Fn&& fn) {
    auto* self = static_cast<XmlWalker*>(self_ptr);
    if (self->pending_) return;
    try {
      fn(*self);
    } catch (...) {
      self->pending_ = std::current_exception();
    }
  }

  static void start_thunk(void* ud, const XML_Char* name, const XML_Char** atts) {
    guarded(ud, [&](XmlWalker& w) {
      if (!w.on_start) return;
      Attributes attrs;
      for (const XML_Char** a = atts; *a != nullptr; a += 2) attrs.emplace(a[0], a[1]);
      w.on_start(local_name(name), attrs);
    });
  }
  static void end_thunk(void* ud, const XML_Char* name) {
    guarded(ud, [&](XmlWalker& w) {
      if (w.on_end) w.on_end(local_name(name));
    });
  }
  static void text_thunk(void* ud, const XML_Char* s, int len) {
    guarded(ud, [&](XmlWalker& w) {
      if (w.on_text) w.on_text(std::string_view(s, static_cast<std::size_t>(len)));
    });
  }

  std::exception_ptr pending_;
};

std::optional<std::string> find_attr(const Attributes& attrs, std::string_view local) {
  for (const auto& [k, v] : attrs) {
    if (local_name(k) == local) return v;
  }
  return std::nullopt;
}

std::string dirname(const std::string& path) {
  auto slash = path.rfind('/');
  return slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
}

std::string basename(const std::string& path) {
  auto slash = path.rfind('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

// Resolves a relationship target against the directory of its source part.
std::string resolve_target(const std::string& source_dir, const std::string& target) {
  std::string joined = target.starts_with('/') ? target.substr(1) : source_dir + target;
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= joined.size()) {
    std::size_t slash = joined.find('/', start);
    std::string seg = joined.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
    if (seg == "..") {
      if (!parts.empty()) parts.pop_back();
    } else if (!seg.empty() && seg != ".") {
      parts.push_back(seg);
    }
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  std::string out;
  for (const std::string& p : parts) out += (out.empty() ? "" : "/") + p;
  return out;
}

std::map<std::string, std::string> read_relationships(const ZipArchive& zip, const std::string& part) {
  std::map<std::string, std::string> rels;
  std::string rels_part = dirname(part) + "_rels/" + basename(part) + ".rels";
  auto xml = zip.read(rels_part);
  if (!xml) return rels;
  XmlWalker walker;
  walker.on_start = [&](std::string_view name, const Attributes& attrs) {
    if (name != "Relationship") return;
    auto id = find_attr(attrs, "Id");
    auto target = find_attr(attrs, "Target");
    auto mode = find_attr(attrs, "TargetMode");
    if (id && target && mode.value_or("") != "External") {
      rels[*id] = resolve_target(dirname(part), *target);
    }
  };
  walker.parse(*xml, rels_part);
  return rels;
}

std::string locate_workbook(const ZipArchive& zip) {
  auto xml = zip.read("_rels/.rels");
  if (xml) {
    std::string found;
    XmlWalker walker;
    walker.on_start = [&](std::string_view name, const Attributes& attrs) {
      if (name != "Relationship" || !found.empty()) return;
      auto type = find_attr(attrs, "Type");
      auto target = find_attr(attrs, "Target");
      if (type && target && type->ends_with("/officeDocument")) found = resolve_target("", *target);
    };
    walker.parse(*xml, "_rels/.rels");
    if (!found.empty()) return found;
  }
  return "xl/workbook.xml";
}

std::vector<std::string> read_shared_strings(const ZipArchive& zip, const std::string& part) {
  std::vector<std::string> strings;
  auto xml = zip.read(part);
  if (!xml) return strings;
  bool in_si = false;
  bool in_t = false;
  int phonetic_depth = 0;
  std::string current;
  XmlWalker walker;
  walker.on_start = [&](std::string_view name, const Attributes&) {
    if (name == "si") {
      in_si = true;
      current.clear();
    } else if (name == "rPh") {
      ++phonetic_depth;
    } else if (name == "t" && in_si && phonetic_depth == 0) {
      in_t = true;
    }
  };
  walker.on_end = [&](std::string_view name) {
    if (name == "si") {
      strings.push_back(current);
      in_si = false;
    } else if (name == "rPh") {
      --phonetic_depth;
    } else if (name == "t") {
      in_t = false;
    }
  };
  walker.on_text = [&](std::string_view text) {
    if (in_t) current.append(text);
  };
  walker.parse(*xml, part);
  return strings;
}

struct SheetEntry {
  std::string name;
  std::string rel_id;
};

struct DefinedName {
  std::string name;
  std::string text;
  bool local = false;
};

double parse_number(std::string_view text, const std::string& where) {
  double v = 0.0;
  auto first = text.data();
  auto last = text.data() + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw Error(ErrorKind::kNotAWorkbook, where + ": bad numeric value \"" + std::string(text) + "\"");
  }
  return v;
}

void read_worksheet(const ZipArchive& zip, const std::string& part,
                    const std::vector<std::string>& shared, Sheet& sheet) {
  auto xml = zip.read(part);
  if (!xml) throw Error(ErrorKind::kNotAWorkbook, "missing worksheet part " + part);

  std::int32_t current_row = 0;
  std::int32_t next_col = 1;
  bool in_cell = false;
  CellRef cell;
  std::string type;
  std::optional<std::string> value;
  std::optional<std::string> inline_text;
  std::string formula;
  enum class Capture { kNone, kValue, kFormula, kInline } capture = Capture::kNone;
  bool in_inline = false;
  int phonetic_depth = 0;

  auto where = [&] { return part + " " + absolute_address(cell); };

  XmlWalker walker;
  walker.on_start = [&](std::string_view name, const Attributes& attrs) {
    if (name == "row") {
      auto r = find_attr(attrs, "r");
      current_row = r ? static_cast<std::int32_t>(parse_number(*r, part + " row")) : current_row + 1;
      next_col = 1;
    } else if (name == "c") {
      in_cell = true;
      auto r = find_attr(attrs, "r");
      if (r) {
        cell = parse_cell(*r);
      } else {
        cell = CellRef{"", current_row, next_col};
      }
      type = find_attr(attrs, "t").value_or("n");
      value.reset();
      inline_text.reset();
      formula.clear();
    } else if (in_cell && name == "v") {
      capture = Capture::kValue;
      value.emplace();
    } else if (in_cell && name == "f") {
      capture = Capture::kFormula;
    } else if (in_cell && name == "is") {
      in_inline = true;
      inline_text.emplace();
    } else if (in_inline && name == "rPh") {
      ++phonetic_depth;
    } else if (in_inline && name == "t" && phonetic_depth == 0) {
      capture = Capture::kInline;
    }
  };
  walker.on_text = [&](std::string_view text) {
    switch (capture) {
      case Capture::kValue: value->append(text); break;
      case Capture::kFormula: formula.append(text); break;
      case Capture::kInline: inline_text->append(text); break;
      case Capture::kNone: break;
    }
  };
  walker.on_end = [&](std::string_view name) {
    if (name == "v" || name == "f" || name == "t") {
      capture = Capture::kNone;
    } else if (name == "rPh") {
      --phonetic_depth;
    } else if (name == "is") {
      in_inline = false;
    } else if (name == "c") {
      in_cell = false;
      next_col = cell.col + 1;
      CellValue cv;
      if (type == "s") {
        if (value) {
          auto idx = static_cast<std::size_t>(parse_number(*value, where()));
          if (idx >= shared.size()) {
            throw Error(ErrorKind::kNotAWorkbook, where() + ": shared string index out of range");
          }
          cv = CellValue::text(shared[idx]);
        }
      } else if (type == "inlineStr") {
        if (inline_text) cv = CellValue::text(*inline_text);
      } else if (type == "str" || type == "d") {
        if (value) cv = CellValue::text(*value);
      } else if (type == "b") {
        if (value) cv = CellValue::boolean(*value == "1" || *value == "true");
      } else if (type == "e") {
        if (value) cv = CellValue::error(*value);
      } else if (value && !value->empty()) {
        cv = CellValue::number(parse_number(*value, where()));
      }
      sheet.set(cell.row, cell.col, std::move(cv));
      if (!formula.empty()) sheet.set_formula(cell.row, cell.col, formula);
    }
  };
  walker.parse(*xml, part);
}

}  // namespace

GridBook load_xlsx(std::string_view bytes, std::string_view origin) {
  ZipArchive zip(bytes, std::string(origin));
  const std::string workbook_part = locate_workbook(zip);
  auto workbook_xml = zip.read(workbook_part);
  if (!workbook_xml) {
    throw Error(ErrorKind::kNotAWorkbook,
                std::string(origin) + ": missing workbook part " + workbook_part);
  }

  std::vector<SheetEntry> entries;
  std::vector<DefinedName> defined;
  bool in_name = false;
  XmlWalker walker;
  walker.on_start = [&](std::string_view name, const Attributes& attrs) {
    if (name == "sheet") {
      SheetEntry e;
      e.name = find_attr(attrs, "name").value_or("");
      e.rel_id = find_attr(attrs, "id").value_or("");
      entries.push_back(std::move(e));
    } else if (name == "definedName") {
      in_name = true;
      DefinedName d;
      d.name = find_attr(attrs, "name").value_or("");
      d.local = find_attr(attrs, "localSheetId").has_value();
      defined.push_back(std::move(d));
    }
  };
  walker.on_end = [&](std::string_view name) {
    if (name == "definedName") in_name = false;
  };
  walker.on_text = [&](std::string_view text) {
    if (in_name) defined.back().text.append(text);
  };
  walker.parse(*workbook_xml, workbook_part);

  if (entries.empty()) {
    throw Error(ErrorKind::kNotAWorkbook, std::string(origin) + ": " + workbook_part + " lists no sheets");
  }

  const auto rels = read_relationships(zip, workbook_part);
  std::string shared_part = resolve_target(dirname(workbook_part), "sharedStrings.xml");
  const auto shared = read_shared_strings(zip, shared_part);

  std::vector<Sheet> sheets;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const SheetEntry& e = entries[i];
    std::string part;
    if (auto it = rels.find(e.rel_id); it != rels.end()) {
      part = it->second;
    } else {
      part = resolve_target(dirname(workbook_part), "worksheets/sheet" + std::to_string(i + 1) + ".xml");
    }
    Sheet sheet(e.name);
    read_worksheet(zip, part, shared, sheet);
    sheets.push_back(std::move(sheet));
  }

  // Names that do not denote a single in-grid rectangle on an existing sheet
  // (print areas, constants, #REF!, multi-area unions) are dropped.
  std::map<std::string, RangeRef> names;
  auto sheet_exists = [&](const std::string& n) {
    for (const Sheet& s : sheets) {
      if (s.name() == n) return true;
    }
    return false;
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (const DefinedName& d : defined) {
      if (d.local != (pass == 1) || d.name.empty() || d.name.starts_with("_xlnm.")) continue;
      std::string text = d.text.starts_with('=') ? d.text.substr(1) : d.text;
      try {
        RangeRef range = parse_range(text);
        if (range.sheet.empty() || !sheet_exists(range.sheet)) continue;
        names.emplace(d.name, range);
      } catch (const Error&) {
        continue;
      }
    }
  }
  return GridBook(std::move(sheets), std::move(names));
}

}  // namespace sheetaudit::detail
