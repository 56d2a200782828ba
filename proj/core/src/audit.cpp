#include "sheetaudit/audit.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sheetaudit/errors.hpp"

namespace sheetaudit {

namespace {

using json = nlohmann::json;

[[noreturn]] void spec_error(const std::string& what) { throw Error(ErrorKind::kSpecError, what); }

struct InputField {
  const char* name;
  InputKind kind;
};

constexpr InputField kScalarInputs[] = {
    {"plant_size", InputKind::kReal},        {"derate", InputKind::kReal},
    {"start_month", InputKind::kInteger},    {"model_years", InputKind::kInteger},
    {"ppa_price", InputKind::kReal},         {"om_cost", InputKind::kReal},
    {"degradation_rate", InputKind::kReal},  {"inflation_rate", InputKind::kReal},
};

bool is_input_field(std::string_view name) {
  if (name == "irradiance") return true;
  for (const InputField& f : kScalarInputs) {
    if (name == f.name) return true;
  }
  return false;
}

std::size_t json_count(const json& v, const char* field) {
  if (!v.is_number() || v.get<double>() < 0 || std::floor(v.get<double>()) != v.get<double>()) {
    spec_error(std::string("\"") + field + "\" must be a non-negative integer");
  }
  return static_cast<std::size_t>(v.get<double>());
}

double json_tolerance(const json& v, const char* field) {
  if (!v.is_number()) spec_error(std::string("\"") + field + "\" must be a number");
  double d = v.get<double>();
  if (!std::isfinite(d) || d < 0) spec_error(std::string("\"") + field + "\" must be finite and >= 0");
  return d;
}

Orientation parse_orientation(const json& v) {
  if (!v.is_string()) spec_error("\"orientation\" must be \"row\" or \"col\"");
  std::string s = v.get<std::string>();
  if (s == "row") return Orientation::kRow;
  if (s == "col" || s == "column") return Orientation::kCol;
  spec_error("\"orientation\" must be \"row\" or \"col\", got \"" + s + "\"");
}

Binding parse_binding(const json& b, std::size_t index) {
  const std::string where = "bindings[" + std::to_string(index) + "]";
  if (!b.is_object()) spec_error(where + " must be an object");
  for (const auto& [key, value] : b.items()) {
    static const std::set<std::string> kKnown = {"node", "name", "sheet", "anchor", "orientation",
                                                 "offset", "length", "rtol", "atol"};
    if (!kKnown.count(key)) spec_error(where + ": unknown key \"" + key + "\"");
  }
  if (!b.contains("node") || !b["node"].is_string()) spec_error(where + ": missing \"node\"");
  Binding binding;
  std::string node = b["node"].get<std::string>();
  auto parsed = node_from_name(node);
  if (!parsed) spec_error(where + ": unknown node \"" + node + "\"");
  binding.node = *parsed;

  if (b.contains("name")) {
    if (b.contains("anchor") || b.contains("sheet")) spec_error(where + ": give either \"name\" or \"anchor\"");
    if (!b["name"].is_string()) spec_error(where + ": \"name\" must be a string");
    binding.target = NamedTarget{b["name"].get<std::string>()};
  } else {
    if (!b.contains("anchor") || !b["anchor"].is_string()) {
      spec_error(where + ": needs \"name\" or \"anchor\"");
    }
    AnchoredTarget t;
    try {
      t.anchor = parse_cell(b["anchor"].get<std::string>());
    } catch (const Error& e) {
      spec_error(where + ": " + e.message());
    }
    if (b.contains("sheet")) {
      if (!b["sheet"].is_string()) spec_error(where + ": \"sheet\" must be a string");
      std::string sheet = b["sheet"].get<std::string>();
      if (!t.anchor.sheet.empty() && t.anchor.sheet != sheet) {
        spec_error(where + ": anchor sheet disagrees with \"sheet\"");
      }
      t.anchor.sheet = sheet;
    }
    if (b.contains("orientation")) t.orientation = parse_orientation(b["orientation"]);
    binding.target = t;
  }
  if (b.contains("offset")) binding.offset = json_count(b["offset"], "offset");
  if (b.contains("length")) {
    binding.length = json_count(b["length"], "length");
    if (*binding.length == 0) spec_error(where + ": \"length\" must be >= 1");
  }
  if (b.contains("rtol")) binding.rtol = json_tolerance(b["rtol"], "rtol");
  if (b.contains("atol")) binding.atol = json_tolerance(b["atol"], "atol");
  return binding;
}

InputSource parse_source_json(const json& v, const std::string& field) {
  if (v.is_number()) {
    InputSource s;
    s.kind = InputSource::Kind::kLiteral;
    s.literal = v.get<double>();
    return s;
  }
  if (!v.is_string()) spec_error("input \"" + field + "\" must be a source string or a number");
  try {
    return InputSource::parse(v.get<std::string>());
  } catch (const Error& e) {
    spec_error("input \"" + field + "\": " + e.message());
  }
}

std::int64_t total_length(const ModelInputs& in) { return static_cast<std::int64_t>(in.model_years) * 12; }

CellValue read_source_scalar(const GridBook& book, const InputSource& src, const std::string& field) {
  switch (src.kind) {
    case InputSource::Kind::kLiteral: return CellValue::number(src.literal);
    case InputSource::Kind::kCell: return read_cell(book, parse_cell(src.ref));
    case InputSource::Kind::kName:
    case InputSource::Kind::kRange: {
      RangeRef range = src.kind == InputSource::Kind::kName ? resolve_name(book, src.ref) : parse_range(src.ref);
      if (!range.is_single_cell()) {
        throw Error(ErrorKind::kTypeMismatch, "input " + field + ": " + src.to_string() +
                                                  " spans " + std::to_string(range.size()) + " cells");
      }
      return read_cell(book, range.top_left);
    }
  }
  return {};
}

NumericSeries read_source_series(const GridBook& book, const InputSource& src) {
  switch (src.kind) {
    case InputSource::Kind::kCell:
      return read_series(book, parse_cell(src.ref), Orientation::kCol, ReadMode::expand());
    case InputSource::Kind::kName:
      return read_range(book, resolve_name(book, src.ref));
    case InputSource::Kind::kRange:
      return read_range(book, parse_range(src.ref));
    case InputSource::Kind::kLiteral:
      break;
  }
  throw Error(ErrorKind::kInvalidInput, "irradiance cannot be a literal");
}

nlohmann::ordered_json node_result_json(const NodeResult& r) {
  nlohmann::ordered_json j;
  j["node"] = std::string(node_name(r.node));
  j["bound"] = r.bound;
  j["pass"] = r.pass ? nlohmann::ordered_json(*r.pass) : nlohmann::ordered_json(nullptr);
  j["mismatch_fraction"] = r.mismatch_fraction ? nlohmann::ordered_json(*r.mismatch_fraction) : nlohmann::ordered_json(nullptr);
  return j;
}

std::string format_fraction(double f) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << f;
  return os.str();
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (const std::string& p : parts) out += (out.empty() ? "" : sep) + p;
  return out;
}

AuditReport error_report(const std::string& message) {
  AuditReport r;
  r.verdict = Verdict::kError;
  r.error = message;
  return r;
}

struct NodeComparison {
  const Binding* binding = nullptr;
  ComparisonResult result;
};

void check_unique_bindings(const BindingSpec& spec) {
  std::set<Node> seen;
  for (const Binding& b : spec.bindings) {
    if (!seen.insert(b.node).second) {
      spec_error("node \"" + std::string(node_name(b.node)) + "\" is bound more than once");
    }
  }
}

std::size_t expected_length(const Binding& binding, const ModelInputs& in) {
  const auto months = static_cast<std::size_t>(total_length(in));
  if (binding.length && *binding.length != months) {
    throw Error(ErrorKind::kLengthMismatch, "binding length " + std::to_string(*binding.length) +
                                                " but the model runs " + std::to_string(months) + " months");
  }
  return months;
}

NodeComparison compare_node(const GridBook& book, const BindingSpec& spec, const Binding& binding,
                            const ModelRun& run, const ModelInputs& inputs) {
  NodeComparison c;
  c.binding = &binding;
  try {
    NumericSeries actual = extract_bound_series(book, binding, expected_length(binding, inputs));
    c.result = isclose(actual, run.at(binding.node), binding.effective_tolerance(spec.tolerance));
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(node_name(binding.node)) + ": " + e.message());
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------- spec

ToleranceSpec Binding::effective_tolerance(const ToleranceSpec& fallback) const {
  return ToleranceSpec{rtol.value_or(fallback.rtol), atol.value_or(fallback.atol)};
}

InputSource InputSource::parse(std::string_view text) {
  InputSource s;
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::kSpecError, "input source \"" + std::string(text) +
                                           "\" needs a name:, cell: or range: prefix");
  }
  std::string_view prefix = text.substr(0, colon);
  s.ref = std::string(text.substr(colon + 1));
  if (prefix == "name") {
    s.kind = Kind::kName;
  } else if (prefix == "cell") {
    s.kind = Kind::kCell;
    parse_cell(s.ref);
  } else if (prefix == "range") {
    s.kind = Kind::kRange;
    parse_range(s.ref);
  } else {
    throw Error(ErrorKind::kSpecError, "unknown input source prefix \"" + std::string(prefix) + "\"");
  }
  if (s.ref.empty()) throw Error(ErrorKind::kSpecError, "empty input source \"" + std::string(text) + "\"");
  return s;
}

std::string InputSource::to_string() const {
  switch (kind) {
    case Kind::kName: return "name:" + ref;
    case Kind::kCell: return "cell:" + ref;
    case Kind::kRange: return "range:" + ref;
    case Kind::kLiteral: {
      std::ostringstream os;
      os.precision(17);
      os << literal;
      return os.str();
    }
  }
  return ref;
}

const Binding* BindingSpec::find(Node node) const {
  for (const Binding& b : bindings) {
    if (b.node == node) return &b;
  }
  return nullptr;
}

BindingSpec parse_binding_spec(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    spec_error(std::string("binding spec: ") + e.what());
  }
  if (!doc.is_object()) spec_error("binding spec must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    static const std::set<std::string> kKnown = {"workbook", "inputs", "model_years_source", "bindings",
                                                 "rtol", "atol"};
    if (!kKnown.count(key)) spec_error("unknown top-level key \"" + key + "\"");
  }

  BindingSpec spec;
  if (doc.contains("workbook")) {
    if (!doc["workbook"].is_string()) spec_error("\"workbook\" must be a path string");
    std::filesystem::path p = doc["workbook"].get<std::string>();
    spec.workbook = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  }
  if (doc.contains("rtol")) spec.tolerance.rtol = json_tolerance(doc["rtol"], "rtol");
  if (doc.contains("atol")) spec.tolerance.atol = json_tolerance(doc["atol"], "atol");

  if (!doc.contains("inputs") || !doc["inputs"].is_object()) spec_error("missing \"inputs\" object");
  const json& inputs = doc["inputs"];
  if (inputs.contains("from_workbook")) {
    if (inputs.size() != 1) spec_error("\"inputs\" mixes from_workbook with inline values");
    const json& src = inputs["from_workbook"];
    if (!src.is_object()) spec_error("\"from_workbook\" must be an object");
    WorkbookInputs wb;
    for (const auto& [field, value] : src.items()) {
      if (!is_input_field(field)) spec_error("unknown input \"" + field + "\"");
      wb.sources.emplace(field, parse_source_json(value, field));
    }
    if (doc.contains("model_years_source")) {
      if (wb.sources.count("model_years")) spec_error("model_years given twice");
      wb.sources.emplace("model_years", parse_source_json(doc["model_years_source"], "model_years"));
    }
    if (!wb.sources.count("irradiance")) spec_error("from_workbook is missing \"irradiance\"");
    if (wb.sources.at("irradiance").kind == InputSource::Kind::kLiteral) {
      spec_error("irradiance must come from a cell, range or name");
    }
    for (const InputField& f : kScalarInputs) {
      if (!wb.sources.count(f.name)) spec_error(std::string("from_workbook is missing \"") + f.name + "\"");
    }
    spec.inputs = std::move(wb);
  } else {
    json inline_inputs = inputs;
    if (doc.contains("model_years_source")) {
      const json& v = doc["model_years_source"];
      if (!v.is_number()) spec_error("model_years_source must be numeric with inline inputs");
      inline_inputs["model_years"] = v;
    }
    try {
      spec.inputs = parse_model_inputs_json(inline_inputs.dump());
    } catch (const Error& e) {
      spec_error("inline inputs: " + e.message());
    }
  }

  if (!doc.contains("bindings") || !doc["bindings"].is_array()) spec_error("missing \"bindings\" array");
  std::size_t i = 0;
  for (const json& b : doc["bindings"]) spec.bindings.push_back(parse_binding(b, i++));
  check_unique_bindings(spec);
  return spec;
}

BindingSpec load_binding_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kFileNotFound, path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_binding_spec(text, path.parent_path());
}

// ---------------------------------------------------------------- inputs

InputValue coerce_input_cell(const CellValue& value, InputKind kind) {
  if (!value.is_number()) {
    throw Error(ErrorKind::kTypeMismatch, "input cell holds " + value.describe() + ", expected a Number");
  }
  double v = value.as_number();
  if (kind == InputKind::kReal) return v;
  if (!std::isfinite(v)) throw Error(ErrorKind::kNotAnInteger, value.describe());
  double whole = std::trunc(v);
  if (std::fabs(v - whole) >= 1e-9 || std::fabs(whole) > 9.0e15) {
    throw Error(ErrorKind::kNotAnInteger, value.describe() + " is not an integer");
  }
  return static_cast<std::int64_t>(whole);
}

ModelInputs resolve_inputs(const GridBook& book, const BindingSpec& spec) {
  if (const auto* in = std::get_if<ModelInputs>(&spec.inputs)) return *in;
  const auto& wb = std::get<WorkbookInputs>(spec.inputs);

  ModelInputs in;
  auto scalar = [&](const InputField& f) -> InputValue {
    const InputSource& src = wb.sources.at(f.name);
    try {
      return coerce_input_cell(read_source_scalar(book, src, f.name), f.kind);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string("input ") + f.name + " (" + src.to_string() + "): " + e.message());
    }
  };
  auto as_int = [](const InputValue& v, const char* field) {
    auto i = std::get<std::int64_t>(v);
    if (i < -1'000'000 || i > 1'000'000) {
      throw Error(ErrorKind::kInvalidInput, std::string(field) + " is out of range");
    }
    return static_cast<int>(i);
  };
  for (const InputField& f : kScalarInputs) {
    InputValue v = scalar(f);
    std::string_view name = f.name;
    if (name == "plant_size") in.plant_size = std::get<double>(v);
    else if (name == "derate") in.derate = std::get<double>(v);
    else if (name == "start_month") in.start_month = as_int(v, f.name);
    else if (name == "model_years") in.model_years = as_int(v, f.name);
    else if (name == "ppa_price") in.ppa_price = std::get<double>(v);
    else if (name == "om_cost") in.om_cost = std::get<double>(v);
    else if (name == "degradation_rate") in.degradation_rate = std::get<double>(v);
    else if (name == "inflation_rate") in.inflation_rate = std::get<double>(v);
  }
  const InputSource& irr = wb.sources.at("irradiance");
  try {
    in.irradiance = read_source_series(book, irr);
  } catch (const Error& e) {
    throw Error(e.kind(), "input irradiance (" + irr.to_string() + "): " + e.message());
  }
  validate_inputs(in);
  return in;
}

// ---------------------------------------------------------------- extraction

BoundLocation locate_binding(const GridBook& book, const Binding& binding) {
  if (const auto* named = std::get_if<NamedTarget>(&binding.target)) {
    RangeRef range = resolve_name(book, named->name);
    if (range.rows() != 1 && range.cols() != 1) {
      throw Error(ErrorKind::kTypeMismatch, "defined name \"" + named->name + "\" is two-dimensional (" +
                                                format_a1(range) + ")");
    }
    // A 1x1 name reads as a row.
    Orientation o = range.rows() == 1 ? Orientation::kRow : Orientation::kCol;
    return {range.top_left, o};
  }
  const auto& anchored = std::get<AnchoredTarget>(binding.target);
  CellRef anchor = anchored.anchor;
  anchor.sheet = book.resolve_sheet_name(anchor.sheet);
  return {anchor, anchored.orientation};
}

NumericSeries extract_bound_series(const GridBook& book, const Binding& binding, std::size_t length) {
  NumericSeries full;
  if (const auto* named = std::get_if<NamedTarget>(&binding.target)) {
    locate_binding(book, binding);
    full = read_range(book, resolve_name(book, named->name));
  } else {
    BoundLocation loc = locate_binding(book, binding);
    full = read_series(book, loc.anchor, loc.orientation, ReadMode::expand());
  }
  const std::size_t needed = binding.offset + length;
  if (full.size() < needed) {
    throw Error(ErrorKind::kLengthError,
                "found " + std::to_string(full.size()) + " cells, needed " + std::to_string(needed));
  }
  auto first = full.begin() + static_cast<std::ptrdiff_t>(binding.offset);
  return NumericSeries(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(length)));
}

NumericSeries extract_bound_series(const GridBook& book, const Binding& binding) {
  if (!binding.length) {
    throw Error(ErrorKind::kSpecError,
                std::string(node_name(binding.node)) + ": binding has no explicit length");
  }
  return extract_bound_series(book, binding, *binding.length);
}

// ---------------------------------------------------------------- audit

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kError: return "error";
  }
  return "error";
}

AuditReport validate(const GridBook& book, const BindingSpec& spec) {
  try {
    check_unique_bindings(spec);
    spec.tolerance.validate();
    const Binding* terminal = spec.find(kTerminalNode);
    if (!terminal) spec_error("terminal node ebitda_n is not bound");
    ModelInputs inputs = resolve_inputs(book, spec);
    ModelRun run = run_model(inputs);
    NodeComparison c = compare_node(book, spec, *terminal, run, inputs);
    AuditReport report;
    report.nodes.push_back(
        NodeResult{kTerminalNode, true, c.result.all_close(), c.result.mismatch_fraction()});
    report.verdict = c.result.all_close() ? Verdict::kPass : Verdict::kFail;
    return report;
  } catch (const Error& e) {
    return error_report(e.what());
  }
}

AuditReport audit(const GridBook& book, const BindingSpec& spec) {
  try {
    check_unique_bindings(spec);
    spec.tolerance.validate();
    if (!spec.find(kTerminalNode)) spec_error("terminal node ebitda_n is not bound");
    ModelInputs inputs = resolve_inputs(book, spec);
    ModelRun run = run_model(inputs);

    std::map<Node, NodeComparison> compared;
    for (Node node : kAllNodes) {
      if (const Binding* b = spec.find(node)) compared.emplace(node, compare_node(book, spec, *b, run, inputs));
    }

    AuditReport report;
    for (Node node : kAllNodes) {
      NodeResult r{node, false, std::nullopt, std::nullopt};
      if (auto it = compared.find(node); it != compared.end()) {
        r.bound = true;
        r.pass = it->second.result.all_close();
        r.mismatch_fraction = it->second.result.mismatch_fraction();
      }
      report.nodes.push_back(r);
    }

    for (const auto& [node, cmp] : compared) {
      if (cmp.result.all_close()) continue;
      bool blamed_upstream = false;
      bool unverified = false;
      for (Node up : ancestors(node)) {
        auto it = compared.find(up);
        if (it == compared.end()) {
          unverified = true;
        } else if (!it->second.result.all_close()) {
          blamed_upstream = true;
        }
      }
      if (blamed_upstream) continue;
      BoundLocation loc = locate_binding(book, *cmp.binding);
      Culprit c;
      c.node = node;
      c.sheet = loc.anchor.sheet;
      c.error_ranges = runs_to_a1(loc.anchor, loc.orientation, cmp.binding->offset, cmp.result.mismatch_runs);
      c.correct_ranges = runs_to_a1(loc.anchor, loc.orientation, cmp.binding->offset, cmp.result.match_runs);
      c.upstream_unverified = unverified;
      report.culprits.push_back(std::move(c));
    }

    report.verdict = compared.at(kTerminalNode).result.all_close() ? Verdict::kPass : Verdict::kFail;
    return report;
  } catch (const Error& e) {
    return error_report(e.what());
  }
}

std::string report_to_json(const AuditReport& report) {
  nlohmann::ordered_json doc;
  doc["verdict"] = std::string(verdict_name(report.verdict));
  if (report.error) doc["error"] = *report.error;
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const NodeResult& r : report.nodes) doc["nodes"].push_back(node_result_json(r));
  doc["culprits"] = nlohmann::ordered_json::array();
  for (const Culprit& c : report.culprits) {
    nlohmann::ordered_json j;
    j["node"] = std::string(node_name(c.node));
    j["sheet"] = c.sheet;
    j["error_ranges"] = c.error_ranges;
    j["correct_ranges"] = c.correct_ranges;
    j["upstream_unverified"] = c.upstream_unverified;
    doc["culprits"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::string report_to_text(const AuditReport& report) {
  std::ostringstream os;
  switch (report.verdict) {
    case Verdict::kPass: os << "PASS\n"; break;
    case Verdict::kFail: os << "FAIL\n"; break;
    case Verdict::kError: os << "ERROR: " << report.error.value_or("unknown error") << "\n"; break;
  }
  if (!report.nodes.empty()) {
    os << "\nnode        bound  result  mismatch\n";
    for (const NodeResult& r : report.nodes) {
      std::string name(node_name(r.node));
      name.resize(12, ' ');
      os << name << (r.bound ? "yes    " : "no     ");
      if (r.pass) {
        os << (*r.pass ? "pass    " : "FAIL    ") << format_fraction(*r.mismatch_fraction);
      } else {
        os << "-       -";
      }
      os << "\n";
    }
  }
  if (!report.culprits.empty()) os << "\n";
  for (const Culprit& c : report.culprits) {
    os << "culprit: " << node_name(c.node) << "  error: " << join(c.error_ranges, ", ");
    if (!c.correct_ranges.empty()) os << "  correct: " << join(c.correct_ranges, ", ");
    if (!c.sheet.empty()) os << "  sheet: " << c.sheet;
    if (c.upstream_unverified) os << "  (upstream unverified)";
    os << "\n";
  }
  return os.str();
}

}  // namespace sheetaudit
