#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "sheetaudit/a1.hpp"
#include "sheetaudit/audit.hpp"
#include "sheetaudit/errors.hpp"
#include "sheetaudit/faultlab.hpp"
#include "sheetaudit/grid.hpp"

namespace sheetaudit::cli {

namespace {

namespace fs = std::filesystem;

enum class Format { kText, kJson };

struct Options {
  std::string spec;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::string format;
  std::string workbook;
  std::string range;
  std::string expand;
  std::string fault;
  std::string out;
  std::string pristine_out;
};

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kFileNotFound, path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::kFileNotFound, "cannot write " + path.string());
  os << text;
  if (!os.flush()) throw Error(ErrorKind::kFileNotFound, "cannot write " + path.string());
}

Format pick_format(const std::string& flag, bool terminal) {
  if (flag.empty()) return terminal ? Format::kText : Format::kJson;
  return flag == "text" ? Format::kText : Format::kJson;
}

GridBook spec_book(const BindingSpec& spec) {
  if (!spec.workbook) throw Error(ErrorKind::kSpecError, "binding spec names no \"workbook\"");
  return open_workbook(*spec.workbook);
}

int emit_report(const AuditReport& report, bool audit_mode, Format format, std::ostream& out,
                std::ostream& err) {
  out << (format == Format::kJson ? report_to_json(report) : report_to_text(report));
  if (report.verdict == Verdict::kError) {
    err << "error: " << one_line(report.error.value_or("unknown error")) << "\n";
    return kExitError;
  }
  if (report.verdict == Verdict::kFail) return kExitMismatch;
  if (audit_mode && !report.culprits.empty()) return kExitMismatch;
  return kExitPass;
}

int cmd_validate(const Options& o, Format format, std::ostream& out, std::ostream& err) {
  BindingSpec spec = load_binding_spec(o.spec);
  if (o.rtol) spec.tolerance.rtol = *o.rtol;
  if (o.atol) spec.tolerance.atol = *o.atol;
  GridBook book = spec_book(spec);
  return emit_report(validate(book, spec), false, format, out, err);
}

int cmd_audit(const Options& o, Format format, std::ostream& out, std::ostream& err) {
  BindingSpec spec = load_binding_spec(o.spec);
  if (o.rtol) spec.tolerance.rtol = *o.rtol;
  if (o.atol) spec.tolerance.atol = *o.atol;
  GridBook book = spec_book(spec);
  return emit_report(audit(book, spec), true, format, out, err);
}

int cmd_extract(const Options& o, std::ostream& out) {
  GridBook book = open_workbook(o.workbook);
  RangeRef range;
  try {
    A1Ref ref = parse_a1(o.range);
    if (const auto* cell = std::get_if<CellRef>(&ref)) {
      range = make_range(*cell, *cell);
    } else {
      range = std::get<RangeRef>(ref);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kParseError) throw;
    range = resolve_name(book, o.range);
  }
  const std::string& sheet = book.resolve_sheet_name(range.sheet);
  CellRef top_left = range.top_left, bottom_right = range.bottom_right;
  top_left.sheet = bottom_right.sheet = sheet;
  range = make_range(top_left, bottom_right);

  NumericSeries values;
  if (!o.expand.empty()) {
    if (!range.is_single_cell()) {
      throw Error(ErrorKind::kInvalidInput, "--expand needs a single anchor cell, got " + format_a1(range));
    }
    Orientation dir = o.expand == "right" ? Orientation::kRow : Orientation::kCol;
    values = read_series(book, range.top_left, dir, ReadMode::expand());
  } else {
    values = read_range(book, range);
  }
  std::string text;
  for (double v : values) text += shortest(v) + "\n";
  out << text;
  return kExitPass;
}

int cmd_faultlab(const Options& o, Format format, std::ostream& out) {
  BindingSpec spec = load_binding_spec(o.spec);
  FaultSpec fault = parse_fault_spec(read_file(o.fault));
  GridBook book = [&] {
    if (spec.workbook) return open_workbook(*spec.workbook);
    const auto* inputs = std::get_if<ModelInputs>(&spec.inputs);
    if (!inputs) throw Error(ErrorKind::kSpecError, "without a workbook the spec needs inline inputs");
    return build_consistent_gridbook(*inputs, spec);
  }();
  Injection inj = inject(book, fault, spec);
  const std::string truth = injection_truth_json(inj);
  if (!o.pristine_out.empty()) write_file(o.pristine_out, dump_gridbook_json(book));
  write_file(o.out, dump_gridbook_json(inj.book));
  write_file(o.out + ".truth.json", truth);
  if (format == Format::kJson) {
    out << truth;
  } else {
    out << fault_kind_name(inj.fault.kind) << " on " << node_name(inj.fault.node) << ": "
        << inj.tampered_cells.size() << " cells tampered";
    if (!inj.propagated_cells.empty()) out << ", " << inj.propagated_cells.size() << " propagated";
    out << "\nwrote " << o.out << "\n";
  }
  return kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool out_is_terminal) {
  CLI::App app{"Audit spreadsheet models against an independent oracle", "sheetaudit"};
  app.require_subcommand(1);
  Options o;

  auto format_opt = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Report format (default: text on a terminal, json otherwise)")
        ->check(CLI::IsMember({"text", "json"}));
  };
  auto tolerance_opts = [&](CLI::App* sub) {
    sub->add_option("--rtol", o.rtol, "Relative tolerance overriding the spec default")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--atol", o.atol, "Absolute tolerance overriding the spec default")
        ->check(CLI::NonNegativeNumber);
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "Compare the terminal node against the oracle");
  validate_cmd->add_option("--spec", o.spec, "Binding spec JSON")->required();
  tolerance_opts(validate_cmd);
  format_opt(validate_cmd);

  CLI::App* audit_cmd = app.add_subcommand("audit", "Compare every bound node and localize culprits");
  audit_cmd->add_option("--spec", o.spec, "Binding spec JSON")->required();
  tolerance_opts(audit_cmd);
  format_opt(audit_cmd);

  CLI::App* extract_cmd = app.add_subcommand("extract", "Print a numeric range, one value per line");
  extract_cmd->add_option("--workbook", o.workbook, "Workbook (.xlsx or gridbook JSON)")->required();
  extract_cmd->add_option("--range", o.range, "A1 reference or defined name")->required();
  extract_cmd->add_option("--expand", o.expand, "Read from the anchor until the first empty cell")
      ->check(CLI::IsMember({"right", "down"}));

  CLI::App* faultlab_cmd = app.add_subcommand("faultlab", "Write a workbook with an injected fault");
  faultlab_cmd->add_option("--spec", o.spec, "Binding spec JSON")->required();
  faultlab_cmd->add_option("--fault", o.fault, "Fault spec JSON")->required();
  faultlab_cmd->add_option("--out", o.out, "Tampered gridbook JSON; truth goes to <out>.truth.json")->required();
  faultlab_cmd->add_option("--pristine-out", o.pristine_out, "Also write the untouched book");
  format_opt(faultlab_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitError;
  }

  const Format format = pick_format(o.format, out_is_terminal);
  try {
    if (validate_cmd->parsed()) return cmd_validate(o, format, out, err);
    if (audit_cmd->parsed()) return cmd_audit(o, format, out, err);
    if (extract_cmd->parsed()) return cmd_extract(o, out);
    if (faultlab_cmd->parsed()) return cmd_faultlab(o, format, out);
  } catch (const Error& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace sheetaudit::cli
