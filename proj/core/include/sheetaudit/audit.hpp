#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sheetaudit/a1.hpp"
#include "sheetaudit/compare.hpp"
#include "sheetaudit/grid.hpp"
#include "sheetaudit/oracle.hpp"

namespace sheetaudit {

// Where a node's spreadsheet values live.
struct NamedTarget {
  std::string name;
  friend bool operator==(const NamedTarget&, const NamedTarget&) = default;
};

struct AnchoredTarget {
  CellRef anchor;  // sheet "" = first sheet of the workbook
  Orientation orientation = Orientation::kRow;
  friend bool operator==(const AnchoredTarget&, const AnchoredTarget&) = default;
};

struct Binding {
  Node node = kTerminalNode;
  std::variant<NamedTarget, AnchoredTarget> target;
  std::size_t offset = 0;              // leading pre-operations cells to skip
  std::optional<std::size_t> length;   // defaults to 12 * model_years
  std::optional<double> rtol;          // per-binding overrides of the
  std::optional<double> atol;          // spec-wide tolerance

  ToleranceSpec effective_tolerance(const ToleranceSpec& fallback) const;
};

// A workbook location for one model input: "name:<defined name>",
// "cell:<[Sheet!]A1>" or "range:<[Sheet!]A1:A12>". A literal number may
// stand in for any scalar input.
struct InputSource {
  enum class Kind { kName, kCell, kRange, kLiteral };
  Kind kind = Kind::kCell;
  std::string ref;
  double literal = 0.0;

  static InputSource parse(std::string_view text);
  std::string to_string() const;
};

struct WorkbookInputs {
  std::map<std::string, InputSource> sources;  // keyed by ModelInputs field name
};

struct BindingSpec {
  std::optional<std::filesystem::path> workbook;  // resolved against the spec's directory
  std::variant<ModelInputs, WorkbookInputs> inputs;
  std::vector<Binding> bindings;
  ToleranceSpec tolerance;  // spec-wide default

  const Binding* find(Node node) const;
};

// Parses BindingSpec JSON; relative workbook paths resolve against base_dir.
BindingSpec parse_binding_spec(std::string_view text, const std::filesystem::path& base_dir = {});
BindingSpec load_binding_spec(const std::filesystem::path& path);

enum class InputKind { kReal, kInteger };
using InputValue = std::variant<double, std::int64_t>;

// Real inputs pass through; integer inputs need a fractional part below 1e-9
// and are truncated. kTypeMismatch for non-numbers, kNotAnInteger otherwise.
InputValue coerce_input_cell(const CellValue& value, InputKind kind);

// Materializes ModelInputs from the spec (inline or read from the book).
ModelInputs resolve_inputs(const GridBook& book, const BindingSpec& spec);

// Reads the bound range, drops `offset` leading cells and keeps exactly
// `length` cells. kLengthError when fewer than offset + length exist.
NumericSeries extract_bound_series(const GridBook& book, const Binding& binding, std::size_t length);
NumericSeries extract_bound_series(const GridBook& book, const Binding& binding);

// Resolved position of a binding's first cell (index 0 lands at
// anchor displaced by offset).
struct BoundLocation {
  CellRef anchor;
  Orientation orientation = Orientation::kRow;
};
BoundLocation locate_binding(const GridBook& book, const Binding& binding);

enum class Verdict { kPass, kFail, kError };
std::string_view verdict_name(Verdict verdict);

struct NodeResult {
  Node node = Node::kOpsMonths;
  bool bound = false;
  std::optional<bool> pass;
  std::optional<double> mismatch_fraction;
};

struct Culprit {
  Node node = Node::kOpsMonths;
  std::string sheet;
  std::vector<std::string> error_ranges;
  std::vector<std::string> correct_ranges;
  bool upstream_unverified = false;
};

struct AuditReport {
  Verdict verdict = Verdict::kError;
  std::vector<NodeResult> nodes;
  std::vector<Culprit> culprits;
  std::optional<std::string> error;
};

// Compares only the terminal node (ebitda_n).
AuditReport validate(const GridBook& book, const BindingSpec& spec);

// Compares every bound node, then blames failing nodes whose bound ancestors
// all pass and maps their mismatching indices to cell ranges.
AuditReport audit(const GridBook& book, const BindingSpec& spec);

std::string report_to_json(const AuditReport& report);
std::string report_to_text(const AuditReport& report);

}  // namespace sheetaudit
