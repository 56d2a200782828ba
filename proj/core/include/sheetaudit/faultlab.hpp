#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheetaudit/audit.hpp"
#include "sheetaudit/compare.hpp"
#include "sheetaudit/grid.hpp"
#include "sheetaudit/oracle.hpp"

namespace sheetaudit {

enum class FaultKind {
  kStaleFill,          // first cell of the window edited, the rest left stale
  kConstantOverwrite,  // window hard-coded to one value
  kScaleError,         // window multiplied by a factor
};

std::string_view fault_kind_name(FaultKind kind);

inline constexpr double kDefaultStaleFactor = 1.05;

struct FaultSpec {
  FaultKind kind = FaultKind::kStaleFill;
  Node node = Node::kNetGen;
  // Inclusive index window within the bound series; placed from `seed` when
  // absent.
  std::optional<IndexRun> window;
  // Overwrite value, scale factor, or (stale_fill) the multiplier applied to
  // `stale_input` to produce the stale parameter set.
  std::optional<double> parameter;
  std::string stale_input = "derate";
  std::uint64_t seed = 0;
  // Recompute bound descendants from the tampered values, as live formulas
  // downstream of the edited cells would.
  bool propagate = false;
};

FaultSpec parse_fault_spec(std::string_view text);
std::string fault_spec_to_json(const FaultSpec& fault);

// Writes every bound node's oracle values (plus input cells for cell/range
// input sources) at its layout location. Bindings must be anchored; pre-
// operations offset cells hold 0. Each bound node and cell-sourced input also
// gets a defined name. kOverlapError when two locations collide.
GridBook build_consistent_gridbook(const ModelInputs& inputs, const BindingSpec& layout);

struct Injection {
  GridBook book;
  FaultSpec fault;                       // with the window and parameter resolved
  std::string perturbation;              // stale_fill only, e.g. "derate x 1.05"
  std::vector<CellRef> tampered_cells;   // cells of the target node that were changed
  std::vector<CellRef> propagated_cells; // descendant cells rewritten by propagation
};

// Returns a new book; `book` is never modified. kInvalidInput when the fault
// would be indistinguishable from the oracle at any targeted index under the
// binding's tolerance; kSpecError when the target node is unbound.
Injection inject(const GridBook& book, const FaultSpec& fault, const BindingSpec& layout);

// Sidecar describing an injection: fault, perturbation and tampered cells.
std::string injection_truth_json(const Injection& injection);

}  // namespace sheetaudit
