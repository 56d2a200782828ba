#include "sheetaudit/faultlab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "json.hpp"
#include "sheetaudit/errors.hpp"

namespace sheetaudit {

namespace {

using json = nlohmann::json;

constexpr const char* kDefaultSheet = "Model";

[[noreturn]] void fault_error(const std::string& what) { throw Error(ErrorKind::kInvalidInput, what); }

double* perturbable_field(ModelInputs& in, std::string_view name) {
  if (name == "plant_size") return &in.plant_size;
  if (name == "derate") return &in.derate;
  if (name == "ppa_price") return &in.ppa_price;
  if (name == "om_cost") return &in.om_cost;
  if (name == "degradation_rate") return &in.degradation_rate;
  if (name == "inflation_rate") return &in.inflation_rate;
  return nullptr;
}

struct Placement {
  RangeRef range;
  std::string label;
};

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Uniform pick in [lo, hi] from the raw engine output. Modulo keeps the
// sequence identical across standard library implementations.
std::size_t pick(std::mt19937_64& gen, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace

std::string_view fault_kind_name(FaultKind kind) {
  switch (kind) {
    case FaultKind::kStaleFill: return "stale_fill";
    case FaultKind::kConstantOverwrite: return "constant_overwrite";
    case FaultKind::kScaleError: return "scale_error";
  }
  return "?";
}

FaultSpec parse_fault_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kSpecError, std::string("fault spec: ") + e.what());
  }
  auto bad = [](const std::string& what) { return Error(ErrorKind::kSpecError, "fault spec: " + what); };
  if (!doc.is_object()) throw bad("must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    static const std::set<std::string> kKnown = {"kind", "node", "indices", "parameter",
                                                 "stale_input", "seed", "propagate"};
    if (!kKnown.count(key)) throw bad("unknown key \"" + key + "\"");
  }
  FaultSpec f;
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw bad("missing \"kind\"");
  std::string kind = doc["kind"].get<std::string>();
  if (kind == "stale_fill") f.kind = FaultKind::kStaleFill;
  else if (kind == "constant_overwrite") f.kind = FaultKind::kConstantOverwrite;
  else if (kind == "scale_error") f.kind = FaultKind::kScaleError;
  else throw bad("unknown kind \"" + kind + "\"");

  if (!doc.contains("node") || !doc["node"].is_string()) throw bad("missing \"node\"");
  auto node = node_from_name(doc["node"].get<std::string>());
  if (!node) throw bad("unknown node \"" + doc["node"].get<std::string>() + "\"");
  f.node = *node;

  if (doc.contains("indices")) {
    const json& w = doc["indices"];
    if (!w.is_array() || w.size() != 2 || !w[0].is_number_unsigned() || !w[1].is_number_unsigned()) {
      throw bad("\"indices\" must be [start, end] with non-negative integers");
    }
    f.window = IndexRun{w[0].get<std::size_t>(), w[1].get<std::size_t>()};
  }
  if (doc.contains("parameter")) {
    if (!doc["parameter"].is_number()) throw bad("\"parameter\" must be a number");
    f.parameter = doc["parameter"].get<double>();
  }
  if (doc.contains("stale_input")) {
    if (!doc["stale_input"].is_string()) throw bad("\"stale_input\" must be a string");
    f.stale_input = doc["stale_input"].get<std::string>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw bad("\"seed\" must be a non-negative integer");
    f.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("propagate")) {
    if (!doc["propagate"].is_boolean()) throw bad("\"propagate\" must be true or false");
    f.propagate = doc["propagate"].get<bool>();
  }
  return f;
}

std::string fault_spec_to_json(const FaultSpec& f) {
  nlohmann::ordered_json doc;
  doc["kind"] = std::string(fault_kind_name(f.kind));
  doc["node"] = std::string(node_name(f.node));
  if (f.window) doc["indices"] = {f.window->start, f.window->end};
  if (f.parameter) doc["parameter"] = *f.parameter;
  if (f.kind == FaultKind::kStaleFill) doc["stale_input"] = f.stale_input;
  doc["seed"] = f.seed;
  doc["propagate"] = f.propagate;
  return doc.dump(2);
}

GridBook build_consistent_gridbook(const ModelInputs& inputs, const BindingSpec& layout) {
  ModelRun run = run_model(inputs);
  const std::size_t months = static_cast<std::size_t>(inputs.model_years) * 12;

  std::vector<Placement> placements;
  std::vector<std::pair<CellRef, CellValue>> cells;
  std::map<std::string, RangeRef> names;
  std::vector<std::string> sheet_order;
  auto note_sheet = [&](CellRef& ref) {
    if (ref.sheet.empty()) ref.sheet = kDefaultSheet;
    if (std::find(sheet_order.begin(), sheet_order.end(), ref.sheet) == sheet_order.end()) {
      sheet_order.push_back(ref.sheet);
    }
  };

  for (const Binding& b : layout.bindings) {
    const auto* anchored = std::get_if<AnchoredTarget>(&b.target);
    if (!anchored) {
      throw Error(ErrorKind::kSpecError, "layout binding for " + std::string(node_name(b.node)) +
                                             " uses a defined name; layouts need anchors");
    }
    if (b.length && *b.length != months) {
      throw Error(ErrorKind::kLengthMismatch, std::string(node_name(b.node)) + ": binding length " +
                                                  std::to_string(*b.length) + " but the model runs " +
                                                  std::to_string(months) + " months");
    }
    CellRef anchor = anchored->anchor;
    note_sheet(anchor);
    CellRef last = displace(anchor, anchored->orientation, static_cast<std::int64_t>(b.offset + months) - 1);
    RangeRef range = make_range(anchor, last);
    placements.push_back({range, std::string(node_name(b.node))});
    names.emplace(std::string(node_name(b.node)), range);
    const NumericSeries& values = run.at(b.node);
    for (std::size_t i = 0; i < b.offset + months; ++i) {
      double v = i < b.offset ? 0.0 : values[i - b.offset];
      cells.emplace_back(displace(anchor, anchored->orientation, static_cast<std::int64_t>(i)), CellValue::number(v));
    }
  }

  if (const auto* wb = std::get_if<WorkbookInputs>(&layout.inputs)) {
    for (const auto& [field, src] : wb->sources) {
      if (src.kind == InputSource::Kind::kLiteral) continue;
      if (src.kind == InputSource::Kind::kName) {
        throw Error(ErrorKind::kSpecError, "layout input " + field + " uses a defined name; layouts need cell or range sources");
      }
      RangeRef range = parse_range(src.ref);
      CellRef top = range.top_left;
      note_sheet(top);
      std::vector<double> values;
      if (field == "irradiance") {
        values = inputs.irradiance.to_vector();
        if (src.kind == InputSource::Kind::kCell) {
          range = make_range(top, displace(top, Orientation::kCol, 11));
        } else {
          range = make_range(top, CellRef{top.sheet, range.bottom_right.row, range.bottom_right.col});
          if (range.size() != 12 || (range.rows() != 1 && range.cols() != 1)) {
            throw Error(ErrorKind::kSpecError, "layout irradiance range must be 12 cells in one row or column");
          }
        }
      } else {
        if (!range.is_single_cell()) {
          throw Error(ErrorKind::kSpecError, "layout input " + field + " must be a single cell");
        }
        range = make_range(top, top);
        if (field == "plant_size") values = {inputs.plant_size};
        else if (field == "derate") values = {inputs.derate};
        else if (field == "start_month") values = {static_cast<double>(inputs.start_month)};
        else if (field == "model_years") values = {static_cast<double>(inputs.model_years)};
        else if (field == "ppa_price") values = {inputs.ppa_price};
        else if (field == "om_cost") values = {inputs.om_cost};
        else if (field == "degradation_rate") values = {inputs.degradation_rate};
        else if (field == "inflation_rate") values = {inputs.inflation_rate};
      }
      placements.push_back({range, field});
      names.emplace(field, range);
      std::size_t i = 0;
      for (std::int32_t r = range.top_left.row; r <= range.bottom_right.row; ++r) {
        for (std::int32_t c = range.top_left.col; c <= range.bottom_right.col; ++c) {
          cells.emplace_back(CellRef{range.sheet, r, c}, CellValue::number(values[i++]));
        }
      }
    }
  }

  std::string collisions;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    for (std::size_t j = i + 1; j < placements.size(); ++j) {
      if (placements[i].range.overlaps(placements[j].range)) {
        collisions += (collisions.empty() ? "" : "; ") + placements[i].label + " " +
                      format_a1(placements[i].range) + " overlaps " + placements[j].label + " " +
                      format_a1(placements[j].range);
      }
    }
  }
  if (!collisions.empty()) throw Error(ErrorKind::kOverlapError, collisions);

  if (sheet_order.empty()) sheet_order.push_back(kDefaultSheet);
  std::vector<Sheet> sheets;
  for (const std::string& name : sheet_order) sheets.emplace_back(name);
  for (auto& [ref, value] : cells) {
    auto it = std::find_if(sheets.begin(), sheets.end(), [&](const Sheet& s) { return s.name() == ref.sheet; });
    it->set(ref.row, ref.col, value);
  }
  return GridBook(std::move(sheets), std::move(names));
}

Injection inject(const GridBook& book, const FaultSpec& fault, const BindingSpec& layout) {
  const Binding* binding = layout.find(fault.node);
  if (!binding) {
    throw Error(ErrorKind::kSpecError, "fault targets unbound node " + std::string(node_name(fault.node)));
  }
  ModelInputs inputs = resolve_inputs(book, layout);
  ModelRun run = run_model(inputs);
  const std::size_t months = static_cast<std::size_t>(inputs.model_years) * 12;
  const NumericSeries& truth = run.at(fault.node);
  const NumericSeries current = extract_bound_series(book, *binding, months);
  const ToleranceSpec tol = binding->effective_tolerance(layout.tolerance);
  const BoundLocation loc = locate_binding(book, *binding);

  Injection out{book, fault, {}, {}, {}};
  FaultSpec& f = out.fault;
  const bool stale = f.kind == FaultKind::kStaleFill;

  if (f.window) {
    if (f.window->start > f.window->end || f.window->end >= months) {
      fault_error("indices [" + std::to_string(f.window->start) + ", " + std::to_string(f.window->end) +
                  "] fall outside the bound length " + std::to_string(months));
    }
    if (stale && f.window->start == f.window->end) {
      fault_error("stale_fill needs a window of at least two cells");
    }
  } else {
    std::mt19937_64 gen(f.seed);
    std::size_t start = pick(gen, 0, stale ? months - 2 : months - 1);
    std::size_t end = pick(gen, stale ? start + 1 : start, months - 1);
    f.window = IndexRun{start, end};
  }

  std::vector<double> values = current.to_vector();
  std::size_t first_changed = f.window->start;
  switch (f.kind) {
    case FaultKind::kStaleFill: {
      if (!f.parameter) f.parameter = kDefaultStaleFactor;
      ModelInputs perturbed = inputs;
      double* field = perturbable_field(perturbed, f.stale_input);
      if (!field) fault_error("stale_input \"" + f.stale_input + "\" is not a perturbable input");
      *field *= *f.parameter;
      out.perturbation = f.stale_input + " x " + shortest(*f.parameter);
      ModelRun stale_run = evaluate_model(perturbed, {});
      first_changed = f.window->start + 1;
      for (std::size_t i = first_changed; i <= f.window->end; ++i) values[i] = stale_run.at(f.node)[i];
      break;
    }
    case FaultKind::kConstantOverwrite:
      if (!f.parameter) fault_error("constant_overwrite needs a parameter");
      for (std::size_t i = f.window->start; i <= f.window->end; ++i) values[i] = *f.parameter;
      break;
    case FaultKind::kScaleError:
      if (!f.parameter) fault_error("scale_error needs a parameter");
      if (*f.parameter == 1.0 || !std::isfinite(*f.parameter)) fault_error("scale factor must be finite and != 1");
      for (std::size_t i = f.window->start; i <= f.window->end; ++i) values[i] *= *f.parameter;
      break;
  }

  std::vector<std::pair<CellRef, CellValue>> edits;
  for (std::size_t i = first_changed; i <= f.window->end; ++i) {
    if (!std::isfinite(values[i]) || is_close_value(values[i], truth[i], tol)) {
      fault_error(std::string(fault_kind_name(f.kind)) + " on " + std::string(node_name(f.node)) +
                  " is within tolerance of the oracle at index " + std::to_string(i));
    }
    CellRef cell = displace(loc.anchor, loc.orientation, static_cast<std::int64_t>(binding->offset + i));
    edits.emplace_back(cell, CellValue::number(values[i]));
    out.tampered_cells.push_back(cell);
  }

  if (f.propagate) {
    ModelRun live = run_model(inputs, {{f.node, NumericSeries(values)}});
    for (Node down : descendants(f.node)) {
      const Binding* db = layout.find(down);
      if (!db) continue;
      const BoundLocation dloc = locate_binding(book, *db);
      const NumericSeries before = extract_bound_series(book, *db, months);
      for (std::size_t i = 0; i < months; ++i) {
        if (live.at(down)[i] == before[i]) continue;
        CellRef cell = displace(dloc.anchor, dloc.orientation, static_cast<std::int64_t>(db->offset + i));
        edits.emplace_back(cell, CellValue::number(live.at(down)[i]));
        out.propagated_cells.push_back(cell);
      }
    }
  }

  out.book = book.with_cells(edits);
  return out;
}

std::string injection_truth_json(const Injection& inj) {
  nlohmann::ordered_json doc;
  doc["fault"] = nlohmann::ordered_json::parse(fault_spec_to_json(inj.fault));
  if (!inj.perturbation.empty()) doc["perturbation"] = inj.perturbation;
  doc["sheet"] = inj.tampered_cells.empty() ? std::string() : inj.tampered_cells.front().sheet;
  if (!inj.tampered_cells.empty()) {
    doc["tampered_range"] =
        absolute_address(make_range(inj.tampered_cells.front(), inj.tampered_cells.back()));
  }
  auto addresses = [](const std::vector<CellRef>& cells) {
    std::vector<std::string> out;
    for (const CellRef& c : cells) out.push_back(format_a1(c));
    return out;
  };
  doc["tampered_cells"] = addresses(inj.tampered_cells);
  doc["propagated_cells"] = addresses(inj.propagated_cells);
  return doc.dump(2) + "\n";
}

}  // namespace sheetaudit
