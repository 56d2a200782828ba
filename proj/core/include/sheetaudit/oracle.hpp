#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sheetaudit/series.hpp"

namespace sheetaudit {

// Solar PPA model inputs. Rates are annual fractions; irradiance holds twelve
// monthly kWh/m^2 values starting in January.
struct ModelInputs {
  double plant_size = 0.0;  // kWp
  double derate = 1.0;      // (0, 1]
  NumericSeries irradiance;
  int start_month = 1;  // 1-12
  int model_years = 1;  // >= 1
  double ppa_price = 0.0;  // $/kWh
  double om_cost = 0.0;    // $/kWh
  double degradation_rate = 0.0;  // > -1
  double inflation_rate = 0.0;    // > -1

  friend bool operator==(const ModelInputs&, const ModelInputs&) = default;
};

// Throws Error(kInvalidInput) naming the first offending field.
void validate_inputs(const ModelInputs& inputs);

ModelInputs parse_model_inputs_json(std::string_view text);
std::string model_inputs_to_json(const ModelInputs& inputs);

// Calculation nodes, declared in dependency (topological) order.
enum class Node { kOpsMonths, kNomGen, kDegIndex, kNetGen, kInfIndex, kEbitdaReal, kEbitdaNominal };

inline constexpr std::array<Node, 7> kAllNodes = {
    Node::kOpsMonths, Node::kNomGen,     Node::kDegIndex,      Node::kNetGen,
    Node::kInfIndex,  Node::kEbitdaReal, Node::kEbitdaNominal,
};
inline constexpr Node kTerminalNode = Node::kEbitdaNominal;

std::string_view node_name(Node node);
std::optional<Node> node_from_name(std::string_view name);

struct Edge {
  Node from;
  Node to;
};

std::span<const Edge> dag_edges();
// Transitive ancestors / descendants in topological order.
std::vector<Node> ancestors(Node node);
std::vector<Node> descendants(Node node);

// plant_size * derate * tile(roll(irradiance, -(start_month-1)), model_years)
NumericSeries nom_generation(double plant_size, double derate, const NumericSeries& irradiance,
                             int start_month, int model_years);
// (1 + rate)^(ops_months / 12)
NumericSeries discount_index(const NumericSeries& ops_months, double rate);
NumericSeries net_generation(const NumericSeries& nominal_gen, const NumericSeries& degradation);
// Revenue and expenses are formed as separate products, then subtracted.
NumericSeries real_ebitda(const NumericSeries& net_gen, double ppa_price, double om_cost);
NumericSeries nominal_ebitda(const NumericSeries& net_gen, double ppa_price, double om_cost,
                             const NumericSeries& inflation);

// Replacement values for nodes; downstream nodes are computed from the
// replacement exactly as live spreadsheet formulas would.
using NodeOverrides = std::map<Node, NumericSeries>;

class ModelRun {
 public:
  const NumericSeries& at(Node node) const { return nodes_[static_cast<std::size_t>(node)]; }
  const NumericSeries& at(std::string_view name) const;
  std::span<const Edge> edges() const { return dag_edges(); }

 private:
  friend ModelRun evaluate_model(const ModelInputs& inputs, const NodeOverrides& overrides);
  std::array<NumericSeries, kAllNodes.size()> nodes_;
};

// Validates inputs, then evaluates every node in dependency order. Failures
// are rethrown with the failing node's name prefixed.
ModelRun run_model(const ModelInputs& inputs, const NodeOverrides& overrides = {});

// Same evaluation without input validation; used to compute "stale" series
// from deliberately perturbed parameter sets.
ModelRun evaluate_model(const ModelInputs& inputs, const NodeOverrides& overrides);

}  // namespace sheetaudit
