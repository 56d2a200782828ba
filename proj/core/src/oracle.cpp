#include "sheetaudit/oracle.hpp"

#include <cmath>
#include <string>

#include "json.hpp"
#include "sheetaudit/errors.hpp"

namespace sheetaudit {

namespace {

constexpr std::array<Edge, 7> kEdges = {{
    {Node::kOpsMonths, Node::kDegIndex},
    {Node::kOpsMonths, Node::kInfIndex},
    {Node::kNomGen, Node::kNetGen},
    {Node::kDegIndex, Node::kNetGen},
    {Node::kNetGen, Node::kEbitdaReal},
    {Node::kNetGen, Node::kEbitdaNominal},
    {Node::kInfIndex, Node::kEbitdaNominal},
}};

constexpr std::array<std::string_view, 7> kNodeNames = {
    "ops_months", "nom_gen", "deg_index", "net_gen", "inf_index", "ebitda_r", "ebitda_n",
};

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::kInvalidInput, what); }

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) invalid(std::string(field) + " must be finite");
}

std::vector<Node> closure(Node start, bool upstream) {
  std::array<bool, kAllNodes.size()> seen{};
  std::vector<Node> stack{start};
  while (!stack.empty()) {
    Node n = stack.back();
    stack.pop_back();
    for (const Edge& e : kEdges) {
      Node next = upstream ? e.from : e.to;
      Node here = upstream ? e.to : e.from;
      if (here == n && !seen[static_cast<std::size_t>(next)]) {
        seen[static_cast<std::size_t>(next)] = true;
        stack.push_back(next);
      }
    }
  }
  std::vector<Node> out;
  for (Node n : kAllNodes) {
    if (seen[static_cast<std::size_t>(n)]) out.push_back(n);
  }
  return out;
}

int json_integer(const nlohmann::json& v, const char* field) {
  if (!v.is_number()) invalid(std::string(field) + " must be a number");
  double d = v.get<double>();
  if (std::floor(d) != d || std::abs(d) > 1e9) invalid(std::string(field) + " must be an integer");
  return static_cast<int>(d);
}

double json_real(const nlohmann::json& obj, const char* field) {
  if (!obj.contains(field)) invalid(std::string("missing field \"") + field + "\"");
  const auto& v = obj.at(field);
  if (!v.is_number()) invalid(std::string(field) + " must be a number");
  return v.get<double>();
}

}  // namespace

void validate_inputs(const ModelInputs& in) {
  require_finite(in.plant_size, "plant_size");
  if (in.plant_size < 0) invalid("plant_size must be >= 0");
  require_finite(in.derate, "derate");
  if (!(in.derate > 0.0 && in.derate <= 1.0)) invalid("derate must lie in (0, 1]");
  if (in.irradiance.size() != 12) {
    invalid("irradiance must hold exactly 12 monthly values, got " + std::to_string(in.irradiance.size()));
  }
  for (std::size_t i = 0; i < in.irradiance.size(); ++i) {
    if (!std::isfinite(in.irradiance[i]) || in.irradiance[i] < 0) {
      invalid("irradiance[" + std::to_string(i) + "] must be finite and >= 0");
    }
  }
  if (in.start_month < 1 || in.start_month > 12) {
    invalid("start_month must be 1-12, got " + std::to_string(in.start_month));
  }
  if (in.model_years < 1) invalid("model_years must be >= 1, got " + std::to_string(in.model_years));
  require_finite(in.ppa_price, "ppa_price");
  require_finite(in.om_cost, "om_cost");
  if (in.ppa_price < 0) invalid("ppa_price must be >= 0");
  if (in.om_cost < 0) invalid("om_cost must be >= 0");
  require_finite(in.degradation_rate, "degradation_rate");
  require_finite(in.inflation_rate, "inflation_rate");
  if (!(in.degradation_rate > -1.0)) invalid("degradation_rate must be > -1");
  if (!(in.inflation_rate > -1.0)) invalid("inflation_rate must be > -1");
}

ModelInputs parse_model_inputs_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    invalid(std::string("model inputs: ") + e.what());
  }
  if (!doc.is_object()) invalid("model inputs must be a JSON object");
  ModelInputs in;
  in.plant_size = json_real(doc, "plant_size");
  in.derate = json_real(doc, "derate");
  if (!doc.contains("irradiance") || !doc["irradiance"].is_array()) invalid("irradiance must be an array");
  std::vector<double> irr;
  for (const auto& v : doc["irradiance"]) {
    if (!v.is_number()) invalid("irradiance entries must be numbers");
    irr.push_back(v.get<double>());
  }
  in.irradiance = NumericSeries(std::move(irr));
  if (!doc.contains("start_month")) invalid("missing field \"start_month\"");
  if (!doc.contains("model_years")) invalid("missing field \"model_years\"");
  in.start_month = json_integer(doc["start_month"], "start_month");
  in.model_years = json_integer(doc["model_years"], "model_years");
  in.ppa_price = json_real(doc, "ppa_price");
  in.om_cost = json_real(doc, "om_cost");
  in.degradation_rate = json_real(doc, "degradation_rate");
  in.inflation_rate = json_real(doc, "inflation_rate");
  validate_inputs(in);
  return in;
}

std::string model_inputs_to_json(const ModelInputs& in) {
  nlohmann::ordered_json doc;
  doc["plant_size"] = in.plant_size;
  doc["derate"] = in.derate;
  doc["irradiance"] = in.irradiance.to_vector();
  doc["start_month"] = in.start_month;
  doc["model_years"] = in.model_years;
  doc["ppa_price"] = in.ppa_price;
  doc["om_cost"] = in.om_cost;
  doc["degradation_rate"] = in.degradation_rate;
  doc["inflation_rate"] = in.inflation_rate;
  return doc.dump(2);
}

std::string_view node_name(Node node) { return kNodeNames[static_cast<std::size_t>(node)]; }

std::optional<Node> node_from_name(std::string_view name) {
  for (Node n : kAllNodes) {
    if (node_name(n) == name) return n;
  }
  return std::nullopt;
}

std::span<const Edge> dag_edges() { return kEdges; }
std::vector<Node> ancestors(Node node) { return closure(node, true); }
std::vector<Node> descendants(Node node) { return closure(node, false); }

NumericSeries nom_generation(double plant_size, double derate, const NumericSeries& irradiance,
                             int start_month, int model_years) {
  if (start_month < 1 || start_month > 12) {
    invalid("start_month must be 1-12, got " + std::to_string(start_month));
  }
  if (irradiance.size() != 12) invalid("irradiance must hold exactly 12 monthly values");
  const int start = start_month - 1;
  NumericSeries first_year = roll(irradiance, -start);
  NumericSeries model_irradiance = tile(first_year, model_years);
  // plant_size*derate*model_irradiance evaluates left to right.
  return zip_arith(model_irradiance, plant_size * derate, ArithOp::kMul);
}

NumericSeries discount_index(const NumericSeries& ops_months, double rate) {
  if (!(rate > -1.0)) {
    throw Error(ErrorKind::kDomainError, "rate must be > -1, got " + std::to_string(rate));
  }
  return pow_broadcast(1.0 + rate, zip_arith(ops_months, 12.0, ArithOp::kDiv));
}

NumericSeries net_generation(const NumericSeries& nominal_gen, const NumericSeries& degradation) {
  return zip_arith(nominal_gen, degradation, ArithOp::kDiv);
}

NumericSeries real_ebitda(const NumericSeries& net_gen, double ppa_price, double om_cost) {
  NumericSeries revenue = zip_arith(net_gen, ppa_price, ArithOp::kMul);
  NumericSeries expenses = zip_arith(net_gen, om_cost, ArithOp::kMul);
  return zip_arith(revenue, expenses, ArithOp::kSub);
}

NumericSeries nominal_ebitda(const NumericSeries& net_gen, double ppa_price, double om_cost,
                             const NumericSeries& inflation) {
  if (inflation.size() != net_gen.size()) {
    throw Error(ErrorKind::kLengthMismatch, "inflation has length " + std::to_string(inflation.size()) +
                                                ", net generation " + std::to_string(net_gen.size()));
  }
  NumericSeries revenue = zip_arith(zip_arith(net_gen, ppa_price, ArithOp::kMul), inflation, ArithOp::kMul);
  NumericSeries expenses = zip_arith(zip_arith(net_gen, om_cost, ArithOp::kMul), inflation, ArithOp::kMul);
  return zip_arith(revenue, expenses, ArithOp::kSub);
}

const NumericSeries& ModelRun::at(std::string_view name) const {
  auto node = node_from_name(name);
  if (!node) throw Error(ErrorKind::kUnknownName, "no model node \"" + std::string(name) + "\"");
  return at(*node);
}

ModelRun evaluate_model(const ModelInputs& in, const NodeOverrides& overrides) {
  ModelRun run;
  const std::size_t months = static_cast<std::size_t>(in.model_years) * 12;
  auto compute = [&](Node node, auto&& fn) {
    auto& slot = run.nodes_[static_cast<std::size_t>(node)];
    try {
      if (auto it = overrides.find(node); it != overrides.end()) {
        if (it->second.size() != months) {
          throw Error(ErrorKind::kLengthMismatch, "override has length " + std::to_string(it->second.size()) +
                                                      ", model has " + std::to_string(months) + " months");
        }
        slot = it->second;
      } else {
        slot = fn();
      }
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(node_name(node)) + ": " + e.message());
    }
  };
  auto value = [&](Node node) -> const NumericSeries& { return run.at(node); };

  compute(Node::kOpsMonths, [&] { return range_from_one(static_cast<std::int64_t>(months)); });
  compute(Node::kNomGen, [&] {
    return nom_generation(in.plant_size, in.derate, in.irradiance, in.start_month, in.model_years);
  });
  compute(Node::kDegIndex, [&] { return discount_index(value(Node::kOpsMonths), in.degradation_rate); });
  compute(Node::kNetGen, [&] { return net_generation(value(Node::kNomGen), value(Node::kDegIndex)); });
  compute(Node::kInfIndex, [&] { return discount_index(value(Node::kOpsMonths), in.inflation_rate); });
  compute(Node::kEbitdaReal, [&] { return real_ebitda(value(Node::kNetGen), in.ppa_price, in.om_cost); });
  compute(Node::kEbitdaNominal, [&] {
    return nominal_ebitda(value(Node::kNetGen), in.ppa_price, in.om_cost, value(Node::kInfIndex));
  });
  return run;
}

ModelRun run_model(const ModelInputs& inputs, const NodeOverrides& overrides) {
  validate_inputs(inputs);
  return evaluate_model(inputs, overrides);
}

}  // namespace sheetaudit
