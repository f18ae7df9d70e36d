#include "nsopt/instance_io.hpp"

#include <istream>
#include <iterator>
#include <ostream>

#include <nlohmann/json.hpp>

#include "nsopt/error.hpp"

namespace nsopt {
namespace {

using nlohmann::json;

constexpr const char* kPiecewise = "piecewise-density";
constexpr const char* kDiscrete = "discrete";

json model_to_json(const DemandModel& model) {
  return {{"kind", model.is_discrete() ? kDiscrete : kPiecewise},
          {"breakpoints", model.breakpoints()},
          {"values", model.values()}};
}

DemandModel model_from_json(const json& period, double xbar) {
  const auto kind = period.at("kind").get<std::string>();
  auto breakpoints = period.at("breakpoints").get<std::vector<double>>();
  auto values = period.at("values").get<std::vector<double>>();
  if (kind == kPiecewise) return DemandModel::piecewise(std::move(breakpoints), std::move(values), xbar);
  if (kind == kDiscrete) return DemandModel::discrete(std::move(breakpoints), std::move(values), xbar);
  throw InvalidArgument("unknown period kind '" + kind + "'");
}

}  // namespace

std::string instance_to_json(const DemandSequence& seq) {
  json periods = json::array();
  for (const auto& model : seq.models()) periods.push_back(model_to_json(model));
  return json{{"xbar", seq.xbar()}, {"periods", std::move(periods)}}.dump();
}

DemandSequence instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("instance is not valid JSON: ") + e.what());
  }
  try {
    const double xbar = doc.at("xbar").get<double>();
    const auto& periods = doc.at("periods");
    if (!periods.is_array() || periods.empty()) {
      throw InvalidArgument("instance needs a nonempty 'periods' array");
    }
    std::vector<DemandModel> models;
    models.reserve(periods.size());
    for (const auto& period : periods) models.push_back(model_from_json(period, xbar));
    return DemandSequence(std::move(models));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed instance: ") + e.what());
  }
}

void write_instance(std::ostream& out, const DemandSequence& seq) { out << instance_to_json(seq); }

DemandSequence read_instance(std::istream& in) {
  return instance_from_json(std::string(std::istreambuf_iterator<char>(in), {}));
}

}  // namespace nsopt
