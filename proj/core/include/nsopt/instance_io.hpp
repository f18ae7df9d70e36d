#pragma once

#include <iosfwd>
#include <string>

#include "nsopt/distributions.hpp"

namespace nsopt {

// {"xbar": x, "periods": [{"kind": "piecewise-density" | "discrete",
//                          "breakpoints": [...], "values": [...]}, ...]}
std::string instance_to_json(const DemandSequence& seq);
DemandSequence instance_from_json(const std::string& text);

void write_instance(std::ostream& out, const DemandSequence& seq);
DemandSequence read_instance(std::istream& in);

}  // namespace nsopt
