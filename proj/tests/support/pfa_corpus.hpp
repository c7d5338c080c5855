#pragma once

#include <vector>

#include "sca/ppt_pfa.hpp"

namespace sca::corpus {

// One state, always accepting.
inline Pfa pfa_one_state() {
  return parse_pfa(nlohmann::json::parse(R"({"alphabet": ["a"], "states": ["q"], "initial": "q",
    "final": ["q"], "matrices": {"a": [["1"]]}})"));
}

// M_a(q0,q0) = M_a(q0,q1) = 1/2, q1 absorbing, final {q0}.
inline Pfa pfa_half() {
  return parse_pfa(nlohmann::json::parse(R"({"alphabet": ["a"], "states": ["q0", "q1"],
    "initial": "q0", "final": ["q0"],
    "matrices": {"a": [["1/2", "1/2"], ["0", "1"]]}})"));
}

// Two letters, three states, matrix b in flat row-major form.
inline Pfa pfa_thirds() {
  return parse_pfa(nlohmann::json::parse(R"({"alphabet": ["a", "b"], "states": ["p", "q", "r"],
    "initial": "p", "final": ["r"],
    "matrices": {"a": [["1/3", "2/3", "0"], ["0", "1/3", "2/3"], ["0", "0", "1"]],
                 "b": ["1", "0", "0", "1/3", "1/3", "1/3", "0", "1/3", "2/3"]}})"));
}

inline std::vector<Pfa> pfas() { return {pfa_one_state(), pfa_half(), pfa_thirds()}; }

}  // namespace sca::corpus
