#pragma once

#include <string>
#include <utility>
#include <vector>

#include "support/corpus.hpp"
#include "support/pfa_corpus.hpp"

namespace sca::corpus {

// File name -> JSON document for everything shipped under data/.
inline std::vector<std::pair<std::string, nlohmann::json>> documents() {
  std::vector<Entry> entries = all();
  for (auto e : {identity_abc(), particle_literal(), four_state_cfca("cfca_xyz", {1, 2, 1, 0}, 4),
                 four_state_cfca("cfca_uniform", {1, 1, 1, 1}, 4), elementary(110), elementary(90)})
    entries.push_back(e);
  std::vector<std::pair<std::string, nlohmann::json>> out;
  for (const auto& e : entries) out.emplace_back(e.name + ".json", to_json(e.sca));
  const char* pfa_names[] = {"pfa_one_state.json", "pfa_half.json", "pfa_thirds.json"};
  auto ps = pfas();
  for (std::size_t i = 0; i < ps.size(); ++i) out.emplace_back(pfa_names[i], to_json(ps[i]));
  return out;
}

}  // namespace sca::corpus
