#pragma once

#include "sca/ppt_pfa.hpp"

namespace sca {

// Throws ShapeError unless |Q| >= 4 and x, y, z are distinct states.
void check_ppt_instance(const Sca& a, Symbol x, Symbol y, Symbol z);

}  // namespace sca
