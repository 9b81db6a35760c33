#pragma once

#include <json.hpp>

#include "gkp/channels.hpp"
#include "gkp/lattice.hpp"

namespace gkp {

using json = nlohmann::json;

json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

json noise_to_json(const NoiseSpec& spec);
NoiseSpec noise_from_json(const json& j);

json lattice_to_json(const GkpLattice& l);
GkpLattice lattice_from_json(const json& j);

}  // namespace gkp
