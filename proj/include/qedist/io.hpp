#pragma once

// State files, Schmidt CSV input and JSON serialization of results.
//
// State JSON: {"d_a": 2, "d_b": 2, "matrix": [[[re, im], ...], ...]}
// Doubles are written in shortest round-trip form, so a written state
// reloads bit-identically.

#include <string>
#include <vector>

#include <json.hpp>

#include "qedist/distillation.hpp"
#include "qedist/monotones.hpp"
#include "qedist/repro.hpp"
#include "qedist/special_states.hpp"

namespace qedist {

using json = nlohmann::json;

json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json state_to_json(const HermitianOperator& x);
// Validates Hermiticity, trace and positivity; the error names the violated invariant.
DensityOperator state_from_json(const json& j);

DensityOperator load_state(const std::string& path);
void save_state(const std::string& path, const DensityOperator& rho);

struct SchmidtInput {
  SchmidtVector xi;
  std::vector<std::string> warnings;
};

// Comma-separated squared Schmidt coefficients, in any order. Renormalizes
// with a warning when the sum is off by more than 1e-6.
SchmidtInput parse_schmidt_csv(const std::string& text);

json to_json(const DistillationResult& r);
json to_json(const MonotoneValue& v);
json to_json(const MNormResult& r);
json to_json(const ReproReport& r);

void write_json_file(const std::string& path, const json& j);

}  // namespace qedist
