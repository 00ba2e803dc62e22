#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "povmkit/errors.hpp"
#include "povmkit/measurement.hpp"
#include "povmkit/types.hpp"

namespace povmkit {

// Key order in emitted documents is authoring order, which keeps repeated
// runs byte-identical.
using Json = nlohmann::ordered_json;

// Operator file: {"dim": d, "operators": [{"name": ..., "matrix": [...]}]}.
// A matrix is a flat row-major list of d*d entries, each entry a two-element
// [re, im] array. Every numeric slot accepts either a JSON number or an
// exact rational string "p/q", so published matrices can be stored without
// decimal rounding.
struct NamedOperator {
    std::string name;
    Matrix matrix;
};

struct OperatorFile {
    int dim = 0;
    std::vector<NamedOperator> operators;
};

OperatorFile parse_operator_file(const std::string& text);
OperatorFile load_operator_file(const std::string& path);

// Canonical serialized form (plain numbers, two-space indent). Serializing
// a parsed document and parsing it again reproduces the same operators
// bit for bit.
std::string serialize_operator_file(const OperatorFile& file);

// Ensemble file: {"dim": d, "states": [{"name": ..., "weight": w,
// "matrix": [...]}]}, with the same entry encoding as operator files and
// weights that may also be rational strings.
Ensemble parse_ensemble_file(const std::string& text);
Ensemble load_ensemble_file(const std::string& path);

// Whole-file text IO. Writing goes through a sibling temp file and an
// atomic rename so readers never observe a half-written document.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// JSON fragments for emitted documents.
Json matrix_to_json(const Matrix& m);
Json complex_to_json(const Complex& z);

} // namespace povmkit
