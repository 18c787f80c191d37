#pragma once

#include "kko/kclass.hpp"
#include "kko/models.hpp"

#include <json.hpp>

#include <string>

namespace kko {

using json = nlohmann::ordered_json;

class SchemaError : public Error {
public:
    SchemaError(const std::string& path, const std::string& msg)
        : Error("SchemaError", path + ": " + msg), path(path) {}
    std::string path;
};

// Row-major [[ [re, im], ... ], ... ].
json matrix_to_json(const CMat& m);
CMat matrix_from_json(const json& j, const std::string& path);

// Separate real and imaginary row-major arrays, as in model files.
CMat split_matrix_from_json(const json& re, const json& im, const std::string& path);

json class_to_json(const KOClass& x);
KOClass class_from_json(const json& j);
json ku_class_to_json(const KUClass& y);
// Second element defaults to 0 (even) or 1 (odd).
KUClass ku_class_from_json(const json& j);

json model_to_json(const BlochModel& m);
BlochModel model_from_json(const json& j);

json read_json_file(const std::string& file);

}  // namespace kko
