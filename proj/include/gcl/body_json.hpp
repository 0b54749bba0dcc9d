#pragma once

#include <string>

#include <json.hpp>

#include "gcl/body.hpp"

namespace gcl {

nlohmann::json to_json(const Body& body);

/// Parses {"kind": ..., ...}. `where` prefixes error messages so the
/// offending key can be named (e.g. "bodies.json: a.radius").
Body body_from_json(const nlohmann::json& j, const std::string& where = "body");

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);
Vector vector_from_json(const nlohmann::json& j, const std::string& where);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& where);

/// Reads a JSON document; parse errors name the file and line.
nlohmann::json read_json_file(const std::string& path);

} // namespace gcl
