#pragma once

// Matrix interchange: JSON {"dim": n, "re": [[...]], "im": [[...]]} ("im"
// optional) or CSV of real entries, one row per line.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sginf/spectral.hpp"

namespace sginf {

ComplexMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

ComplexMatrix matrix_from_csv(const std::string& text);

/// Loads by content: a leading '{' means JSON, anything else CSV.
/// Throws InputError with a line/field diagnostic.
ComplexMatrix load_matrix(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace sginf
