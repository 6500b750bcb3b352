#pragma once

#include "parlab/coeffs.hpp"
#include "parlab/grid.hpp"

#include <json.hpp>

#include <filesystem>

namespace parlab {

/// Flat little-endian float64 (re, im) pairs, piece-major then cell-major then
/// row-major matrix entries. A JSON sidecar <base>.json records the shapes and
/// breakpoints.
void dump_coefficients(const CoefficientField& A, const std::filesystem::path& base);

/// Same binary convention for a field (component-major, then cell-major);
/// sidecar records the grid and arity.
void dump_field(const SpaceField& f, const std::filesystem::path& base,
                const nlohmann::json& extra = {});

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace parlab
