#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rkpr/cvector.hpp"
#include "rkpr/ensemble.hpp"

namespace rkpr {

inline constexpr std::string_view kContainerFormat = "rkpr.ensemble";
inline constexpr int kContainerVersion = 1;

/// JSON container {format, version, generator, m, n, model, seed, stream_id,
/// offset, rows?, values?}. With include_rows false the ensemble is stored by
/// provenance only and must have one.
nlohmann::json ensemble_to_json(const Ensemble& e, bool include_rows = false,
                                const Measurements* values = nullptr);

/// Rebuilds the ensemble from explicit rows if present, otherwise from
/// provenance. Throws std::invalid_argument on malformed input.
Ensemble ensemble_from_json(const nlohmann::json& j);

/// Reads the optional "values" member; nullopt-like empty result throws.
Measurements measurements_from_json(const nlohmann::json& j);

/// Complex vectors as [[re, im], ...].
nlohmann::json vector_to_json(ConstSpan v);
CVector vector_from_json(const nlohmann::json& j);

/// "%.17g", or empty for NaN.
std::string format_double(double v);

std::string to_hex(std::uint64_t v);

/// Writes `text` to `path`, throwing std::runtime_error when the file
/// cannot be written.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace rkpr
