#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qsat/bounds.hpp"
#include "qsat/ensembles.hpp"
#include "qsat/instance.hpp"
#include "qsat/spectral.hpp"

namespace qsat {

inline constexpr int kFormatVersion = 1;

/// Instance document:
///   {"format_version": 1, "num_qubits": n, "epsilon": e,
///    "projectors": [{"qubits": [...], "amplitudes": [[re, im], ...]}, ...]}
/// Only rank-1 terms are representable; extra top-level fields are ignored
/// on read.
nlohmann::json instance_to_json(const QsatInstance& instance);
QsatInstance instance_from_json(const nlohmann::json& doc);

std::string serialize_instance(const QsatInstance& instance);
/// Throws ParseError with a line/column or field-path diagnostic.
QsatInstance parse_instance(std::string_view text);

QsatInstance read_instance_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Accepts either an instance document (amplitudes ignored) or
/// {"num_qubits": n, "supports": [[...], ...]}.
Structure structure_from_json(const nlohmann::json& doc);

void to_json(nlohmann::json& j, const SatVerdict& v);
void from_json(const nlohmann::json& j, SatVerdict& v);
void to_json(nlohmann::json& j, const BoundReport& r);
void from_json(const nlohmann::json& j, BoundReport& r);
void to_json(nlohmann::json& j, const EnsembleResult& r);
void from_json(const nlohmann::json& j, EnsembleResult& r);
void to_json(nlohmann::json& j, const DegreeProfile& p);
void from_json(const nlohmann::json& j, DegreeProfile& p);

}  // namespace qsat
