#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "octo/calculus.hpp"
#include "octo/space.hpp"

namespace octo {

/// Parses JSON text; syntax errors become ErrorCode::parse_error with a
/// "line L, column C" position.
nlohmann::json parse_json(std::string_view text);

nlohmann::json vector_to_json(const TowerVector& x);
/// Expects {"base": [...], "coords": [...]}; "coords" may be omitted.
TowerVector vector_from_json(const nlohmann::json& j);

/// CSV row base_1..base_d, x_1..x_N.
std::string vector_to_csv_row(const TowerVector& x);
TowerVector vector_from_csv_row(std::string_view row, std::size_t base_dim);

/// Accepts either a JSON vector object or a single CSV row; blank lines and
/// lines starting with '#' are skipped in CSV input.
TowerVector vector_from_text(std::string_view text, std::size_t base_dim);

/// {"value", "per_level", "oracle", "tail_bound", "level"} for |||P_n x|||_n.
/// Level 0 selects the support of x, where the tower norm is attained. The
/// tail bound is sum_{j>n} |x_j|, which bounds |||x||| - |||P_n x|||_n.
nlohmann::json eval_result_json(const TowerSpace& space, const TowerVector& x, std::size_t level = 0);

nlohmann::json derivative_to_json(const DerivativeEstimate& estimate);

/// One row per level: breakpoints, junction constants, offset m_n, the
/// equivalence product prefix and the octahedrality constant.
nlohmann::json schedule_table_json(const TowerSpace& space);
std::string schedule_table_csv(const TowerSpace& space);

nlohmann::json schedule_to_json(const ShapeSchedule& schedule);
ShapeSchedule schedule_from_json(const nlohmann::json& j);

enum class OutputFormat { json, csv };

/// A run configuration:
///   {"schedule": {...}, "base_dim": d, "seed": s,
///    "tolerances": {"solver_rel": r, "max_iterations": k, "verify": v},
///    "output": {"path": "...", "format": "json" | "csv"}}
/// Every field is optional; defaults give the geometric schedule with 40
/// levels over Euclidean R^3 and output to stdout as JSON.
struct Config {
  TowerSpace space = TowerSpace::standard(3);
  std::optional<Real> verify_tol;
  std::uint64_t seed = 0;
  std::string output_path;
  OutputFormat format = OutputFormat::json;
};

Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& config);

OutputFormat parse_format(std::string_view name);

}  // namespace octo
