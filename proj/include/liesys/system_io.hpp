#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "liesys/flows.hpp"
#include "liesys/models.hpp"

namespace liesys {

/// A parsed system file. `expected` carries the optional "expected" object
/// fixtures use to record their reference outputs; it is not interpreted
/// by the loader.
struct SystemDocument {
  LinearControlSystem system;
  PiecewiseControl control;
  std::string description;
  nlohmann::json expected;
};

/// Parses and validates a system document:
///   { "group": "heisenberg" | "sl2" | "su2" | "so3" | "so21"
///              | {"gl_plus": n} | {"abelian": n},
///     "derivation": {"inner": [x...]} | {"matrix": [[...], ...]},
///     "control_fields": [[y...], ...],
///     "control_range": {"min": [...], "max": [...]},        (optional)
///     "control": [{"duration": t, "u": [...]}, ...],        (optional)
///     "description": "...", "expected": {...} }            (optional)
/// Matrices are row-major. A "matrix" derivation that happens to be inner is
/// tagged with its generator. Throws InputError.
SystemDocument load_system(const std::string& json_text);

SystemDocument load_system_file(const std::string& path);

/// Inverse of load_system (description/expected omitted when empty).
std::string emit_system(const LinearControlSystem& system, const PiecewiseControl& control);

/// Trajectory CSV: header "t,m_00,m_01,..." over the row-major ambient
/// matrix, one row per sample, 17 significant digits. Complex realizations
/// get "m_ij_re,m_ij_im" column pairs.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// printf-style %.17g.
std::string format_number(double value);

}  // namespace liesys
