#pragma once

#include "sfv/uq.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace sfv {

/// Command-line overrides applied on top of a case file.
struct CaseOverrides {
  std::optional<Real> pi;         ///< replaces every well's PI
  std::optional<Real> thickness;  ///< replaces the grid thickness h
  std::optional<bool> swept_include_porosity;
};

/// Parses a JSON case file into a fully resolved CaseSpec (grid and layout
/// built, SI units). Throws std::runtime_error / std::invalid_argument with
/// a diagnostic on malformed input.
CaseSpec load_case(const std::filesystem::path& path,
                   const CaseOverrides& overrides = {});

/// FNV-1a 64-bit hash of the raw case file bytes, as fixed-width hex.
std::string case_fingerprint(const std::filesystem::path& path);

/// Mean of a component distribution (truncated-normal mean in closed form).
Real distribution_mean(const ComponentDistribution& dist);

/// Human-readable resolved case description for `case-info`.
std::string describe_case(const CaseSpec& spec);

}  // namespace sfv
