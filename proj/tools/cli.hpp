#pragma once

#include "teleclone/photonic.hpp"
#include "teleclone/quantum.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace teleclone::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2 };

// Named aliases H, V, D = (H+V)/sqrt2, R = (H+iV)/sqrt2, or an explicit
// "alpha,beta" pair whose entries may be complex ("0.6", "0.8i", "0.5-0.5i").
// Explicit pairs are rescaled to unit norm.
std::optional<quantum::Qubit> parse_phi_spec(std::string_view spec);

// JSON object using DelayScanConfig field names. Throws photonic::ConfigError.
photonic::DelayScanConfig config_from_json(const std::string& text);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace teleclone::cli
