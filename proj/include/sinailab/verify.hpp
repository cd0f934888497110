#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sinailab/config.hpp"
#include "sinailab/report.hpp"

namespace sinailab {

/// thm41, kotani, rayknight, lemma22, lemma23, lemma25, lamperti,
/// skewproduct, lemma52.
const std::vector<std::string>& identity_names();

/// Fixed stream id of an identity; UsageError for unknown names.
std::uint64_t identity_stream(const std::string& name);

/// Runs config.target with the parameters in config. Randomness comes from
/// RngStream(config.seed, identity_stream(config.target)).
Report run_identity(const RunConfig& config);

} // namespace sinailab
