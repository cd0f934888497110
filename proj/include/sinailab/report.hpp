#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sinailab/config.hpp"
#include "sinailab/stats.hpp"

namespace sinailab {

/// Named assertion: passes when lo <= value <= hi.
struct Check {
    std::string name;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool passed = false;
};

struct KsCheck {
    std::string name;
    KsResult ks;
    double alpha = 0.01;
    bool passed = false;
};

/// Accumulates the outcome of one identity run. Serialises to
/// {identity, parameters, n, ks_stat, p_value, dt, seeds, ...} with the
/// resolved config embedded.
class Report {
public:
    Report(std::string identity, const RunConfig& config, std::uint64_t stream);

    const std::string& identity() const { return identity_; }
    void parameter(const std::string& key, nlohmann::json value);
    /// Informational values, never asserted.
    void note(const std::string& key, nlohmann::json value);
    const KsCheck& ks(const std::string& name, const KsResult& r, double alpha);
    const Check& check(const std::string& name, double value, double lo, double hi);
    /// |value - reference| <= k * se
    const Check& within_se(const std::string& name, double value, double reference, double se, double k = 3.0);
    void set_n(std::size_t n) { n_ = n; }
    void set_dt(double dt) { dt_ = dt; }

    bool passed() const;
    const std::vector<Check>& checks() const { return checks_; }
    const std::vector<KsCheck>& ks_checks() const { return ks_; }

    /// Deterministic content; timestamp is the only field that varies.
    nlohmann::json to_json(const std::string& timestamp) const;

private:
    std::string identity_;
    nlohmann::json config_;
    std::uint64_t seed_;
    std::uint64_t stream_;
    nlohmann::json parameters_ = nlohmann::json::object();
    nlohmann::json notes_ = nlohmann::json::object();
    std::size_t n_ = 0;
    double dt_ = 0.0;
    std::vector<KsCheck> ks_;
    std::vector<Check> checks_;
};

/// ISO-8601 UTC, second resolution.
std::string utc_timestamp();

/// Pretty-printed JSON to path; IoError on failure.
void write_json(const std::string& path, const nlohmann::json& j);

} // namespace sinailab
