#include "sinailab/report.hpp"

#include <cmath>
#include <ctime>
#include <fstream>

#include "sinailab/errors.hpp"

namespace sinailab {

namespace {

// JSON has no inf/nan; encode them as strings so reports stay valid.
nlohmann::json number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

} // namespace

Report::Report(std::string identity, const RunConfig& config, std::uint64_t stream)
    : identity_(std::move(identity)), config_(sinailab::to_json(config)), seed_(config.seed), stream_(stream)
{
}

void Report::parameter(const std::string& key, nlohmann::json value) { parameters_[key] = std::move(value); }

void Report::note(const std::string& key, nlohmann::json value) { notes_[key] = std::move(value); }

const KsCheck& Report::ks(const std::string& name, const KsResult& r, double alpha)
{
    ks_.push_back({name, r, alpha, r.p_value > alpha});
    return ks_.back();
}

const Check& Report::check(const std::string& name, double value, double lo, double hi)
{
    checks_.push_back({name, value, lo, hi, value >= lo && value <= hi});
    return checks_.back();
}

const Check& Report::within_se(const std::string& name, double value, double reference, double se, double k)
{
    return check(name, value, reference - k * se, reference + k * se);
}

bool Report::passed() const
{
    for (const auto& k : ks_)
        if (!k.passed) return false;
    for (const auto& c : checks_)
        if (!c.passed) return false;
    return true;
}

nlohmann::json Report::to_json(const std::string& timestamp) const
{
    nlohmann::json j;
    j["identity"] = identity_;
    j["parameters"] = parameters_;
    j["n"] = n_;
    j["dt"] = dt_;
    j["seeds"] = {{"seed", seed_}, {"stream", stream_}};
    nlohmann::json stat = nlohmann::json::object(), pval = nlohmann::json::object();
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& k : ks_) {
        stat[k.name] = number(k.ks.statistic);
        pval[k.name] = number(k.ks.p_value);
        blocks.push_back({{"name", k.name},
                          {"statistic", number(k.ks.statistic)},
                          {"p_value", number(k.ks.p_value)},
                          {"n", k.ks.n},
                          {"m", k.ks.m},
                          {"alpha", k.alpha},
                          {"passed", k.passed}});
    }
    j["ks_stat"] = stat;
    j["p_value"] = pval;
    j["ks"] = blocks;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : checks_)
        checks.push_back({{"name", c.name},
                          {"value", number(c.value)},
                          {"lo", number(c.lo)},
                          {"hi", number(c.hi)},
                          {"passed", c.passed}});
    j["checks"] = checks;
    j["notes"] = notes_;
    j["passed"] = passed();
    j["config"] = config_;
    j["timestamp"] = timestamp;
    return j;
}

std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json(const std::string& path, const nlohmann::json& j)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path);
}

} // namespace sinailab
