#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace sinailab {

/// Everything a CLI run depends on. Defaults are listed in the README; a
/// config file overrides them and command-line flags override the file.
struct RunConfig {
    std::string command = "verify";
    /// Identity name, estimate kind or simulate target.
    std::string target;
    std::uint64_t seed = 1;
    double dt = 1e-4;
    double resolution = 1e-3;
    std::size_t n = 10000;
    std::size_t n_env = 200;
    std::size_t n_path = 200;
    double kappa = 0.0;
    double t = 22026.465794806718;
    double v = 1.0;
    double horizon = 10.0;
    std::string output;
    /// csv | json | bin; empty picks the command's default.
    std::string format;

    // identity parameters
    std::vector<double> lambdas{0.25, 0.5};
    std::vector<double> points{0.0, 0.5, 0.9};
    std::vector<double> tail_points{1.0, 2.0, 4.0};
    double lambda = 1.0;
    double a = 0.0;
    double b = 1.0;
    double r = 1.0;
    double x = 3.0;
    double u = 0.3;
    double d1 = 2.0;
    double d2 = 4.0;
    double r1 = 0.0;
    double r2 = 2.0;
    double h = 0.02;
    double eps = 1e-4;
    double cap = 400.0;
    double burn_in = 10.0;
    std::size_t potentials = 10;
    std::size_t bootstrap = 400;
    double alpha = 0.01;
    std::string mutation = "none";
    /// direct | xi | both
    std::string route = "both";
    /// 0 disables the budget guard.
    double max_seconds = 0.0;
};

/// Defaults for a command and target, with the seed taken from
/// SINAILAB_SEED when set. Unknown targets keep the generic defaults.
RunConfig default_config(const std::string& command = "verify", const std::string& target = "");

nlohmann::json to_json(const RunConfig& c);

/// Overrides the fields present in j; unknown keys raise UsageError.
void merge_json(RunConfig& c, const nlohmann::json& j);

/// Reads a JSON object from path into c. IoError on read failure, UsageError
/// on malformed content.
void merge_file(RunConfig& c, const std::string& path);

std::string resolved_format(const RunConfig& c);

} // namespace sinailab
