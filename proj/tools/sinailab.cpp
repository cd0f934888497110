#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinailab/commands.hpp"
#include "sinailab/config.hpp"
#include "sinailab/errors.hpp"
#include "sinailab/report.hpp"
#include "sinailab/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kAssertion = 1;
constexpr int kUsage = 2;
constexpr int kBudget = 3;
constexpr int kIo = 4;

using sinailab::RunConfig;

// A flag writes into a staging config; only flags that were actually given
// are copied onto the resolved config, after the file has been merged.
struct FlagSet {
    RunConfig staging;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> appliers;

    template <class T>
    void add(CLI::App* app, const std::string& name, T RunConfig::*member, const std::string& help)
    {
        CLI::Option* opt = app->add_option(name, staging.*member, help);
        appliers.emplace_back(opt, [this, member](RunConfig& c) { c.*member = staging.*member; });
    }

    void apply(RunConfig& c) const
    {
        for (const auto& [opt, fn] : appliers)
            if (opt->count() > 0) fn(c);
    }
};

void add_common(CLI::App* app, FlagSet& f)
{
    f.add(app, "--seed", &RunConfig::seed, "master seed (default SINAILAB_SEED or 1)");
    f.add(app, "--dt", &RunConfig::dt, "time step");
    f.add(app, "--resolution", &RunConfig::resolution, "potential grid spacing");
    f.add(app, "--n", &RunConfig::n, "sample count");
    f.add(app, "--n-env", &RunConfig::n_env, "potentials for the direct annealed route");
    f.add(app, "--n-path", &RunConfig::n_path, "paths per potential");
    f.add(app, "--kappa", &RunConfig::kappa, "drift parameter");
    f.add(app, "--t", &RunConfig::t, "time horizon of the tail estimate");
    f.add(app, "--v", &RunConfig::v, "level");
    f.add(app, "--horizon", &RunConfig::horizon, "simulation horizon or half-extent");
    f.add(app, "--output,-o", &RunConfig::output, "output path (stdout when empty)");
    f.add(app, "--format", &RunConfig::format, "csv | json | bin");
    f.add(app, "--lambdas", &RunConfig::lambdas, "Laplace arguments");
    f.add(app, "--points", &RunConfig::points, "local time positions");
    f.add(app, "--tail-points", &RunConfig::tail_points, "tail thresholds");
    f.add(app, "--lambda", &RunConfig::lambda, "Laplace argument");
    f.add(app, "--a", &RunConfig::a, "lower level");
    f.add(app, "--b", &RunConfig::b, "upper level");
    f.add(app, "--r", &RunConfig::r, "passage level");
    f.add(app, "--x", &RunConfig::x, "confinement level or Lamperti time");
    f.add(app, "--u", &RunConfig::u, "skew-product clock");
    f.add(app, "--d1", &RunConfig::d1, "first Bessel dimension");
    f.add(app, "--d2", &RunConfig::d2, "second Bessel dimension");
    f.add(app, "--r1", &RunConfig::r1, "first Bessel start");
    f.add(app, "--r2", &RunConfig::r2, "second Bessel start");
    f.add(app, "--bin-width", &RunConfig::h, "spatial bin width h");
    f.add(app, "--eps", &RunConfig::eps, "relative step of clock-driven samplers");
    f.add(app, "--cap", &RunConfig::cap, "censoring cap");
    f.add(app, "--burn-in", &RunConfig::burn_in, "Kotani burn-in length");
    f.add(app, "--potentials", &RunConfig::potentials, "independent potentials for kotani");
    f.add(app, "--bootstrap", &RunConfig::bootstrap, "bootstrap resamples");
    f.add(app, "--alpha", &RunConfig::alpha, "KS level");
    f.add(app, "--mutation", &RunConfig::mutation, "none | drop_minus_one | bessel_start_squared");
    f.add(app, "--route", &RunConfig::route, "direct | xi | both");
    f.add(app, "--max-seconds", &RunConfig::max_seconds, "refuse runs estimated to take longer");
}

// stdout unless a path is set
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw sinailab::IoError("cannot open " + path + " for writing");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void close()
    {
        if (!file_) {
            std::cout.flush();
            return;
        }
        file_->close();
        if (!*file_) throw sinailab::IoError("write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

int run_verify(const RunConfig& c)
{
    const sinailab::Report rep = sinailab::run_identity(c);
    Sink sink(c.output);
    sink.stream() << rep.to_json(sinailab::utc_timestamp()).dump(2) << '\n';
    sink.close();
    for (const auto& k : rep.ks_checks())
        std::cerr << (k.passed ? "pass " : "FAIL ") << k.name << " D=" << k.ks.statistic << " p=" << k.ks.p_value << '\n';
    for (const auto& ch : rep.checks())
        std::cerr << (ch.passed ? "pass " : "FAIL ") << ch.name << " value=" << ch.value << " in [" << ch.lo << ", "
                  << ch.hi << "]\n";
    return rep.passed() ? kOk : kAssertion;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulation lab for diffusions in Brownian potentials"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (defaults < file < flags)");

    std::string target;
    FlagSet flags;
    CLI::App* verify = app.add_subcommand("verify", "check an identity in law and write a JSON report");
    verify->add_option("identity", target, "thm41 kotani rayknight lemma22 lemma23 lemma25 lamperti skewproduct lemma52")
        ->required();
    CLI::App* estimate = app.add_subcommand("estimate", "tail and rate estimates as CSV");
    estimate->add_option("kind", target, "quenched | annealed")->required();
    CLI::App* simulate = app.add_subcommand("simulate", "export paths or potentials");
    simulate->add_option("what", target, "xpath | potential | xi")->required();
    for (CLI::App* sub : {verify, estimate, simulate}) {
        sub->add_option("--config", config_path, "JSON config file (defaults < file < flags)");
        add_common(sub, flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const std::string command = verify->parsed() ? "verify" : estimate->parsed() ? "estimate" : "simulate";
    try {
        RunConfig c = sinailab::default_config(command, target);
        if (!config_path.empty()) sinailab::merge_file(c, config_path);
        flags.apply(c);
        c.command = command;
        c.target = target;
        if (command == "verify") return run_verify(c);
        if (command == "simulate" && target == "potential") {
            sinailab::run_simulate(c, std::cout);
            return kOk;
        }
        Sink sink(c.output);
        if (command == "estimate") {
            sinailab::run_estimate(c, sink.stream());
        } else {
            sinailab::run_simulate(c, sink.stream());
        }
        sink.close();
        return kOk;
    } catch (const sinailab::UsageError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const sinailab::BudgetError& e) {
        std::cerr << "budget: " << e.what() << '\n';
        return kBudget;
    } catch (const sinailab::IoError& e) {
        std::cerr << "io: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kAssertion;
    }
}
