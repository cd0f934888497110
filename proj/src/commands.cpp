#include "sinailab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "sinailab/diffusion.hpp"
#include "sinailab/errors.hpp"
#include "sinailab/identities.hpp"
#include "sinailab/parallel.hpp"
#include "sinailab/potential.hpp"
#include "sinailab/report.hpp"

namespace sinailab {

namespace {

// Stream ids for the non-verify commands, disjoint from the identity ids.
constexpr std::uint64_t kEstimateStream = 100;
constexpr std::uint64_t kSimulateStream = 200;

// measured on the reference box, single core
constexpr double kXiStepSeconds = 2.5e-8;
constexpr double kChainJumpSeconds = 6e-8;
constexpr double kPotentialPointSeconds = 3e-8;

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool wants_direct(const std::string& route)
{
    if (route != "direct" && route != "xi" && route != "both") throw UsageError("unknown route: " + route);
    return route != "xi";
}

double chain_jumps(double t) { return 1e3 * std::log(t) * std::log(t); }

double potential_points(double t, double resolution) { return 4.0 * std::log(t) * std::log(t) / resolution; }

nlohmann::json rate_json(const RateEstimate& e)
{
    const auto num = [](double x) -> nlohmann::json {
        if (std::isnan(x)) return nullptr;
        if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
        return x;
    };
    return {{"estimator", e.estimator}, {"kappa", e.kappa}, {"t", e.t}, {"v", e.v},
            {"p_hat", e.p_hat}, {"ci_lo", e.ci.lo}, {"ci_hi", e.ci.hi}, {"rate", num(e.rate)},
            {"n", e.n}, {"censored_count", e.censored}, {"rate_lo", num(e.rate_lo)},
            {"rate_hi", num(e.rate_hi)}, {"interval_only", e.interval_only}};
}

void emit_rates(const RunConfig& c, const std::vector<RateEstimate>& rows, std::ostream& out)
{
    const std::string format = resolved_format(c);
    if (format == "json") {
        nlohmann::json j;
        j["config"] = to_json(c);
        j["seed"] = c.seed;
        j["rows"] = nlohmann::json::array();
        for (const auto& e : rows) j["rows"].push_back(rate_json(e));
        out << j.dump(2) << '\n';
    } else if (format == "csv") {
        out << "# config=" << to_json(c).dump() << '\n';
        write_rate_csv_header(out);
        for (const auto& e : rows) write_rate_csv_row(out, c.seed, e);
    } else {
        throw UsageError("estimate: format must be csv or json");
    }
    if (!out) throw IoError("estimate: write failed");
}

void check_finite_positive(double x, const char* what)
{
    if (!(x > 0.0) || !std::isfinite(x)) throw UsageError(std::string(what) + " must be positive");
}

} // namespace

double estimate_cost_seconds(const RunConfig& c)
{
    const double workers = static_cast<double>(worker_count());
    if (c.target == "quenched") {
        return potential_points(c.t, c.resolution) * kPotentialPointSeconds +
               static_cast<double>(c.n) * chain_jumps(c.t) * kChainJumpSeconds / workers;
    }
    if (c.target == "annealed") {
        double s = 0.0;
        if (wants_direct(c.route))
            s += static_cast<double>(c.n_env) *
                 (potential_points(c.t, c.resolution) * kPotentialPointSeconds +
                  static_cast<double>(c.n_path) * chain_jumps(c.t) * kChainJumpSeconds);
        if (c.route != "direct") s += static_cast<double>(c.n) * std::ceil(c.v / c.dt) * kXiStepSeconds / workers;
        return s;
    }
    throw UsageError("estimate: kind must be quenched or annealed, got '" + c.target + "'");
}

void run_estimate(const RunConfig& c, std::ostream& out)
{
    check_finite_positive(c.v, "v");
    if (!(c.t > c.v)) throw UsageError("estimate: need t > v");
    check_finite_positive(c.resolution, "resolution");
    check_finite_positive(c.dt, "dt");
    if (c.n == 0) throw UsageError("estimate: n must be positive");
    const double cost = estimate_cost_seconds(c);
    if (c.max_seconds > 0.0 && cost > c.max_seconds)
        throw BudgetError("estimate: expected run time " + fmt(cost) + " s exceeds --max-seconds " +
                          fmt(c.max_seconds));
    const RngStream rng(c.seed, kEstimateStream);
    std::vector<RateEstimate> rows;
    if (c.target == "quenched") {
        Potential p(c.kappa, c.resolution, rng.split(0));
        const QuenchedTail q = quenched_tail(p, c.t, c.v, c.n, rng.split(1));
        rows = {q.at_time, q.sup};
    } else {
        AnnealedOptions o;
        o.resolution = c.resolution;
        o.xi_dt = c.dt;
        o.n_xi = c.n;
        o.direct = wants_direct(c.route);
        o.xi_route = c.route != "direct";
        const AnnealedTail a = annealed_tail(c.kappa, c.t, c.v, c.n_env, c.n_path, rng, o);
        if (o.direct) rows.push_back(a.direct);
        if (o.xi_route) rows.push_back(a.xi_route);
    }
    emit_rates(c, rows, out);
}

void run_simulate(const RunConfig& c, std::ostream& out)
{
    check_finite_positive(c.horizon, "horizon");
    check_finite_positive(c.dt, "dt");
    check_finite_positive(c.resolution, "resolution");
    const RngStream rng(c.seed, kSimulateStream);
    const std::string config_line = "# config=" + to_json(c).dump() + "\n";
    if (c.target == "potential") {
        if (c.output.empty()) throw UsageError("simulate potential: --output is required");
        Potential full(c.kappa, c.resolution, rng.split(0));
        full.realize(-c.horizon, c.horizon);
        // realize() works in blocks; export exactly [-horizon, horizon]
        const long k = std::lround(c.horizon / c.resolution);
        std::vector<double> left, right;
        for (long i = 0; i <= k; ++i) {
            left.push_back(full.w_at(-i));
            right.push_back(full.w_at(i));
        }
        const Potential p = Potential::from_values(c.kappa, c.resolution, std::move(left), std::move(right),
                                                   full.seed(), full.stream_id());
        const bool csv = c.output.size() >= 4 && c.output.compare(c.output.size() - 4, 4, ".csv") == 0;
        if (csv) {
            std::ofstream f(c.output);
            if (!f) throw IoError("cannot open " + c.output + " for writing");
            f << config_line;
            p.save_csv(f);
        } else {
            p.save(c.output);
            write_json(c.output + ".json", to_json(c));
        }
        return;
    }
    SamplePath path = [&] {
        if (c.target == "xpath") {
            Potential p(c.kappa, c.resolution, rng.split(0));
            return simulate_x(p, c.horizon, c.dt, rng.split(1));
        }
        if (c.target == "xi") {
            RngStream r = rng.split(2);
            return simulate_xi(c.kappa, c.horizon, c.dt, r).path;
        }
        throw UsageError("simulate: target must be xpath, potential or xi, got '" + c.target + "'");
    }();
    out << config_line;
    out << (c.target == "xi" ? "t,xi\n" : "t,x\n");
    const auto& vals = path.values();
    for (std::size_t k = 0; k < vals.size(); ++k) out << fmt(path.grid().time(k)) << ',' << fmt(vals[k]) << '\n';
    if (!out) throw IoError("simulate: write failed");
}

} // namespace sinailab
