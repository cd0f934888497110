#include "sinailab/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sinailab/errors.hpp"

namespace sinailab {

namespace {

// One table of (key, member) pairs drives both directions.
template <class C, class F>
void visit_fields(C& c, F&& f)
{
    f("command", c.command);
    f("target", c.target);
    f("seed", c.seed);
    f("dt", c.dt);
    f("resolution", c.resolution);
    f("n", c.n);
    f("n_env", c.n_env);
    f("n_path", c.n_path);
    f("kappa", c.kappa);
    f("t", c.t);
    f("v", c.v);
    f("horizon", c.horizon);
    f("output", c.output);
    f("format", c.format);
    f("lambdas", c.lambdas);
    f("points", c.points);
    f("tail_points", c.tail_points);
    f("lambda", c.lambda);
    f("a", c.a);
    f("b", c.b);
    f("r", c.r);
    f("x", c.x);
    f("u", c.u);
    f("d1", c.d1);
    f("d2", c.d2);
    f("r1", c.r1);
    f("r2", c.r2);
    f("h", c.h);
    f("eps", c.eps);
    f("cap", c.cap);
    f("burn_in", c.burn_in);
    f("potentials", c.potentials);
    f("bootstrap", c.bootstrap);
    f("alpha", c.alpha);
    f("mutation", c.mutation);
    f("route", c.route);
    f("max_seconds", c.max_seconds);
}

void apply_target_defaults(RunConfig& c)
{
    const std::string& t = c.target;
    if (c.command == "verify") {
        if (t == "kotani") {
            c.potentials = 10;
        } else if (t == "rayknight") {
            c.b = 1.0;
            c.h = 0.005;
        } else if (t == "lemma22") {
            c.a = 0.0;
            c.b = 1.0;
            c.n = 1'000'000;
        } else if (t == "lemma23") {
            c.kappa = 0.5;
            c.a = 0.5;
            c.b = 1.0;
            c.dt = 1e-5;
            c.cap = 1e4;
        } else if (t == "lemma25") {
            c.n = 100'000;
        } else if (t == "lamperti") {
            c.x = 1.0;
        } else if (t == "lemma52") {
            c.v = 50.0;
            c.x = 3.0;
            c.horizon = 200.0;
            c.dt = 1e-3;
            c.n = 100'000;
        }
    } else if (c.command == "estimate") {
        c.dt = 0.01;
        if (t == "quenched") {
            c.t = 3269017.3724721107;
            c.v = 60.0;
            c.n = 2000;
        } else if (t == "annealed") {
            c.v = 300.0;
            c.n = 100'000;
        }
    } else if (c.command == "simulate") {
        if (t == "xi") {
            c.horizon = 50.0;
            c.dt = 1e-3;
        } else if (t == "xpath") {
            c.dt = 1e-3;
        }
    }
}

} // namespace

RunConfig default_config(const std::string& command, const std::string& target)
{
    RunConfig c;
    c.command = command;
    c.target = target;
    apply_target_defaults(c);
    if (const char* env = std::getenv("SINAILAB_SEED")) {
        errno = 0;
        char* end = nullptr;
        const unsigned long long s = std::strtoull(env, &end, 10);
        if (errno != 0 || end == env || *end != '\0')
            throw UsageError(std::string("SINAILAB_SEED is not an unsigned integer: ") + env);
        c.seed = s;
    }
    return c;
}

nlohmann::json to_json(const RunConfig& c)
{
    nlohmann::json j = nlohmann::json::object();
    visit_fields(c, [&](const char* key, const auto& value) { j[key] = value; });
    return j;
}

void merge_json(RunConfig& c, const nlohmann::json& j)
{
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    const RunConfig reference;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        visit_fields(reference, [&](const char* key, const auto&) { known = known || it.key() == key; });
        if (!known) throw UsageError("unknown config key: " + it.key());
    }
    visit_fields(c, [&](const char* key, auto& value) {
        const auto it = j.find(key);
        if (it == j.end()) return;
        try {
            it->get_to(value);
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(std::string("config key ") + key + ": " + e.what());
        }
    });
}

void merge_file(RunConfig& c, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
    merge_json(c, j);
}

std::string resolved_format(const RunConfig& c)
{
    if (!c.format.empty()) return c.format;
    if (c.command == "verify") return "json";
    return "csv";
}

} // namespace sinailab
