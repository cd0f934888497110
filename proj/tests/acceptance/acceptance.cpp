// Acceptance run: one line per criterion, exit status 0 iff every asserted
// criterion passes. Smoke checks (criterion 10) are printed, never asserted.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sinailab/commands.hpp"
#include "sinailab/config.hpp"
#include "sinailab/identities.hpp"
#include "sinailab/parallel.hpp"
#include "sinailab/potential.hpp"
#include "sinailab/verify.hpp"

using namespace sinailab;
using nlohmann::json;

namespace {

// Fixed before the first full run; never tuned.
constexpr std::uint64_t kSeed = 20261016;

struct Line {
    int id;
    bool passed;
    bool asserted;
    std::string detail;
};

std::vector<Line> g_lines;
// Every command with its first output; criterion 11 reruns and compares.
struct Command {
    std::string label;
    std::function<std::string()> run;
    std::string first;
};
std::vector<Command> g_commands;

constexpr double kPi = 3.14159265358979323846;

double elapsed(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig verify_config(const std::string& identity)
{
    RunConfig c = default_config("verify", identity);
    c.seed = kSeed;
    return c;
}

std::string report_text(const Report& r) { return r.to_json("").dump(); }

Report run_and_record(const std::string& label, const RunConfig& c)
{
    Report r = run_identity(c);
    g_commands.push_back({label, [c] { return report_text(run_identity(c)); }, report_text(r)});
    return r;
}

std::string failures(const Report& r)
{
    std::ostringstream os;
    for (const auto& k : r.ks_checks())
        if (!k.passed) os << ' ' << k.name << "(p=" << k.ks.p_value << ')';
    for (const auto& c : r.checks())
        if (!c.passed) os << ' ' << c.name << "(" << c.value << " not in [" << c.lo << ',' << c.hi << "])";
    return os.str();
}

void print(const Line& l)
{
    const char* status = !l.asserted ? "REPORT" : l.passed ? "PASS" : "FAIL";
    std::printf("criterion %2d: %-6s %s\n", l.id, status, l.detail.c_str());
    std::fflush(stdout);
}

void add(int id, bool passed, const std::string& detail, bool asserted = true)
{
    g_lines.push_back({id, passed, asserted, detail});
    print(g_lines.back());
}

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

void criterion1()
{
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream os;
    for (double v : {0.5, 1.0, 2.0}) {
        RunConfig c = verify_config("thm41");
        c.v = v;
        c.dt = 1e-4;
        const Report clean = run_and_record("thm41 v=" + fmt("%g", v), c);
        ok = ok && clean.passed();
        os << "v=" << v << " p=";
        for (const auto& k : clean.ks_checks()) os << k.ks.p_value << (k.name == "sum" ? "" : "/");

        // Mutations on route B, route A samples shared with the clean run.
        const RngStream rng(c.seed, identity_stream("thm41"));
        Theorem41Options o;
        o.cap = c.cap;
        o.resolution = c.resolution;
        const auto a = theorem41_samples(Route::a_diffusion, c.kappa, v, c.n, c.dt, rng.split(0), o);
        double worst = 0.0;
        for (Mutation m : {Mutation::drop_minus_one, Mutation::bessel_start_squared}) {
            o.mutation = m;
            const auto b = theorem41_samples(Route::b_xi_bessel, c.kappa, v, c.n, c.dt, rng.split(1), o);
            const Theorem41Report r = theorem41_report(c.kappa, v, c.dt, o, a, b);
            // drop_minus_one targets theta1, bessel_start_squared theta2; both move the sum.
            const double target = m == Mutation::drop_minus_one ? r.theta1.ks.p_value : r.theta2.ks.p_value;
            worst = std::max({worst, target, r.sum.ks.p_value});
        }
        ok = ok && worst < 1e-6 && failures(clean).empty();
        os << " mutated max p=" << worst << (failures(clean).empty() ? "" : " failed:" + failures(clean)) << "; ";
    }
    os << fmt("(%.0f s)", elapsed(t0));
    add(1, ok, os.str());
}

void criterion2()
{
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    double zmax = 0.0, shift = 0.0;
    std::string fail;
    for (double v : {0.5, 1.0}) {
        RunConfig c = verify_config("kotani");
        c.v = v;
        c.lambdas = {0.25, 0.5};
        c.potentials = 10;
        const Report r = run_and_record("kotani v=" + fmt("%g", v), c);
        ok = ok && r.passed();
        fail += failures(r);
        for (const auto& ch : r.checks()) {
            if (ch.name.rfind("z[", 0) == 0) zmax = std::max(zmax, std::fabs(ch.value));
            else shift = std::max(shift, ch.value);
        }
    }
    add(2, ok, "max|z|=" + fmt("%.2f", zmax) + " max burn-in shift=" + fmt("%.2e", shift) + fail +
                   fmt(" (%.0f s)", elapsed(t0)));
}

void criterion_single(int id, const std::vector<std::pair<std::string, RunConfig>>& runs)
{
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream os;
    for (const auto& [label, c] : runs) {
        const Report r = run_and_record(label, c);
        ok = ok && r.passed();
        os << label << ':';
        for (const auto& k : r.ks_checks()) os << ' ' << k.name << " p=" << k.ks.p_value;
        for (const auto& ch : r.checks()) os << ' ' << ch.name << '=' << ch.value;
        const std::string f = failures(r);
        if (!f.empty()) os << " FAILED" << f;
        os << "; ";
    }
    os << fmt("(%.0f s)", elapsed(t0));
    add(id, ok, os.str());
}

json estimate_and_record(const std::string& label, const RunConfig& c)
{
    const auto fn = [c] {
        std::ostringstream out;
        run_estimate(c, out);
        return out.str();
    };
    const std::string text = fn();
    g_commands.push_back({label, fn, text});
    return json::parse(text);
}

void criterion10()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream os;
    bool all = true;

    RunConfig q = default_config("estimate", "quenched");
    q.seed = kSeed;
    q.format = "json";
    const json jq = estimate_and_record("estimate quenched", q);
    for (const auto& row : jq["rows"]) {
        const bool is_x = row["estimator"] == "quenched_x";
        const json rate = row["rate"];
        const bool in = rate.is_number() && rate.get<double>() >= -3.0 && rate.get<double>() <= 0.0;
        if (is_x) all = all && in;
        os << row["estimator"].get<std::string>() << " rate=" << rate.dump() << " p=" << row["p_hat"].dump()
           << (in ? " in [-3,0]" : " outside [-3,0]") << "; ";
    }

    RunConfig a = default_config("estimate", "annealed");
    a.seed = kSeed;
    a.format = "json";
    a.route = "xi";
    const json ja = estimate_and_record("estimate annealed", a);
    const double ref = -kPi * kPi / 8.0;
    for (const auto& row : ja["rows"]) {
        const json rate = row["rate"];
        const bool in = rate.is_number() && rate.get<double>() <= ref / 2.0 && rate.get<double>() >= 2.0 * ref;
        all = all && in;
        os << "annealed xi rate=" << rate.dump() << " vs " << fmt("%.4f", ref) << (in ? " within x2" : " NOT within x2")
           << "; ";
    }

    const double v = 4.0, r = 2.0, eps = 0.01;
    const std::size_t n = 20000;
    const auto f2 = [=] {
        const RngStream base(kSeed, 300);
        const auto hits = replicate(n, [&](std::size_t i) {
            Potential p(0.0, 1e-3, base.split(i));
            p.realize(0.0, v);
            return f2_flag(p, v, r, eps) ? 1 : 0;
        });
        std::size_t k = 0;
        for (int h : hits) k += static_cast<std::size_t>(h);
        return static_cast<double>(k) / static_cast<double>(n);
    };
    const double p_hat = f2();
    g_commands.push_back({"f2", [f2] { return fmt("%.17g", f2()); }, fmt("%.17g", p_hat)});
    const double f2_ref = f2_asymptotic_reference(v, r, eps);
    const bool in = p_hat >= 0.5 * f2_ref && p_hat <= 2.0 * f2_ref;
    all = all && in;
    os << "P(F2)=" << p_hat << " vs asymptotic " << f2_ref << (in ? " within x2" : " NOT within x2");
    os << fmt(" (%.0f s)", elapsed(t0));
    add(10, all, os.str(), false);
}

void criterion11()
{
    const auto t0 = std::chrono::steady_clock::now();
    // The rerun uses another worker count: replicas are split by index, so
    // the output must not depend on it.
    const unsigned before = worker_count();
    setenv("SINAILAB_THREADS", before == 1 ? "3" : "1", 1);
    bool ok = true;
    std::string bad;
    for (const auto& cmd : g_commands) {
        if (cmd.run() != cmd.first) {
            ok = false;
            bad += " " + cmd.label;
        }
    }
    unsetenv("SINAILAB_THREADS");
    add(11, ok && !g_commands.empty(),
        std::to_string(g_commands.size()) + " commands rerun with " + (before == 1 ? "3" : "1") + " workers" +
            (ok ? ", identical output" : ", differing:" + bad) + fmt(" (%.0f s)", elapsed(t0)));
}

} // namespace

int main(int argc, char** argv)
{
    // optional criterion filter, e.g. "acceptance 3 4"
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    const auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

    std::printf("acceptance seed %llu, workers %u\n", static_cast<unsigned long long>(kSeed), worker_count());
    if (want(1)) criterion1();
    if (want(2)) criterion2();
    if (want(3)) criterion_single(3, {{"lemma22", verify_config("lemma22")}});
    if (want(4)) {
        RunConfig r1 = verify_config("lemma25"), r5 = verify_config("lemma25");
        r1.r = 1.0;
        r5.r = 5.0;
        criterion_single(4, {{"lemma25 r=1", r1}, {"lemma25 r=5", r5}});
    }
    if (want(5)) {
        RunConfig half = verify_config("lemma23"), quarter = verify_config("lemma23");
        quarter.kappa = 0.25;
        criterion_single(5, {{"lemma23 kappa=0.5", half}, {"lemma23 kappa=0.25", quarter}});
    }
    if (want(6)) criterion_single(6, {{"rayknight", verify_config("rayknight")}});
    if (want(7)) criterion_single(7, {{"lamperti", verify_config("lamperti")}});
    if (want(8)) criterion_single(8, {{"skewproduct", verify_config("skewproduct")}});
    if (want(9)) {
        RunConfig a = verify_config("lemma52"), b = verify_config("lemma52");
        b.v = 100.0;
        b.x = 4.0;
        criterion_single(9, {{"lemma52 (50,3)", a}, {"lemma52 (100,4)", b}});
    }
    if (want(10)) criterion10();
    if (want(11)) criterion11();

    bool ok = true;
    std::printf("\nsummary\n");
    for (const auto& l : g_lines) {
        print(l);
        if (l.asserted) ok = ok && l.passed;
    }
    std::printf("%s\n", ok ? "ALL ASSERTED CRITERIA PASS" : "SOME ASSERTED CRITERIA FAIL");
    return ok ? 0 : 1;
}
