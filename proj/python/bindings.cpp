#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sinailab/commands.hpp"
#include "sinailab/config.hpp"
#include "sinailab/diffusion.hpp"
#include "sinailab/errors.hpp"
#include "sinailab/identities.hpp"
#include "sinailab/localtime.hpp"
#include "sinailab/potential.hpp"
#include "sinailab/special_functions.hpp"
#include "sinailab/verify.hpp"

namespace py = pybind11;
using namespace sinailab;

namespace {

// config arrives as a JSON string so the Python side can pass a plain dict
RunConfig config_from(const std::string& command, const std::string& target, const std::string& overrides)
{
    RunConfig c = default_config(command, target);
    if (!overrides.empty()) merge_json(c, nlohmann::json::parse(overrides));
    c.command = command;
    c.target = target;
    return c;
}

} // namespace

PYBIND11_MODULE(_sinailab, m)
{
    m.doc() = "sinailab native core";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<BudgetError>(m, "BudgetError");
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
        .def("split", &RngStream::split)
        .def("uniform", &RngStream::uniform)
        .def("normal", py::overload_cast<>(&RngStream::normal))
        .def("exponential", &RngStream::exponential)
        .def_property_readonly("seed", &RngStream::seed)
        .def_property_readonly("stream_id", &RngStream::stream_id);

    m.def("bessel_i", &bessel_i, py::arg("nu"), py::arg("x"));
    m.def("bessel_k", &bessel_k, py::arg("nu"), py::arg("x"));
    m.def("exp_weighted_area_laplace", &exp_weighted_area_laplace, py::arg("r"), py::arg("lam"));
    m.def("exp_weighted_area_laplace_normalized", &exp_weighted_area_laplace_normalized, py::arg("r"),
          py::arg("lam"));
    m.def("lemma23_laplace_reference", &lemma23_laplace_reference, py::arg("kappa"), py::arg("lam"), py::arg("b"),
          py::arg("a"));
    m.def("kotani_fixed_point", &kotani_fixed_point, py::arg("lam"));

    py::class_<Potential>(m, "Potential")
        .def(py::init([](double kappa, double resolution, std::uint64_t seed, std::uint64_t stream) {
                 return Potential(kappa, resolution, RngStream(seed, stream));
             }),
             py::arg("kappa"), py::arg("resolution"), py::arg("seed"), py::arg("stream_id") = 0)
        .def_static("flat", &Potential::flat, py::arg("kappa"), py::arg("resolution"), py::arg("extent"))
        .def_static("load", &Potential::load)
        .def("save", &Potential::save)
        .def("realize", &Potential::realize)
        .def("w", &Potential::w)
        .def("w_kappa", &Potential::w_kappa)
        .def("a_kappa", &Potential::a_kappa)
        .def("a_kappa_inverse", &Potential::a_kappa_inverse)
        .def_property_readonly("kappa", &Potential::kappa)
        .def_property_readonly("resolution", &Potential::resolution)
        .def_property_readonly("x_min", &Potential::x_min)
        .def_property_readonly("x_max", &Potential::x_max);

    m.def("kotani_rhs",
          [](const Potential& p, double lam, double v, double burn_in) {
              KotaniOptions o;
              o.burn_in = burn_in;
              return kotani_rhs(p, lam, v, o);
          },
          py::arg("potential"), py::arg("lam"), py::arg("v"), py::arg("burn_in") = 10.0);

    m.def("simulate_xi",
          [](double kappa, double horizon, double dt, std::uint64_t seed) {
              RngStream r(seed, 0);
              const XiPath p = simulate_xi(kappa, horizon, dt, r);
              return p.path.values();
          },
          py::arg("kappa"), py::arg("horizon"), py::arg("dt"), py::arg("seed"));

    m.def("exit_area_samples",
          [](double a, double b, std::size_t n, std::uint64_t seed) {
              const RngStream base(seed, 0);
              std::vector<double> out(n);
              for (std::size_t i = 0; i < n; ++i) {
                  RngStream r = base.split(i);
                  out[i] = exit_area_sample(a, b, r);
              }
              return out;
          },
          py::arg("a"), py::arg("b"), py::arg("n"), py::arg("seed"));

    m.def("identity_names", &identity_names);

    m.def("default_config",
          [](const std::string& command, const std::string& target) {
              return to_json(default_config(command, target)).dump();
          },
          py::arg("command") = "verify", py::arg("target") = "");

    m.def("verify",
          [](const std::string& identity, const std::string& overrides) {
              Report rep = [&] {
                  py::gil_scoped_release release;
                  return run_identity(config_from("verify", identity, overrides));
              }();
              return rep.to_json("").dump();
          },
          py::arg("identity"), py::arg("overrides") = "");

    m.def("estimate",
          [](const std::string& kind, const std::string& overrides) {
              RunConfig c = config_from("estimate", kind, overrides);
              c.format = "json";
              std::ostringstream out;
              {
                  py::gil_scoped_release release;
                  run_estimate(c, out);
              }
              return out.str();
          },
          py::arg("kind"), py::arg("overrides") = "");
}
