#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gptlab/cli.hpp"

namespace py = pybind11;

namespace {

using gptlab::json;

// scalar: "auto" keeps the command-line default (exact unless the space forces
// floating point), "exact"/"float" pin the mode as an explicit flag would.
gptlab::cli::Options make_options(const std::string& scalar, double eps, std::uint64_t seed,
                                  std::size_t budget, const std::string& op, std::string* capture,
                                  std::string* capture_csv = nullptr) {
  if (scalar != "auto" && scalar != "exact" && scalar != "float")
    throw gptlab::UsageError("scalar must be auto, exact, or float");
  gptlab::cli::Options o;
  o.scalar = scalar == "auto" ? "exact" : scalar;
  o.scalar_explicit = scalar != "auto";
  o.eps = eps;
  o.seed = seed;
  o.budget = budget;
  o.echo = {"gptlab", op};
  o.capture = capture;
  o.capture_csv = capture_csv;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact convex-operational state spaces, composites, and protocols";
  m.attr("__version__") = gptlab::kToolVersion;

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const gptlab::SearchBudgetExceededError& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    } catch (const gptlab::Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def(
      "space",
      [](const std::string& kind, const std::string& param, const std::string& scalar, double eps) {
        std::string out;
        auto o = make_options(scalar, eps, 0, 0, "space", &out);
        gptlab::cli::cmd_space(o, kind, param);
        return out;
      },
      py::arg("kind"), py::arg("param"), py::arg("scalar") = "auto", py::arg("eps") = 1e-9);

  m.def(
      "tensor",
      [](const std::string& a, const std::string& b, const std::string& kind,
         const std::string& scalar, double eps) {
        std::string out;
        auto o = make_options(scalar, eps, 0, 0, "tensor", &out);
        gptlab::cli::cmd_tensor(o, a, b, kind);
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("kind"), py::arg("scalar") = "auto",
      py::arg("eps") = 1e-9);

  m.def(
      "distinguish",
      [](const std::string& space, const std::vector<std::string>& vertices,
         const std::string& scalar, double eps) {
        std::string out;
        auto o = make_options(scalar, eps, 0, 0, "distinguish", &out);
        gptlab::cli::cmd_distinguish(o, space, vertices);
        return out;
      },
      py::arg("space"), py::arg("vertices"), py::arg("scalar") = "auto", py::arg("eps") = 1e-9);

  m.def(
      "broadcast",
      [](const std::string& space, const std::vector<std::string>& vertices, std::size_t budget,
         const std::string& scalar, double eps) {
        std::string out;
        auto o = make_options(scalar, eps, 0, budget, "broadcast", &out);
        gptlab::cli::cmd_broadcast(o, space, vertices);
        return out;
      },
      py::arg("space"), py::arg("vertices"), py::arg("budget") = 0, py::arg("scalar") = "auto",
      py::arg("eps") = 1e-9);

  m.def(
      "nondisturb",
      [](const std::string& space, const std::string& map_arg, const std::string& scalar,
         double eps) {
        std::string out;
        auto o = make_options(scalar, eps, 0, 0, "nondisturb", &out);
        gptlab::cli::cmd_nondisturb(o, space, map_arg);
        return out;
      },
      py::arg("space"), py::arg("map_arg") = "", py::arg("scalar") = "auto", py::arg("eps") = 1e-9);

  m.def(
      "bitcommit",
      [](const std::string& space, const std::string& n_spec, int runs, int hiding_upto,
         std::uint64_t seed, const std::string& scalar, double eps) {
        std::string out, csv;
        auto o = make_options(scalar, eps, seed, 0, "bitcommit", &out, &csv);
        gptlab::cli::cmd_bitcommit(o, space, n_spec, runs, hiding_upto);
        return std::make_pair(out, csv);
      },
      py::arg("space"), py::arg("n_spec") = "", py::arg("runs") = 0, py::arg("hiding_upto") = 4,
      py::arg("seed") = 0, py::arg("scalar") = "auto", py::arg("eps") = 1e-9);

  m.def(
      "teleport_deterministic",
      [](const std::string& space, const std::string& group, std::size_t budget,
         const std::string& scalar, double eps) {
        std::string out;
        auto o = make_options(scalar, eps, 0, budget, "teleport", &out);
        gptlab::cli::cmd_teleport(o, space, group, false, false);
        return out;
      },
      py::arg("space"), py::arg("group"), py::arg("budget") = 0, py::arg("scalar") = "auto",
      py::arg("eps") = 1e-9);

  m.def(
      "teleport_conclusive",
      [](const std::string& space, const std::string& scalar, double eps) {
        std::string out;
        auto o = make_options(scalar, eps, 0, 0, "teleport", &out);
        gptlab::cli::cmd_teleport(o, space, "", false, true);
        return out;
      },
      py::arg("space"), py::arg("scalar") = "auto", py::arg("eps") = 1e-9);

  m.def(
      "teleport_necessity",
      [](const std::string& space, std::size_t budget, const std::string& scalar, double eps) {
        std::string out;
        auto o = make_options(scalar, eps, 0, budget, "teleport", &out);
        gptlab::cli::cmd_teleport(o, space, "", true, false);
        return out;
      },
      py::arg("space"), py::arg("budget") = 0, py::arg("scalar") = "auto", py::arg("eps") = 1e-9);

  m.def(
      "verify",
      [](const std::string& text, double eps) {
        json j;
        try {
          j = json::parse(text);
        } catch (const json::parse_error& e) {
          throw gptlab::UsageError(std::string("invalid JSON: ") + e.what());
        }
        gptlab::cli::Options o;
        o.eps = eps;
        std::ostringstream log;
        int rc = gptlab::cli::verify_loaded(o, j, log);
        return std::make_pair(rc, log.str());
      },
      py::arg("text"), py::arg("eps") = 1e-9);
}
