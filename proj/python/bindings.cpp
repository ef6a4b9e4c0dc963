#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "aircomp/bounds.hpp"
#include "aircomp/channel.hpp"
#include "aircomp/correlation_file.hpp"
#include "aircomp/dfa.hpp"
#include "aircomp/error.hpp"
#include "aircomp/functions.hpp"
#include "aircomp/harness.hpp"
#include "aircomp/linalg.hpp"
#include "aircomp/rng.hpp"

namespace py = pybind11;
using namespace aircomp;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix();
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ValidationError("ragged matrix rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Matrix::from_rows(rows.size(), rows.front().size(), std::move(flat));
}

std::vector<std::vector<double>> from_matrix(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows[i].assign(m.row(i).begin(), m.row(i).end());
  return rows;
}

py::dict terms_dict(const BoundTerms& t) {
  py::dict d;
  d["M"] = t.M;
  d["eta"] = t.eta;
  d["L"] = t.l_term;
  d["F"] = t.f_term;
  d["D"] = t.d_term;
  d["phi_inv_eps"] = t.phi_inv_eps;
  d["bound_raw"] = error_probability_bound_raw(t);
  d["bound"] = error_probability_bound(t);
  return d;
}

CorrelationModel model_from(const std::string& correlation, std::size_t K, std::size_t M,
                            double sigma_f, double sigma_n) {
  return build_model(CorrelationSpec::parse(correlation), K, M, sigma_f, sigma_n);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Over-the-air function computation: DFA scheme, TDMA baseline and error bounds.";

  // Later registrations are tried first, so the subclass comes last.
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", validation.ptr());
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("operator_norm",
        [](const std::vector<std::vector<double>>& a, double tol) { return operator_norm(to_matrix(a), tol); },
        py::arg("a"), py::arg("tol") = kNormTolerance);
  m.def("frobenius_norm", [](const std::vector<std::vector<double>>& a) { return frobenius_norm(to_matrix(a)); });
  m.def("eta",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& a_i) {
          return eta(to_matrix(a), to_matrix(a_i));
        });

  py::class_<FmonFunction>(m, "Function")
      .def(py::init([](const std::string& spec, std::size_t K) { return parse_function(spec, K); }),
           py::arg("spec"), py::arg("users"))
      .def_property_readonly("name", &FmonFunction::name)
      .def_property_readonly("users", &FmonFunction::users)
      .def_property_readonly("phi_min", [](const FmonFunction& f) {
        return std::vector<double>(f.phi_min().begin(), f.phi_min().end());
      })
      .def_property_readonly("phi_max", [](const FmonFunction& f) {
        return std::vector<double>(f.phi_max().begin(), f.phi_max().end());
      })
      .def_property_readonly("output_range", &FmonFunction::output_range)
      .def("__call__", [](const FmonFunction& f, const std::vector<double>& s) { return f.evaluate(s); })
      .def("phi", &FmonFunction::phi)
      .def("phi_inv", &FmonFunction::phi_inv)
      .def("spreads", [](const FmonFunction& f, double P) {
        const auto s = spreads(f, P);
        return py::make_tuple(s.total_spread, s.max_spread, s.relative_spread);
      }, py::arg("P") = 1.0);

  py::class_<CorrelationModel>(m, "CorrelationModel")
      .def_property_readonly("users", &CorrelationModel::users)
      .def_property_readonly("uses", &CorrelationModel::uses)
      .def("fading_matrix", [](const CorrelationModel& c) { return from_matrix(c.fading_matrix()); })
      .def("noise_matrix", [](const CorrelationModel& c) { return from_matrix(c.noise_matrix()); })
      .def("expected_noise_energy", [](const CorrelationModel& c) { return expected_noise_energy(c); })
      .def("save", [](const CorrelationModel& c, const std::filesystem::path& p) { write_correlation_model(c, p); });

  m.def("iid_model", [](std::size_t K, std::size_t M, double sf, double sn) { return iid_model(K, M, sf, sn); },
        py::arg("users"), py::arg("uses"), py::arg("sigma_f") = 1.0, py::arg("sigma_n") = 1.0);
  m.def("ar_model",
        [](std::size_t K, std::size_t M, double rho, double sf, double sn) {
          return temporal_ar_model(K, M, rho, sf, sn);
        },
        py::arg("users"), py::arg("uses"), py::arg("rho"), py::arg("sigma_f") = 1.0, py::arg("sigma_n") = 1.0);
  m.def("dense_model",
        [](std::size_t K, std::size_t M, const std::vector<std::vector<double>>& a,
           const std::vector<std::vector<double>>& b) { return dense_model(K, M, to_matrix(a), to_matrix(b)); },
        py::arg("users"), py::arg("uses"), py::arg("a"), py::arg("b"));
  m.def("load_model", [](const std::filesystem::path& p) { return read_correlation_model(p); });
  m.def("noise_sigma_from_db", &noise_sigma_from_db);

  m.def("run_dfa",
        [](const FmonFunction& f, const CorrelationModel& model, const std::vector<double>& s,
           std::uint64_t seed, double P, double sigma_f, bool clamp) {
          DfaConfig cfg{P, sigma_f, clamp};
          Rng rng(seed);
          return run_dfa(f, model, s, cfg, rng);
        },
        py::arg("f"), py::arg("model"), py::arg("s"), py::arg("seed"), py::arg("P") = 1.0,
        py::arg("sigma_f") = 1.0, py::arg("clamp") = true);

  m.def("bound",
        [](const FmonFunction& f, const CorrelationModel& model, double eps, const std::string& ai,
           double P, bool lipschitz) {
          return terms_dict(bound_terms(f, model, parse_ai_strategy(ai), P, eps, lipschitz));
        },
        py::arg("f"), py::arg("model"), py::arg("eps"), py::arg("ai") = "same", py::arg("P") = 1.0,
        py::arg("lipschitz") = false);

  m.def("cost",
        [](const FmonFunction& f, double eps, double delta, const std::string& correlation,
           double sigma_f, double sigma_n, double P, std::size_t m_max) -> py::object {
          const auto spec = CorrelationSpec::parse(correlation);
          if (spec.kind == CorrelationSpec::Kind::file) {
            throw ValidationError("cost needs a model family; file models have a fixed M");
          }
          const ModelFamily family = [&](std::size_t M) {
            return build_model(spec, f.users(), M, sigma_f, sigma_n);
          };
          const auto c = communication_cost(f, eps, delta, family, AiStrategy::same, P, m_max);
          if (!c.M) return py::none();
          return py::int_(*c.M);
        },
        py::arg("f"), py::arg("eps"), py::arg("delta"), py::arg("correlation") = "iid",
        py::arg("sigma_f") = 1.0, py::arg("sigma_n") = 1.0, py::arg("P") = 1.0,
        py::arg("m_max") = 100000);

  m.def("simulate",
        [](const std::string& function, const std::vector<std::size_t>& users,
           const std::vector<std::size_t>& chuses, const std::vector<double>& noise_db, std::size_t runs,
           std::uint64_t seed, const std::string& scheme, const std::string& correlation,
           const std::string& fading, bool clamp) {
          SweepConfig cfg;
          cfg.function = function;
          cfg.users = users;
          cfg.chuses = chuses;
          cfg.noise_db = noise_db;
          cfg.runs = runs;
          cfg.root_seed = seed;
          cfg.correlation = CorrelationSpec::parse(correlation);
          cfg.clamp = clamp;
          if (fading == "theory") {
            cfg.fading = FadingPreset::theory;
          } else if (fading != "experiments") {
            throw ValidationError("fading must be 'theory' or 'experiments'");
          }
          if (scheme == "dfa") {
            cfg.schemes = {Scheme::dfa};
          } else if (scheme == "tdma") {
            cfg.schemes = {Scheme::tdma};
          } else if (scheme != "both") {
            throw ValidationError("scheme must be dfa, tdma or both");
          }
          std::ostringstream out;
          emit_csv(run_sweep(cfg), out);
          return out.str();
        },
        py::arg("function"), py::arg("users"), py::arg("chuses"), py::arg("noise_db"),
        py::arg("runs") = 500, py::arg("seed") = 1, py::arg("scheme") = "both",
        py::arg("correlation") = "iid", py::arg("fading") = "experiments", py::arg("clamp") = true);
}
