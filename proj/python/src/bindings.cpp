#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nvcr/analysis.hpp"
#include "nvcr/eta_average.hpp"
#include "nvcr/odmr.hpp"
#include "nvcr/relaxation.hpp"
#include "nvcr/spin_model.hpp"

namespace py = pybind11;
using namespace nvcr;

namespace {

QuadratureSpec quad(int n_theta, int n_phi, int n_psi, double tolerance, int max_refinements) {
  QuadratureSpec q;
  q.n_theta = n_theta;
  q.n_phi = n_phi;
  q.n_psi = n_psi;
  q.tolerance = tolerance;
  q.max_refinements = max_refinements;
  return q;
}

Vector3 vec(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }

py::dict fit_dict(const FitResult& r) {
  py::dict d;
  d["A"] = r.model.amplitude;
  d["T1_dd_s"] = r.model.t1_dd_s;
  d["T1_ph_s"] = r.model.t1_ph_s;
  d["beta"] = r.model.beta;
  d["rss"] = r.residual_rss;
  d["converged"] = r.converged;
  d["evaluations"] = r.iterations;
  return d;
}

DecayCurve curve(std::vector<double> tau, std::vector<double> signal, std::vector<double> sigma) {
  return {std::move(tau), std::move(signal), std::move(sigma)};
}

LineProfile profile(const std::string& shape, double width) {
  return parse_line_shape(shape) == LineShape::Lorentzian ? LineProfile::lorentzian(width)
                                                          : LineProfile::gaussian(width);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = NVCR_VERSION;

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", PyExc_ValueError);
  static py::exception<FitError> fit_error(m, "FitError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      invalid(e.what());
    } catch (const FitError& e) {
      fit_error(e.what());
    } catch (const Error& e) {
      error(e.what());
    }
  });

  m.def(
      "eta_table",
      [](int n_theta, int n_phi, int n_psi, double tol, int refinements) {
        const EtaTable t = eta_table(quad(n_theta, n_phi, n_psi, tol, refinements));
        py::dict d;
        for (size_t r = 0; r < 3; ++r) {
          py::dict row;
          for (size_t c = 0; c < 3; ++c) row[EtaTable::column_names[c]] = t.values[r][c];
          d[EtaTable::row_names[r]] = row;
        }
        return d;
      },
      py::arg("n_theta") = 128, py::arg("n_phi") = 128, py::arg("n_psi") = 64, py::arg("tolerance") = 1e-5,
      py::arg("max_refinements") = 3, "Normalized angular averages keyed by basis row and z-angle column.");

  m.def(
      "multipliers",
      [](int n_theta, int n_phi, int n_psi, double tol, int refinements) {
        py::dict d;
        for (const auto& r : all_multipliers(quad(n_theta, n_phi, n_psi, tol, refinements)))
          d[to_string(r.orientation)] = r.multiplier;
        return d;
      },
      py::arg("n_theta") = 128, py::arg("n_phi") = 128, py::arg("n_psi") = 64, py::arg("tolerance") = 1e-5,
      py::arg("max_refinements") = 3, "Rate multiplier per field orientation.");

  m.def(
      "transverse_scan",
      [](const std::vector<double>& b_gauss, double e_perp_mhz, int class_id) {
        py::list out;
        for (const auto& p : transverse_field_scan(NVClassFrame::canonical(class_id), b_gauss, e_perp_mhz)) {
          py::dict d;
          d["b_perp_gauss"] = p.b_perp_gauss;
          d["splitting_mhz"] = p.splitting_mhz;
          d["matching"] = p.matching;
          out.append(d);
        }
        return out;
      },
      py::arg("b_gauss"), py::arg("e_perp_mhz") = 4.0, py::arg("class_id") = 0);

  m.def(
      "transitions",
      [](const std::array<double, 3>& direction, const std::vector<double>& b_gauss, double e_perp_mhz) {
        std::vector<std::array<double, 8>> out;
        for (const auto& t : all_transitions(vec(direction), b_gauss, e_perp_mhz)) out.push_back(t.frequencies());
        return out;
      },
      py::arg("direction"), py::arg("b_gauss"), py::arg("e_perp_mhz") = 0.0,
      "Eight transition frequencies (GHz) per field amplitude, class-major.");

  m.def(
      "degeneracy_lift",
      [](const std::array<double, 3>& direction, const std::vector<double>& b_gauss, double cr_range_mhz,
         double e_perp_mhz) { return degeneracy_lift(vec(direction), b_gauss, cr_range_mhz, e_perp_mhz).lift_gauss; },
      py::arg("direction"), py::arg("b_gauss"), py::arg("cr_range_mhz") = 8.04, py::arg("e_perp_mhz") = 0.0);

  m.def("default_misaligned_direction", [] {
    const Vector3 v = default_misaligned_direction();
    return std::array<double, 3>{v.x(), v.y(), v.z()};
  });

  m.def("polarization", &polarization, py::arg("t"), py::arg("t_char"));
  m.def("rate_density", &rate_density, py::arg("gamma"), py::arg("t_char"));
  m.def(
      "characteristic_time",
      [](double n_f_per_nm3, double gamma_f_per_s, double eta_bar) {
        return 1.0 / characteristic_rate({n_f_per_nm3, gamma_f_per_s, eta_bar});
      },
      py::arg("n_f_per_nm3"), py::arg("gamma_f_per_s"), py::arg("eta_bar"));

  m.def(
      "decay_curve",
      [](const std::vector<double>& tau, double t1_dd_s, double t1_ph_s, double amplitude, const std::string& form,
         double beta) {
        const DecayModel model{form == "stretched" ? DecayForm::Stretched : DecayForm::TwoChannel, amplitude,
                               t1_dd_s, t1_ph_s, beta};
        return decay_curve(tau, model);
      },
      py::arg("tau_s"), py::arg("t1_dd_s"), py::arg("t1_ph_s") = INFINITY, py::arg("amplitude") = 1.0,
      py::arg("form") = "two-channel", py::arg("beta") = 0.5);

  m.def(
      "fit_t1",
      [](std::vector<double> tau, std::vector<double> signal, std::optional<double> fix_t1_ph_s,
         std::vector<double> sigma, int n_starts, std::uint64_t seed) {
        FitOptions o;
        o.n_starts = n_starts;
        o.seed = seed;
        return fit_dict(fit_decay(curve(std::move(tau), std::move(signal), std::move(sigma)), fix_t1_ph_s, o));
      },
      py::arg("tau_s"), py::arg("signal"), py::arg("fix_t1_ph_s") = py::none(),
      py::arg("sigma") = std::vector<double>{}, py::arg("n_starts") = 7, py::arg("seed") = 0);

  m.def(
      "fit_beta",
      [](std::vector<double> tau, std::vector<double> signal, std::vector<double> sigma, int n_starts,
         std::uint64_t seed) {
        FitOptions o;
        o.n_starts = n_starts;
        o.seed = seed;
        return fit_dict(fit_beta(curve(std::move(tau), std::move(signal), std::move(sigma)), o));
      },
      py::arg("tau_s"), py::arg("signal"), py::arg("sigma") = std::vector<double>{}, py::arg("n_starts") = 7,
      py::arg("seed") = 0);

  m.def(
      "overlap",
      [](const std::vector<double>& delta_mhz, const std::string& shape1, double width1, const std::string& shape2,
         double width2) { return spectral_overlap(profile(shape1, width1), profile(shape2, width2), delta_mhz); },
      py::arg("delta_mhz"), py::arg("shape1") = "lorentzian", py::arg("width1_mhz") = 4.02,
      py::arg("shape2") = "lorentzian", py::arg("width2_mhz") = 4.02);

  m.def(
      "fit_width",
      [](const std::vector<double>& x, const std::vector<double>& y, const std::string& shape) {
        return fit_line_width(x, y, parse_line_shape(shape)).width_mhz;
      },
      py::arg("x_mhz"), py::arg("y"), py::arg("shape"));

  m.def("sensitivity", &sensitivity, py::arg("sigma_b_tesla"), py::arg("tau_s"));
}
