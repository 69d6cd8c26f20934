#include "nvcr/relaxation.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nvcr/dipolar.hpp"
#include "nvcr/errors.hpp"

namespace nvcr {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* what) {
  require(std::isfinite(v) && v > 0, std::string(what) + " must be positive and finite");
}

// Integral of f(gamma) rho(gamma) over (0, inf). With gamma = 1/(4 T y^2) the
// essential singularity at 0 and the gamma^(-3/2) tail both become smooth
// Gaussian-like behavior in y; rho itself is still evaluated pointwise.
template <typename F>
double integrate_rates(F&& f, double t_char, double tol) {
  auto g = [&](double y) {
    if (y <= 0.0) return 0.0;
    const double gamma = 1.0 / (4 * t_char * y * y);
    const double jac = 1.0 / (2 * t_char * y * y * y);
    return f(gamma) * rate_density(gamma, t_char) * jac;
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double sum = 0.0;
  constexpr double kSplit[] = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
  for (size_t i = 1; i < std::size(kSplit); ++i) sum += GK::integrate(g, kSplit[i - 1], kSplit[i], 20, tol);
  return sum;
}

}  // namespace

void FluctuatorParams::validate() const {
  require_positive(n_f_per_nm3, "fluctuator density");
  require_positive(gamma_f_per_s, "fluctuator rate");
  require_positive(eta_bar, "eta_bar");
  require_positive(j0_mhz_nm3, "J0");
}

double characteristic_rate(const FluctuatorParams& p) {
  p.validate();
  const double j0 = 2 * kPi * p.j0_mhz_nm3 * 1e6;  // rad s^-1 nm^3
  const double coupling = 4 * kPi * p.n_f_per_nm3 * j0 * p.eta_bar / 3;
  return coupling * coupling * kPi / p.gamma_f_per_s;
}

double rate_density(double gamma, double t_char) {
  require_positive(gamma, "rate");
  require_positive(t_char, "characteristic time");
  return std::exp(-1.0 / (4 * gamma * t_char)) / std::sqrt(4 * kPi * gamma * gamma * gamma * t_char);
}

double rate_density_mode(double t_char) {
  require_positive(t_char, "characteristic time");
  return 1.0 / (6 * t_char);
}

double polarization(double t, double t_char) {
  require(std::isfinite(t) && t >= 0, "time must be >= 0");
  require_positive(t_char, "characteristic time");
  return std::exp(-std::sqrt(t / t_char));
}

double rate_density_norm(double t_char, double tol) {
  require_positive(t_char, "characteristic time");
  return integrate_rates([](double) { return 1.0; }, t_char, tol);
}

double polarization_from_density(double t, double t_char, double tol) {
  require(std::isfinite(t) && t >= 0, "time must be >= 0");
  require_positive(t_char, "characteristic time");
  return integrate_rates([&](double g) { return std::exp(-g * t); }, t_char, tol);
}

void DecayModel::validate() const {
  require_positive(amplitude, "amplitude");
  require_positive(t1_dd_s, "T1");
  if (form == DecayForm::TwoChannel) {
    require(t1_ph_s > 0 && !std::isnan(t1_ph_s), "T1_ph must be positive");
  } else {
    require(std::isfinite(beta) && beta > 0 && beta <= 1.5, "beta must be in (0, 1.5]");
  }
}

double log_decay_signal(double t, const DecayModel& m) {
  require(std::isfinite(t) && t >= 0, "time must be >= 0");
  const double ln_a = std::log(m.amplitude);
  if (m.form == DecayForm::Stretched) return ln_a - std::pow(t / m.t1_dd_s, m.beta);
  return ln_a - std::sqrt(t / m.t1_dd_s) - t / m.t1_ph_s;
}

double decay_signal(double t, const DecayModel& m) {
  m.validate();
  return std::exp(log_decay_signal(t, m));
}

std::vector<double> decay_curve(std::span<const double> tau_s, const DecayModel& m) {
  m.validate();
  std::vector<double> out;
  out.reserve(tau_s.size());
  for (double t : tau_s) out.push_back(std::exp(log_decay_signal(t, m)));
  return out;
}

double double_flip_rate(const FluctuatorParams& p, const DoubleFlipChannel& channel) {
  require(std::isfinite(channel.eta_bar) && channel.eta_bar >= 0, "double-flip eta_bar must be >= 0");
  require(std::isfinite(channel.splitting_mhz), "splitting must be finite");
  if (channel.eta_bar == 0.0) return 0.0;
  FluctuatorParams q = p;
  q.eta_bar = channel.eta_bar;
  const double width_mhz = p.gamma_f_per_s / (2 * kPi) * 1e-6;
  return characteristic_rate(q) * resonance_factor(channel.splitting_mhz, 0.0, width_mhz);
}

}  // namespace nvcr
