#pragma once

#include <limits>
#include <span>
#include <vector>

namespace nvcr {

struct FluctuatorParams {
  double n_f_per_nm3 = 0.0;    ///< fluctuator density
  double gamma_f_per_s = 0.0;  ///< fluctuator decay rate
  double eta_bar = 0.0;        ///< averaged dipolar coupling
  double j0_mhz_nm3 = 52.0;    ///< J0 / (2 pi)

  void validate() const;
};

/// 1/T = (4 pi n_f J0 eta_bar / 3)^2 * pi / gamma_f, with J0 taken as an
/// angular frequency (2 pi * j0_mhz_nm3 * 1e6 s^-1 nm^3). Result in s^-1.
double characteristic_rate(const FluctuatorParams& p);

/// rho(gamma) = exp(-1/(4 gamma T)) / sqrt(4 pi gamma^3 T), gamma in s^-1, T in s.
double rate_density(double gamma, double t_char);

/// Most probable rate, 1/(6T).
double rate_density_mode(double t_char);

/// P(t) = exp(-sqrt(t/T)).
double polarization(double t, double t_char);

/// Integral of rho(gamma) over (0, inf) computed numerically.
double rate_density_norm(double t_char, double tol = 1e-10);

/// Integral of rho(gamma) exp(-gamma t) over (0, inf) computed numerically.
double polarization_from_density(double t, double t_char, double tol = 1e-10);

enum class DecayForm {
  TwoChannel,  ///< A exp(-sqrt(t/T1_dd) - t/T1_ph)
  Stretched,   ///< A exp(-(t/T1)^beta), T1 stored in t1_dd_s
};

struct DecayModel {
  DecayForm form = DecayForm::TwoChannel;
  double amplitude = 1.0;
  double t1_dd_s = 1e-3;
  double t1_ph_s = std::numeric_limits<double>::infinity();  ///< two-channel only
  double beta = 0.5;                                         ///< stretched only

  void validate() const;
};

double decay_signal(double t, const DecayModel& m);
/// ln S(t), evaluated without exponentiating.
double log_decay_signal(double t, const DecayModel& m);
std::vector<double> decay_curve(std::span<const double> tau_s, const DecayModel& m);

/// Model extension: extra rate from double-flip processes, the characteristic
/// rate evaluated with the double-flip average and weighted by
/// resonance_factor(splitting, 0, gamma_f / 2 pi) with frequencies in MHz.
struct DoubleFlipChannel {
  double eta_bar = 0.0;         ///< double-flip average coupling
  double splitting_mhz = 0.0;   ///< |+> / |-> splitting of the NV
};
double double_flip_rate(const FluctuatorParams& p, const DoubleFlipChannel& channel);

}  // namespace nvcr
