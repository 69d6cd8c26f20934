#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nvcr/errors.hpp"
#include "nvcr/lineshape.hpp"
#include "nvcr/relaxation.hpp"

namespace nvcr {

struct DecayCurve {
  std::vector<double> tau_s;
  std::vector<double> signal;
  std::vector<double> sigma;  ///< empty, or one positive uncertainty per point

  void validate() const;

  /// CSV with header `tau_s,signal[,sigma]`; blank lines and `#` comments skipped.
  static DecayCurve read_csv(std::istream& in);
};

struct FitResult {
  DecayModel model;
  double residual_rss = 0.0;
  bool converged = false;
  int iterations = 0;               ///< objective evaluations over all starts
  double gradient_norm = 0.0;       ///< max |d rss / d p| in the fit parameters
  bool at_bound = false;
  std::vector<double> start_rss;    ///< residual at each initial point
};

class FitError : public Error {
 public:
  FitError(const std::string& what, FitResult best) : Error(what), best_(std::move(best)) {}
  const char* kind() const noexcept override { return "fit"; }
  const FitResult& best() const { return best_; }

 private:
  FitResult best_;
};

struct FitOptions {
  int n_starts = 7;         ///< log-spaced initial timescales, at least 5
  std::uint64_t seed = 0;   ///< jitters the starts; 0 keeps them exactly log-spaced
  double gradient_tol = 1e-7;  ///< relative to sum of weighted squared signals
  int max_evaluations = 20000;

  void validate() const;
};

/// Least-squares fit of A exp(-sqrt(t/T1_dd) - t/T1_ph). With `fixed_t1_ph_s`
/// only T1_dd is searched; A is always solved linearly. Throws FitError
/// (carrying the best result) when no start converges inside the bounds.
FitResult fit_decay(const DecayCurve& c, std::optional<double> fixed_t1_ph_s = std::nullopt,
                    const FitOptions& opts = {});

/// Least-squares fit of A exp(-(t/T1)^beta) with beta in (0, 1.5).
FitResult fit_beta(const DecayCurve& c, const FitOptions& opts = {});

/// S(d) = integral of p1(nu) * p2(nu - d), where p2 is moved by d relative to
/// its own center. Swapping arguments mirrors the curve.
std::vector<double> spectral_overlap(const LineProfile& p1, const LineProfile& p2,
                                     std::span<const double> delta_nu_mhz);

struct WidthFit {
  double width_mhz = 0.0;  ///< sigma (Gaussian) or half width (Lorentzian)
  double center_mhz = 0.0;
  double amplitude = 0.0;
  double rss = 0.0;
  bool converged = false;
};

/// Fits amplitude * shape(x - center; width) to sampled data.
WidthFit fit_line_width(std::span<const double> x_mhz, std::span<const double> y, LineShape shape);

/// eta = sigma_B * sqrt(tau); Tesla and seconds in, T/sqrt(Hz) out.
double sensitivity(double sigma_b_tesla, double tau_s);

}  // namespace nvcr
