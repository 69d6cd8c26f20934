#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nvcr {

enum class LineShape { Gaussian, Lorentzian, Tabulated };

const char* to_string(LineShape s);
LineShape parse_line_shape(const std::string& name);

/// Unit-area spectral line. Frequencies in MHz.
///  - Gaussian: `width` is the standard deviation.
///  - Lorentzian: `width` is the half width at half maximum.
///  - Tabulated: samples at `center + offsets[i]`, linearly interpolated,
///    zero outside the sampled range; normalized by trapezoid area.
class LineProfile {
 public:
  static LineProfile gaussian(double sigma_mhz, double center_mhz = 0.0);
  static LineProfile lorentzian(double hwhm_mhz, double center_mhz = 0.0);
  static LineProfile tabulated(std::vector<double> offsets_mhz, std::vector<double> values,
                               double center_mhz = 0.0);

  LineShape shape() const { return shape_; }
  double width() const { return width_; }
  double center() const { return center_; }

  /// Unit-area density at frequency nu (MHz).
  double operator()(double nu_mhz) const;
  /// Value at the line center relative to the peak (1 for symmetric analytic shapes).
  double peak() const;

  LineProfile shifted(double delta_mhz) const;

  /// Sample support [lo, hi] for tabulated profiles; infinite for analytic ones.
  std::pair<double, double> support() const;
  /// Breakpoints (absolute MHz) where the density is not smooth.
  std::vector<double> kinks() const;

 private:
  LineShape shape_ = LineShape::Gaussian;
  double width_ = 1.0;
  double center_ = 0.0;
  std::vector<double> offsets_;
  std::vector<double> values_;
};

/// Integral of f(nu) * line(nu) over all frequencies. `breaks` are extra
/// points (absolute MHz) where f is sharp. Adaptive Gauss-Kronrod per panel.
double integrate_weighted(const LineProfile& line, const std::function<double(double)>& f,
                          std::span<const double> breaks = {}, double rel_tol = 1e-10);

}  // namespace nvcr
