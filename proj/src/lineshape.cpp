#include "nvcr/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nvcr/errors.hpp"

namespace nvcr {

const char* to_string(LineShape s) {
  switch (s) {
    case LineShape::Gaussian: return "gaussian";
    case LineShape::Lorentzian: return "lorentzian";
    case LineShape::Tabulated: return "tabulated";
  }
  return "unknown";
}

LineShape parse_line_shape(const std::string& name) {
  if (name == "gaussian") return LineShape::Gaussian;
  if (name == "lorentzian") return LineShape::Lorentzian;
  if (name == "tabulated") return LineShape::Tabulated;
  throw InvalidArgument("unknown line shape '" + name + "'");
}

LineProfile LineProfile::gaussian(double sigma_mhz, double center_mhz) {
  require(std::isfinite(sigma_mhz) && sigma_mhz > 0, "Gaussian width must be positive");
  require(std::isfinite(center_mhz), "line center must be finite");
  LineProfile p;
  p.shape_ = LineShape::Gaussian;
  p.width_ = sigma_mhz;
  p.center_ = center_mhz;
  return p;
}

LineProfile LineProfile::lorentzian(double hwhm_mhz, double center_mhz) {
  require(std::isfinite(hwhm_mhz) && hwhm_mhz > 0, "Lorentzian width must be positive");
  require(std::isfinite(center_mhz), "line center must be finite");
  LineProfile p;
  p.shape_ = LineShape::Lorentzian;
  p.width_ = hwhm_mhz;
  p.center_ = center_mhz;
  return p;
}

LineProfile LineProfile::tabulated(std::vector<double> offsets_mhz, std::vector<double> values,
                                   double center_mhz) {
  require(offsets_mhz.size() == values.size() && offsets_mhz.size() >= 2,
          "tabulated profile needs >= 2 matching samples");
  require(std::isfinite(center_mhz), "line center must be finite");
  double area = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(offsets_mhz[i]) && std::isfinite(values[i]),
            "tabulated profile samples must be finite");
    require(values[i] >= 0, "tabulated profile must be non-negative");
    if (i > 0) {
      require(offsets_mhz[i] > offsets_mhz[i - 1], "tabulated offsets must be strictly increasing");
      area += 0.5 * (values[i] + values[i - 1]) * (offsets_mhz[i] - offsets_mhz[i - 1]);
    }
  }
  require(area > 0 && std::isfinite(area), "tabulated profile is not normalizable");
  for (double& v : values) v /= area;

  LineProfile p;
  p.shape_ = LineShape::Tabulated;
  p.center_ = center_mhz;
  p.offsets_ = std::move(offsets_mhz);
  p.values_ = std::move(values);
  // Report an RMS width for information.
  double m1 = 0, m2 = 0;
  for (size_t i = 1; i < p.values_.size(); ++i) {
    const double dx = p.offsets_[i] - p.offsets_[i - 1];
    const double xa = p.offsets_[i - 1], xb = p.offsets_[i];
    m1 += 0.5 * dx * (xa * p.values_[i - 1] + xb * p.values_[i]);
    m2 += 0.5 * dx * (xa * xa * p.values_[i - 1] + xb * xb * p.values_[i]);
  }
  p.width_ = std::sqrt(std::max(m2 - m1 * m1, 0.0));
  return p;
}

double LineProfile::operator()(double nu_mhz) const {
  const double x = nu_mhz - center_;
  switch (shape_) {
    case LineShape::Gaussian:
      return std::exp(-0.5 * x * x / (width_ * width_)) / (width_ * std::sqrt(2 * std::numbers::pi));
    case LineShape::Lorentzian:
      return width_ / (std::numbers::pi * (x * x + width_ * width_));
    case LineShape::Tabulated: {
      if (x < offsets_.front() || x > offsets_.back()) return 0.0;
      const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), x);
      if (it == offsets_.end()) return values_.back();
      const size_t hi = static_cast<size_t>(it - offsets_.begin());
      const size_t lo = hi - 1;
      const double t = (x - offsets_[lo]) / (offsets_[hi] - offsets_[lo]);
      return (1 - t) * values_[lo] + t * values_[hi];
    }
  }
  return 0.0;
}

double LineProfile::peak() const {
  if (shape_ == LineShape::Tabulated) return *std::max_element(values_.begin(), values_.end());
  return (*this)(center_);
}

LineProfile LineProfile::shifted(double delta_mhz) const {
  LineProfile p = *this;
  p.center_ += delta_mhz;
  return p;
}

std::pair<double, double> LineProfile::support() const {
  if (shape_ == LineShape::Tabulated) return {center_ + offsets_.front(), center_ + offsets_.back()};
  const double inf = std::numeric_limits<double>::infinity();
  return {-inf, inf};
}

std::vector<double> LineProfile::kinks() const {
  std::vector<double> out;
  if (shape_ != LineShape::Tabulated) return out;
  out.reserve(offsets_.size());
  for (double o : offsets_) out.push_back(center_ + o);
  return out;
}

namespace {

double integrate_panels(const std::function<double(double)>& g, std::vector<double> points,
                        double rel_tol) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double total = 0.0;
  for (size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] > points[i - 1])) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, points[i - 1], points[i],
                                                                            15, rel_tol);
  }
  return total;
}

}  // namespace

double integrate_weighted(const LineProfile& line, const std::function<double(double)>& f,
                          std::span<const double> breaks, double rel_tol) {
  const double c = line.center();
  const double w = line.width();
  switch (line.shape()) {
    case LineShape::Gaussian: {
      // nu = c + w x; density becomes the standard normal.
      constexpr double kCut = 40.0;
      std::vector<double> pts{-kCut, 0.0, kCut};
      for (double b : breaks) {
        const double x = (b - c) / w;
        if (std::abs(x) < kCut) pts.push_back(x);
      }
      const double norm = 1.0 / std::sqrt(2 * std::numbers::pi);
      return integrate_panels(
          [&](double x) { return f(c + w * x) * norm * std::exp(-0.5 * x * x); }, pts, rel_tol);
    }
    case LineShape::Lorentzian: {
      // nu = c + w tan(t); density times d(nu) becomes dt / pi.
      const double edge = std::numbers::pi / 2;
      std::vector<double> pts{-edge, 0.0, edge};
      for (double b : breaks) pts.push_back(std::atan((b - c) / w));
      return integrate_panels([&](double t) { return f(c + w * std::tan(t)) / std::numbers::pi; },
                              pts, rel_tol);
    }
    case LineShape::Tabulated: {
      std::vector<double> pts = line.kinks();
      const auto [lo, hi] = line.support();
      for (double b : breaks)
        if (b > lo && b < hi) pts.push_back(b);
      return integrate_panels([&](double nu) { return f(nu) * line(nu); }, pts, rel_tol);
    }
  }
  return 0.0;
}

}  // namespace nvcr
