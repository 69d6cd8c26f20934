#include "nvcr/eta_average.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <numbers>

#include "nvcr/errors.hpp"
#include "nvcr/quadrature.hpp"

namespace nvcr {

namespace {

constexpr double kPi = std::numbers::pi;

// Along a meridian at fixed azimuth, u^T M u = A + B cos(2 theta) + C sin(2 theta).
struct Meridian {
  double a = 0, b = 0, c = 0;

  double operator()(double theta) const { return a + b * std::cos(2 * theta) + c * std::sin(2 * theta); }

  // Antiderivative of g(theta) sin(theta).
  double primitive(double t) const {
    const double c1 = std::cos(t), c3 = std::cos(3 * t);
    const double s1 = std::sin(t), s3 = std::sin(3 * t);
    return -a * c1 + 0.5 * b * (c1 - c3 / 3.0) + 0.5 * c * (s1 - s3 / 3.0);
  }

  void append_roots(std::vector<double>& out) const {
    const double r = std::hypot(b, c);
    if (r == 0.0 || std::abs(a) > r) return;
    const double delta = std::atan2(c, b);
    const double kappa = std::acos(std::clamp(-a / r, -1.0, 1.0));
    for (double base : {(delta + kappa) / 2, (delta - kappa) / 2}) {
      for (int k = -2; k <= 2; ++k) {
        const double t = base + k * kPi;
        if (t > 0 && t < kPi) out.push_back(t);
      }
    }
  }
};

Meridian meridian(const Eigen::Matrix3d& m, double phi) {
  const Vector3 e(std::cos(phi), std::sin(phi), 0.0);
  const double alpha = e.dot(m * e);
  const double beta = m(2, 2);
  const double gamma = e.dot(m.col(2));
  return {(alpha + beta) / 2, (beta - alpha) / 2, gamma};
}

// Exact integral of |g| sin(theta) over [0, pi].
double exact_polar(const Meridian& g) {
  std::vector<double> pts{0.0, kPi};
  g.append_roots(pts);
  std::sort(pts.begin(), pts.end());
  double sum = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) sum += std::abs(g.primitive(pts[i]) - g.primitive(pts[i - 1]));
  return sum;
}

double panel_polar(const Meridian& p, const Meridian& q, int n_theta) {
  std::vector<double> pts{0.0, kPi};
  p.append_roots(pts);
  q.append_roots(pts);
  std::sort(pts.begin(), pts.end());
  double sum = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) {
    const double lo = pts[i - 1], hi = pts[i];
    const double len = hi - lo;
    if (len <= 0) continue;
    const int n = std::max(8, static_cast<int>(std::ceil(n_theta * len / kPi)));
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (lo + hi), half = 0.5 * len;
    double panel = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t = mid + half * rule.nodes[static_cast<size_t>(k)];
      panel += rule.weights[static_cast<size_t>(k)] * std::hypot(p(t), q(t)) * std::sin(t);
    }
    sum += half * panel;
  }
  return sum;
}

Eigen::Matrix3d to_grid(const Eigen::Matrix3d& m, const Frame& grid) {
  Eigen::Matrix3d r;
  r.col(0) = grid.x_hat;
  r.col(1) = grid.y_hat;
  r.col(2) = grid.z_hat;
  return r.transpose() * m * r;
}

Frame grid_frame(const Frame& f1, Basis basis) {
  if (basis == Basis::Magnetic) return f1;
  // Polar axis along x1.
  return Frame{f1.y_hat, f1.z_hat, f1.x_hat};
}

Frame transverse_frame(const Vector3& z, const Vector3& x) { return Frame{x, z.cross(x), z}; }

// Periodic trapezoid nodes on [0, 2 pi), offset by half a step.
double trapezoid_node(int j, int n) { return 2 * kPi * (j + 0.5) / n; }

}  // namespace

const char* to_string(ZAngle z) {
  switch (z) {
    case ZAngle::Same: return "same";
    case ZAngle::Close: return "close";
    case ZAngle::Far: return "far";
  }
  return "unknown";
}

const char* to_string(XMode x) { return x == XMode::Aligned ? "aligned" : "random"; }

void EtaScenario::validate() const {
  require(std::isfinite(weight) && weight > 0 && weight <= 1, "class weight must be in (0, 1]");
}

void QuadratureSpec::validate() const {
  require(n_theta >= 8 && n_phi >= 8 && n_psi >= 8, "quadrature orders must be >= 8");
  require(n_theta <= 4096 && n_phi <= 1 << 16 && n_psi <= 4096, "quadrature orders too large");
  require(std::isfinite(tolerance) && tolerance > 0, "tolerance must be positive");
  require(max_refinements >= 0 && max_refinements <= 8, "max_refinements must be in [0, 8]");
}

QuadratureSpec QuadratureSpec::doubled() const {
  QuadratureSpec q = *this;
  q.n_theta *= 2;
  q.n_phi *= 2;
  q.n_psi *= 2;
  return q;
}

double sphere_average(const ElementForm& element, const Frame& grid, const QuadratureSpec& q) {
  q.validate();
  grid.validate();
  Eigen::Matrix3d re = to_grid(element.real_part(), grid);
  Eigen::Matrix3d im = to_grid(element.imag_part(), grid);

  // If the imaginary form is a multiple of the real one (or vice versa),
  // |g| = scale * |real form| and the polar integral is exact.
  const bool swap = im.norm() > re.norm();
  if (swap) std::swap(re, im);
  const double base = re.squaredNorm();
  double scale = 1.0;
  bool proportional = base == 0.0;
  if (!proportional) {
    const double k = (re.array() * im.array()).sum() / base;
    proportional = (im - k * re).norm() <= 1e-12 * std::sqrt(base);
    scale = std::sqrt(1 + k * k);
  }

  double total = 0.0;
  for (int j = 0; j < q.n_phi; ++j) {
    const double phi = trapezoid_node(j, q.n_phi);
    const Meridian p = meridian(re, phi);
    total += proportional ? scale * exact_polar(p) : panel_polar(p, meridian(im, phi), q.n_theta);
  }
  return total / (2.0 * q.n_phi);
}

double pair_average(const Frame& f1, const Frame& f2, Basis basis, TransitionElement element,
                    const QuadratureSpec& q) {
  const ElementForm form(f1, f2, basis, element.bra, element.ket);
  return sphere_average(form, grid_frame(f1, basis), q);
}

double mode_average(const Frame& f1, const Frame& f2, Basis basis, XMode mode,
                    TransitionElement element, const QuadratureSpec& q) {
  q.validate();
  if (basis == Basis::Magnetic) return pair_average(f1, f2, basis, element, q);

  if (mode == XMode::Random) {
    double total = 0.0;
    for (int i = 0; i < q.n_psi; ++i) {
      const Frame a = f1.rotated_about_z(trapezoid_node(i, q.n_psi));
      for (int j = 0; j < q.n_psi; ++j)
        total += pair_average(a, f2.rotated_about_z(trapezoid_node(j, q.n_psi)), basis, element, q);
    }
    return total / (static_cast<double>(q.n_psi) * q.n_psi);
  }

  // Aligned: x axes follow the transverse projection of a common direction b,
  // uniformly distributed over the sphere.
  const GaussRule& rule = gauss_legendre(q.n_psi);
  const int n_az = 2 * q.n_psi;
  double total = 0.0, used = 0.0;
  for (int i = 0; i < q.n_psi; ++i) {
    const double ct = rule.nodes[static_cast<size_t>(i)];
    const double st = std::sqrt(std::max(0.0, 1 - ct * ct));
    for (int j = 0; j < n_az; ++j) {
      const double az = trapezoid_node(j, n_az);
      const Vector3 b(st * std::cos(az), st * std::sin(az), ct);
      const Vector3 p1 = b - b.dot(f1.z_hat) * f1.z_hat;
      const Vector3 p2 = b - b.dot(f2.z_hat) * f2.z_hat;
      if (p1.norm() < 1e-9 || p2.norm() < 1e-9) continue;
      const double w = rule.weights[static_cast<size_t>(i)];
      total += w * pair_average(transverse_frame(f1.z_hat, p1.normalized()),
                                transverse_frame(f2.z_hat, p2.normalized()), basis, element, q);
      used += w;
    }
  }
  return total / used;
}

std::pair<Frame, Frame> scenario_frames(ZAngle z) {
  const Frame f1 = NVClassFrame::canonical(0).axes;
  if (z == ZAngle::Same) return {f1, f1};
  Frame f2 = NVClassFrame::canonical(1).axes;  // axes at arccos(-1/3)
  if (z == ZAngle::Close) f2 = transverse_frame(-f2.z_hat, f2.x_hat);
  return {f1, f2};
}

AverageDiagnostics angular_average_diagnostics(const EtaScenario& s, const QuadratureSpec& q) {
  s.validate();
  q.validate();
  const auto [f1, f2] = scenario_frames(s.z_angle);
  auto eval = [&](const QuadratureSpec& spec) {
    return mode_average(f1, f2, s.basis, s.x_mode, kFlipFlop, spec);
  };

  AverageDiagnostics d;
  d.spec = q;
  d.value = eval(q);
  for (int r = 1; r <= q.max_refinements; ++r) {
    const QuadratureSpec finer = d.spec.doubled();
    const double v = eval(finer);
    d.last_change = std::abs(v - d.value);
    d.value = v;
    d.spec = finer;
    d.refinements = r;
    if (d.last_change <= q.tolerance) return d;
  }
  if (q.max_refinements == 0) return d;
  throw ConvergenceError("angular average did not converge: last change " +
                         std::to_string(d.last_change) + " after " +
                         std::to_string(q.max_refinements) + " refinements");
}

double angular_average(const EtaScenario& s, const QuadratureSpec& q) {
  return angular_average_diagnostics(s, q).value;
}

double eta_bar(const EtaScenario& s, const QuadratureSpec& q) {
  return s.weight * std::sqrt(1.0 / 3.0) * angular_average(s, q);
}

EtaTable eta_table(const QuadratureSpec& q) {
  EtaTable t;
  constexpr std::array<ZAngle, 3> cols{ZAngle::Same, ZAngle::Close, ZAngle::Far};
  const std::array<EtaScenario, 3> rows{EtaScenario{Basis::Magnetic, ZAngle::Same, XMode::Random},
                                        EtaScenario{Basis::NonMagnetic, ZAngle::Same, XMode::Random},
                                        EtaScenario{Basis::NonMagnetic, ZAngle::Same, XMode::Aligned}};
  for (size_t r = 0; r < 3; ++r) {
    for (size_t c = 0; c < 3; ++c) {
      EtaScenario s = rows[r];
      s.z_angle = cols[c];
      t.values[r][c] = angular_average(s, q);
    }
  }
  return t;
}

const char* to_string(FieldOrientation f) {
  switch (f) {
    case FieldOrientation::RandomDirection: return "random_direction";
    case FieldOrientation::Plane110: return "plane_110";
    case FieldOrientation::Plane100: return "plane_100";
    case FieldOrientation::Axis111: return "axis_111";
    case FieldOrientation::Axis100: return "axis_100";
    case FieldOrientation::ZeroFieldElectric: return "zero_field_electric";
  }
  return "unknown";
}

FieldOrientation parse_field_orientation(const std::string& name) {
  for (FieldOrientation f : kAllOrientations)
    if (name == to_string(f)) return f;
  throw InvalidArgument("unknown field orientation '" + name + "'");
}

std::vector<ResonanceTerm> resonance_composition(FieldOrientation f) {
  const EtaScenario same{Basis::Magnetic, ZAngle::Same, XMode::Random};
  const EtaScenario close{Basis::Magnetic, ZAngle::Close, XMode::Random};
  const EtaScenario far{Basis::Magnetic, ZAngle::Far, XMode::Random};
  switch (f) {
    case FieldOrientation::RandomDirection: return {{same, 1}};
    case FieldOrientation::Plane110: return {{same, 1}, {far, 1}};
    case FieldOrientation::Plane100: return {{same, 1}, {close, 1}};
    case FieldOrientation::Axis111: return {{same, 1}, {far, 2}};
    case FieldOrientation::Axis100: return {{same, 1}, {close, 2}, {far, 1}};
    case FieldOrientation::ZeroFieldElectric:
      return {{{Basis::NonMagnetic, ZAngle::Same, XMode::Random}, 1},
              {{Basis::NonMagnetic, ZAngle::Close, XMode::Random}, 3}};
  }
  throw InvalidArgument("unknown field orientation");
}

namespace {

// Shares averages between scenarios within one call.
class EtaCache {
 public:
  explicit EtaCache(const QuadratureSpec& q) : q_(q) {}

  double operator()(const EtaScenario& s) {
    const auto key = std::make_tuple(static_cast<int>(s.basis), static_cast<int>(s.z_angle),
                                     static_cast<int>(s.x_mode), s.weight);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, eta_bar(s, q_)).first;
    return it->second;
  }

 private:
  QuadratureSpec q_;
  std::map<std::tuple<int, int, int, double>, double> cache_;
};

double multiplier(FieldOrientation f, EtaCache& eta) {
  const double reference = eta(EtaScenario{Basis::Magnetic, ZAngle::Same, XMode::Random});
  double total = 0.0;
  for (const ResonanceTerm& t : resonance_composition(f)) total += t.count * eta(t.scenario);
  return total * total / (reference * reference);
}

}  // namespace

double scenario_multiplier(FieldOrientation f, const QuadratureSpec& q) {
  EtaCache cache(q);
  return multiplier(f, cache);
}

std::vector<MultiplierRow> all_multipliers(const QuadratureSpec& q) {
  EtaCache cache(q);
  std::vector<MultiplierRow> rows;
  for (FieldOrientation f : kAllOrientations) rows.push_back({f, multiplier(f, cache)});
  return rows;
}

double spectral_resonance_weight(const LineProfile& nv_line, const LineProfile& fluctuator_line,
                                 double gamma_f_mhz) {
  require(std::isfinite(gamma_f_mhz) && gamma_f_mhz > 0, "fluctuator rate must be positive");
  auto outer = [&](double nu_nv) {
    const double here[1] = {nu_nv};
    return integrate_weighted(
        fluctuator_line,
        [&](double nu_f) { return std::sqrt(resonance_factor(nu_f, nu_nv, gamma_f_mhz)); }, here,
        1e-9);
  };
  return integrate_weighted(nv_line, outer, {}, 1e-8);
}

double weighted_eta_bar(const std::vector<ResonanceTerm>& terms, const std::vector<double>& weights,
                        const QuadratureSpec& q) {
  require(terms.size() == weights.size(), "one weight per resonance term is required");
  EtaCache cache(q);
  double total = 0.0;
  for (size_t i = 0; i < terms.size(); ++i) {
    require(std::isfinite(weights[i]) && weights[i] >= 0, "resonance weights must be >= 0");
    total += weights[i] * terms[i].count * cache(terms[i].scenario);
  }
  return total;
}

}  // namespace nvcr
