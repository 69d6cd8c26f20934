#include "nvcr/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "nvcr/optimize.hpp"

namespace nvcr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& field, size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw InvalidArgument("line " + std::to_string(line_no) + ": cannot parse number '" + field + "'");
  return v;
}

// Linear amplitude for shape f against data y, and the resulting residual.
struct Projection {
  double amplitude = 0.0;
  double rss = 0.0;
};

Projection project(std::span<const double> y, std::span<const double> f, std::span<const double> w) {
  double num = 0.0, den = 0.0, yy = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    num += wi * y[i] * f[i];
    den += wi * f[i] * f[i];
    yy += wi * y[i] * y[i];
  }
  if (!(den > 0) || !(num > 0)) return {0.0, yy};
  const double a = num / den;
  double rss = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - a * f[i];
    rss += (w.empty() ? 1.0 : w[i]) * r * r;
  }
  return {a, rss};
}

struct Bound {
  double lo, hi;
};

// A fit with the amplitude profiled out. `shape` maps parameters to a unit-amplitude model.
struct ProfiledFit {
  const DecayCurve& curve;
  std::vector<double> weights;
  std::vector<Bound> bounds;
  std::function<DecayModel(const std::vector<double>&)> shape;

  Projection evaluate(const std::vector<double>& p) const {
    const DecayModel m = shape(p);
    std::vector<double> f(curve.tau_s.size());
    for (size_t i = 0; i < f.size(); ++i) f[i] = std::exp(log_decay_signal(curve.tau_s[i], m));
    return project(curve.signal, f, weights);
  }

  double objective(const std::vector<double>& p) const {
    for (size_t i = 0; i < p.size(); ++i)
      if (!(p[i] >= bounds[i].lo && p[i] <= bounds[i].hi)) return kInf;
    return evaluate(p).rss;
  }

  double scale() const {
    double s = 0.0;
    for (size_t i = 0; i < curve.signal.size(); ++i)
      s += (weights.empty() ? 1.0 : weights[i]) * curve.signal[i] * curve.signal[i];
    return s;
  }
};

FitResult run_fit(const ProfiledFit& fit, const std::vector<std::vector<double>>& starts,
                  const FitOptions& opts) {
  const Objective obj = [&](const std::vector<double>& p) { return fit.objective(p); };
  NelderMeadOptions nm;
  nm.max_evaluations = opts.max_evaluations;

  FitResult best;
  best.residual_rss = kInf;
  std::vector<double> best_p;
  bool best_nm_converged = false;
  int evaluations = 0;
  std::vector<double> start_rss;
  for (const auto& s : starts) {
    start_rss.push_back(obj(s));
    const NelderMeadResult r = nelder_mead(obj, s, std::vector<double>(s.size(), 0.5), nm);
    evaluations += r.evaluations;
    if (r.fx < best.residual_rss) {
      best.residual_rss = r.fx;
      best_p = r.x;
      best_nm_converged = r.converged;
    }
  }

  best.iterations = evaluations;
  best.start_rss = std::move(start_rss);
  best.model = fit.shape(best_p);
  best.model.amplitude = std::max(fit.evaluate(best_p).amplitude, std::numeric_limits<double>::min());

  for (size_t i = 0; i < best_p.size(); ++i) {
    const Bound& b = fit.bounds[i];
    const double margin = 1e-3 * (b.hi - b.lo);
    if (best_p[i] - b.lo < margin || b.hi - best_p[i] < margin) best.at_bound = true;
  }
  if (!best.at_bound) {
    const auto g = numeric_gradient(obj, best_p);
    for (double gi : g) best.gradient_norm = std::max(best.gradient_norm, std::abs(gi));
  } else {
    best.gradient_norm = kInf;
  }
  const double scale = std::max(fit.scale(), std::numeric_limits<double>::min());
  best.converged = best_nm_converged && !best.at_bound &&
                   std::isfinite(best.gradient_norm) && best.gradient_norm <= opts.gradient_tol * scale;
  if (!best.converged) {
    std::string why = best.at_bound ? "optimum lies on a parameter bound"
                                    : (best_nm_converged ? "gradient check failed"
                                                         : "simplex did not contract");
    throw FitError("fit did not converge: " + why, best);
  }
  return best;
}

std::vector<double> fit_weights(const DecayCurve& c) {
  std::vector<double> w;
  for (double s : c.sigma) w.push_back(1.0 / (s * s));
  return w;
}

// Log-spaced timescales across the sampled window, optionally jittered.
std::vector<double> start_times(const DecayCurve& c, const FitOptions& opts) {
  double t_min = kInf;
  for (double t : c.tau_s)
    if (t > 0) t_min = std::min(t_min, t);
  const double t_max = c.tau_s.back();
  const double lo = std::log(std::max(t_min, t_max * 1e-3));
  const double hi = std::log(t_max * 3.0);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  std::vector<double> out;
  for (int i = 0; i < opts.n_starts; ++i) {
    double x = lo + (hi - lo) * i / (opts.n_starts - 1);
    if (opts.seed != 0) x += jitter(rng);
    out.push_back(x);
  }
  return out;
}

Bound time_bound(const DecayCurve& c) {
  double t_min = kInf;
  for (double t : c.tau_s)
    if (t > 0) t_min = std::min(t_min, t);
  return {std::log(t_min * 1e-3), std::log(c.tau_s.back() * 1e3)};
}

constexpr double kBetaMax = 1.5;

double beta_from(double z) { return kBetaMax / (1.0 + std::exp(-z)); }

}  // namespace

void DecayCurve::validate() const {
  require(tau_s.size() >= 8, "decay curve needs at least 8 points");
  require(signal.size() == tau_s.size(), "tau and signal lengths differ");
  require(sigma.empty() || sigma.size() == tau_s.size(), "sigma length differs from tau");
  for (size_t i = 0; i < tau_s.size(); ++i) {
    require(std::isfinite(tau_s[i]) && tau_s[i] >= 0, "times must be finite and >= 0");
    require(std::isfinite(signal[i]), "signals must be finite");
    if (i > 0) require(tau_s[i] > tau_s[i - 1], "times must be strictly increasing");
    if (!sigma.empty()) require(std::isfinite(sigma[i]) && sigma[i] > 0, "sigma must be positive");
  }
}

DecayCurve DecayCurve::read_csv(std::istream& in) {
  DecayCurve c;
  std::string line;
  size_t line_no = 0;
  bool have_header = false;
  bool with_sigma = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split(t);
    if (!have_header) {
      const bool ok = (fields.size() == 2 || fields.size() == 3) && fields[0] == "tau_s" &&
                      fields[1] == "signal" && (fields.size() == 2 || fields[2] == "sigma");
      require(ok, "expected CSV header 'tau_s,signal[,sigma]'");
      with_sigma = fields.size() == 3;
      have_header = true;
      continue;
    }
    require(fields.size() == (with_sigma ? 3u : 2u),
            "line " + std::to_string(line_no) + ": wrong number of columns");
    c.tau_s.push_back(parse_number(fields[0], line_no));
    c.signal.push_back(parse_number(fields[1], line_no));
    if (with_sigma) c.sigma.push_back(parse_number(fields[2], line_no));
  }
  require(have_header, "decay CSV is empty");
  c.validate();
  return c;
}

void FitOptions::validate() const {
  require(n_starts >= 5 && n_starts <= 1000, "at least 5 starts are required");
  require(std::isfinite(gradient_tol) && gradient_tol > 0, "gradient tolerance must be positive");
  require(max_evaluations > 0, "max_evaluations must be positive");
}

FitResult fit_decay(const DecayCurve& c, std::optional<double> fixed_t1_ph_s, const FitOptions& opts) {
  c.validate();
  opts.validate();
  if (fixed_t1_ph_s) require(*fixed_t1_ph_s > 0, "fixed T1_ph must be positive");

  const Bound tb = time_bound(c);
  ProfiledFit fit{c, fit_weights(c), {tb}, {}};
  if (fixed_t1_ph_s) {
    const double t1ph = *fixed_t1_ph_s;
    fit.shape = [t1ph](const std::vector<double>& p) {
      return DecayModel{DecayForm::TwoChannel, 1.0, std::exp(p[0]), t1ph, 0.5};
    };
  } else {
    fit.bounds.push_back(tb);
    fit.shape = [](const std::vector<double>& p) {
      return DecayModel{DecayForm::TwoChannel, 1.0, std::exp(p[0]), std::exp(p[1]), 0.5};
    };
  }

  std::vector<std::vector<double>> starts;
  const double ph0 = std::log(c.tau_s.back());
  for (double x : start_times(c, opts)) {
    if (fixed_t1_ph_s)
      starts.push_back({x});
    else
      starts.push_back({x, ph0});
  }
  return run_fit(fit, starts, opts);
}

FitResult fit_beta(const DecayCurve& c, const FitOptions& opts) {
  c.validate();
  opts.validate();
  const Bound tb = time_bound(c);
  // beta = 1.5 / (1 + exp(-z)); bounds keep beta inside [~1e-4, 1.5 - 1e-4].
  ProfiledFit fit{c, fit_weights(c), {tb, {-9.6, 9.6}}, [](const std::vector<double>& p) {
                    DecayModel m{DecayForm::Stretched, 1.0, std::exp(p[0]), kInf, beta_from(p[1])};
                    return m;
                  }};
  std::vector<std::vector<double>> starts;
  for (double x : start_times(c, opts)) starts.push_back({x, 0.0});
  return run_fit(fit, starts, opts);
}

std::vector<double> spectral_overlap(const LineProfile& p1, const LineProfile& p2,
                                     std::span<const double> delta_nu_mhz) {
  std::vector<double> out;
  out.reserve(delta_nu_mhz.size());
  for (double d : delta_nu_mhz) {
    require(std::isfinite(d), "detunings must be finite");
    const LineProfile moved = p2.shifted(d);
    std::vector<double> breaks = moved.kinks();
    breaks.push_back(moved.center());
    out.push_back(integrate_weighted(p1, [&](double nu) { return moved(nu); }, breaks, 1e-10));
  }
  return out;
}

WidthFit fit_line_width(std::span<const double> x_mhz, std::span<const double> y, LineShape shape) {
  require(shape != LineShape::Tabulated, "width fits need an analytic shape");
  require(x_mhz.size() == y.size() && x_mhz.size() >= 4, "width fit needs >= 4 matching samples");
  for (size_t i = 0; i < y.size(); ++i)
    require(std::isfinite(x_mhz[i]) && std::isfinite(y[i]), "width fit samples must be finite");

  // Start from the half-maximum crossing around the peak.
  const size_t peak = static_cast<size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  require(y[peak] > 0, "width fit needs a positive peak");
  double half = 0.0;
  for (size_t i = peak; i < y.size(); ++i) {
    if (y[i] <= 0.5 * y[peak]) {
      half = x_mhz[i] - x_mhz[peak];
      break;
    }
  }
  if (!(half > 0)) half = 0.25 * (x_mhz.back() - x_mhz.front());
  const double w0 = shape == LineShape::Gaussian ? half / std::sqrt(2 * std::log(2.0)) : half;

  auto model = [&](double w, double c) {
    std::vector<double> f(x_mhz.size());
    const LineProfile p = shape == LineShape::Gaussian ? LineProfile::gaussian(w, c)
                                                       : LineProfile::lorentzian(w, c);
    for (size_t i = 0; i < f.size(); ++i) f[i] = p(x_mhz[i]);
    return f;
  };
  const Objective obj = [&](const std::vector<double>& p) {
    const double w = std::exp(p[0]);
    if (!std::isfinite(w) || w <= 0) return kInf;
    return project(y, model(w, p[1]), {}).rss;
  };

  WidthFit best;
  best.rss = kInf;
  for (double factor : {0.5, 1.0, 2.0}) {
    const std::vector<double> start{std::log(w0 * factor), x_mhz[peak]};
    const NelderMeadResult r = nelder_mead(obj, start, {0.3, 0.1 * w0});
    if (r.fx < best.rss) {
      best.rss = r.fx;
      best.width_mhz = std::exp(r.x[0]);
      best.center_mhz = r.x[1];
      best.converged = r.converged;
      best.amplitude = project(y, model(best.width_mhz, best.center_mhz), {}).amplitude;
    }
  }
  return best;
}

double sensitivity(double sigma_b_tesla, double tau_s) {
  require(std::isfinite(sigma_b_tesla) && sigma_b_tesla > 0, "field noise must be positive");
  require(std::isfinite(tau_s) && tau_s > 0, "time constant must be positive");
  return sigma_b_tesla * std::sqrt(tau_s);
}

}  // namespace nvcr
