#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "nvcr/analysis.hpp"
#include "nvcr/eta_average.hpp"
#include "nvcr/odmr.hpp"
#include "nvcr/relaxation.hpp"
#include "nvcr/spin_model.hpp"

namespace nvcr::cli {

namespace {

using json = nlohmann::ordered_json;

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// What a subcommand produces: an optional grid plus structured values.
struct Result {
  std::optional<Table> table;
  json summary = json::object();
};

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return number_or_null(*d);
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

std::string summary_text(const json& v) {
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

enum class Format { Csv, Json };

struct Meta {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> params;
};

void write_csv(std::ostream& os, const Meta& meta, const Result& r) {
  os << "# nvcr " << NVCR_VERSION << ' ' << meta.subcommand << '\n';
  for (const auto& [k, v] : meta.params) os << "# " << k << '=' << v << '\n';
  if (r.table) {
    for (const auto& [k, v] : r.summary.items()) os << "# " << k << '=' << summary_text(v) << '\n';
    for (size_t i = 0; i < r.table->columns.size(); ++i) os << (i ? "," : "") << r.table->columns[i];
    os << '\n';
    for (const auto& row : r.table->rows) {
      for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
      os << '\n';
    }
  } else {
    os << "key,value\n";
    for (const auto& [k, v] : r.summary.items()) os << k << ',' << summary_text(v) << '\n';
  }
}

void write_json(std::ostream& os, const Meta& meta, const Result& r) {
  json j;
  json params = json::object();
  for (const auto& [k, v] : meta.params) params[k] = v;
  j["meta"] = {{"tool", "nvcr"}, {"version", NVCR_VERSION}, {"subcommand", meta.subcommand},
               {"parameters", params}};
  for (const auto& [k, v] : r.summary.items()) j[k] = v;
  if (r.table) {
    j["columns"] = r.table->columns;
    json rows = json::array();
    for (const auto& row : r.table->rows) {
      json jr = json::array();
      for (const auto& c : row) jr.push_back(cell_json(c));
      rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
  }
  os << j.dump(2) << '\n';
}

std::vector<double> linspace(double lo, double hi, int n) {
  require(std::isfinite(lo) && std::isfinite(hi), "grid bounds must be finite");
  require(n >= 1, "grid needs at least one point");
  require(hi >= lo, "grid upper bound must be >= lower bound");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
  require(lo > 0 && hi > lo, "log grid needs 0 < min < max");
  std::vector<double> out;
  for (double x : linspace(std::log(lo), std::log(hi), n)) out.push_back(std::exp(x));
  return out;
}

constexpr double kDeg = std::numbers::pi / 180.0;

// ---------------------------------------------------------------------------

struct Globals {
  std::string output;
  std::string format;
  std::uint64_t seed = 0;
  PhysicalConstants constants;
  QuadratureSpec quad;
};

struct DirectionOpts {
  std::string preset = "misaligned24";
  std::vector<double> direction;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "Field direction preset")
        ->check(CLI::IsMember({"misaligned24", "100", "110", "111"}));
    app->add_option("--direction", direction,
                    "Field direction x,y,z in crystal coordinates (overrides --preset)")
        ->expected(3)
        ->delimiter(',');
  }

  Vector3 resolve() const {
    if (!direction.empty()) {
      const Vector3 d(direction[0], direction[1], direction[2]);
      require(d.allFinite() && d.norm() > 0, "field direction must be non-zero");
      return d.normalized();
    }
    if (preset == "100") return Vector3::UnitX();
    if (preset == "110") return Vector3(1, 1, 0).normalized();
    if (preset == "111") return Vector3(1, 1, 1).normalized();
    return default_misaligned_direction();
  }
};

LineProfile read_tabulated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open line profile '" + path + "'");
  std::vector<double> x, y;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      require(line.rfind("offset_mhz,value", 0) == 0, "expected header 'offset_mhz,value'");
      continue;
    }
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    double a = 0, b = 0;
    char comma = 0;
    if (!(ss >> a >> comma >> b) || comma != ',') throw InvalidArgument("bad profile row '" + line + "'");
    x.push_back(a);
    y.push_back(b);
  }
  return LineProfile::tabulated(std::move(x), std::move(y));
}

LineProfile make_profile(const std::string& shape, double width, const std::string& table) {
  if (!table.empty()) return read_tabulated(table);
  if (shape == "lorentzian") return LineProfile::lorentzian(width);
  require(shape == "gaussian", "analytic shapes are gaussian or lorentzian; use a table file otherwise");
  return LineProfile::gaussian(width);
}

// ---------------------------------------------------------------------------

struct EigenMap {
  int class_id = 0;
  double b_min = 0, b_max = 200, theta_min = 0, theta_max = 90, e_perp = 4;
  int b_steps = 41, theta_steps = 19;

  void attach(CLI::App* app) {
    app->add_option("--class-id", class_id, "NV class 0..3")->check(CLI::Range(0, 3));
    app->add_option("--b-min-gauss", b_min, "Smallest field amplitude (G)");
    app->add_option("--b-max-gauss", b_max, "Largest field amplitude (G)");
    app->add_option("--b-steps", b_steps, "Number of amplitudes")->check(CLI::PositiveNumber);
    app->add_option("--theta-min-deg", theta_min, "Smallest angle to the NV axis (deg)");
    app->add_option("--theta-max-deg", theta_max, "Largest angle to the NV axis (deg)");
    app->add_option("--theta-steps", theta_steps, "Number of angles")->check(CLI::PositiveNumber);
    app->add_option("--e-perp-mhz", e_perp, "Transverse electric coupling d_perp*E_perp (MHz)");
  }

  Result run(const Globals& g) const {
    const auto bs = linspace(b_min, b_max, b_steps);
    std::vector<double> thetas;
    for (double t : linspace(theta_min, theta_max, theta_steps)) thetas.push_back(t * kDeg);
    const auto cells = eigenstate_map(NVClassFrame::canonical(class_id), bs, thetas, e_perp, g.constants);
    Table t{{"b_gauss", "theta_deg", "e_plus_one", "e_plus", "g_zero", "d_minus"}, {}};
    for (const auto& c : cells)
      t.rows.push_back({c.b_gauss, c.theta_rad / kDeg, c.overlaps.e_plus_one, c.overlaps.e_plus,
                        c.overlaps.g_zero, c.overlaps.d_minus});
    return {std::move(t), {}};
  }
};

struct TransverseScan {
  int class_id = 0;
  double b_max = 150, e_perp = 4;
  int steps = 151;

  void attach(CLI::App* app) {
    app->add_option("--class-id", class_id, "NV class 0..3")->check(CLI::Range(0, 3));
    app->add_option("--b-max-gauss", b_max, "Largest transverse field (G)");
    app->add_option("--b-steps", steps, "Number of amplitudes from 0")->check(CLI::PositiveNumber);
    app->add_option("--e-perp-mhz", e_perp, "Transverse electric coupling (MHz), along the field");
  }

  Result run(const Globals& g) const {
    const auto bs = linspace(0.0, b_max, steps);
    const auto pts = transverse_field_scan(NVClassFrame::canonical(class_id), bs, e_perp, g.constants);
    Table t{{"b_perp_gauss", "E_g_GHz", "E_d_GHz", "E_e_GHz", "splitting_MHz", "matching"}, {}};
    for (const auto& p : pts)
      t.rows.push_back({p.b_perp_gauss, p.energies_ghz[0], p.energies_ghz[1], p.energies_ghz[2],
                        p.splitting_mhz, p.matching});
    return {std::move(t), {}};
  }
};

struct EtaTableCmd {
  void attach(CLI::App*) {}

  Result run(const Globals& g) const {
    const EtaTable tab = eta_table(g.quad);
    Table t{{"basis"}, {}};
    for (const char* c : EtaTable::column_names) t.columns.emplace_back(c);
    for (size_t r = 0; r < 3; ++r)
      t.rows.push_back({std::string(EtaTable::row_names[r]), tab.values[r][0], tab.values[r][1],
                        tab.values[r][2]});
    return {std::move(t), {}};
  }
};

struct MultipliersCmd {
  void attach(CLI::App*) {}

  Result run(const Globals& g) const {
    Table t{{"scenario", "multiplier"}, {}};
    for (const auto& row : all_multipliers(g.quad))
      t.rows.push_back({std::string(to_string(row.orientation)), row.multiplier});
    return {std::move(t), {}};
  }
};

struct TransitionsCmd {
  DirectionOpts dir;
  double b_min = 0, b_max = 50, e_perp = 0;
  int steps = 101;

  void attach(CLI::App* app) {
    dir.attach(app);
    app->add_option("--b-min-gauss", b_min, "Smallest field amplitude (G)")->check(CLI::NonNegativeNumber);
    app->add_option("--b-max-gauss", b_max, "Largest field amplitude (G)")->check(CLI::NonNegativeNumber);
    app->add_option("--b-steps", steps, "Number of amplitudes")->check(CLI::PositiveNumber);
    app->add_option("--e-perp-mhz", e_perp, "Transverse electric coupling (MHz)")
        ->check(CLI::NonNegativeNumber);
  }

  Result run(const Globals& g) const {
    const auto sets = all_transitions(dir.resolve(), linspace(b_min, b_max, steps), e_perp, g.constants);
    Table t{{"B_gauss"}, {}};
    for (int k = 1; k <= 8; ++k) t.columns.push_back("nu" + std::to_string(k) + "_GHz");
    for (const auto& s : sets) {
      std::vector<Cell> row{s.b_gauss};
      for (double f : s.frequencies()) row.emplace_back(f);
      t.rows.push_back(std::move(row));
    }
    return {std::move(t), {}};
  }
};

struct DegeneracyCmd {
  DirectionOpts dir;
  double b_max = 30, e_perp = 0, cr_range = 8.04;
  int steps = 301;

  void attach(CLI::App* app) {
    dir.attach(app);
    app->add_option("--b-max-gauss", b_max, "Largest field amplitude (G)")->check(CLI::PositiveNumber);
    app->add_option("--b-steps", steps, "Number of amplitudes from 0")->check(CLI::Range(2, 1000000));
    app->add_option("--e-perp-mhz", e_perp, "Transverse electric coupling (MHz)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--cr-range-mhz", cr_range, "Cross-relaxation interaction range (MHz)")
        ->check(CLI::PositiveNumber);
  }

  Result run(const Globals& g) const {
    const auto rep = degeneracy_lift(dir.resolve(), linspace(0.0, b_max, steps), cr_range, e_perp,
                                     g.constants);
    Table t{{"B_gauss"}, {}};
    json pairs = json::array();
    for (size_t p = 0; p < rep.pairs.size(); ++p) {
      const auto& pc = rep.pairs[p];
      const std::string name = "pair" + std::to_string(p + 1);
      t.columns.push_back("dnu_" + name + "_MHz");
      pairs.push_back({{"name", name},
                       {"class_a", pc.class_a},
                       {"class_b", pc.class_b},
                       {"family", pc.upper ? "upper" : "lower"},
                       {"crossing_gauss", pc.crossing_gauss ? json(*pc.crossing_gauss) : json(nullptr)}});
    }
    t.columns.emplace_back("min_dnu_MHz");
    for (size_t k = 0; k < rep.amplitudes_gauss.size(); ++k) {
      std::vector<Cell> row{rep.amplitudes_gauss[k]};
      for (const auto& pc : rep.pairs) row.emplace_back(pc.dnu_mhz[k]);
      row.emplace_back(rep.min_dnu_mhz[k]);
      t.rows.push_back(std::move(row));
    }
    json s;
    s["cr_range_mhz"] = rep.cr_range_mhz;
    s["lift_gauss"] = rep.lift_gauss ? json(*rep.lift_gauss) : json(nullptr);
    s["pairs"] = std::move(pairs);
    return {std::move(t), std::move(s)};
  }
};

struct SpectrumCmd {
  DirectionOpts dir;
  double b = 0, e_perp = 4, width = 1.0, contrast = 0.01, f_min = 2.80, f_max = 2.94;
  int f_steps = 1401;
  std::string shape = "gaussian";
  std::string table;

  void attach(CLI::App* app) {
    dir.attach(app);
    app->add_option("--b-gauss", b, "Field amplitude (G)")->check(CLI::NonNegativeNumber);
    app->add_option("--e-perp-mhz", e_perp, "Transverse electric coupling (MHz)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--shape", shape, "Line shape")->check(CLI::IsMember({"gaussian", "lorentzian"}));
    app->add_option("--width-mhz", width, "Sigma (Gaussian) or half width (Lorentzian), MHz")
        ->check(CLI::PositiveNumber);
    app->add_option("--profile-table", table, "Tabulated profile CSV 'offset_mhz,value' (overrides --shape)")
        ->check(CLI::ExistingFile);
    app->add_option("--contrast", contrast, "Dip depth per line (fraction of PL)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--f-min-ghz", f_min, "Lowest frequency (GHz)");
    app->add_option("--f-max-ghz", f_max, "Highest frequency (GHz)");
    app->add_option("--f-steps", f_steps, "Number of frequencies")->check(CLI::Range(2, 10000000));
  }

  Result run(const Globals& g) const {
    const double amps[1] = {b};
    const auto sets = all_transitions(dir.resolve(), amps, e_perp, g.constants);
    const double c[1] = {contrast};
    const auto spec = synth_spectrum(sets[0], make_profile(shape, width, table), c,
                                     linspace(f_min, f_max, f_steps));
    Table t{{"freq_GHz", "pl_norm"}, {}};
    for (size_t i = 0; i < spec.freq_ghz.size(); ++i) t.rows.push_back({spec.freq_ghz[i], spec.pl[i]});
    json s;
    s["dips"] = count_dips(spec);
    return {std::move(t), std::move(s)};
  }
};

struct DecaySimCmd {
  std::string form = "two-channel";
  double amplitude = 1.0, t1_dd = 0.6e-3, t1_ph = 3.62e-3, beta = 0.5;
  double tau_min = 1e-6, tau_max = 10e-3, noise = 0.0;
  int points = 60;
  bool linear = false;

  void attach(CLI::App* app) {
    app->add_option("--form", form, "Decay law")->check(CLI::IsMember({"two-channel", "stretched"}));
    app->add_option("--amplitude", amplitude, "Amplitude A (dimensionless)")->check(CLI::PositiveNumber);
    app->add_option("--t1-dd-s", t1_dd, "Dipolar (stretched) timescale, or T1 of the stretched form (s)")
        ->check(CLI::PositiveNumber);
    app->add_option("--t1-ph-s", t1_ph, "Phonon timescale (s); inf disables")->check(CLI::PositiveNumber);
    app->add_option("--beta", beta, "Stretch exponent of the stretched form")->check(CLI::PositiveNumber);
    app->add_option("--tau-min-s", tau_min, "First delay (s)")->check(CLI::NonNegativeNumber);
    app->add_option("--tau-max-s", tau_max, "Last delay (s)")->check(CLI::PositiveNumber);
    app->add_option("--points", points, "Number of delays")->check(CLI::Range(2, 10000000));
    app->add_flag("--linear", linear, "Linear instead of logarithmic delay spacing");
    app->add_option("--noise", noise, "Gaussian noise standard deviation added to the signal (uses --seed)")
        ->check(CLI::NonNegativeNumber);
  }

  Result run(const Globals& g) const {
    DecayModel m{form == "stretched" ? DecayForm::Stretched : DecayForm::TwoChannel, amplitude, t1_dd,
                 t1_ph, beta};
    const auto tau = linear ? linspace(tau_min, tau_max, points) : logspace(tau_min, tau_max, points);
    auto sig = decay_curve(tau, m);
    if (noise > 0) {
      std::mt19937_64 rng(g.seed);
      std::normal_distribution<double> n(0.0, noise);
      for (double& s : sig) s += n(rng);
    }
    Table t{{"tau_s", "signal"}, {}};
    for (size_t i = 0; i < tau.size(); ++i) t.rows.push_back({tau[i], sig[i]});
    return {std::move(t), {}};
  }
};

json fit_json(const FitResult& f, bool stretched) {
  json j;
  j["A"] = f.model.amplitude;
  j["T1_dd_s"] = f.model.t1_dd_s;
  j["T1_ph_s"] = stretched ? json(nullptr) : number_or_null(f.model.t1_ph_s);
  j["beta"] = stretched ? json(f.model.beta) : json(nullptr);
  j["rss"] = f.residual_rss;
  j["converged"] = f.converged;
  j["evaluations"] = f.iterations;
  j["gradient_norm"] = number_or_null(f.gradient_norm);
  return j;
}

DecayCurve load_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input '" + path + "'");
  return DecayCurve::read_csv(in);
}

struct FitT1Cmd {
  std::string input;
  std::optional<double> fix_t1ph;
  int starts = 7;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "CSV with header tau_s,signal[,sigma] (s, dimensionless)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--fix-t1ph-s,--fix-t1ph", fix_t1ph, "Hold the phonon timescale fixed (s)")
        ->check(CLI::PositiveNumber);
    app->add_option("--starts", starts, "Number of log-spaced initial timescales (>= 5)")
        ->check(CLI::Range(5, 1000));
  }

  Result run(const Globals& g) const {
    FitOptions o;
    o.n_starts = starts;
    o.seed = g.seed;
    return {std::nullopt, fit_json(fit_decay(load_curve(input), fix_t1ph, o), false)};
  }
};

struct FitBetaCmd {
  std::string input;
  int starts = 7;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "CSV with header tau_s,signal[,sigma] (s, dimensionless)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--starts", starts, "Number of log-spaced initial timescales (>= 5)")
        ->check(CLI::Range(5, 1000));
  }

  Result run(const Globals& g) const {
    FitOptions o;
    o.n_starts = starts;
    o.seed = g.seed;
    return {std::nullopt, fit_json(fit_beta(load_curve(input), o), true)};
  }
};

struct OverlapCmd {
  std::string shape1 = "lorentzian", shape2 = "lorentzian", table1, table2, fit_shape = "auto";
  double width1 = 4.02, width2 = 4.02, delta_max = 40;
  int steps = 401;

  void attach(CLI::App* app) {
    const auto shapes = CLI::IsMember({"gaussian", "lorentzian"});
    app->add_option("--shape1", shape1, "First line shape")->check(shapes);
    app->add_option("--width1-mhz", width1, "First line sigma or half width (MHz)")->check(CLI::PositiveNumber);
    app->add_option("--table1", table1, "First line as CSV 'offset_mhz,value' (overrides --shape1)")
        ->check(CLI::ExistingFile);
    app->add_option("--shape2", shape2, "Second line shape")->check(shapes);
    app->add_option("--width2-mhz", width2, "Second line sigma or half width (MHz)")->check(CLI::PositiveNumber);
    app->add_option("--table2", table2, "Second line as CSV 'offset_mhz,value' (overrides --shape2)")
        ->check(CLI::ExistingFile);
    app->add_option("--delta-max-mhz", delta_max, "Detuning range +/- (MHz)")->check(CLI::PositiveNumber);
    app->add_option("--delta-steps", steps, "Number of detunings")->check(CLI::Range(4, 10000000));
    app->add_option("--fit-shape", fit_shape, "Shape fitted to the overlap curve")
        ->check(CLI::IsMember({"auto", "gaussian", "lorentzian", "none"}));
  }

  Result run(const Globals&) const {
    const LineProfile p1 = make_profile(shape1, width1, table1);
    const LineProfile p2 = make_profile(shape2, width2, table2);
    const auto d = linspace(-delta_max, delta_max, steps);
    const auto s = spectral_overlap(p1, p2, d);
    Table t{{"delta_MHz", "overlap"}, {}};
    for (size_t i = 0; i < d.size(); ++i) t.rows.push_back({d[i], s[i]});

    std::string shape = fit_shape;
    if (shape == "auto")
      shape = (table1.empty() && table2.empty() && shape1 == shape2) ? shape1 : "none";
    json sum;
    sum["fit_shape"] = shape;
    if (shape != "none") {
      const WidthFit w = fit_line_width(d, s, parse_line_shape(shape));
      sum["fitted_width_mhz"] = w.width_mhz;
      sum["fitted_center_mhz"] = w.center_mhz;
      sum["fit_converged"] = w.converged;
    }
    return {std::move(t), std::move(sum)};
  }
};

struct SensitivityCmd {
  double sigma = 1.5e-6, tau = 3e-3;

  void attach(CLI::App* app) {
    app->add_option("--sigma-b-tesla", sigma, "Standard deviation of the field readout (T)")
        ->check(CLI::PositiveNumber);
    app->add_option("--tau-s", tau, "Lock-in time constant (s)")->check(CLI::PositiveNumber);
  }

  Result run(const Globals&) const {
    const double eta = sensitivity(sigma, tau);
    json j;
    j["sensitivity_T_per_sqrtHz"] = eta;
    j["sensitivity_nT_per_sqrtHz"] = eta * 1e9;
    return {std::nullopt, j};
  }
};

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> collect_params(const CLI::App& app) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "version") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
    } else {
      value = opt->get_default_str();
      if (value == "{}") value.clear();
    }
    out.emplace_back(name, value);
  }
  return out;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message,
                 const json& extra = json::object()) {
  json j{{"error", kind}, {"message", message}};
  for (const auto& [k, v] : extra.items()) j[k] = v;
  err << j.dump() << '\n';
}

std::filesystem::path output_path(const std::string& requested) {
  std::filesystem::path p(requested);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("NVCR_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
  }
  return p;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dipolar cross-relaxation model for NV ensembles", "nvcr"};
  app.set_version_flag("--version", std::string(NVCR_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Read options from a key = value file (flags take precedence)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Globals g;
  app.add_option("--output", g.output,
                 "Output file; relative paths are placed under $NVCR_OUTPUT_DIR when set (default stdout)");
  app.add_option("--format", g.format, "Output format (default: csv for grids, json for fits)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "Seed for fit start jitter and synthetic noise");
  app.add_option("--zfs-ghz", g.constants.zfs_ghz, "Zero-field splitting D (GHz)");
  app.add_option("--gamma-e-mhz-per-gauss", g.constants.gamma_e_mhz_per_gauss,
                 "Electron gyromagnetic ratio (MHz/G)");
  app.add_option("--d-perp-hz-cm-per-v", g.constants.d_perp_hz_cm_per_v,
                 "Transverse electric susceptibility (Hz cm/V)");
  app.add_option("--d-par-hz-cm-per-v", g.constants.d_par_hz_cm_per_v,
                 "Longitudinal electric susceptibility (Hz cm/V)");
  app.add_option("--j0-mhz-nm3", g.constants.j0_mhz_nm3, "Dipolar constant J0/2pi (MHz nm^3)");
  app.add_option("--n-theta", g.quad.n_theta, "Polar quadrature nodes")->check(CLI::Range(8, 4096));
  app.add_option("--n-phi", g.quad.n_phi, "Azimuthal quadrature nodes")->check(CLI::Range(8, 65536));
  app.add_option("--n-psi", g.quad.n_psi, "Transverse-axis quadrature nodes")->check(CLI::Range(8, 4096));
  app.add_option("--tolerance", g.quad.tolerance, "Convergence tolerance of angular averages")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-refinements", g.quad.max_refinements, "Resolution doublings allowed")
      ->check(CLI::Range(0, 8));

  EigenMap eigen_map;
  TransverseScan transverse;
  EtaTableCmd eta;
  MultipliersCmd mult;
  TransitionsCmd trans;
  DegeneracyCmd degen;
  SpectrumCmd spectrum;
  DecaySimCmd decay;
  FitT1Cmd fit_t1;
  FitBetaCmd fit_b;
  OverlapCmd overlap;
  SensitivityCmd sens;

  struct Entry {
    CLI::App* app;
    std::function<Result()> run;
    bool structured;
  };
  std::vector<Entry> entries;
  auto add = [&](const char* name, const char* help, auto& cmd, bool structured) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.attach(sub);
    entries.push_back({sub, [&cmd, &g] { return cmd.run(g); }, structured});
  };
  add("eigen-map", "Overlaps of |e> with |+1> and |+> over field amplitude and angle", eigen_map, false);
  add("transverse-scan", "Energies and splitting for a purely transverse field", transverse, false);
  add("eta-table", "Normalized angular averages for both bases and all axis angles", eta, false);
  add("multipliers", "Rate multipliers for each field orientation scenario", mult, false);
  add("transitions", "The eight ODMR transition frequencies along a field ray", trans, false);
  add("degeneracy", "Class-pair detunings and the field where they exceed the CR range", degen, false);
  add("spectrum", "Synthetic ODMR spectrum", spectrum, false);
  add("decay-sim", "Synthetic polarization decay curve", decay, false);
  add("fit-t1", "Fit A exp(-sqrt(t/T1_dd) - t/T1_ph) to a decay curve", fit_t1, true);
  add("fit-beta", "Fit A exp(-(t/T1)^beta) to a decay curve", fit_b, true);
  add("overlap", "Spectral overlap of two lines versus detuning", overlap, false);
  add("sensitivity", "DC magnetic sensitivity sigma * sqrt(tau)", sens, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << NVCR_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }

  const Entry* chosen = nullptr;
  for (const auto& e : entries)
    if (e.app->parsed()) chosen = &e;
  if (!chosen) {
    print_error(err, "usage", "a subcommand is required");
    return 2;
  }

  try {
    const Result r = chosen->run();
    Meta meta{chosen->app->get_name(), collect_params(app)};
    for (auto& p : collect_params(*chosen->app)) meta.params.push_back(std::move(p));
    const Format fmt = g.format.empty() ? (chosen->structured ? Format::Json : Format::Csv)
                                        : (g.format == "json" ? Format::Json : Format::Csv);
    std::ostringstream buffer;
    buffer.imbue(std::locale::classic());
    if (fmt == Format::Json)
      write_json(buffer, meta, r);
    else
      write_csv(buffer, meta, r);
    if (g.output.empty()) {
      out << buffer.str();
    } else {
      const auto path = output_path(g.output);
      std::ofstream f(path, std::ios::binary);
      if (!f) throw IoError("cannot write '" + path.string() + "'");
      f << buffer.str();
      if (!f) throw IoError("write to '" + path.string() + "' failed");
    }
    return 0;
  } catch (const FitError& e) {
    print_error(err, e.kind(), e.what(), {{"best", fit_json(e.best(), e.best().model.form == DecayForm::Stretched)}});
    return 1;
  } catch (const InvalidArgument& e) {
    print_error(err, "usage", e.what());
    return 2;
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return 1;
  }
}

}  // namespace nvcr::cli
