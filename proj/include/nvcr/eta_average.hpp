#pragma once

#include <array>
#include <string>
#include <vector>

#include "nvcr/dipolar.hpp"
#include "nvcr/lineshape.hpp"

namespace nvcr {

/// Angle between the NV axes of the two spins.
enum class ZAngle {
  Same,   ///< 0
  Close,  ///< arccos(1/3), about 70.5 deg
  Far,    ///< arccos(-1/3), about 109.5 deg
};

/// How the transverse axes of the two spins are related (non-magnetic basis only).
enum class XMode {
  Aligned,  ///< both x axes follow one common transverse field, averaged over its direction
  Random,   ///< independent uniform azimuths for each spin
};

const char* to_string(ZAngle z);
const char* to_string(XMode x);

struct EtaScenario {
  Basis basis = Basis::Magnetic;
  ZAngle z_angle = ZAngle::Same;
  XMode x_mode = XMode::Random;  ///< ignored in the magnetic basis
  double weight = 0.25;          ///< class population factor

  void validate() const;
};

struct QuadratureSpec {
  int n_theta = 128;  ///< Gauss-Legendre nodes per meridian (complex elements only)
  int n_phi = 128;    ///< trapezoid nodes in azimuth
  int n_psi = 64;     ///< trapezoid nodes per transverse-axis angle
  double tolerance = 1e-5;
  int max_refinements = 3;

  void validate() const;
  QuadratureSpec doubled() const;
};

/// Mean of |element(u)| over the unit sphere. The grid's polar axis is
/// `grid.z_hat` and azimuth is measured from `grid.x_hat`. For real (or purely
/// imaginary) elements the polar integral is done in closed form between the
/// zeros of the quadratic form; otherwise Gauss-Legendre panels are used.
double sphere_average(const ElementForm& element, const Frame& grid, const QuadratureSpec& q);

/// Sphere average of |<bra|H|ket>| for two explicit frames. The grid is
/// attached to frame1, with its polar axis along the quantization axis of
/// `basis` (z for Magnetic, x for NonMagnetic), so the result is exactly
/// invariant under a common rotation of both frames.
double pair_average(const Frame& f1, const Frame& f2, Basis basis, TransitionElement element,
                    const QuadratureSpec& q);

/// Transverse-axis average in the given mode, on top of pair_average.
double mode_average(const Frame& f1, const Frame& f2, Basis basis, XMode mode,
                    TransitionElement element, const QuadratureSpec& q);

/// Canonical frames for a z-angle class: spin 1 on class 0, spin 2 on class 1
/// (or spin 1's own axis for Same) with z signs giving the requested angle.
std::pair<Frame, Frame> scenario_frames(ZAngle z);

struct AverageDiagnostics {
  double value = 0.0;
  double last_change = 0.0;  ///< |difference| at the final refinement
  QuadratureSpec spec;       ///< resolution of the returned value
  int refinements = 0;
};

/// Normalized flip-flop average eta_bar / (weight * sqrt(1/3)), refined by
/// doubling every resolution until successive values agree within tolerance.
/// Throws ConvergenceError after max_refinements doublings.
AverageDiagnostics angular_average_diagnostics(const EtaScenario& s, const QuadratureSpec& q = {});
double angular_average(const EtaScenario& s, const QuadratureSpec& q = {});

/// eta_bar including the weight * sqrt(1/3) prefactor.
double eta_bar(const EtaScenario& s, const QuadratureSpec& q = {});

/// 3x3 table of normalized averages. Rows: magnetic, non-magnetic with
/// random x axes, non-magnetic with aligned x axes. Columns: Same, Close, Far.
struct EtaTable {
  std::array<std::array<double, 3>, 3> values{};
  static constexpr std::array<const char*, 3> row_names{"pm1_basis", "pm_basis_x_random",
                                                        "pm_basis_x_aligned"};
  static constexpr std::array<const char*, 3> column_names{"z_same", "z_close_70.5", "z_far_109.5"};
};
EtaTable eta_table(const QuadratureSpec& q = {});

enum class FieldOrientation {
  RandomDirection,
  Plane110,
  Plane100,
  Axis111,
  Axis100,
  ZeroFieldElectric,
};
const char* to_string(FieldOrientation f);
FieldOrientation parse_field_orientation(const std::string& name);
constexpr std::array<FieldOrientation, 6> kAllOrientations{
    FieldOrientation::RandomDirection, FieldOrientation::Plane100, FieldOrientation::Plane110,
    FieldOrientation::Axis111,         FieldOrientation::Axis100,  FieldOrientation::ZeroFieldElectric};

/// One resonant contribution: `count` fluctuator classes in `scenario`.
struct ResonanceTerm {
  EtaScenario scenario;
  double count = 1.0;
};

/// Resonant classes seen by the most-coupled NV class for each field orientation.
std::vector<ResonanceTerm> resonance_composition(FieldOrientation f);

/// eta_bar^2 / eta_bar_0^2 with eta_bar_0 the isolated-class magnetic value.
double scenario_multiplier(FieldOrientation f, const QuadratureSpec& q = {});

struct MultiplierRow {
  FieldOrientation orientation;
  double multiplier;
};
/// All multipliers, sharing the underlying averages.
std::vector<MultiplierRow> all_multipliers(const QuadratureSpec& q = {});

/// Model extension: replaces the binary resonance rule by the mean of
/// sqrt(resonance_factor) over the NV and fluctuator line distributions.
double spectral_resonance_weight(const LineProfile& nv_line, const LineProfile& fluctuator_line,
                                 double gamma_f_mhz);

/// sum_k weight_k * count_k * eta_bar(scenario_k) with externally supplied weights.
double weighted_eta_bar(const std::vector<ResonanceTerm>& terms, const std::vector<double>& weights,
                        const QuadratureSpec& q = {});

}  // namespace nvcr
