#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "nvcr/lineshape.hpp"
#include "nvcr/spin_model.hpp"

namespace nvcr {

struct ClassTransitions {
  int class_id = 0;
  double nu_lower_ghz = 0.0;  ///< g -> d
  double nu_upper_ghz = 0.0;  ///< g -> e
};

struct TransitionSet {
  double b_gauss = 0.0;  ///< field amplitude
  FieldConfiguration field;
  std::array<ClassTransitions, 4> classes{};

  /// The eight frequencies, class-major: (lower, upper) per class.
  std::array<double, 8> frequencies() const;
};

/// 24 deg from [100], tilted toward (0, 2, 1)/sqrt5 so that no two classes
/// stay degenerate.
Vector3 default_misaligned_direction();

/// Transitions of all four classes along a field ray. Each class uses the
/// frame oriented to the field with the electric azimuth along B_perp.
/// Branch labels follow eigenvector continuity from the first grid point;
/// amplitudes must be non-negative and increasing.
std::vector<TransitionSet> all_transitions(const Vector3& b_direction,
                                           std::span<const double> amplitudes_gauss,
                                           double e_perp_mhz, const PhysicalConstants& c = {});

struct PairCurve {
  int class_a = 0;
  int class_b = 0;
  bool upper = false;                ///< which transition family
  std::vector<double> dnu_mhz;       ///< |nu_a - nu_b| on the amplitude grid
  std::optional<double> crossing_gauss;  ///< first rise through cr_range
};

struct DegeneracyReport {
  double cr_range_mhz = 8.04;
  std::vector<double> amplitudes_gauss;
  std::vector<PairCurve> pairs;       ///< 6 class pairs x 2 families
  std::vector<double> min_dnu_mhz;    ///< minimum over pairs per grid point
  /// Field above which every pair is split by more than cr_range.
  std::optional<double> lift_gauss;
};

DegeneracyReport degeneracy_lift(const Vector3& b_direction, std::span<const double> amplitudes_gauss,
                                 double cr_range_mhz = 8.04, double e_perp_mhz = 0.0,
                                 const PhysicalConstants& c = {});

struct Spectrum {
  std::vector<double> freq_ghz;
  std::vector<double> pl;  ///< 1 off resonance
};

/// PL(f) = 1 - sum_k contrast_k * line(f - nu_k) / line.peak(). `contrast`
/// holds one value for all lines or one per line (8).
Spectrum synth_spectrum(const TransitionSet& t, const LineProfile& line,
                        std::span<const double> contrast, std::span<const double> freq_ghz);

/// Number of local minima of the PL curve below 1 - threshold.
int count_dips(const Spectrum& s, double threshold = 1e-3);

}  // namespace nvcr
