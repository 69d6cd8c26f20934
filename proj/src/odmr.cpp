#include "nvcr/odmr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nvcr/errors.hpp"

namespace nvcr {

namespace {

constexpr std::array<std::array<int, 3>, 6> kPermutations{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

// Follows the (g, d, e) branches of every class along a field ray.
class BranchTracker {
 public:
  BranchTracker(const Vector3& direction, double e_perp_mhz, const PhysicalConstants& c)
      : dir_(direction.normalized()), e_perp_(e_perp_mhz), c_(c) {
    for (int k = 0; k < 4; ++k) frames_[static_cast<size_t>(k)] = NVClassFrame::oriented(k, dir_);
  }

  TransitionSet step(double amplitude) {
    TransitionSet t;
    t.b_gauss = amplitude;
    t.field.b_gauss = amplitude * dir_;
    t.field.e_perp_mhz = e_perp_;
    for (size_t k = 0; k < 4; ++k) {
      const SpinEigensystem es = solve(frames_[k], t.field, c_);
      std::array<int, 3> perm = kPermutations[0];
      if (started_) {
        double best = -1.0;
        for (const auto& p : kPermutations) {
          double score = 0.0;
          for (int b = 0; b < 3; ++b) score += std::norm(states_[k].col(b).dot(es.states.col(p[b])));
          if (score > best + 1e-9) {
            best = score;
            perm = p;
          }
        }
      }
      Matrix3c tracked;
      for (int b = 0; b < 3; ++b) tracked.col(b) = es.states.col(perm[static_cast<size_t>(b)]);
      states_[k] = tracked;
      const auto e = [&](int b) { return es.energies_ghz[static_cast<size_t>(perm[static_cast<size_t>(b)])]; };
      t.classes[k] = ClassTransitions{static_cast<int>(k), e(1) - e(0), e(2) - e(0)};
    }
    started_ = true;
    return t;
  }

 private:
  Vector3 dir_;
  double e_perp_;
  PhysicalConstants c_;
  std::array<NVClassFrame, 4> frames_;
  std::array<Matrix3c, 4> states_;
  bool started_ = false;
};

void check_grid(std::span<const double> amplitudes) {
  require(!amplitudes.empty(), "amplitude grid must be non-empty");
  for (size_t i = 0; i < amplitudes.size(); ++i) {
    require(std::isfinite(amplitudes[i]) && amplitudes[i] >= 0, "amplitudes must be >= 0");
    if (i > 0) require(amplitudes[i] > amplitudes[i - 1], "amplitudes must be increasing");
  }
}

double pair_gap(const TransitionSet& t, int a, int b, bool upper) {
  const auto& ca = t.classes[static_cast<size_t>(a)];
  const auto& cb = t.classes[static_cast<size_t>(b)];
  return 1e3 * std::abs(upper ? ca.nu_upper_ghz - cb.nu_upper_ghz : ca.nu_lower_ghz - cb.nu_lower_ghz);
}

// Root of g(x) = 0 on [lo, hi] with g(lo) < 0 <= g(hi).
template <typename G>
double bisect(G&& g, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::array<double, 8> TransitionSet::frequencies() const {
  std::array<double, 8> out{};
  for (size_t k = 0; k < 4; ++k) {
    out[2 * k] = classes[k].nu_lower_ghz;
    out[2 * k + 1] = classes[k].nu_upper_ghz;
  }
  return out;
}

Vector3 default_misaligned_direction() {
  const double tilt = 24.0 * std::numbers::pi / 180.0;
  const Vector3 toward = Vector3(0, 2, 1).normalized();
  return (std::cos(tilt) * Vector3::UnitX() + std::sin(tilt) * toward).normalized();
}

std::vector<TransitionSet> all_transitions(const Vector3& b_direction,
                                           std::span<const double> amplitudes_gauss,
                                           double e_perp_mhz, const PhysicalConstants& c) {
  require(b_direction.allFinite() && std::abs(b_direction.norm() - 1.0) < 1e-9,
          "field direction must be a unit vector");
  check_grid(amplitudes_gauss);
  BranchTracker tracker(b_direction, e_perp_mhz, c);
  std::vector<TransitionSet> out;
  out.reserve(amplitudes_gauss.size());
  for (double b : amplitudes_gauss) out.push_back(tracker.step(b));
  return out;
}

DegeneracyReport degeneracy_lift(const Vector3& b_direction, std::span<const double> amplitudes_gauss,
                                 double cr_range_mhz, double e_perp_mhz, const PhysicalConstants& c) {
  require(std::isfinite(cr_range_mhz) && cr_range_mhz > 0, "CR range must be positive");
  require(b_direction.allFinite() && std::abs(b_direction.norm() - 1.0) < 1e-9,
          "field direction must be a unit vector");
  check_grid(amplitudes_gauss);

  DegeneracyReport r;
  r.cr_range_mhz = cr_range_mhz;
  r.amplitudes_gauss.assign(amplitudes_gauss.begin(), amplitudes_gauss.end());

  // Keep the tracker state at every grid point so bisection can resume from it.
  BranchTracker tracker(b_direction, e_perp_mhz, c);
  std::vector<BranchTracker> snapshots;
  std::vector<TransitionSet> sets;
  for (double b : amplitudes_gauss) {
    sets.push_back(tracker.step(b));
    snapshots.push_back(tracker);
  }
  const size_t n = sets.size();

  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      for (bool upper : {false, true}) {
        PairCurve pc{a, b, upper, {}, std::nullopt};
        for (const auto& t : sets) pc.dnu_mhz.push_back(pair_gap(t, a, b, upper));
        r.pairs.push_back(std::move(pc));
      }
    }
  }

  auto refine = [&](size_t k, auto&& gap) {
    // Crossing between grid points k-1 and k.
    if (k == 0) return amplitudes_gauss[0];
    return bisect(
        [&](double x) {
          BranchTracker local = snapshots[k - 1];
          return gap(local.step(x)) - cr_range_mhz;
        },
        amplitudes_gauss[k - 1], amplitudes_gauss[k]);
  };

  for (auto& pc : r.pairs) {
    for (size_t k = 0; k < n; ++k) {
      if (pc.dnu_mhz[k] >= cr_range_mhz) {
        pc.crossing_gauss =
            refine(k, [&](const TransitionSet& t) { return pair_gap(t, pc.class_a, pc.class_b, pc.upper); });
        break;
      }
    }
  }

  auto min_gap = [&](const TransitionSet& t) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& pc : r.pairs) m = std::min(m, pair_gap(t, pc.class_a, pc.class_b, pc.upper));
    return m;
  };
  for (const auto& t : sets) r.min_dnu_mhz.push_back(min_gap(t));

  // Last grid point still inside the CR range.
  std::optional<size_t> last_below;
  for (size_t k = 0; k < n; ++k)
    if (r.min_dnu_mhz[k] < cr_range_mhz) last_below = k;
  if (!last_below)
    r.lift_gauss = amplitudes_gauss[0];
  else if (*last_below + 1 < n)
    r.lift_gauss = refine(*last_below + 1, min_gap);
  return r;
}

Spectrum synth_spectrum(const TransitionSet& t, const LineProfile& line,
                        std::span<const double> contrast, std::span<const double> freq_ghz) {
  require(contrast.size() == 1 || contrast.size() == 8, "contrast needs 1 or 8 values");
  for (double v : contrast) require(std::isfinite(v) && v >= 0, "contrast must be >= 0");
  const auto nu = t.frequencies();
  const double peak = line.peak();
  Spectrum s;
  s.freq_ghz.assign(freq_ghz.begin(), freq_ghz.end());
  for (double f : freq_ghz) {
    require(std::isfinite(f), "frequencies must be finite");
    double dip = 0.0;
    for (size_t k = 0; k < 8; ++k) {
      const double ck = contrast.size() == 1 ? contrast[0] : contrast[k];
      dip += ck * line(line.center() + (f - nu[k]) * 1e3) / peak;
    }
    s.pl.push_back(1.0 - dip);
  }
  return s;
}

int count_dips(const Spectrum& s, double threshold) {
  int dips = 0;
  const auto& y = s.pl;
  for (size_t i = 1; i + 1 < y.size(); ++i)
    if (y[i] < y[i - 1] && y[i] <= y[i + 1] && y[i] < 1.0 - threshold) ++dips;
  return dips;
}

}  // namespace nvcr
