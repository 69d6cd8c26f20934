#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nvcr {

using Vector3 = Eigen::Vector3d;
using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

// Frequencies are in GHz for Hamiltonians and energies, MHz for splittings
// and field couplings, Gauss for magnetic fields.
struct PhysicalConstants {
  double zfs_ghz = 2.87;                ///< D, zero-field splitting
  double gamma_e_mhz_per_gauss = 2.8;   ///< electron gyromagnetic ratio
  double d_perp_hz_cm_per_v = 17.0;     ///< transverse electric susceptibility
  double d_par_hz_cm_per_v = 0.35;      ///< longitudinal electric susceptibility
  double j0_mhz_nm3 = 52.0;             ///< dipolar strength J0/(2 pi)

  void validate() const;
};

/// Electric field (V/cm) to coupling energy (MHz) for a given susceptibility.
double electric_energy_mhz(double field_v_per_cm, double susceptibility_hz_cm_per_v);

/// Right-handed orthonormal triad expressed in the crystal frame.
struct Frame {
  Vector3 x_hat = Vector3::UnitX();
  Vector3 y_hat = Vector3::UnitY();
  Vector3 z_hat = Vector3::UnitZ();

  /// Throws InvalidFrame unless orthonormal and right-handed within tol.
  void validate(double tol = 1e-9) const;

  /// Frame with the same z axis and x rotated by `psi` about z.
  Frame rotated_about_z(double psi) const;
  Frame rotated(const Eigen::Matrix3d& rotation) const;
};

/// The four <111> NV axes, normalized, in the canonical sign convention.
const std::array<Vector3, 4>& class_axes();

struct NVClassFrame {
  int class_id = 0;
  Frame axes;

  /// Canonical frame: z along the positive <111> representative, x fixed.
  static NVClassFrame canonical(int class_id);

  /// z sign chosen so that B.z >= 0 and x along the transverse part of B.
  /// Falls back to the canonical frame (or its z-flipped variant) when the
  /// transverse component vanishes.
  static NVClassFrame oriented(int class_id, const Vector3& b_direction);

  void validate() const;
};

struct FieldConfiguration {
  Vector3 b_gauss = Vector3::Zero();  ///< crystal frame
  double e_perp_mhz = 0.0;            ///< d_perp * E_perp
  double phi_e = 0.0;                 ///< azimuth of the zero-field eigenstates, radians
  double e_par_mhz = 0.0;             ///< d_par * E_par, neglected by default

  void validate() const;
};

/// Single-spin basis states in the {|-1>,|0>,|+1>} representation.
namespace basis_state {
Vector3c minus_one();
Vector3c zero();
Vector3c plus_one();
/// (|+1> + e^{-i phi}|-1>)/sqrt2
Vector3c plus(double phi_e = 0.0);
/// (|+1> - e^{-i phi}|-1>)/sqrt2
Vector3c minus(double phi_e = 0.0);
}  // namespace basis_state

/// Spin-1 operators in the {|-1>,|0>,|+1>} basis (index 0 is m=-1).
struct SpinOperators {
  Matrix3c sx, sy, sz;
};
const SpinOperators& spin_one();

/// Ground-state Hamiltonian in GHz, basis {|-1>,|0>,|+1>} of the class frame:
///   H = D Sz^2 + gamma_e B.S + E_perp [cos(phi) (Sx^2 - Sy^2) - sin(phi) (SxSy + SySx)]
///       + E_par Sz^2
/// With this sign the state (|+1> + e^{-i phi}|-1>)/sqrt2 sits at +E_perp.
Matrix3c build_hamiltonian(const NVClassFrame& cls, const FieldConfiguration& field,
                           const PhysicalConstants& c = {});

struct StateOverlaps {
  double e_plus_one = 0.0;  ///< |<e|+1>|^2
  double e_plus = 0.0;      ///< |<e|+>|^2
  double g_zero = 0.0;      ///< |<g|0>|^2
  double d_minus = 0.0;     ///< |<d|->|^2
};

struct SpinEigensystem {
  std::array<double, 3> energies_ghz{};  ///< ascending: g, d, e
  Matrix3c states;                       ///< columns g, d, e
  StateOverlaps overlaps;
  double max_residual = 0.0;

  Vector3c g() const { return states.col(0); }
  Vector3c d() const { return states.col(1); }
  Vector3c e() const { return states.col(2); }
};

/// Eigen-decomposition of a 3x3 Hermitian matrix. Degenerate eigenvectors are
/// resolved by maximal overlap with |0>, |->, |+> (in that order), where |+/->
/// carry the azimuth `phi_e`. Each eigenvector's largest component is made
/// real and positive.
SpinEigensystem diagonalize(const Matrix3c& h, double phi_e = 0.0);

/// build_hamiltonian followed by diagonalize with matching reference states.
SpinEigensystem solve(const NVClassFrame& cls, const FieldConfiguration& field,
                      const PhysicalConstants& c = {});

struct EigenMapCell {
  double b_gauss = 0.0;
  double theta_rad = 0.0;
  StateOverlaps overlaps;
};

/// Overlap map of |e> with |+1> and |+> as a function of field amplitude and
/// angle to the NV axis. The transverse part of B lies along the frame x axis
/// and the electric azimuth is zero in that frame. Row-major in (b, theta).
std::vector<EigenMapCell> eigenstate_map(const NVClassFrame& cls, std::span<const double> b_gauss,
                                         std::span<const double> theta_rad, double e_perp_mhz,
                                         const PhysicalConstants& c = {});

struct TransverseScanPoint {
  double b_perp_gauss = 0.0;
  std::array<double, 3> energies_ghz{};
  double splitting_mhz = 0.0;  ///< E_e - E_d = nu_+ - nu_-
  double matching = 0.0;       ///< |<e|+>|^2
};

/// Scan a purely transverse field along `direction` (must be orthogonal to the
/// class axis). The electric field is taken along the same transverse axis.
std::vector<TransverseScanPoint> transverse_field_scan(const NVClassFrame& cls,
                                                       const Vector3& direction,
                                                       std::span<const double> b_perp_gauss,
                                                       double e_perp_mhz,
                                                       const PhysicalConstants& c = {});

/// Same, with the field along the class frame's x axis.
std::vector<TransverseScanPoint> transverse_field_scan(const NVClassFrame& cls,
                                                       std::span<const double> b_perp_gauss,
                                                       double e_perp_mhz,
                                                       const PhysicalConstants& c = {});

}  // namespace nvcr
