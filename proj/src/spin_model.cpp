#include "nvcr/spin_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nvcr/errors.hpp"

namespace nvcr {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

bool finite(const Vector3& v) { return v.allFinite(); }

// Normalizes the global phase so the first largest component is real positive.
void fix_phase(Vector3c& v) {
  double largest = 0.0;
  for (int i = 0; i < 3; ++i) largest = std::max(largest, std::abs(v[i]));
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) >= largest - 1e-12) {
      const Complex phase = std::conj(v[i]) / std::abs(v[i]);
      v *= phase;
      return;
    }
  }
}

double overlap2(const Vector3c& a, const Vector3c& b) { return std::norm(a.dot(b)); }

// Orthonormal basis of the part of span(cols) orthogonal to the unit vector p.
Eigen::MatrixXcd complement(const Eigen::MatrixXcd& cols, const Vector3c& p) {
  std::vector<Vector3c> kept;
  for (Eigen::Index k = 0; k < cols.cols(); ++k) {
    Vector3c v = cols.col(k);
    v -= p * p.dot(v);
    for (const auto& q : kept) v -= q * q.dot(v);
    if (v.norm() > 1e-8) kept.push_back(v.normalized());
  }
  Eigen::MatrixXcd out(3, static_cast<Eigen::Index>(kept.size()));
  for (size_t k = 0; k < kept.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = kept[k];
  return out;
}

}  // namespace

void PhysicalConstants::validate() const {
  require(zfs_ghz > 0 && gamma_e_mhz_per_gauss > 0 && d_perp_hz_cm_per_v > 0 &&
              d_par_hz_cm_per_v > 0 && j0_mhz_nm3 > 0,
          "physical constants must be strictly positive");
}

double electric_energy_mhz(double field_v_per_cm, double susceptibility_hz_cm_per_v) {
  return field_v_per_cm * susceptibility_hz_cm_per_v * 1e-6;
}

void Frame::validate(double tol) const {
  if (!finite(x_hat) || !finite(y_hat) || !finite(z_hat))
    throw InvalidFrame("frame contains non-finite components");
  const bool unit = std::abs(x_hat.norm() - 1) < tol && std::abs(y_hat.norm() - 1) < tol &&
                    std::abs(z_hat.norm() - 1) < tol;
  const bool orthogonal =
      std::abs(x_hat.dot(y_hat)) < tol && std::abs(y_hat.dot(z_hat)) < tol &&
      std::abs(z_hat.dot(x_hat)) < tol;
  if (!unit || !orthogonal) throw InvalidFrame("frame axes are not orthonormal");
  if ((x_hat.cross(y_hat) - z_hat).norm() > tol) throw InvalidFrame("frame is not right-handed");
}

Frame Frame::rotated_about_z(double psi) const {
  Frame f = *this;
  f.x_hat = std::cos(psi) * x_hat + std::sin(psi) * y_hat;
  f.y_hat = z_hat.cross(f.x_hat);
  return f;
}

Frame Frame::rotated(const Eigen::Matrix3d& rotation) const {
  return Frame{rotation * x_hat, rotation * y_hat, rotation * z_hat};
}

const std::array<Vector3, 4>& class_axes() {
  static const std::array<Vector3, 4> axes = [] {
    const double s = 1.0 / std::sqrt(3.0);
    return std::array<Vector3, 4>{Vector3(1, 1, 1) * s, Vector3(1, -1, -1) * s,
                                  Vector3(-1, 1, -1) * s, Vector3(-1, -1, 1) * s};
  }();
  return axes;
}

NVClassFrame NVClassFrame::canonical(int class_id) {
  require(class_id >= 0 && class_id < 4, "class id must be in [0, 4)");
  const Vector3 z = class_axes()[static_cast<size_t>(class_id)];
  const Vector3 x = z.cross(Vector3::UnitZ()).normalized();
  return NVClassFrame{class_id, Frame{x, z.cross(x), z}};
}

NVClassFrame NVClassFrame::oriented(int class_id, const Vector3& b_direction) {
  NVClassFrame f = canonical(class_id);
  const double norm = b_direction.norm();
  require(std::isfinite(norm), "field direction must be finite");
  if (norm == 0.0) return f;
  const Vector3 b = b_direction / norm;
  Vector3 z = f.axes.z_hat;
  if (b.dot(z) < -1e-12) z = -z;
  const Vector3 transverse = b - b.dot(z) * z;
  Vector3 x = f.axes.x_hat;
  if (transverse.norm() > 1e-12) x = transverse.normalized();
  f.axes = Frame{x, z.cross(x), z};
  return f;
}

void NVClassFrame::validate() const {
  require(class_id >= 0 && class_id < 4, "class id must be in [0, 4)");
  axes.validate();
}

void FieldConfiguration::validate() const {
  require(b_gauss.allFinite(), "magnetic field must be finite");
  require(std::isfinite(e_perp_mhz) && e_perp_mhz >= 0, "E_perp must be >= 0");
  require(std::isfinite(phi_e), "phi_E must be finite");
  require(std::isfinite(e_par_mhz), "E_par must be finite");
}

namespace basis_state {
Vector3c minus_one() { return Vector3c(1, 0, 0); }
Vector3c zero() { return Vector3c(0, 1, 0); }
Vector3c plus_one() { return Vector3c(0, 0, 1); }
Vector3c plus(double phi_e) {
  return Vector3c(kSqrtHalf * std::polar(1.0, -phi_e), 0, kSqrtHalf);
}
Vector3c minus(double phi_e) {
  return Vector3c(-kSqrtHalf * std::polar(1.0, -phi_e), 0, kSqrtHalf);
}
}  // namespace basis_state

const SpinOperators& spin_one() {
  static const SpinOperators ops = [] {
    const double r2 = std::sqrt(2.0);
    Matrix3c raise = Matrix3c::Zero();
    raise(1, 0) = r2;  // |-1> -> |0>
    raise(2, 1) = r2;  // |0>  -> |+1>
    const Matrix3c lower = raise.adjoint();
    SpinOperators s;
    s.sx = (raise + lower) / 2.0;
    s.sy = (raise - lower) / Complex(0, 2);
    s.sz = Matrix3c::Zero();
    s.sz(0, 0) = -1;
    s.sz(2, 2) = 1;
    return s;
  }();
  return ops;
}

Matrix3c build_hamiltonian(const NVClassFrame& cls, const FieldConfiguration& field,
                           const PhysicalConstants& c) {
  cls.axes.validate();
  field.validate();
  c.validate();
  const auto& s = spin_one();
  const Frame& f = cls.axes;
  const double g = c.gamma_e_mhz_per_gauss * 1e-3;  // GHz per Gauss
  const Matrix3c sz2 = s.sz * s.sz;

  Matrix3c h = (c.zfs_ghz + field.e_par_mhz * 1e-3) * sz2;
  h += g * (field.b_gauss.dot(f.x_hat) * s.sx + field.b_gauss.dot(f.y_hat) * s.sy +
            field.b_gauss.dot(f.z_hat) * s.sz);
  const double e = field.e_perp_mhz * 1e-3;
  h += e * (std::cos(field.phi_e) * (s.sx * s.sx - s.sy * s.sy) -
            std::sin(field.phi_e) * (s.sx * s.sy + s.sy * s.sx));
  return h;
}

SpinEigensystem diagonalize(const Matrix3c& h, double phi_e) {
  if (!h.allFinite()) throw NonHermitian("Hamiltonian contains non-finite entries");
  const double scale = std::max(1.0, h.norm());
  if ((h - h.adjoint()).norm() > 1e-10 * scale)
    throw NonHermitian("Hamiltonian is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix3c> solver(h);
  if (solver.info() != Eigen::Success) throw ConvergenceError("3x3 eigensolver failed");

  SpinEigensystem out;
  Matrix3c vecs = solver.eigenvectors();
  const Eigen::Vector3d vals = solver.eigenvalues();

  // Resolve degenerate clusters against the reference states.
  const std::array<Vector3c, 3> refs = {basis_state::zero(), basis_state::minus(phi_e),
                                        basis_state::plus(phi_e)};
  const double tol = 1e-9 * scale;
  int start = 0;
  while (start < 3) {
    int end = start + 1;
    while (end < 3 && vals[end] - vals[end - 1] < tol) ++end;
    const int size = end - start;
    if (size > 1) {
      Eigen::MatrixXcd span = vecs.middleCols(start, size);
      int filled = 0;
      for (const auto& ref : refs) {
        if (filled == size) break;
        Vector3c p = span * (span.adjoint() * ref);
        if (p.norm() < 1e-8) continue;
        p.normalize();
        vecs.col(start + filled) = p;
        ++filled;
        span = complement(span, p);
      }
      // References exhausted before the cluster was filled (size 3 only if
      // every reference projected fully); fall back to the solver's vectors.
      for (int k = filled; k < size; ++k) vecs.col(start + k) = span.col(k - filled);
    }
    start = end;
  }

  for (int k = 0; k < 3; ++k) {
    Vector3c v = vecs.col(k);
    fix_phase(v);
    out.states.col(k) = v;
    out.energies_ghz[static_cast<size_t>(k)] = vals[k];
    out.max_residual = std::max(out.max_residual, (h * v - vals[k] * v).norm());
  }
  out.overlaps.e_plus_one = overlap2(out.e(), basis_state::plus_one());
  out.overlaps.e_plus = overlap2(out.e(), basis_state::plus(phi_e));
  out.overlaps.g_zero = overlap2(out.g(), basis_state::zero());
  out.overlaps.d_minus = overlap2(out.d(), basis_state::minus(phi_e));
  return out;
}

SpinEigensystem solve(const NVClassFrame& cls, const FieldConfiguration& field,
                      const PhysicalConstants& c) {
  return diagonalize(build_hamiltonian(cls, field, c), field.phi_e);
}

std::vector<EigenMapCell> eigenstate_map(const NVClassFrame& cls, std::span<const double> b_gauss,
                                         std::span<const double> theta_rad, double e_perp_mhz,
                                         const PhysicalConstants& c) {
  require(!b_gauss.empty() && !theta_rad.empty(), "eigenstate map grids must be non-empty");
  require(e_perp_mhz >= 0, "E_perp must be >= 0");
  for (double b : b_gauss) require(std::isfinite(b) && b >= 0, "field amplitudes must be >= 0");
  cls.validate();

  std::vector<EigenMapCell> cells;
  cells.reserve(b_gauss.size() * theta_rad.size());
  for (double b : b_gauss) {
    for (double theta : theta_rad) {
      FieldConfiguration field;
      field.b_gauss = b * (std::sin(theta) * cls.axes.x_hat + std::cos(theta) * cls.axes.z_hat);
      field.e_perp_mhz = e_perp_mhz;
      const SpinEigensystem es = solve(cls, field, c);
      cells.push_back({b, theta, es.overlaps});
    }
  }
  return cells;
}

std::vector<TransverseScanPoint> transverse_field_scan(const NVClassFrame& cls,
                                                       const Vector3& direction,
                                                       std::span<const double> b_perp_gauss,
                                                       double e_perp_mhz,
                                                       const PhysicalConstants& c) {
  cls.validate();
  require(direction.allFinite() && direction.norm() > 0, "scan direction must be non-zero");
  const Vector3 dir = direction.normalized();
  const Vector3& z = cls.axes.z_hat;
  require(std::abs(dir.dot(z)) < 1e-9, "transverse scan field must be orthogonal to the NV axis");
  require(e_perp_mhz >= 0, "E_perp must be >= 0");

  NVClassFrame local = cls;
  local.axes = Frame{dir, z.cross(dir), z};

  std::vector<TransverseScanPoint> out;
  out.reserve(b_perp_gauss.size());
  for (double b : b_perp_gauss) {
    require(std::isfinite(b) && b >= 0, "transverse amplitudes must be >= 0");
    FieldConfiguration field;
    field.b_gauss = b * dir;
    field.e_perp_mhz = e_perp_mhz;
    const SpinEigensystem es = solve(local, field, c);
    TransverseScanPoint p;
    p.b_perp_gauss = b;
    p.energies_ghz = es.energies_ghz;
    p.splitting_mhz = (es.energies_ghz[2] - es.energies_ghz[1]) * 1e3;
    p.matching = es.overlaps.e_plus;
    out.push_back(p);
  }
  return out;
}

std::vector<TransverseScanPoint> transverse_field_scan(const NVClassFrame& cls,
                                                       std::span<const double> b_perp_gauss,
                                                       double e_perp_mhz,
                                                       const PhysicalConstants& c) {
  return transverse_field_scan(cls, cls.axes.x_hat, b_perp_gauss, e_perp_mhz, c);
}

}  // namespace nvcr
