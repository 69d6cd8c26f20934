#include "nvcr/dipolar.hpp"

#include <cmath>

#include "nvcr/errors.hpp"

namespace nvcr {

namespace {

Matrix9c kron(const Matrix3c& a, const Matrix3c& b) {
  Matrix9c out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
  return out;
}

struct Term {
  int op1;  // 0 = x, 1 = y, 2 = z
  int op2;
};

constexpr std::array<Term, 5> kRetained{{{0, 0}, {1, 1}, {0, 1}, {1, 0}, {2, 2}}};
constexpr std::array<Term, 4> kOther{{{0, 2}, {1, 2}, {2, 0}, {2, 1}}};

const Vector3& axis(const Frame& f, int k) {
  return k == 0 ? f.x_hat : (k == 1 ? f.y_hat : f.z_hat);
}

const Matrix3c& op(const SpinOperators& s, int k) { return k == 0 ? s.sx : (k == 1 ? s.sy : s.sz); }

double coefficient(const Vector3& u, const Vector3& a, const Vector3& b) {
  return 3.0 * u.dot(a) * u.dot(b) - a.dot(b);
}

// Quadratic form of 3(u.a)(u.b) - a.b, i.e. u^T [3 sym(a b^T) - (a.b) I] u on the unit sphere.
Eigen::Matrix3d coefficient_form(const Vector3& a, const Vector3& b) {
  const Eigen::Matrix3d outer = a * b.transpose();
  return 1.5 * (outer + outer.transpose()) - a.dot(b) * Eigen::Matrix3d::Identity();
}

template <typename Fn>
void for_each_term(bool include_other, Fn&& fn) {
  for (const Term& t : kRetained) fn(t);
  if (include_other)
    for (const Term& t : kOther) fn(t);
}

}  // namespace

void PairGeometry::validate() const {
  require(u_hat.allFinite() && std::abs(u_hat.norm() - 1.0) < 1e-12,
          "inter-spin direction must be a unit vector");
  frame1.validate();
  frame2.validate();
  if (r_nm) require(*r_nm > 0, "separation must be positive");
}

const char* to_string(Basis b) { return b == Basis::Magnetic ? "magnetic" : "nonmagnetic"; }

DipolarCoefficients dipolar_coefficients(const PairGeometry& g) {
  g.validate();
  const Frame& a = g.frame1;
  const Frame& b = g.frame2;
  const Vector3& u = g.u_hat;
  return DipolarCoefficients{coefficient(u, a.x_hat, b.x_hat), coefficient(u, a.y_hat, b.y_hat),
                             coefficient(u, a.x_hat, b.y_hat), coefficient(u, a.y_hat, b.x_hat),
                             coefficient(u, a.z_hat, b.z_hat)};
}

const SpinOperators& spin_operators(Basis b) {
  if (b == Basis::Magnetic) return spin_one();
  static const SpinOperators nonmagnetic = [] {
    // Columns: |->, |0>, |+> in the {|-1>, |0>, |+1>} representation.
    Matrix3c u = Matrix3c::Zero();
    u.col(0) = basis_state::minus();
    u.col(1) = basis_state::zero();
    u.col(2) = basis_state::plus();
    const auto& s = spin_one();
    return SpinOperators{u.adjoint() * s.sx * u, u.adjoint() * s.sy * u, u.adjoint() * s.sz * u};
  }();
  return nonmagnetic;
}

Matrix9c build_two_spin_hamiltonian(const PairGeometry& g, Basis basis, bool include_other) {
  g.validate();
  const auto& s = spin_operators(basis);
  Matrix9c h = Matrix9c::Zero();
  for_each_term(include_other, [&](const Term& t) {
    const double c = coefficient(g.u_hat, axis(g.frame1, t.op1), axis(g.frame2, t.op2));
    h -= c * kron(op(s, t.op1), op(s, t.op2));
  });
  return h;
}

ElementForm::ElementForm(const Frame& f1, const Frame& f2, Basis basis, int bra, int ket,
                         bool include_other)
    : real_(Eigen::Matrix3d::Zero()), imag_(Eigen::Matrix3d::Zero()) {
  require(bra >= 0 && bra < 9 && ket >= 0 && ket < 9, "two-spin state index out of range");
  f1.validate();
  f2.validate();
  const auto& s = spin_operators(basis);
  const int b1 = bra / 3, b2 = bra % 3, k1 = ket / 3, k2 = ket % 3;
  for_each_term(include_other, [&](const Term& t) {
    const Complex w = op(s, t.op1)(b1, k1) * op(s, t.op2)(b2, k2);
    if (w == Complex(0)) return;
    const Eigen::Matrix3d form = coefficient_form(axis(f1, t.op1), axis(f2, t.op2));
    real_ -= w.real() * form;
    imag_ -= w.imag() * form;
  });
}

double flip_flop_amplitude(const PairGeometry& g, Basis basis) {
  return std::abs(build_two_spin_hamiltonian(g, basis)(kFlipFlop.bra, kFlipFlop.ket));
}

double double_flip_amplitude(const PairGeometry& g, Basis basis) {
  return std::abs(build_two_spin_hamiltonian(g, basis)(kDoubleFlip.bra, kDoubleFlip.ket));
}

double resonance_factor(double omega_f, double omega_nv, double gamma_f) {
  require(std::isfinite(omega_f) && std::isfinite(omega_nv), "frequencies must be finite");
  require(gamma_f > 0, "fluctuator rate must be positive");
  const double detuning = omega_f - omega_nv;
  const double w = 4.0 * gamma_f * gamma_f;
  return w / (detuning * detuning + w);
}

}  // namespace nvcr
