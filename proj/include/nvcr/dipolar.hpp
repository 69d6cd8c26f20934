#pragma once

#include <array>
#include <optional>

#include "nvcr/spin_model.hpp"

namespace nvcr {

using Matrix9c = Eigen::Matrix<Complex, 9, 9>;
using SymMatrix3c = Eigen::Matrix3cd;

struct PairGeometry {
  Vector3 u_hat = Vector3::UnitZ();  ///< inter-spin direction, crystal frame
  Frame frame1;
  Frame frame2;
  std::optional<double> r_nm;  ///< separation; elements are in units of J0/r^3 regardless

  void validate() const;
};

enum class Basis {
  Magnetic,     ///< {|-1>, |0>, |+1>}
  NonMagnetic,  ///< {|->, |0>, |+>} with |+/-> = (|+1> +/- |-1>)/sqrt2
};

const char* to_string(Basis b);

/// Single-spin state labels. Index order matches the operator matrices:
/// Magnetic (-1, 0, +1), NonMagnetic (-, 0, +).
enum class Level { Lower = 0, Zero = 1, Upper = 2 };

/// Two-spin product-state index for |a, b>.
constexpr int pair_index(Level a, Level b) { return 3 * static_cast<int>(a) + static_cast<int>(b); }

/// Coefficients of the retained bilinear terms, each 3(u.a1)(u.b2) - a1.b2.
struct DipolarCoefficients {
  double xx = 0, yy = 0, xy = 0, yx = 0, zz = 0;
};

DipolarCoefficients dipolar_coefficients(const PairGeometry& g);

/// Spin-1 operators in the requested basis (unitary change of basis from the
/// magnetic representation).
const SpinOperators& spin_operators(Basis b);

/// H_dd / (J0/r^3) = -[3(S1.u)(S2.u) - S1.S2] on the 9-dim product space.
/// Without `include_other` only the xx, yy, xy, yx and zz terms are kept.
Matrix9c build_two_spin_hamiltonian(const PairGeometry& g, Basis basis, bool include_other = false);

/// A matrix element <bra|H_dd/(J0/r^3)|ket> written as a quadratic form
/// u^T M u in the inter-spin direction. M is complex symmetric and depends
/// only on the two frames, which makes repeated evaluation over directions cheap.
class ElementForm {
 public:
  ElementForm(const Frame& f1, const Frame& f2, Basis basis, int bra, int ket,
              bool include_other = false);

  Complex operator()(const Vector3& u) const { return u.dot(real_ * u) + Complex(0, 1) * u.dot(imag_ * u); }

  const Eigen::Matrix3d& real_part() const { return real_; }
  const Eigen::Matrix3d& imag_part() const { return imag_; }

 private:
  Eigen::Matrix3d real_;
  Eigen::Matrix3d imag_;
};

/// Elements used for the rate model.
struct TransitionElement {
  int bra;
  int ket;
};
/// <+,0|H|0,+> (NonMagnetic) or <+1,0|H|0,+1> (Magnetic).
constexpr TransitionElement kFlipFlop{pair_index(Level::Upper, Level::Zero),
                                      pair_index(Level::Zero, Level::Upper)};
/// <+,0|H|0,-> or <+1,0|H|0,-1>.
constexpr TransitionElement kDoubleFlip{pair_index(Level::Upper, Level::Zero),
                                        pair_index(Level::Zero, Level::Lower)};

double flip_flop_amplitude(const PairGeometry& g, Basis basis);
double double_flip_amplitude(const PairGeometry& g, Basis basis);

/// 4 gamma_f^2 / ((omega_f - omega_nv)^2 + 4 gamma_f^2); all arguments in MHz.
double resonance_factor(double omega_f, double omega_nv, double gamma_f);

}  // namespace nvcr
