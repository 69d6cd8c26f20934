#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nvcr::oracle {

constexpr double kPi = std::numbers::pi;

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

Vector3 Rng::unit_vector() {
  const double z = uniform(-1, 1);
  const double phi = uniform(0, 2 * kPi);
  const double r = std::sqrt(1 - z * z);
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Eigen::Matrix3d Rng::rotation() {
  Eigen::Quaterniond q(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
  q.normalize();
  return q.toRotationMatrix();
}

Frame Rng::frame() {
  const Eigen::Matrix3d r = rotation();
  return Frame{r.col(0), r.col(1), r.col(2)};
}

double brute_sphere_average(const Frame& f1, const Frame& f2, Basis basis, TransitionElement element,
                            int n_cos, int n_phi) {
  double sum = 0.0;
  for (int i = 0; i < n_cos; ++i) {
    const double z = -1.0 + (i + 0.5) * 2.0 / n_cos;
    const double r = std::sqrt(1 - z * z);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = (j + 0.5) * 2 * kPi / n_phi;
      PairGeometry g{Vector3(r * std::cos(phi), r * std::sin(phi), z), f1, f2, std::nullopt};
      sum += std::abs(build_two_spin_hamiltonian(g, basis)(element.bra, element.ket));
    }
  }
  return sum / (static_cast<double>(n_cos) * n_phi);
}

std::array<double, 3> hermitian3_eigenvalues(const Matrix3c& h) {
  // Characteristic polynomial of the traceless part, then Viete's trigonometric form.
  const double q = h.trace().real() / 3.0;
  const Matrix3c b = h - q * Matrix3c::Identity();
  const double p = std::sqrt((b * b).trace().real() / 6.0);
  if (p < 1e-300) return {q, q, q};
  const Matrix3c c = b / p;
  const double half_det = std::clamp(c.determinant().real() / 2.0, -1.0, 1.0);
  const double a = std::acos(half_det) / 3.0;
  std::array<double, 3> e{q + 2 * p * std::cos(a), q + 2 * p * std::cos(a + 2 * kPi / 3),
                          q + 2 * p * std::cos(a + 4 * kPi / 3)};
  std::sort(e.begin(), e.end());
  return e;
}

double rho(double gamma, double t_char) {
  return std::exp(-1.0 / (4.0 * gamma * t_char)) / std::sqrt(4.0 * kPi * std::pow(gamma, 3) * t_char);
}

double rate_integral(const std::function<double(double)>& w, double t_char, double ds) {
  // s from -12 (rho ~ exp(-e^12/4)) to 70 (tail ~ exp(-35)).
  double sum = 0.0;
  for (double s = -12.0; s <= 70.0; s += ds) {
    const double g = std::exp(s) / t_char;
    sum += rho(g, t_char) * w(g) * g;
  }
  return sum * ds;
}

double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double c = b - r * (b - a), d = a + r * (b - a);
  while (b - a > tol * std::max(1.0, std::abs(a))) {
    if (f(c) > f(d))
      b = d;
    else
      a = c;
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

double gaussian_overlap(double d, double s1, double s2) {
  const double s2sum = s1 * s1 + s2 * s2;
  return std::exp(-0.5 * d * d / s2sum) / std::sqrt(2 * kPi * s2sum);
}

double lorentzian_overlap(double d, double a, double b) {
  const double w = a + b;
  return w / (kPi * (d * d + w * w));
}

}  // namespace nvcr::oracle
