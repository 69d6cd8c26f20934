#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "nvcr/errors.hpp"
#include "nvcr/relaxation.hpp"
#include "oracles.hpp"

using namespace nvcr;
using doctest::Approx;

namespace {

FluctuatorParams params(double eta = 0.0555) { return {1e-4, 1e7, eta, 52.0}; }

}  // namespace

TEST_CASE("characteristic rate against a hand evaluation") {
  const double pi = std::numbers::pi;
  const double j0 = 2 * pi * 52e6;
  const double k = 4 * pi * 1e-4 * j0 * 0.0555 / 3;
  CHECK(characteristic_rate(params()) == Approx(k * k * pi / 1e7).epsilon(1e-14));
}

TEST_CASE("characteristic rate scaling") {
  const double base = characteristic_rate(params());
  CHECK(characteristic_rate(params(2 * 0.0555)) == Approx(4 * base));
  FluctuatorParams p = params();
  p.gamma_f_per_s *= 3;
  CHECK(characteristic_rate(p) == Approx(base / 3));
  p = params();
  p.n_f_per_nm3 *= 10;
  CHECK(characteristic_rate(p) == Approx(100 * base));
  p.n_f_per_nm3 = 1e-30;
  CHECK(characteristic_rate(p) < 1e-40);
  // A rate multiplier on eta_bar^2 carries over unchanged.
  CHECK(characteristic_rate(params(0.0555 * std::sqrt(42.8))) / base == Approx(42.8));
}

TEST_CASE("invalid fluctuator parameters") {
  FluctuatorParams p = params();
  p.gamma_f_per_s = 0;
  CHECK_THROWS_AS(characteristic_rate(p), InvalidArgument);
  p = params();
  p.n_f_per_nm3 = -1;
  CHECK_THROWS_AS(characteristic_rate(p), InvalidArgument);
  CHECK_THROWS_AS(rate_density(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(rate_density(1.0, -1.0), InvalidArgument);
}

TEST_CASE("rate density matches the independent expression and integrates to one") {
  oracle::Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const double t = std::exp(rng.uniform(-10, 0));
    const double g = std::exp(rng.uniform(-5, 5)) / t;
    CHECK(rate_density(g, t) == Approx(oracle::rho(g, t)).epsilon(1e-13));
  }
  for (double t : {1e-6, 1e-3, 2.0}) {
    CHECK(std::abs(rate_density_norm(t) - 1.0) < 1e-6);
    CHECK(std::abs(oracle::rate_integral([](double) { return 1.0; }, t) - 1.0) < 1e-6);
  }
}

TEST_CASE("Laplace transform of the rate density is exp(-sqrt(t/T))") {
  const double T = 1e-3;
  for (double x : {0.01, 0.03, 0.1, 0.25, 1.0, 4.0, 10.0, 30.0, 100.0}) {
    const double closed = std::exp(-std::sqrt(x));
    CHECK(std::abs(polarization_from_density(x * T, T) - closed) < 1e-6);
    const double ref = oracle::rate_integral([&](double g) { return std::exp(-g * x * T); }, T);
    CHECK(std::abs(ref - closed) < 1e-6);
  }
}

TEST_CASE("mode of the rate density") {
  const double T = 2e-3;
  const double analytic = rate_density_mode(T);
  const double numeric =
      std::exp(oracle::golden_max([&](double s) { return rate_density(std::exp(s), T); }, std::log(1e-2),
                                  std::log(1e5)));
  CHECK(analytic > 0);
  CHECK(numeric == Approx(analytic).epsilon(1e-6));
}

TEST_CASE("polarization") {
  CHECK(polarization(0, 1e-3) == 1.0);
  CHECK(polarization(1e-3, 1e-3) == Approx(std::exp(-1.0)));
  CHECK(polarization(4e-3, 1e-3) == Approx(std::exp(-2.0)));
  double prev = 1.0;
  for (int i = 1; i < 50; ++i) {
    const double p = polarization(i * 1e-4, 1e-3);
    CHECK(p < prev);
    prev = p;
  }
  CHECK_THROWS_AS(polarization(-1, 1), InvalidArgument);
}

TEST_CASE("decay signal forms") {
  const DecayModel two{DecayForm::TwoChannel, 1.0, 0.6e-3, 3.6e-3, 0.5};
  CHECK(decay_signal(0.6e-3, two) == Approx(std::exp(-1.0 - 1.0 / 6.0)).epsilon(1e-14));
  CHECK(decay_signal(0.0, DecayModel{DecayForm::TwoChannel, 0.7, 1e-3, 1e-2, 0.5}) == Approx(0.7));

  const DecayModel no_phonon{DecayForm::TwoChannel, 0.8, 1e-3, std::numeric_limits<double>::infinity(), 0.5};
  for (double t : {0.0, 1e-4, 1e-3, 5e-3}) CHECK(decay_signal(t, no_phonon) == Approx(0.8 * polarization(t, 1e-3)));

  const DecayModel expo{DecayForm::Stretched, 1.0, 2e-3, 0.0, 1.0};
  CHECK(decay_signal(3e-3, expo) == Approx(std::exp(-1.5)));

  oracle::Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const DecayModel m{DecayForm::TwoChannel, rng.uniform(0.1, 2), std::exp(rng.uniform(-9, -2)),
                       std::exp(rng.uniform(-9, -2)), 0.5};
    const double t = std::exp(rng.uniform(-12, -1));
    CHECK(log_decay_signal(t, m) ==
          Approx(std::log(m.amplitude) - std::sqrt(t / m.t1_dd_s) - t / m.t1_ph_s).epsilon(1e-13));
    CHECK(decay_signal(t, m) < decay_signal(t * 0.5, m));
  }
}

TEST_CASE("decay model validation") {
  DecayModel m;
  m.amplitude = 0;
  CHECK_THROWS_AS(decay_signal(1, m), InvalidArgument);
  m = DecayModel{};
  m.form = DecayForm::Stretched;
  m.beta = 2.0;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
}

TEST_CASE("double-flip extension channel") {
  const FluctuatorParams p = params();
  CHECK(double_flip_rate(p, {0.0, 0.0}) == 0.0);
  const double on = double_flip_rate(p, {0.05, 0.0});
  CHECK(on == Approx(characteristic_rate({p.n_f_per_nm3, p.gamma_f_per_s, 0.05, p.j0_mhz_nm3})));
  CHECK(double_flip_rate(p, {0.05, 50.0}) < on);
  CHECK(double_flip_rate(p, {0.05, 50.0}) == Approx(double_flip_rate(p, {0.05, -50.0})));
}
