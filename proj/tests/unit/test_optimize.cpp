#include <doctest.h>

#include <cmath>

#include "nvcr/errors.hpp"
#include "nvcr/optimize.hpp"

using namespace nvcr;
using doctest::Approx;

TEST_CASE("Nelder-Mead minimizes Rosenbrock") {
  const Objective f = [](const std::vector<double>& x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  const auto r = nelder_mead(f, {-1.2, 1.0}, {0.5, 0.5});
  CHECK(r.converged);
  CHECK(r.x[0] == Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Nelder-Mead treats non-finite values as infeasible") {
  const Objective f = [](const std::vector<double>& x) {
    return x[0] < 0 ? std::nan("") : (x[0] - 2) * (x[0] - 2);
  };
  const auto r = nelder_mead(f, {0.5}, {1.0});
  CHECK(r.x[0] == Approx(2.0).epsilon(1e-8));
}

TEST_CASE("Nelder-Mead respects the evaluation budget") {
  const Objective f = [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; };
  NelderMeadOptions o;
  o.max_evaluations = 10;
  const auto r = nelder_mead(f, {5, 5}, {1, 1}, o);
  CHECK_FALSE(r.converged);
  CHECK(r.evaluations <= 12);
  CHECK_THROWS_AS(nelder_mead(f, {1, 1}, {1}), InvalidArgument);
}

TEST_CASE("numeric gradient") {
  const Objective f = [](const std::vector<double>& x) { return std::sin(x[0]) * std::exp(x[1]); };
  const auto g = numeric_gradient(f, {0.3, -0.2});
  CHECK(g[0] == Approx(std::cos(0.3) * std::exp(-0.2)).epsilon(1e-8));
  CHECK(g[1] == Approx(std::sin(0.3) * std::exp(-0.2)).epsilon(1e-8));
}
