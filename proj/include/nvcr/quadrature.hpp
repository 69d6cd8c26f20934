#pragma once

#include <vector>

namespace nvcr {

struct GaussRule {
  std::vector<double> nodes;    ///< on [-1, 1], ascending
  std::vector<double> weights;  ///< sum to 2
};

/// n-point Gauss-Legendre rule, computed by Newton iteration on P_n.
/// Results are cached per n; safe to call concurrently.
const GaussRule& gauss_legendre(int n);

}  // namespace nvcr
