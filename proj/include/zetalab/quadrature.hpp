#pragma once

#include <cstddef>
#include <vector>

#include "zetalab/common.hpp"

namespace zetalab::quad {

struct GaussLegendre {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;
};

// n-point rule on [-1, 1]; cached, thread-safe.
const GaussLegendre& gauss_legendre(std::size_t n);

// Tensor Gauss-Legendre rule on the disc |s - center| <= radius in polar
// coordinates: nr radial nodes times nphi angular nodes. Weights include
// the Jacobian, so sum w_i f(s_i) approximates the area integral.
struct DiscRule {
  std::vector<cplx> nodes;
  std::vector<double> weights;
};

DiscRule disc_rule(cplx center, double radius, std::size_t nr, std::size_t nphi);

// n equispaced points on |s - center| = radius, starting at angle 0.
std::vector<cplx> circle_points(cplx center, double radius, std::size_t n);

}  // namespace zetalab::quad
