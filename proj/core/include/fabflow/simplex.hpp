#pragma once

// Geometry on the probability simplex {p : Σp = 1, lo ≤ p ≤ hi}.
//
// Coordinates follow the "p_0 dependent" convention: a free-coordinate
// vector g of length n describes the tangent vector Σ g_i (e_i - e_0).

#include <cstddef>
#include <span>
#include <vector>

namespace fabflow::simplex {

/// Box-capped simplex {p : Σp = 1, lo_i ≤ p_i ≤ hi_i}.
struct Domain {
  std::vector<double> lo;
  std::vector<double> hi;

  /// The clipped simplex with every coordinate in [eta, 1 - eta].
  static Domain clipped(std::size_t dimension, double eta);
  /// Clipped simplex intersected with the box |p - center|∞ ≤ radius.
  static Domain neighborhood(std::span<const double> center, double radius, double eta);

  std::size_t dimension() const { return lo.size(); }
  bool contains(std::span<const double> p, double tol = 1e-12) const;
};

/// Euclidean projection onto the domain. Bound-active coordinates land
/// exactly on their bound.
std::vector<double> project(std::span<const double> y, const Domain& domain);

/// Tangent-space representative of a free-coordinate gradient: the vector t
/// with Σt = 0 and t_i - t_0 = g_i. Its norm is the maximum directional
/// derivative over unit directions with Σx = 0.
std::vector<double> tangent_from_free(std::span<const double> free_gradient);

double norm2(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

/// `count` deterministic points in the interior of the domain, from a Halton
/// sequence pushed through the exponential-spacings map and then projected.
std::vector<std::vector<double>> low_discrepancy_points(const Domain& domain, std::size_t count);

/// Deterministic unit directions x with Σx = 0 in R^dimension. In two tangent
/// dimensions they are evenly spaced in angle; otherwise the ± basis vectors
/// of an orthonormal tangent basis followed by fixed-seed Gaussian samples.
std::vector<std::vector<double>> probe_directions(std::size_t dimension, std::size_t count);

/// Orthonormal basis (Helmert) of {x : Σx = 0} in R^dimension.
std::vector<std::vector<double>> tangent_basis(std::size_t dimension);

}  // namespace fabflow::simplex
