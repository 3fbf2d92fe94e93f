#include "fabflow/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fabflow/error.hpp"

namespace fabflow::simplex {

Domain Domain::clipped(std::size_t dimension, double eta) {
  return Domain{std::vector<double>(dimension, eta), std::vector<double>(dimension, 1.0 - eta)};
}

Domain Domain::neighborhood(std::span<const double> center, double radius, double eta) {
  Domain d = clipped(center.size(), eta);
  for (std::size_t i = 0; i < center.size(); ++i) {
    d.lo[i] = std::max(d.lo[i], center[i] - radius);
    d.hi[i] = std::min(d.hi[i], center[i] + radius);
  }
  return d;
}

bool Domain::contains(std::span<const double> p, double tol) const {
  if (p.size() != dimension()) return false;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
    sum += p[i];
  }
  return std::abs(sum - 1.0) <= tol;
}

std::vector<double> project(std::span<const double> y, const Domain& domain) {
  const std::size_t n = y.size();
  if (n != domain.dimension() || n == 0) {
    throw Error(Errc::invalid_argument, "projection dimension mismatch");
  }
  const double lo_sum = std::accumulate(domain.lo.begin(), domain.lo.end(), 0.0);
  const double hi_sum = std::accumulate(domain.hi.begin(), domain.hi.end(), 0.0);
  if (lo_sum > 1.0 + 1e-12 || hi_sum < 1.0 - 1e-12) {
    throw Error(Errc::invalid_argument, "simplex domain is empty");
  }

  auto clamp_at = [&](double tau, std::size_t i) {
    return std::clamp(y[i] - tau, domain.lo[i], domain.hi[i]);
  };
  auto mass = [&](double tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += clamp_at(tau, i);
    return s;
  };

  // mass(tau) is non-increasing; bracket the root and bisect.
  double left = std::numeric_limits<double>::infinity();
  double right = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    left = std::min(left, y[i] - domain.hi[i]);
    right = std::max(right, y[i] - domain.lo[i]);
  }
  for (int iter = 0; iter < 200 && right - left > 0.0; ++iter) {
    const double mid = 0.5 * (left + right);
    if (mid <= left || mid >= right) break;
    (mass(mid) > 1.0 ? left : right) = mid;
  }
  double tau = 0.5 * (left + right);

  // Solve exactly on the active set found by bisection.
  std::vector<double> p(n);
  double fixed = 0.0;
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = y[i] - tau;
    if (v <= domain.lo[i]) {
      fixed += domain.lo[i];
    } else if (v >= domain.hi[i]) {
      fixed += domain.hi[i];
    } else {
      free_sum += y[i];
      ++free_count;
    }
  }
  if (free_count > 0) tau = (free_sum + fixed - 1.0) / static_cast<double>(free_count);
  for (std::size_t i = 0; i < n; ++i) p[i] = clamp_at(tau, i);

  // Push the rounding residual into coordinates that still have room.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < n; ++i) {
      const double residual = 1.0 - std::accumulate(p.begin(), p.end(), 0.0);
      if (residual == 0.0) return p;
      p[i] = std::clamp(p[i] + residual, domain.lo[i], domain.hi[i]);
    }
  }
  return p;
}

std::vector<double> tangent_from_free(std::span<const double> free_gradient) {
  const std::size_t n = free_gradient.size();
  const double total = std::accumulate(free_gradient.begin(), free_gradient.end(), 0.0);
  std::vector<double> t(n + 1);
  t[0] = -total / static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n; ++i) t[i + 1] = free_gradient[i] + t[0];
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

namespace {

double radical_inverse(std::size_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

}  // namespace

std::vector<std::vector<double>> low_discrepancy_points(const Domain& domain, std::size_t count) {
  const std::size_t dim = domain.dimension();
  if (dim > std::size(kPrimes)) throw Error(Errc::invalid_argument, "simplex dimension too large");
  const double lo_sum = std::accumulate(domain.lo.begin(), domain.lo.end(), 0.0);

  std::vector<std::vector<double>> points;
  points.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    // Exponential spacings map the unit cube onto the uniform simplex.
    std::vector<double> q(dim);
    double total = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      q[i] = -std::log(1.0 - radical_inverse(k, kPrimes[i]));
      total += q[i];
    }
    std::vector<double> y(dim);
    for (std::size_t i = 0; i < dim; ++i) y[i] = domain.lo[i] + (1.0 - lo_sum) * q[i] / total;
    points.push_back(project(y, domain));
  }
  return points;
}

std::vector<std::vector<double>> tangent_basis(std::size_t dimension) {
  std::vector<std::vector<double>> basis;
  for (std::size_t k = 1; k < dimension; ++k) {
    std::vector<double> b(dimension, 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
    for (std::size_t i = 0; i < k; ++i) b[i] = scale;
    b[k] = -static_cast<double>(k) * scale;
    basis.push_back(std::move(b));
  }
  return basis;
}

std::vector<std::vector<double>> probe_directions(std::size_t dimension, std::size_t count) {
  const auto basis = tangent_basis(dimension);
  const std::size_t d = basis.size();
  std::vector<std::vector<double>> dirs;
  auto combine = [&](std::span<const double> coeffs) {
    std::vector<double> x(dimension, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t i = 0; i < dimension; ++i) x[i] += coeffs[k] * basis[k][i];
    }
    const double len = norm2(x);
    for (auto& v : x) v /= len;
    return x;
  };

  if (d == 0) return dirs;
  if (d == 1) {
    dirs.push_back(basis[0]);
    std::vector<double> neg = basis[0];
    for (auto& v : neg) v = -v;
    dirs.push_back(std::move(neg));
    return dirs;
  }
  if (d == 2) {
    const double pi = std::acos(-1.0);
    for (std::size_t k = 0; k < count; ++k) {
      const double angle = 2.0 * pi * static_cast<double>(k) / static_cast<double>(count);
      const double c[2] = {std::cos(angle), std::sin(angle)};
      dirs.push_back(combine(c));
    }
    return dirs;
  }
  for (std::size_t k = 0; k < d && dirs.size() < count; ++k) {
    dirs.push_back(basis[k]);
    if (dirs.size() < count) {
      std::vector<double> neg = basis[k];
      for (auto& v : neg) v = -v;
      dirs.push_back(std::move(neg));
    }
  }
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  std::vector<double> coeffs(d);
  while (dirs.size() < count) {
    for (auto& c : coeffs) c = normal(rng);
    if (norm2(coeffs) < 1e-12) continue;
    dirs.push_back(combine(coeffs));
  }
  return dirs;
}

}  // namespace fabflow::simplex
