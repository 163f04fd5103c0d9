#pragma once

// Shared test support: seeded generators and independent oracles. Oracles
// here never call the library's differentiation or frame code; they work
// from closed-form metric data only.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sbl/metric_chart.hpp"
#include "sbl/sphere_bundle.hpp"

namespace sbl::test {

constexpr double kPi = 3.14159265358979323846;

inline const std::vector<std::string>& metrics3() {
  static const std::vector<std::string> names = {"euclidean3", "sphere3", "hyperbolic3", "halfspace",
                                                 "heisenberg", "perturbed"};
  return names;
}
inline const std::vector<std::string>& metrics2() {
  static const std::vector<std::string> names = {"flat2d", "sphere2", "hyperbolic2", "perturbed2d"};
  return names;
}

// ---------------------------------------------------------------------------
// Generators.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double gauss() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  Vec3<double> vec(int dim) {
    Vec3<double> v{};
    for (int i = 0; i < dim; ++i) v[i] = gauss();
    return v;
  }

  /// Point in the chart's sampling box that the chart accepts.
  Vec3<double> point(const ChartMetric& m) {
    const ChartDomain& d = m.domain();
    for (;;) {
      Vec3<double> x{};
      for (int i = 0; i < m.dim(); ++i) x[i] = uniform(d.sample_lo[i], d.sample_hi[i]);
      if (m.contains(x)) return x;
    }
  }

  BundlePoint bundle_point(const ChartMetric& m, double s) {
    return make_bundle_point(m, point(m), vec(m.dim()), s);
  }

  std::vector<double> components(int count, double scale = 1.0) {
    std::vector<double> c(count);
    for (double& v : c) v = scale * gauss();
    return c;
  }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Small linear algebra on closed-form metric data.

inline double gdot(const Mat3<double>& g, const Vec3<double>& a, const Vec3<double>& b, int dim) {
  double s = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += g[i * 3 + j] * a[i] * b[j];
  return s;
}

/// Gram–Schmidt of the given vectors against g.
inline std::vector<Vec3<double>> gram_schmidt(const Mat3<double>& g, std::vector<Vec3<double>> v, int dim) {
  for (size_t k = 0; k < v.size(); ++k) {
    for (size_t j = 0; j < k; ++j) {
      const double p = gdot(g, v[k], v[j], dim);
      for (int i = 0; i < dim; ++i) v[k][i] -= p * v[j][i];
    }
    const double n = std::sqrt(gdot(g, v[k], v[k], dim));
    for (int i = 0; i < dim; ++i) v[k][i] /= n;
  }
  return v;
}

/// Inverse of the leading dim×dim block by cofactors.
inline Mat3<double> inverse(const Mat3<double>& a, int dim) {
  Mat3<double> r{};
  if (dim == 2) {
    const double det = a[0] * a[4] - a[1] * a[3];
    r[0] = a[4] / det;
    r[1] = -a[1] / det;
    r[3] = -a[3] / det;
    r[4] = a[0] / det;
    return r;
  }
  const double det = a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
                     a[2] * (a[3] * a[7] - a[4] * a[6]);
  r[0] = (a[4] * a[8] - a[5] * a[7]) / det;
  r[1] = (a[2] * a[7] - a[1] * a[8]) / det;
  r[2] = (a[1] * a[5] - a[2] * a[4]) / det;
  r[3] = (a[5] * a[6] - a[3] * a[8]) / det;
  r[4] = (a[0] * a[8] - a[2] * a[6]) / det;
  r[5] = (a[2] * a[3] - a[0] * a[5]) / det;
  r[6] = (a[3] * a[7] - a[4] * a[6]) / det;
  r[7] = (a[1] * a[6] - a[0] * a[7]) / det;
  r[8] = (a[0] * a[4] - a[1] * a[3]) / det;
  return r;
}

// ---------------------------------------------------------------------------
// Oracles.

/// Γ^k_ij from the Koszul formula with order-4 central differences of the
/// closed-form g (step h).
inline Tensor3<double> koszul_christoffel(const ChartMetric& m, const Vec3<double>& x, double h = 1e-3) {
  const int dim = m.dim();
  std::array<Mat3<double>, 3> dg{};  // dg[l][i*3+j] = ∂_l g_ij
  for (int l = 0; l < dim; ++l) {
    auto at = [&](double t) {
      Vec3<double> y = x;
      y[l] += t;
      return m.g(y);
    };
    const Mat3<double> p1 = at(h), m1 = at(-h), p2 = at(2 * h), m2 = at(-2 * h);
    for (int k = 0; k < 9; ++k) dg[l][k] = (8.0 * (p1[k] - m1[k]) - (p2[k] - m2[k])) / (12.0 * h);
  }
  const Mat3<double> gi = inverse(m.g(x), dim);
  Tensor3<double> gam{};
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double s = 0;
        for (int l = 0; l < dim; ++l)
          s += gi[k * 3 + l] * (dg[i][j * 3 + l] + dg[j][i * 3 + l] - dg[l][i * 3 + j]);
        gam[k * 9 + i * 3 + j] = 0.5 * s;
      }
  return gam;
}

/// R_{qpij} = c(δ_iq δ_jp − δ_ip δ_jq) for orthonormal frame indices.
inline double constant_curvature_R(double c, int q, int p, int i, int j) {
  return c * ((i == q && j == p ? 1.0 : 0.0) - (i == p && j == q ? 1.0 : 0.0));
}

/// Nil geometry g = dx² + dy² + (dz − x dy)². In the orthonormal frame
/// E₁ = ∂x, E₂ = ∂y + x∂z, E₃ = ∂z (so [E₁, E₂] = E₃), computed offline:
/// K(E₁,E₂) = −3/4, K(E₁,E₃) = K(E₂,E₃) = 1/4, Ric = diag(−1/2, −1/2, 1/2),
/// scal = −1/2, and the only nonzero components of ∇Ric are
/// (∇_{E₁}Ric)(E₂,E₃) = −1/2 and (∇_{E₂}Ric)(E₁,E₃) = 1/2 (with their symmetric partners).
struct NilOracle {
  static constexpr double scal = -0.5;
  static constexpr double ric[3] = {-0.5, -0.5, 0.5};
  static constexpr double K12 = -0.75, K13 = 0.25, K23 = 0.25;

  /// (∇_{E_a}Ric)(E_b, E_c), indices 0..2.
  static double grad_ric(int a, int b, int c) {
    const auto pair = [&](int p, int q) { return (b == p && c == q) || (b == q && c == p); };
    if (a == 0 && pair(1, 2)) return -0.5;
    if (a == 1 && pair(0, 2)) return 0.5;
    return 0.0;
  }

  static std::array<Vec3<double>, 3> frame(const Vec3<double>& x) {
    return {Vec3<double>{1, 0, 0}, Vec3<double>{0, 1, x[0]}, Vec3<double>{0, 0, 1}};
  }
};

/// ∫_{S²} w^a dA for a multi-exponent a (closed form of Gaussian moments):
/// zero unless all exponents are even, otherwise
/// 2 Γ((a₁+1)/2) Γ((a₂+1)/2) Γ((a₃+1)/2) / Γ((a₁+a₂+a₃+3)/2).
inline double sphere_moment(int a1, int a2, int a3) {
  if (a1 % 2 || a2 % 2 || a3 % 2) return 0.0;
  return 2.0 * std::tgamma((a1 + 1) / 2.0) * std::tgamma((a2 + 1) / 2.0) * std::tgamma((a3 + 1) / 2.0) /
         std::tgamma((a1 + a2 + a3 + 3) / 2.0);
}

/// Composite Simpson rule on [lo, hi]² with n (even) intervals per side.
template <class F>
double simpson2(F f, std::array<double, 2> a, std::array<double, 2> b, int n) {
  const double ha = (a[1] - a[0]) / n, hb = (b[1] - b[0]) / n;
  auto w = [n](int i) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  double s = 0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) s += w(i) * w(j) * f(a[0] + i * ha, b[0] + j * hb);
  return s * ha * hb / 9.0;
}

template <size_t N>
double max_abs_diff(const std::array<double, N>& a, const std::array<double, N>& b) {
  double m = 0;
  for (size_t i = 0; i < N; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace sbl::test
