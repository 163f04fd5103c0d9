#pragma once

// Quadrature over the S² fibres of the radius-s sphere bundle (n = 2).
// The fibre over x is parametrised through a g-orthonormal basis E_1, E_2, E_3
// of T_xM as u = s (a cos φ E_1 + a sin φ E_2 + z E_3), a = √(1 − z²),
// 0 ≤ φ < 2π, −1 < z < 1. In these coordinates α₂ pulls back to s² dφ dz,
// so f̌(x) = (1/s²) ∫ f α₂ = ∫∫ f dφ dz.

#include <functional>
#include <string>
#include <vector>

#include "sbl/eds_forms.hpp"

namespace sbl {

/// Gauss–Legendre nodes and weights on [−1, 1] (Golub–Welsch).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct FiberNode {
  double phi = 0, z = 0;
  double weight = 0;  // dφ dz weight
  Vec3<double> w{};   // unit direction in the orthonormal basis
};

struct FiberGrid {
  int n_phi = 32;
  int n_z = 16;
  std::vector<FiberNode> nodes;

  double weight_sum() const;
  /// Highest spherical-harmonic degree integrated exactly.
  int exact_degree() const;
  FiberGrid refined() const { return make(2 * n_phi, 2 * n_z); }
  static FiberGrid make(int n_phi = 32, int n_z = 16);
  /// Smallest grid exact for spherical harmonics of degree ≤ L.
  static FiberGrid for_degree(int L);
};

/// g-orthonormal basis of T_xM (Gram–Schmidt of the chart axes, positively
/// oriented), optionally rotated by a proper orthogonal 3×3 matrix (row-major).
std::array<Vec3<double>, 3> fiber_basis(const ChartMetric& m, const Vec3<double>& x,
                                        const std::array<double, 9>* rotation = nullptr);

using FiberFunction = std::function<double(const BundlePoint&)>;

/// f̌(x) by the product rule of `grid`. Throws std::domain_error on a
/// non-finite integrand value.
double fiber_integrate(const ChartMetric& m, double s, const Vec3<double>& x, const FiberFunction& f,
                       const FiberGrid& grid = FiberGrid::make(),
                       const std::array<double, 9>* rotation = nullptr);

/// α₂(∂_φ u, ∂_z u) at a fibre node: the density of α₂ in fibre coordinates.
double fiber_alpha2_density(const FundamentalSystem& sys, const Vec3<double>& x, double phi, double z);

enum class Verdict { Match, MismatchVsPaper };
std::string to_string(Verdict v);

struct FiberIntegralRow {
  std::string id;       // e.g. "one", "c", "c2", "r", "r2", "p2", "q2"
  std::string formula;  // the closed form compared against
  double paper = 0;     // closed form evaluated from curvature data
  double computed = 0;  // quadrature (authoritative)
  double refined = 0;   // quadrature on the doubled grid
  double abs_err = 0;
  double rel_err = 0;
  Verdict verdict = Verdict::Match;
};

struct FiberIntegralReport {
  Vec3<double> x{};
  double scal = 0;
  double norm_R2 = 0;  // Σ R_abcd² over an orthonormal frame
  std::vector<FiberIntegralRow> rows;
};

/// The seven fibre integrals against their closed forms in scal and ‖R‖².
/// Throws std::runtime_error if doubling the grid moves any value by more
/// than 1e-8 (relative).
FiberIntegralReport identity_battery(const FundamentalSystem& sys, const Vec3<double>& x,
                                     double tol = 1e-6, const FiberGrid& grid = FiberGrid::make());

struct PushforwardReport {
  double vol = 0;              // π_* vol_𝒮 evaluated on an oriented orthonormal base frame
  double theta_alpha2 = 0;     // max |π_*(θ∧α₂)(E_i)|
  double alpha0_alpha2 = 0;    // max |π_*(α₀∧α₂)(E_i, E_j)|
  double expected_vol = 0;     // 4πs²
};

PushforwardReport pushforward_checks(const FundamentalSystem& sys, const Vec3<double>& x,
                                     const FiberGrid& grid = FiberGrid::make());

struct TensorLiftResult {
  double quadrature = 0;
  double closed_form = 0;
};

/// ((φ̃)²)∨ for a 1-form φ at x, over the unit fibre; closed form (4π/3)|φ|².
TensorLiftResult lift_square_integral(const ChartMetric& m, const Vec3<double>& x,
                                      const Vec3<double>& phi, const FiberGrid& grid = FiberGrid::make());
/// (g₁(u,u))∨ for a 2-tensor g₁ at x (row-major), over the unit fibre;
/// closed form (4π/3) tr_g g₁.
TensorLiftResult lift_diagonal_integral(const ChartMetric& m, const Vec3<double>& x,
                                        const Mat3<double>& g1, const FiberGrid& grid = FiberGrid::make());

}  // namespace sbl
