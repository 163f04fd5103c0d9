#pragma once

// Invariant 2-forms Λ = t₀α₀ + t₁α₁ + t₂α₂ + t₃dθ on the 5-dimensional sphere
// bundle, and surfaces N ⊂ M³ lifted to 𝒮 by their unit normal.
//
// Branches: `Branch::Upper` takes the upper sign of every ±/∓ pair, so the
// upper Λ₂ is t₀α₀ + α₁ + α₂/t₀ and the upper Weingarten integrand is
// K_N − 2t₀H_N + 2t₀².
//
// Surface conventions: ν is the g-unit normal with (φ_a, φ_b, ν) positively
// oriented in the chart, II(X,Y) = g(∇_X Y, ν), the shape operator is
// S = I⁻¹ II (so ∇_X ν = −S X), λ₁ ≤ λ₂ are its eigenvalues and H = ½(λ₁+λ₂).

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbl/eds_forms.hpp"

namespace sbl {

enum class Branch { Upper, Lower };
inline double branch_sign(Branch b) { return b == Branch::Upper ? 1.0 : -1.0; }
std::string to_string(Branch b);
Branch branch_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Invariant Lagrangians.

struct InvariantLagrangian {
  double t0 = 0, t1 = 0, t2 = 0, t3 = 0;

  /// t₀t₂ − t₁² − t₃²; Λ∧Λ = 2·discriminant·e^{1234}.
  double discriminant() const { return t0 * t2 - t1 * t1 - t3 * t3; }
  /// Components on the adapted frame (index space 0..4).
  FormValue<double> frame_value() const;
  /// The 2-form on T_M built from the system's α_i and dθ.
  FormField bind(const FundamentalSystem& sys) const;

  /// Λ₁ = t₀α₀ + t₂α₂ + t₃dθ.
  static InvariantLagrangian lambda1(double t0, double t2, double t3 = 0.0);
  /// Λ₂ = t₀α₀ ± α₁ + (1/t₀)α₂.
  static InvariantLagrangian lambda2(double t0, Branch branch);
};

struct LagrangianClass {
  // from the coefficient conditions
  bool degenerate = false, selfdual = false, antiselfdual = false;
  // from Λ∧Λ and the Hodge star of ker θ = span(e₁..e₄), oriented by e^{1234}
  bool degenerate_direct = false, selfdual_direct = false, antiselfdual_direct = false;
  bool agree = false;
  double wedge_coefficient = 0;  // (Λ∧Λ)(e₁,e₂,e₃,e₄)
  double star_plus_gap = 0;      // max |*₄Λ − Λ|
  double star_minus_gap = 0;     // max |*₄Λ + Λ|
};

LagrangianClass lagrangian_classify(const InvariantLagrangian& L, double tol = 1e-12);

/// Hodge star of ker θ applied to a 2-form in the 5-dimensional frame index
/// space; components involving e⁰ are ignored.
FormValue<double> star_kernel(const FormValue<double>& w);

struct DLambdaSplit {
  FormField dLambda;    // numerically differentiated
  FormField prime0;     // Λ'₀ = −rt₁α₀ + ((2t₀ − s²t₂r)/(2s²))α₁ + (2t₁/s²)α₂ + t₂γ
  FormField prime1;     // Λ'₁ = s t₂ α₀∧ρ
  FormField predicted;  // θ∧Λ'₀ + Λ'₁
};

/// Requires n = 2.
DLambdaSplit dLambda_decompose(const InvariantLagrangian& L, const FundamentalSystem& sys,
                               const RhoFamily& fam);

struct PrincipalIdealFit {
  std::array<double, 5> psi{};  // frame components of the best ψ
  double residual = 0;          // max |ψ∧Λ − dΛ| over frame triples
  double dLambda_norm = 0;      // max |dΛ| over frame triples
};

/// Least-squares ψ with dΛ ≈ ψ∧Λ at p (frame components, Eigen QR).
PrincipalIdealFit principal_ideal_fit(const FormField& Lambda, const FundamentalSystem& sys,
                                      const BundlePoint& p);

struct IntegrityKernel {
  std::vector<std::array<double, 5>> basis;  // orthonormal frame 1-forms β with β∧Λ = 0
  std::array<double, 5> singular_values{};   // of β ↦ β∧Λ, descending
  double max_wedge = 0;                      // max |β∧Λ| over the returned basis
};

/// {β : β∧Λ = 0} from the SVD of the 10×5 wedge matrix, rank cutoff tol·σ_max.
IntegrityKernel integrity_kernel(const InvariantLagrangian& L, double tol = 1e-10);

/// The two 1-forms solving b₀ = 0, t₀b₃ ∓ b₁ = 0, t₀b₄ ∓ b₂ = 0.
std::array<std::array<double, 5>, 2> integrity_conditions_basis(double t0, Branch branch);

/// max |β∧Λ| over frame triples.
double wedge_residual(const std::array<double, 5>& beta, const InvariantLagrangian& L);

// ---------------------------------------------------------------------------
// Surfaces.

using SD1 = Dual<double, 2>;
using SD2 = Dual<SD1, 2>;

/// A parametrised surface (a, b) ↦ chart point, with evaluators for double and
/// for first- and second-order dual numbers in (a, b).
class SurfaceImmersion {
 public:
  template <class F>
  static SurfaceImmersion make(std::string name, std::array<double, 2> a_range,
                               std::array<double, 2> b_range, F f) {
    SurfaceImmersion s;
    s.name_ = std::move(name);
    s.a_range_ = a_range;
    s.b_range_ = b_range;
    s.f0_ = [f](double a, double b) { return f(a, b); };
    s.f1_ = [f](SD1 a, SD1 b) { return f(a, b); };
    s.f2_ = [f](SD2 a, SD2 b) { return f(a, b); };
    return s;
  }

  const std::string& name() const { return name_; }
  std::array<double, 2> a_range() const { return a_range_; }
  std::array<double, 2> b_range() const { return b_range_; }

  /// The metric the catalog pairs the surface with, if any.
  const std::optional<ChartMetric>& ambient() const { return ambient_; }
  SurfaceImmersion with_ambient(ChartMetric m) const {
    SurfaceImmersion s = *this;
    s.ambient_ = std::move(m);
    return s;
  }

  Vec3<double> operator()(double a, double b) const { return f0_(a, b); }
  Vec3<SD1> eval1(SD1 a, SD1 b) const { return f1_(a, b); }
  Vec3<SD2> eval2(SD2 a, SD2 b) const { return f2_(a, b); }

 private:
  std::string name_;
  std::array<double, 2> a_range_{}, b_range_{};
  std::optional<ChartMetric> ambient_;
  std::function<Vec3<double>(double, double)> f0_;
  std::function<Vec3<SD1>(SD1, SD1)> f1_;
  std::function<Vec3<SD2>(SD2, SD2)> f2_;
};

using SurfaceFactory = std::function<SurfaceImmersion(const std::map<std::string, double>&)>;

/// Adds or replaces a catalog entry. Not synchronised.
void register_surface(const std::string& name, SurfaceFactory factory);
std::vector<std::string> surface_names();

/// Catalog: horosphere {h, c}, geodesic_sphere {a, c}, vertical_plane {c},
/// euclidean_sphere {a}, graph {amp}. Throws std::invalid_argument for
/// unknown names.
SurfaceImmersion make_surface(const std::string& name, const std::map<std::string, double>& params = {});

struct SurfaceSample {
  double a = 0, b = 0;
  Vec3<double> x{}, nu{};
  std::array<double, 4> I{}, II{};  // row-major 2×2
  double lambda1 = 0, lambda2 = 0, H = 0, K_ext = 0;
  double c_ambient = 0;    // sectional curvature of the tangent plane
  double K_gauss = 0;      // c_ambient + λ₁λ₂
  double K_intrinsic = 0;  // Brioschi formula with finite differences of I
  double area = 0;         // √det I
  double normal_norm = 0;  // ‖ν‖_g
  double symmetry_residual = 0;  // asymmetry of −g(∇_a ν, φ_b) plus its gap to II
};

SurfaceSample surface_point(const SurfaceImmersion& S, const ChartMetric& m, double a, double b);

struct SurfaceGeometry {
  std::vector<SurfaceSample> samples;
  double max_curvature_gap = 0;  // max |K_gauss − K_intrinsic|
  double max_symmetry_residual = 0;
  double max_normal_error = 0;   // max |‖ν‖ − 1|
};

/// Samples on an na × nb Gauss–Legendre grid of the parameter rectangle.
SurfaceGeometry surface_geometry(const SurfaceImmersion& S, const ChartMetric& m, int na = 6, int nb = 6);

struct GaussLiftFactors {
  double alpha0 = 0, alpha1 = 0, alpha2 = 0;  // f̂*α_i / vol_N
  double expected0 = 1, expected1 = 0, expected2 = 0;  // 1, −(λ₁+λ₂), λ₁λ₂
  double theta = 0;                           // max |f̂*θ| on ∂_a, ∂_b
};

/// Pullbacks by the unit-normal lift f̂ = (φ, ν). Requires s = 1.
GaussLiftFactors gauss_lift_pullback(const SurfaceImmersion& S, const FundamentalSystem& sys, double a,
                                     double b);

struct WeingartenReport {
  double t0 = 1;
  Branch branch = Branch::Upper;
  double value = 0;           // ∫ (K_N ∓ 2t₀H + 2t₀²) vol_N
  double max_residual = 0;    // max |K_N ∓ 2t₀H + 2t₀²| over quadrature nodes
  double mean_residual = 0;   // value / area
  double area = 0;
  double pullback = 0;        // ∫ f̂*Λ₂
  double printed_gap = 0;     // |(1/t₀)·pullback − value| / max(1, |value|)
  double derived_gap = 0;     // |t₀·pullback − value| / max(1, |value|)
  int nodes = 0;
};

/// Throws std::invalid_argument unless m has constant curvature −t₀² (within tol).
WeingartenReport weingarten_functional(const SurfaceImmersion& S, const ChartMetric& m, double t0,
                                       Branch branch, int na = 24, int nb = 24, double tol = 1e-9);

}  // namespace sbl
