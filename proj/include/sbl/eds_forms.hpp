#pragma once

// The fundamental exterior differential system (θ, α_0..α_n) on the radius-s
// tangent sphere bundle, and the curvature-derived forms of the 3-dimensional
// theory: ρ and its companions, γ, the scalar functions c, r, p², q², and the
// Ricci type classification by the components of dρ.
//
// Frame conventions (n = 2): e_0 horizontal copy of u/s, e_1, e_2 horizontal,
// e_3 = B e_1, e_4 = B e_2. R_{abcd} are base-frame components b_0, b_1, b_2.

#include <array>
#include <string>
#include <vector>

#include "sbl/form_calculus.hpp"

namespace sbl {

struct FundamentalSystem {
  ChartMetric metric;
  double s = 1.0;
  int n = 2;
  FormField theta;
  /// dθ from the bilinear expression dθ(v,w) = <v,Bw> − <w,Bv>.
  FormField dtheta;
  std::vector<FormField> alpha;

  int coords() const { return 2 * (n + 1); }
  /// α_i, with α_{−1} = α_{n+1} = 0.
  FormField alpha_at(int i) const;
  FormField zero(int degree) const;
  /// Volume form e^{01…2n} of the sphere bundle.
  FormField vol() const;
};

/// θ = g(u, dπ·) and α_n(v_1..v_n) = (1/s) vol_g(u, Kv_1, …, Kv_n); the other
/// α_i come from inserting B on n−i arguments and antisymmetrising.
FundamentalSystem build_system(const ChartMetric& m, double s);

/// 𝓡α_i = Σ_{0≤j<q≤n} Σ_{p=1}^n s R_{p0jq} e^{jq} ∧ (e_{p+n} ⌟ α_i), summed literally.
FormField curvature_correction(const FundamentalSystem& sys, int i);

/// Gauss curvature R_{1010} of the base (n = 1) or R_{1212} (n = 2) as a 0-form.
FormField sectional_field(const FundamentalSystem& sys);

struct RhoFamily {
  FormField rho, rho1, rho2, rho3;
  FormField gamma;
  FormField r, c, p2, q2;
  /// ρ(y) = (1/|u|) Ric(u, Ky) with Ky projected off u; no frame involved.
  FormField rho_direct;
};

/// Requires n = 2. `rotation` turns the (e_1, e_2) pair used by the frame.
RhoFamily rho_family(const FundamentalSystem& sys, double rotation = 0.0);

struct ScalarInvariants {
  double c = 0, r = 0, p2 = 0, q2 = 0;
  double q2_det = 0;  // ½r² − 2 det R_{·00·}
  double scal = 0;
};
ScalarInvariants scalar_invariants(const FundamentalSystem& sys, const BundlePoint& p,
                                   double rotation = 0.0);

/// Components (∇_i Ric)_{0j} in the adapted base frame, i, j ∈ {0,1,2}.
std::array<std::array<double, 3>, 3> grad_ric_frame(const FundamentalSystem& sys,
                                                    const BundlePoint& p);

struct FCoefficients {
  // from the covariant derivative of Ricci
  double F1 = 0, F4 = 0;
  std::array<double, 2> F2{}, F3{};
  // from the decomposition of the numerically differentiated ρ
  WDecomposition drho;
  /// components of dρ outside ⟦α₁⟧⊕W₂⊕W₃⊕⟦dθ⟧ (should vanish)
  double off_span = 0;
};
FCoefficients F_coefficients(const FundamentalSystem& sys, const RhoFamily& fam,
                             const BundlePoint& p);

/// dρ = Σ_{i=0..2, j=1,2} (∇_i Ric)_{0j} e^{i, j+2}, from curvature data.
FormField drho_formula(const FundamentalSystem& sys);
/// drho_formula plus the term s Σ_{j,l=1,2} R_{l00j} Ric_{0l} e^{0j}, which
/// comes from the vertical part of brackets of horizontal lifts.
FormField drho_derived(const FundamentalSystem& sys);
/// dr = Σ_i (∇_i Ric)_{00} e^i + (2/s) ρ, from curvature data.
FormField dr_formula(const FundamentalSystem& sys);
/// F_1 and F_4 as 0-forms (curvature formulas).
FormField F1_field(const FundamentalSystem& sys);
FormField F4_field(const FundamentalSystem& sys);

/// Π = θ ∧ (γ − (r/2)α₁ − s dρ₂) and the form α₂ − sρ₂∧θ whose d it should equal.
struct PoincareCartan {
  FormField Pi;
  FormField potential;
};
PoincareCartan poincare_cartan(const FundamentalSystem& sys, const RhoFamily& fam);

enum class RicciType { I, II, III, IV };

struct RicciTypeReport {
  std::vector<RicciType> types;         // granted by the dρ decomposition path
  std::vector<RicciType> types_direct;  // granted by the ∇Ric component path
  bool paths_agree = false;
  bool containments_hold = false;  // III ⊆ I and II ⊆ IV
  bool csc = false;
  bool recurrent = false;
  // maxima over samples
  double F1 = 0, F2norm = 0, F3norm = 0, F4 = 0;
  double direct[4] = {0, 0, 0, 0};
  double dscal = 0, recurrent_residual = 0;
  int samples = 0;
};

std::string to_string(RicciType t);
std::string types_string(const std::vector<RicciType>& types);

/// Grants a type only if its defining equality holds at every sample within tol.
/// Throws std::invalid_argument for fewer than 10 samples.
RicciTypeReport classify_ricci(const FundamentalSystem& sys, const std::vector<BundlePoint>& samples,
                               double tol);

}  // namespace sbl
