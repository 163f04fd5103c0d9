#pragma once

// The tangent manifold T_M in chart coordinates z = (x¹..x^m, u¹..u^m) and the
// radius-s sphere bundle inside it. Tangent vectors of T_M are written in the
// coordinate basis (∂_x, ∂_u). The Levi-Civita connection splits them into
// horizontal and vertical parts; the connection map is K(ẋ, u̇) = u̇ + Γ(ẋ, u).

#include <array>
#include <optional>
#include <vector>

#include "sbl/metric_chart.hpp"

namespace sbl {

constexpr int kMaxCoords = 2 * kMaxDim;

template <class T>
using TmVec = std::array<T, kMaxCoords>;

/// A point of T_M at which forms are evaluated. `anchor`, when set, is the
/// point where discrete choices (the frame completion pivot) are made, so
/// that finite-difference stencils see one smooth frame branch.
template <class T>
struct Locus {
  TmVec<T> z{};
  std::optional<TmVec<double>> anchor;
};

struct BundlePoint {
  Vec3<double> x{};
  Vec3<double> u{};
  double s = 1.0;

  /// Throws unless g_x(u,u) = s² to within 1e-12 (relative to s²).
  void validate(const ChartMetric& m) const;
  TmVec<double> coords(int dim) const;
  Locus<double> locus(int dim) const;
};

BundlePoint make_bundle_point(const ChartMetric& m, const Vec3<double>& x, const Vec3<double>& u_dir,
                              double s);

// ---------------------------------------------------------------------------
// Generic pieces.

namespace detail {

template <class T>
Vec3<T> gamma_contract(const Tensor3<T>& gam, const Vec3<T>& a, const Vec3<T>& b, int dim) {
  Vec3<T> r{};
  for (int k = 0; k < dim; ++k) {
    T s(0.0);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) s += gam[k * 9 + i * 3 + j] * a[i] * b[j];
    r[k] = s;
  }
  return r;
}

template <class T>
Vec3<T> lower(const Mat3<T>& g, const Vec3<T>& v, int dim) {
  Vec3<T> r{};
  for (int i = 0; i < dim; ++i) {
    T s(0.0);
    for (int j = 0; j < dim; ++j) s += g[i * 3 + j] * v[j];
    r[i] = s;
  }
  return r;
}

}  // namespace detail

/// Frame completion pivot: the chart axis with largest |g(u, ∂_i)|.
int frame_pivot(const ChartMetric& m, const TmVec<double>& z);

/// Adapted orthonormal frame of the Sasaki metric at a point of T_M.
/// E[0..n] are horizontal lifts of the base frame b_0 = u/|u|, b_1..b_n;
/// E[n+1..2n] are the vertical lifts of b_1..b_n; E[2n+1] = ξ/|u| is the unit
/// normal. coE[a] is the Sasaki-dual covector of E[a].
template <class T>
struct FrameT {
  int m = 3;  // base dimension
  int n = 2;  // m - 1
  int pivot = 0;
  T radius{};
  Mat3<T> g{};
  Tensor3<T> gamma{};
  std::array<Vec3<T>, 3> b{};
  std::array<TmVec<T>, kMaxCoords> E{};
  std::array<TmVec<T>, kMaxCoords> coE{};

  int coords() const { return 2 * m; }
  int bundle_dim() const { return 2 * n + 1; }
};

/// Sasaki inner product of two T_M vectors given g and Γ at x and the fibre point u.
template <class T>
T sasaki_inner_t(const Mat3<T>& g, const Tensor3<T>& gam, const Vec3<T>& u, const TmVec<T>& y,
                 const TmVec<T>& w, int m) {
  Vec3<T> yx{}, wx{}, ky{}, kw{};
  for (int i = 0; i < m; ++i) {
    yx[i] = y[i];
    wx[i] = w[i];
  }
  const Vec3<T> gy = detail::gamma_contract(gam, yx, u, m);
  const Vec3<T> gw = detail::gamma_contract(gam, wx, u, m);
  for (int i = 0; i < m; ++i) {
    ky[i] = y[m + i] + gy[i];
    kw[i] = w[m + i] + gw[i];
  }
  return g_dot(g, yx, wx, m) + g_dot(g, ky, kw, m);
}

template <class T>
FrameT<T> adapted_frame_t(const ChartMetric& metric, const Locus<T>& at, double rotation = 0.0) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  FrameT<T> f;
  const int m = metric.dim();
  f.m = m;
  f.n = m - 1;
  const int n = f.n;
  Vec3<T> x{}, u{};
  for (int i = 0; i < m; ++i) {
    x[i] = at.z[i];
    u[i] = at.z[m + i];
  }
  f.g = metric.g(x);
  f.gamma = christoffel_t(metric, x);
  const Mat3<T>& g = f.g;
  f.radius = sqrt(g_dot(g, u, u, m));
  if (!(value_of(f.radius) > 0.0)) throw GeometryError("adapted frame at the zero section");

  TmVec<double> pivot_at{};
  if (at.anchor) {
    pivot_at = *at.anchor;
  } else {
    for (int i = 0; i < 2 * m; ++i) pivot_at[i] = value_of(at.z[i]);
  }
  f.pivot = frame_pivot(metric, pivot_at);

  // Gram–Schmidt: u/|u| first, then the chart axes in index order, skipping the pivot.
  for (int i = 0; i < m; ++i) f.b[0][i] = u[i] / f.radius;
  int filled = 1;
  for (int axis = 0; axis < m && filled < m; ++axis) {
    if (axis == f.pivot) continue;
    Vec3<T> v{};
    v[axis] = T(1.0);
    for (int p = 0; p < filled; ++p) {
      const T proj = g_dot(g, v, f.b[p], m);
      for (int i = 0; i < m; ++i) v[i] -= proj * f.b[p][i];
    }
    const T len = sqrt(g_dot(g, v, v, m));
    if (!(value_of(len) > 1e-10)) throw GeometryError("degenerate frame completion pivot");
    for (int i = 0; i < m; ++i) f.b[filled][i] = v[i] / len;
    ++filled;
  }
  // Orientation: det[b_0 .. b_n] > 0 in the chart.
  Mat3<T> bm{};
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) bm[r * 3 + c] = f.b[c][r];
  if (value_of(det3(bm, m)) < 0)
    for (int i = 0; i < m; ++i) f.b[n][i] = -f.b[n][i];
  if (rotation != 0.0 && n == 2) {
    const double cr = std::cos(rotation), sr = std::sin(rotation);
    const Vec3<T> b1 = f.b[1], b2 = f.b[2];
    for (int i = 0; i < m; ++i) {
      f.b[1][i] = cr * b1[i] + sr * b2[i];
      f.b[2][i] = -sr * b1[i] + cr * b2[i];
    }
  }

  // Frame vectors of T_M.
  for (int a = 0; a <= n; ++a) {
    const Vec3<T> corr = detail::gamma_contract(f.gamma, f.b[a], u, m);
    TmVec<T> e{};
    for (int i = 0; i < m; ++i) {
      e[i] = f.b[a][i];
      e[m + i] = -corr[i];
    }
    f.E[a] = e;
  }
  for (int i = 1; i <= n; ++i) {
    TmVec<T> e{};
    for (int k = 0; k < m; ++k) e[m + k] = f.b[i][k];
    f.E[n + i] = e;
  }
  {
    TmVec<T> e{};
    for (int k = 0; k < m; ++k) e[m + k] = f.b[0][k];
    f.E[2 * n + 1] = e;
  }
  // Dual covectors: coE[a](y) = <E[a], y>_Sasaki.
  for (int a = 0; a < 2 * m; ++a) {
    TmVec<T> co{};
    for (int j = 0; j < 2 * m; ++j) {
      TmVec<T> ej{};
      ej[j] = T(1.0);
      co[j] = sasaki_inner_t(g, f.gamma, u, f.E[a], ej, m);
    }
    f.coE[a] = co;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Double-precision API.

/// Adapted frame at a bundle point: e[0..2n] tangent to the sphere bundle,
/// xi the tautological vertical vector, coframe[a] the dual 1-forms.
struct AdaptedFrame {
  BundlePoint at;
  int n = 2;
  int pivot = 0;
  std::vector<TmVec<double>> e;
  TmVec<double> xi{};
  std::vector<TmVec<double>> coframe;
  Vec3<double> base[3]{};  // b_0..b_n
};

AdaptedFrame adapted_frame(const ChartMetric& m, const BundlePoint& p, double rotation = 0.0);

/// Chart components (v, −Γ(v, u)) of the horizontal lift of v at (x, u).
TmVec<double> horizontal_lift(const ChartMetric& m, const Vec3<double>& x, const Vec3<double>& u,
                              const Vec3<double>& v);
TmVec<double> vertical_lift(int dim, const Vec3<double>& v);

double sasaki_inner(const ChartMetric& m, const BundlePoint& p, const TmVec<double>& y,
                    const TmVec<double>& z);

/// Connection map K: vertical part of y, as a base vector.
Vec3<double> connection_map(const ChartMetric& m, const BundlePoint& p, const TmVec<double>& y);

/// Linear endomorphisms of T_{(x,u)}T_M in chart coordinates (row-major D×D).
struct MirrorMap {
  int coords = 6;
  std::array<double, 36> B{};
  std::array<double, 36> Bt{};  // Sasaki adjoint of B
  std::array<double, 36> J{};
  std::array<double, 36> Iplus{};
  std::array<double, 36> Iminus{};

  TmVec<double> apply(const std::array<double, 36>& op, const TmVec<double>& v) const;
};

/// B(y^h) = y^v, B(y^v) = 0; J = B − Bᵗ; I± act on the frame as
/// e₀ ↦ 0, e₁ ↦ e₂ ↦ −e₁, e₃ ↦ ±e₄ ↦ −e₃ and kill ξ (n = 2 only for I±).
MirrorMap mirror_map(const ChartMetric& m, const BundlePoint& p);

}  // namespace sbl
