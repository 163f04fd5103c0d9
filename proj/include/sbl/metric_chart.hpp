#pragma once

// Riemannian metrics on a single chart of a 2- or 3-manifold, and the
// curvature quantities derived from them.
//
// Index conventions (fixed throughout the library):
//   Gamma[k*9 + i*3 + j]        = Γ^k_{ij}
//   Riem[((l*3 + k)*3 + i)*3 + j] = R_{lkij} = <R(∂_i,∂_j)∂_k, ∂_l>
//   with R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z, so that a space of
//   constant curvature c has R_{qpij} = c(δ_iq δ_jp − δ_ip δ_jq) in any
//   orthonormal frame.
//   Ric[j*3 + k] = Σ_i R^i_{kij};  gradRic[a*9 + b*3 + c] = (∇_a Ric)_{bc}.

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>

#include "sbl/dual.hpp"

namespace sbl {

constexpr int kMaxDim = 3;

template <class T>
using Vec3 = std::array<T, 3>;
template <class T>
using Mat3 = std::array<T, 9>;  // row-major 3x3
template <class T>
using Tensor3 = std::array<T, 27>;
template <class T>
using Tensor4 = std::array<T, 81>;

enum class Backend { Dual, FiniteDifference };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Catalog models. Each evaluates g(x) for any scalar type, so nested duals
// produce exact derivatives.

struct EuclideanModel {
  template <class T>
  Mat3<T> eval(const Vec3<T>& x, int dim) const {
    (void)x;
    Mat3<T> g{};
    for (int i = 0; i < dim; ++i) g[i * 3 + i] = T(1.0);
    return g;
  }
};

/// g = δ / (1 + c|x|²/4)², constant sectional curvature c.
struct ConformalModel {
  double c = 1.0;
  template <class T>
  Mat3<T> eval(const Vec3<T>& x, int dim) const {
    T r2(0.0);
    for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
    const T f = T(1.0) + r2 * (0.25 * c);
    const T w = T(1.0) / (f * f);
    Mat3<T> g{};
    for (int i = 0; i < dim; ++i) g[i * 3 + i] = w;
    return g;
  }
};

/// Upper half-space g = δ / (|c| x_last²), constant curvature c < 0.
struct HalfSpaceModel {
  double c = -1.0;
  template <class T>
  Mat3<T> eval(const Vec3<T>& x, int dim) const {
    const T& h = x[dim - 1];
    const T w = T(1.0) / (h * h * (-c));
    Mat3<T> g{};
    for (int i = 0; i < dim; ++i) g[i * 3 + i] = w;
    return g;
  }
};

/// Nil geometry: dx² + dy² + (dz − x dy)².
struct HeisenbergModel {
  template <class T>
  Mat3<T> eval(const Vec3<T>& x, int dim) const {
    (void)dim;
    const T& a = x[0];
    Mat3<T> g{};
    g[0] = T(1.0);
    g[4] = T(1.0) + a * a;
    g[5] = -a;
    g[7] = -a;
    g[8] = T(1.0);
    return g;
  }
};

/// g = δ + ε·bump(x) with a fixed smooth trigonometric bump; positive
/// definite everywhere for ε < 0.5.
struct PerturbedModel {
  double eps = 0.05;
  template <class T>
  Mat3<T> eval(const Vec3<T>& x, int dim) const {
    using std::cos;
    using std::sin;
    Mat3<T> b{};
    if (dim == 3) {
      b[0] = sin(x[0] + 0.3) * cos(x[1]);
      b[4] = cos(x[0] - x[2]);
      b[8] = sin(x[1]) * sin(x[2] + 0.7);
      b[1] = b[3] = 0.5 * cos(x[0] + 2.0 * x[1]);
      b[2] = b[6] = 0.5 * sin(x[2] - x[1]);
      b[5] = b[7] = 0.5 * sin(x[0] + x[2] + 0.2);
    } else {
      b[0] = sin(x[0] + 0.3) * cos(x[1]);
      b[4] = cos(x[0] - 0.5 * x[1]);
      b[1] = b[3] = 0.5 * cos(x[0] + 2.0 * x[1]);
    }
    Mat3<T> g{};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g[i * 3 + j] = (i == j ? T(1.0) : T(0.0)) + eps * b[i * 3 + j];
    return g;
  }
};

using MetricModel =
    std::variant<EuclideanModel, ConformalModel, HalfSpaceModel, HeisenbergModel, PerturbedModel>;

/// Chart domain: validity predicate plus a safe sub-box used for sampling.
struct ChartDomain {
  enum class Kind { All, Ball, HalfSpace };
  Kind kind = Kind::All;
  double radius = 0.0;  // Ball
  std::array<double, 3> sample_lo{-1, -1, -1};
  std::array<double, 3> sample_hi{1, 1, 1};
};

class ChartMetric {
 public:
  ChartMetric(std::string name, int dim, MetricModel model, ChartDomain domain,
              std::map<std::string, double> params = {}, Backend backend = Backend::Dual);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  Backend backend() const { return backend_; }
  const ChartDomain& domain() const { return domain_; }
  const std::map<std::string, double>& params() const { return params_; }

  ChartMetric with_backend(Backend b) const {
    ChartMetric m = *this;
    m.backend_ = b;
    return m;
  }

  /// True when x lies inside the chart domain (only the first dim() entries count).
  bool contains(const Vec3<double>& x) const;
  void require_inside(const Vec3<double>& x) const;

  /// Constant sectional curvature of the model, if it has one.
  bool has_constant_curvature(double* c = nullptr) const;

  template <class T>
  Mat3<T> g(const Vec3<T>& x) const {
    return std::visit([&](const auto& m) { return m.template eval<T>(x, dim_); }, model_);
  }

 private:
  std::string name_;
  int dim_;
  MetricModel model_;
  ChartDomain domain_;
  std::map<std::string, double> params_;
  Backend backend_;
};

/// Catalog lookup by name: euclidean3, sphere3, hyperbolic3, halfspace,
/// heisenberg, perturbed, flat2d, sphere2, hyperbolic2. Parameters: c, eps.
ChartMetric make_metric(const std::string& name, const std::map<std::string, double>& params = {},
                        Backend backend = Backend::Dual);

// ---------------------------------------------------------------------------
// Small dense helpers (generic in the scalar type).

template <class T>
T det3(const Mat3<T>& a, int dim) {
  if (dim == 2) return a[0] * a[4] - a[1] * a[3];
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

template <class T>
Mat3<T> inverse3(const Mat3<T>& a, int dim) {
  Mat3<T> r{};
  const T det = det3(a, dim);
  if (value_of(det) == 0.0) throw GeometryError("singular metric matrix");
  const T inv = T(1.0) / det;
  if (dim == 2) {
    r[0] = a[4] * inv;
    r[1] = -a[1] * inv;
    r[3] = -a[3] * inv;
    r[4] = a[0] * inv;
    return r;
  }
  r[0] = (a[4] * a[8] - a[5] * a[7]) * inv;
  r[1] = (a[2] * a[7] - a[1] * a[8]) * inv;
  r[2] = (a[1] * a[5] - a[2] * a[4]) * inv;
  r[3] = (a[5] * a[6] - a[3] * a[8]) * inv;
  r[4] = (a[0] * a[8] - a[2] * a[6]) * inv;
  r[5] = (a[2] * a[3] - a[0] * a[5]) * inv;
  r[6] = (a[3] * a[7] - a[4] * a[6]) * inv;
  r[7] = (a[1] * a[6] - a[0] * a[7]) * inv;
  r[8] = (a[0] * a[4] - a[1] * a[3]) * inv;
  return r;
}

template <class T>
T g_dot(const Mat3<T>& g, const Vec3<T>& a, const Vec3<T>& b, int dim) {
  T s(0.0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += g[i * 3 + j] * a[i] * b[j];
  return s;
}

// ---------------------------------------------------------------------------
// Differentiation in the chart coordinates.

namespace detail {

/// Finite-difference step for a derivative at nesting level `level`
/// (1 = derivative of g, 2 = of Γ, 3 = of Ric), for the order-6 central
/// stencil. Chosen so truncation balances the error inherited from the level
/// below; order 6 keeps third derivatives on steep charts (half-space near its
/// boundary) within 2e-5 of the dual backend.
inline double fd_step(int level) {
  switch (level) {
    case 1:
      return 3e-3;
    case 2:
      return 8e-3;
    default:
      return 1.5e-2;
  }
}

template <class T, int N>
Dual<T, N> seed(const T& value, int direction) {
  Dual<T, N> r{};
  r.v = value;
  if (direction >= 0) r.d[direction] = T(1.0);
  return r;
}

}  // namespace detail

/// grad[k][j] = ∂_k f_j(x) for k < dim, where f is a generic callable
/// returning std::array<U, K> for any scalar U.
template <size_t K, class T, class F>
std::array<std::array<T, K>, 3> chart_gradient(const ChartMetric& m, const Vec3<T>& x, int level,
                                               const F& f) {
  std::array<std::array<T, K>, 3> grad{};
  const int dim = m.dim();
  if (m.backend() == Backend::Dual) {
    using D = Dual<T, 3>;
    Vec3<D> xd{};
    for (int i = 0; i < 3; ++i) xd[i] = detail::seed<T, 3>(x[i], i < dim ? i : -1);
    const auto out = f(xd);
    for (int k = 0; k < dim; ++k)
      for (size_t j = 0; j < K; ++j) grad[k][j] = out[j].d[k];
    return grad;
  }
  for (int k = 0; k < dim; ++k) {
    const double h = detail::fd_step(level) * (1.0 + std::abs(value_of(x[k])));
    auto at = [&](double t) {
      Vec3<T> xx = x;
      xx[k] = xx[k] + t;
      return f(xx);
    };
    const auto fm3 = at(-3 * h), fm2 = at(-2 * h), fm1 = at(-h), fp1 = at(h), fp2 = at(2 * h), fp3 = at(3 * h);
    for (size_t j = 0; j < K; ++j)
      grad[k][j] = (fp3[j] - fm3[j] - 9.0 * (fp2[j] - fm2[j]) + 45.0 * (fp1[j] - fm1[j])) * (1.0 / (60.0 * h));
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Curvature, generic in the scalar type.

template <class T>
Tensor3<T> christoffel_t(const ChartMetric& m, const Vec3<T>& x) {
  const int dim = m.dim();
  const Mat3<T> g = m.g(x);
  const Mat3<T> gi = inverse3(g, dim);
  const auto dg = chart_gradient<9>(m, x, 1, [&](const auto& xx) { return m.g(xx); });
  // first kind: Γ_{l,ij} = ½(∂_i g_lj + ∂_j g_li − ∂_l g_ij)
  Tensor3<T> first{};
  for (int l = 0; l < dim; ++l)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        first[l * 9 + i * 3 + j] =
            0.5 * (dg[i][l * 3 + j] + dg[j][l * 3 + i] - dg[l][i * 3 + j]);
  Tensor3<T> gam{};
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        T s(0.0);
        for (int l = 0; l < dim; ++l) s += gi[k * 3 + l] * first[l * 9 + i * 3 + j];
        gam[k * 9 + i * 3 + j] = s;
      }
  return gam;
}

/// R^l_{kij} (first index raised), generic.
template <class T>
Tensor4<T> riemann_up_t(const ChartMetric& m, const Vec3<T>& x) {
  const int dim = m.dim();
  const Tensor3<T> gam = christoffel_t(m, x);
  const auto dgam =
      chart_gradient<27>(m, x, 2, [&](const auto& xx) { return christoffel_t(m, xx); });
  Tensor4<T> r{};
  for (int l = 0; l < dim; ++l)
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          T s = dgam[i][l * 9 + j * 3 + k] - dgam[j][l * 9 + i * 3 + k];
          for (int p = 0; p < dim; ++p)
            s += gam[l * 9 + i * 3 + p] * gam[p * 9 + j * 3 + k] -
                 gam[l * 9 + j * 3 + p] * gam[p * 9 + i * 3 + k];
          r[((l * 3 + k) * 3 + i) * 3 + j] = s;
        }
  return r;
}

template <class T>
Tensor4<T> riemann_t(const ChartMetric& m, const Vec3<T>& x) {
  const int dim = m.dim();
  const Mat3<T> g = m.g(x);
  const Tensor4<T> up = riemann_up_t(m, x);
  Tensor4<T> r{};
  for (int l = 0; l < dim; ++l)
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          T s(0.0);
          for (int q = 0; q < dim; ++q) s += g[l * 3 + q] * up[((q * 3 + k) * 3 + i) * 3 + j];
          r[((l * 3 + k) * 3 + i) * 3 + j] = s;
        }
  return r;
}

template <class T>
Mat3<T> ricci_t(const ChartMetric& m, const Vec3<T>& x) {
  const int dim = m.dim();
  const Tensor4<T> up = riemann_up_t(m, x);
  Mat3<T> ric{};
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) {
      T s(0.0);
      for (int i = 0; i < dim; ++i) s += up[((i * 3 + k) * 3 + i) * 3 + j];
      ric[j * 3 + k] = s;
    }
  return ric;
}

template <class T>
Tensor3<T> grad_ricci_t(const ChartMetric& m, const Vec3<T>& x) {
  const int dim = m.dim();
  const Tensor3<T> gam = christoffel_t(m, x);
  const Mat3<T> ric = ricci_t(m, x);
  const auto dric = chart_gradient<9>(m, x, 3, [&](const auto& xx) { return ricci_t(m, xx); });
  Tensor3<T> out{};
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c) {
        T s = dric[a][b * 3 + c];
        for (int p = 0; p < dim; ++p)
          s -= gam[p * 9 + a * 3 + b] * ric[p * 3 + c] + gam[p * 9 + a * 3 + c] * ric[b * 3 + p];
        out[a * 9 + b * 3 + c] = s;
      }
  return out;
}

// ---------------------------------------------------------------------------
// Double-precision API.

struct CurvaturePack {
  Vec3<double> x{};
  int dim = 3;
  Mat3<double> g{};
  Tensor3<double> Gamma{};
  Tensor4<double> Riem{};
  Mat3<double> Ric{};
  double scal = 0.0;
  Tensor3<double> gradRic{};
  Vec3<double> dscal{};  // ∂_b scal (coordinates)
};

Tensor3<double> christoffel(const ChartMetric& m, const Vec3<double>& x);
CurvaturePack curvature_pack(const ChartMetric& m, const Vec3<double>& x);

/// Sectional curvature of the plane spanned by g-orthonormal v, w.
double sectional(const ChartMetric& m, const Vec3<double>& x, const Vec3<double>& v,
                 const Vec3<double>& w, double ortho_tol = 1e-8);

/// Same, reusing an already computed pack (no orthonormality check).
double sectional(const CurvaturePack& pack, const Vec3<double>& v, const Vec3<double>& w);

/// Contract a coordinate 4-tensor with four vectors: T(a,b,c,d) = T_{lkij} a^l b^k c^i d^j.
double contract4(const Tensor4<double>& t, const Vec3<double>& a, const Vec3<double>& b,
                 const Vec3<double>& c, const Vec3<double>& d, int dim);

}  // namespace sbl
