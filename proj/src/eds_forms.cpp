#include "sbl/eds_forms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sbl {

namespace {

template <class T>
void split_point(const Locus<T>& at, int m, Vec3<T>& x, Vec3<T>& u) {
  for (int i = 0; i < m; ++i) {
    x[i] = at.z[i];
    u[i] = at.z[m + i];
  }
}

/// K applied to the coordinate vector ∂_I, or to B∂_I when `mirrored`.
template <class T>
Vec3<T> k_of_basis(int I, bool mirrored, const Tensor3<T>& gam, const Vec3<T>& u, int m) {
  Vec3<T> r{};
  if (mirrored) {
    if (I < m) r[I] = T(1.0);
    return r;
  }
  if (I >= m) {
    r[I - m] = T(1.0);
    return r;
  }
  for (int k = 0; k < m; ++k) {
    T acc(0.0);
    for (int j = 0; j < m; ++j) acc += gam[k * 9 + I * 3 + j] * u[j];
    r[k] = acc;
  }
  return r;
}

/// (1/s) √det g · det[u, k_1, …, k_n].
template <class T>
T alpha_top(const Mat3<T>& g, const Vec3<T>& u, const std::array<Vec3<T>, 2>& k, int m, double s) {
  using std::sqrt;
  Mat3<T> cols{};
  for (int r = 0; r < m; ++r) {
    cols[r * 3 + 0] = u[r];
    for (int c = 1; c < m; ++c) cols[r * 3 + c] = k[c - 1][r];
  }
  return sqrt(det3(g, m)) * det3(cols, m) * (1.0 / s);
}

int factorial(int k) { return k <= 1 ? 1 : k * factorial(k - 1); }

int permutation_sign(const std::array<int, 2>& p, int n) {
  int inv = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (p[a] > p[b]) ++inv;
  return inv % 2 ? -1 : 1;
}

template <class T>
FormValue<T> alpha_components(const ChartMetric& metric, const Locus<T>& at, int i, double s) {
  const int m = metric.dim();
  const int n = m - 1;
  const int D = 2 * m;
  Vec3<T> x{}, u{};
  split_point(at, m, x, u);
  const Mat3<T> g = metric.g(x);
  const Tensor3<T> gam = christoffel_t(metric, x);
  FormValue<T> w(n, D);
  const auto& masks = masks_of(D, n);
  const double norm = 1.0 / (factorial(i) * factorial(n - i));
  for (size_t mi = 0; mi < masks.size(); ++mi) {
    std::array<int, 2> idx{};
    int c = 0;
    for (int b = 0; b < D; ++b)
      if (masks[mi] & (1u << b)) idx[c++] = b;
    std::array<int, 2> perm{0, 1};
    T acc(0.0);
    do {
      std::array<Vec3<T>, 2> k{};
      for (int a = 0; a < n; ++a) k[a] = k_of_basis(idx[perm[a]], a < n - i, gam, u, m);
      const T term = alpha_top(g, u, k, m, s);
      if (permutation_sign(perm, n) < 0)
        acc -= term;
      else
        acc += term;
    } while (std::next_permutation(perm.begin(), perm.begin() + n));
    w.c[mi] = acc * norm;
  }
  return w;
}

/// Riemann tensor in the adapted base frame: R(l,k,i,j) = R_{lkij}.
template <class T>
struct FrameCurvature {
  std::array<T, 81> R{};
  const T& operator()(int l, int k, int i, int j) const { return R[((l * 3 + k) * 3 + i) * 3 + j]; }
};

template <class T>
Tensor4<T> contract_frame4(const Tensor4<T>& t, const std::array<Vec3<T>, 3>& b, int m) {
  // contract each slot in turn with the frame vectors
  Tensor4<T> a = t, r{};
  for (int slot = 0; slot < 4; ++slot) {
    r.fill(T(0.0));
    for (int i0 = 0; i0 < m; ++i0)
      for (int i1 = 0; i1 < m; ++i1)
        for (int i2 = 0; i2 < m; ++i2)
          for (int i3 = 0; i3 < m; ++i3) {
            const int idx[4] = {i0, i1, i2, i3};
            for (int f = 0; f < m; ++f) {
              int out[4] = {i0, i1, i2, i3};
              out[slot] = f;
              r[((out[0] * 3 + out[1]) * 3 + out[2]) * 3 + out[3]] +=
                  a[((i0 * 3 + i1) * 3 + i2) * 3 + i3] * b[f][idx[slot]];
            }
          }
    a = r;
  }
  return a;
}

template <class T>
FrameCurvature<T> frame_curvature(const ChartMetric& metric, const FrameT<T>& fr, const Locus<T>& at) {
  Vec3<T> x{}, u{};
  split_point(at, metric.dim(), x, u);
  FrameCurvature<T> fc;
  fc.R = contract_frame4(riemann_t(metric, x), fr.b, metric.dim());
  return fc;
}

/// (∇_i Ric)_{jk} in the adapted base frame.
template <class T>
Tensor3<T> frame_grad_ric(const ChartMetric& metric, const FrameT<T>& fr, const Locus<T>& at) {
  Vec3<T> x{}, u{};
  split_point(at, metric.dim(), x, u);
  const Tensor3<T> gr = grad_ricci_t(metric, x);
  Tensor3<T> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        T acc(0.0);
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
              acc += gr[a * 9 + b * 3 + c] * fr.b[i][a] * fr.b[j][b] * fr.b[k][c];
        out[i * 9 + j * 3 + k] = acc;
      }
  return out;
}

template <class T>
FormValue<T> e(int dim, std::initializer_list<int> idx) {
  return basis_form<T>(dim, idx);
}

// Coefficients of ρ = P e^3 + Q e^4, summed as Σ_{a,b} R_{a0ab} e^{b+2}.
template <class T>
std::array<T, 2> rho_coefficients(const FrameCurvature<T>& R) {
  std::array<T, 2> pq{};
  for (int b = 1; b <= 2; ++b) {
    T acc(0.0);
    for (int a = 1; a <= 2; ++a) acc += R(a, 0, a, b);
    pq[b - 1] = acc;
  }
  return pq;
}

void require_n2(const FundamentalSystem& sys, const char* what) {
  if (sys.n != 2) throw std::invalid_argument(std::string(what) + " requires a 3-dimensional base");
}

}  // namespace

FormField FundamentalSystem::alpha_at(int i) const {
  if (i < 0 || i > n) return zero(n);
  return alpha[i];
}

FormField FundamentalSystem::zero(int degree) const {
  return constant_form("0", degree, coords(), std::vector<double>(binomial(coords(), degree), 0.0),
                       metric.backend());
}

FormField FundamentalSystem::vol() const {
  const int N = 2 * n + 1;
  return frame_form<2>("vol", N, metric, [N](const auto& fr, const auto&) {
    using T = std::decay_t<decltype(fr.radius)>;
    FormValue<T> w(N, N);
    w.c[0] = T(1.0);
    return w;
  });
}

FundamentalSystem build_system(const ChartMetric& m, double s) {
  if (m.dim() != 2 && m.dim() != 3) throw std::invalid_argument("unsupported base dimension");
  if (!(s > 0)) throw std::invalid_argument("radius s must be positive");
  FundamentalSystem sys{m, s, m.dim() - 1, {}, {}, {}};
  const int dim = m.dim();
  const int D = 2 * dim;
  const Backend be = m.backend();
  sys.theta = FormField::make<2>("theta", 1, D, be, [m, dim, D](const auto& at) {
    using T = std::decay_t<decltype(at.z[0])>;
    Vec3<T> x{}, u{};
    split_point(at, dim, x, u);
    const Vec3<T> gu = detail::lower(m.g(x), u, dim);
    FormValue<T> w(1, D);
    for (int j = 0; j < dim; ++j) w.c[j] = gu[j];
    return w;
  });
  sys.dtheta = FormField::make<2>("dtheta", 2, D, be, [m, dim, D](const auto& at) {
    using T = std::decay_t<decltype(at.z[0])>;
    Vec3<T> x{}, u{};
    split_point(at, dim, x, u);
    const Mat3<T> g = m.g(x);
    const Tensor3<T> gam = christoffel_t(m, x);
    auto basis = [&](int I) {
      TmVec<T> v{};
      v[I] = T(1.0);
      return v;
    };
    auto mirror = [&](int I) {
      TmVec<T> v{};
      if (I < dim) v[dim + I] = T(1.0);
      return v;
    };
    FormValue<T> w(2, D);
    const auto& masks = masks_of(D, 2);
    for (size_t k = 0; k < masks.size(); ++k) {
      const int I = std::countr_zero(unsigned(masks[k]));
      const int J = 31 - std::countl_zero(unsigned(masks[k]));
      w.c[k] = sasaki_inner_t(g, gam, u, basis(I), mirror(J), dim) -
               sasaki_inner_t(g, gam, u, basis(J), mirror(I), dim);
    }
    return w;
  });
  for (int i = 0; i <= sys.n; ++i)
    sys.alpha.push_back(FormField::make<2>("alpha" + std::to_string(i), sys.n, D, be,
                                           [m, i, s](const auto& at) {
                                             return alpha_components(m, at, i, s);
                                           }));
  return sys;
}

FormField curvature_correction(const FundamentalSystem& sys, int i) {
  if (i < 0 || i > sys.n) throw std::out_of_range("curvature_correction: index out of range");
  const int n = sys.n;
  const int N = 2 * n + 1;
  const double s = sys.s;
  const FormField ai = sys.alpha[i];
  const ChartMetric metric = sys.metric;
  return frame_form<1>("Ralpha" + std::to_string(i), n + 1, metric,
                       [=](const auto& fr, const auto& at) {
                         using T = std::decay_t<decltype(fr.radius)>;
                         const FrameCurvature<T> R = frame_curvature(metric, fr, at);
                         const FormValue<T> a = to_frame(ai.eval(at), fr);
                         FormValue<T> out(n + 1, N);
                         for (int j = 0; j <= n; ++j)
                           for (int q = j + 1; q <= n; ++q)
                             for (int p = 1; p <= n; ++p) {
                               std::array<double, kMaxCoords> ep{};
                               ep[p + n] = 1.0;
                               const FormValue<T> contracted = interior(ep, a);
                               out += (s * R(p, 0, j, q)) * wedge(e<T>(N, {j, q}), contracted);
                             }
                         return out;
                       });
}

FormField sectional_field(const FundamentalSystem& sys) {
  const ChartMetric metric = sys.metric;
  const int n = sys.n;
  return frame_form<1>("c", 0, metric, [metric, n](const auto& fr, const auto& at) {
    using T = std::decay_t<decltype(fr.radius)>;
    const FrameCurvature<T> R = frame_curvature(metric, fr, at);
    FormValue<T> w(0, 2 * n + 1);
    w.c[0] = n == 1 ? R(1, 0, 1, 0) : R(1, 2, 1, 2);
    return w;
  });
}

RhoFamily rho_family(const FundamentalSystem& sys, double rot) {
  require_n2(sys, "rho_family");
  const ChartMetric metric = sys.metric;
  RhoFamily f;
  auto build = [&](const std::string& name, int degree, auto body) {
    return frame_form<1>(name, degree, metric,
                         [metric, body](const auto& fr, const auto& at) {
                           using T = std::decay_t<decltype(fr.radius)>;
                           const FrameCurvature<T> R = frame_curvature(metric, fr, at);
                           return body(R, T{});
                         },
                         rot);
  };
  f.rho = build("rho", 1, [](const auto& R, auto tag) {
    using T = decltype(tag);
    const auto pq = rho_coefficients(R);
    return pq[0] * e<T>(5, {3}) + pq[1] * e<T>(5, {4});
  });
  f.rho1 = build("rho1", 1, [](const auto& R, auto tag) {
    using T = decltype(tag);
    const auto pq = rho_coefficients(R);
    return pq[0] * e<T>(5, {1}) + pq[1] * e<T>(5, {2});
  });
  f.rho2 = build("rho2", 1, [](const auto& R, auto tag) {
    using T = decltype(tag);
    const auto pq = rho_coefficients(R);
    return pq[1] * e<T>(5, {1}) - pq[0] * e<T>(5, {2});
  });
  f.rho3 = build("rho3", 1, [](const auto& R, auto tag) {
    using T = decltype(tag);
    const auto pq = rho_coefficients(R);
    return pq[1] * e<T>(5, {3}) - pq[0] * e<T>(5, {4});
  });
  f.gamma = build("gamma", 2, [](const auto& R, auto tag) {
    using T = decltype(tag);
    const FormValue<T> f1 = e<T>(5, {1, 4}) + e<T>(5, {2, 3});
    const FormValue<T> f2 = e<T>(5, {3, 1}) - e<T>(5, {4, 2});
    return R(1, 0, 0, 2) * f2 + (0.5 * (R(1, 0, 0, 1) - R(2, 0, 0, 2))) * f1;
  });
  auto scalar = [](const auto& v, auto tag) {
    using T = decltype(tag);
    FormValue<T> w(0, 5);
    w.c[0] = v;
    return w;
  };
  f.r = build("r", 0, [scalar](const auto& R, auto tag) {
    return scalar(R(1, 0, 1, 0) + R(2, 0, 2, 0), tag);
  });
  f.c = build("c", 0, [scalar](const auto& R, auto tag) { return scalar(R(1, 2, 1, 2), tag); });
  f.p2 = build("p2", 0, [scalar](const auto& R, auto tag) {
    const auto pq = rho_coefficients(R);
    return scalar(pq[0] * pq[0] + pq[1] * pq[1], tag);
  });
  f.q2 = build("q2", 0, [scalar](const auto& R, auto tag) {
    const auto a = R(1, 0, 0, 1) - R(2, 0, 0, 2);
    return scalar(2.0 * R(1, 0, 0, 2) * R(1, 0, 0, 2) + 0.5 * a * a, tag);
  });
  const int dim = metric.dim();
  f.rho_direct = FormField::make<1>("rho_direct", 1, 2 * dim, metric.backend(),
                                    [metric, dim](const auto& at) {
                                      using T = std::decay_t<decltype(at.z[0])>;
                                      using std::sqrt;
                                      Vec3<T> x{}, u{};
                                      split_point(at, dim, x, u);
                                      const Mat3<T> g = metric.g(x);
                                      const Mat3<T> ric = ricci_t(metric, x);
                                      const Tensor3<T> gam = christoffel_t(metric, x);
                                      const T uu = g_dot(g, u, u, dim);
                                      const T len = sqrt(uu);
                                      FormValue<T> w(1, 2 * dim);
                                      for (int I = 0; I < 2 * dim; ++I) {
                                        Vec3<T> k = k_of_basis(I, false, gam, u, dim);
                                        const T along = g_dot(g, k, u, dim) / uu;
                                        for (int a = 0; a < dim; ++a) k[a] -= along * u[a];
                                        w.c[I] = g_dot(ric, u, k, dim) / len;
                                      }
                                      return w;
                                    });
  return f;
}

ScalarInvariants scalar_invariants(const FundamentalSystem& sys, const BundlePoint& p,
                                   double rotation) {
  require_n2(sys, "scalar_invariants");
  p.validate(sys.metric);
  const Locus<double> at = p.locus(3);
  const FrameT<double> fr = adapted_frame_t(sys.metric, at, rotation);
  const FrameCurvature<double> R = frame_curvature(sys.metric, fr, at);
  ScalarInvariants si;
  si.c = R(1, 2, 1, 2);
  si.r = R(1, 0, 1, 0) + R(2, 0, 2, 0);
  const auto pq = rho_coefficients(R);
  si.p2 = pq[0] * pq[0] + pq[1] * pq[1];
  const double a = R(1, 0, 0, 1) - R(2, 0, 0, 2);
  si.q2 = 2.0 * R(1, 0, 0, 2) * R(1, 0, 0, 2) + 0.5 * a * a;
  const double det = R(1, 0, 0, 1) * R(2, 0, 0, 2) - R(1, 0, 0, 2) * R(2, 0, 0, 1);
  si.q2_det = 0.5 * si.r * si.r - 2.0 * det;
  si.scal = curvature_pack(sys.metric, p.x).scal;
  return si;
}

std::array<std::array<double, 3>, 3> grad_ric_frame(const FundamentalSystem& sys,
                                                    const BundlePoint& p) {
  require_n2(sys, "grad_ric_frame");
  const Locus<double> at = p.locus(3);
  const FrameT<double> fr = adapted_frame_t(sys.metric, at);
  const Tensor3<double> G = frame_grad_ric(sys.metric, fr, at);
  std::array<std::array<double, 3>, 3> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = G[i * 9 + 0 * 3 + j];
  return out;
}

FCoefficients F_coefficients(const FundamentalSystem& sys, const RhoFamily& fam,
                             const BundlePoint& p) {
  require_n2(sys, "F_coefficients");
  const auto G = grad_ric_frame(sys, p);
  FCoefficients f;
  f.F1 = 0.5 * (G[1][2] - G[2][1]);
  f.F4 = -0.5 * (G[1][1] + G[2][2]);
  f.F2 = {G[0][1], G[0][2]};
  f.F3 = {0.5 * (G[1][2] + G[2][1]), 0.5 * (G[2][2] - G[1][1])};
  const FormField drho = ext_derivative(fam.rho);
  f.drho = w_decompose(frame_values(drho, sys.metric, p.locus(3)));
  f.off_span = std::max({std::abs(f.drho.a0), std::abs(f.drho.a2), std::abs(f.drho.w1[0]),
                         std::abs(f.drho.w1[1])});
  return f;
}

FormField drho_formula(const FundamentalSystem& sys) {
  require_n2(sys, "drho_formula");
  const ChartMetric metric = sys.metric;
  return frame_form<0>("drho_formula", 2, metric, [metric](const auto& fr, const auto& at) {
    using T = std::decay_t<decltype(fr.radius)>;
    const Tensor3<T> G = frame_grad_ric(metric, fr, at);
    FormValue<T> w(2, 5);
    for (int i = 0; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) w += G[i * 9 + j] * e<T>(5, {i, j + 2});
    return w;
  });
}

FormField drho_derived(const FundamentalSystem& sys) {
  require_n2(sys, "drho_derived");
  const ChartMetric metric = sys.metric;
  const double s = sys.s;
  const FormField extra =
      frame_form<0>("drho_curvature_term", 2, metric, [metric, s](const auto& fr, const auto& at) {
        using T = std::decay_t<decltype(fr.radius)>;
        const FrameCurvature<T> R = frame_curvature(metric, fr, at);
        const std::array<T, 2> ric = rho_coefficients(R);  // Ric_{01}, Ric_{02}
        FormValue<T> w(2, 5);
        for (int j = 1; j <= 2; ++j) {
          T acc(0.0);
          for (int l = 1; l <= 2; ++l) acc += R(l, 0, 0, j) * ric[l - 1];
          w += (s * acc) * e<T>(5, {0, j});
        }
        return w;
      });
  return (drho_formula(sys) + extra).renamed("drho_derived");
}

FormField dr_formula(const FundamentalSystem& sys) {
  require_n2(sys, "dr_formula");
  const ChartMetric metric = sys.metric;
  const FormField grad = frame_form<0>("grad_r", 1, metric, [metric](const auto& fr, const auto& at) {
    using T = std::decay_t<decltype(fr.radius)>;
    const Tensor3<T> G = frame_grad_ric(metric, fr, at);
    FormValue<T> w(1, 5);
    for (int i = 0; i <= 2; ++i) w.c[i] = G[i * 9 + 0];
    return w;
  });
  return (grad + (2.0 / sys.s) * rho_family(sys).rho).renamed("dr_formula");
}

namespace {
template <class Pick>
FormField F_field(const FundamentalSystem& sys, const std::string& name, Pick pick) {
  require_n2(sys, "F fields");
  const ChartMetric metric = sys.metric;
  return frame_form<0>(name, 0, metric, [metric, pick](const auto& fr, const auto& at) {
    using T = std::decay_t<decltype(fr.radius)>;
    const Tensor3<T> G = frame_grad_ric(metric, fr, at);
    FormValue<T> w(0, 5);
    w.c[0] = pick(G);
    return w;
  });
}
}  // namespace

FormField F1_field(const FundamentalSystem& sys) {
  return F_field(sys, "F1", [](const auto& G) { return 0.5 * (G[1 * 9 + 2] - G[2 * 9 + 1]); });
}

FormField F4_field(const FundamentalSystem& sys) {
  return F_field(sys, "F4", [](const auto& G) { return -0.5 * (G[1 * 9 + 1] + G[2 * 9 + 2]); });
}

PoincareCartan poincare_cartan(const FundamentalSystem& sys, const RhoFamily& fam) {
  require_n2(sys, "poincare_cartan");
  const FormField inner =
      fam.gamma - 0.5 * wedge(fam.r, sys.alpha[1]) - sys.s * ext_derivative(fam.rho2);
  return {wedge(sys.theta, inner).renamed("Pi"),
          (sys.alpha[2] - sys.s * wedge(fam.rho2, sys.theta)).renamed("alpha2 - s rho2^theta")};
}

std::string to_string(RicciType t) {
  switch (t) {
    case RicciType::I: return "I";
    case RicciType::II: return "II";
    case RicciType::III: return "III";
    case RicciType::IV: return "IV";
  }
  return "?";
}

std::string types_string(const std::vector<RicciType>& types) {
  std::string s = "{";
  for (size_t i = 0; i < types.size(); ++i) s += (i ? "," : "") + to_string(types[i]);
  return s + "}";
}

RicciTypeReport classify_ricci(const FundamentalSystem& sys, const std::vector<BundlePoint>& samples,
                               double tol) {
  require_n2(sys, "classify_ricci");
  if (samples.size() < 10) throw std::invalid_argument("classify_ricci needs at least 10 samples");
  const RhoFamily fam = rho_family(sys);
  RicciTypeReport rep;
  rep.samples = int(samples.size());
  for (const BundlePoint& p : samples) {
    const auto G = grad_ric_frame(sys, p);
    const double d1 = std::abs(G[1][2] - G[2][1]);
    const double d2 = std::max(std::abs(G[0][1]), std::abs(G[0][2]));
    const double d3 = std::max(std::abs(G[1][2] + G[2][1]), std::abs(G[1][1] - G[2][2]));
    const double d4 = std::abs(G[1][1] + G[2][2]);
    const double dv[4] = {d1, d2, d3, d4};
    for (int k = 0; k < 4; ++k) rep.direct[k] = std::max(rep.direct[k], dv[k]);

    const FCoefficients F = F_coefficients(sys, fam, p);
    rep.F1 = std::max(rep.F1, std::abs(F.drho.a1));
    rep.F2norm = std::max(rep.F2norm, std::hypot(F.drho.w2[0], F.drho.w2[1]));
    rep.F3norm = std::max(rep.F3norm, std::hypot(F.drho.w3[0], F.drho.w3[1]));
    rep.F4 = std::max(rep.F4, std::abs(F.drho.a3));

    // full ∇Ric in the frame for the recurrence and scalar-curvature tests
    const Locus<double> at = p.locus(3);
    const FrameT<double> fr = adapted_frame_t(sys.metric, at);
    const Tensor3<double> full = frame_grad_ric(sys.metric, fr, at);
    for (int a = 0; a < 3; ++a) {
      const double omega = (full[a * 9 + 0] + full[a * 9 + 4] + full[a * 9 + 8]) / 3.0;
      rep.dscal = std::max(rep.dscal, std::abs(3.0 * omega));
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          rep.recurrent_residual = std::max(
              rep.recurrent_residual, std::abs(full[a * 9 + b * 3 + c] - (b == c ? omega : 0.0)));
    }
  }
  const double fvals[4] = {rep.F1, rep.F2norm, rep.F3norm, rep.F4};
  const RicciType all[4] = {RicciType::I, RicciType::II, RicciType::III, RicciType::IV};
  for (int k = 0; k < 4; ++k) {
    if (fvals[k] <= tol) rep.types.push_back(all[k]);
    if (rep.direct[k] <= tol) rep.types_direct.push_back(all[k]);
  }
  rep.paths_agree = rep.types == rep.types_direct;
  auto has = [](const std::vector<RicciType>& v, RicciType t) {
    return std::find(v.begin(), v.end(), t) != v.end();
  };
  auto contained = [&](const std::vector<RicciType>& v) {
    return (!has(v, RicciType::III) || has(v, RicciType::I)) &&
           (!has(v, RicciType::II) || has(v, RicciType::IV));
  };
  rep.containments_hold = contained(rep.types) && contained(rep.types_direct);
  rep.csc = rep.dscal <= tol;
  rep.recurrent = rep.recurrent_residual <= tol;
  return rep;
}

}  // namespace sbl
