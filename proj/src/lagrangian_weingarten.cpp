#include "sbl/lagrangian_weingarten.hpp"

#include "sbl/fiber_integration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbl {

std::string to_string(Branch b) { return b == Branch::Upper ? "upper" : "lower"; }

Branch branch_from_string(const std::string& s) {
  if (s == "upper" || s == "+" || s == "plus") return Branch::Upper;
  if (s == "lower" || s == "-" || s == "minus") return Branch::Lower;
  throw std::invalid_argument("unknown branch '" + s + "' (expected upper or lower)");
}

// ---------------------------------------------------------------------------
// Invariant Lagrangians.

FormValue<double> InvariantLagrangian::frame_value() const {
  const auto& w = w_basis();
  return t0 * w[0] + t1 * w[1] + t2 * w[2] + t3 * w[3];
}

FormField InvariantLagrangian::bind(const FundamentalSystem& sys) const {
  if (sys.n != 2) throw std::invalid_argument("invariant Lagrangians need a 3-dimensional base");
  return (t0 * sys.alpha[0] + t1 * sys.alpha[1] + t2 * sys.alpha[2] + t3 * sys.dtheta).renamed("Lambda");
}

InvariantLagrangian InvariantLagrangian::lambda1(double t0, double t2, double t3) { return {t0, 0.0, t2, t3}; }

InvariantLagrangian InvariantLagrangian::lambda2(double t0, Branch branch) {
  if (t0 == 0.0) throw std::invalid_argument("lambda2 needs t0 != 0");
  return {t0, branch_sign(branch), 1.0 / t0, 0.0};
}

FormValue<double> star_kernel(const FormValue<double>& w) {
  if (w.degree != 2 || w.dim != 5) throw std::invalid_argument("star_kernel expects a frame 2-form");
  FormValue<double> k(2, 4);
  for (int a = 1; a <= 4; ++a)
    for (int b = a + 1; b <= 4; ++b) k.at(Mask((1u << (a - 1)) | (1u << (b - 1)))) = w.at(Mask((1u << a) | (1u << b)));
  const FormValue<double> sk = star(k);
  FormValue<double> r(2, 5);
  for (int a = 1; a <= 4; ++a)
    for (int b = a + 1; b <= 4; ++b) r.at(Mask((1u << a) | (1u << b))) = sk.at(Mask((1u << (a - 1)) | (1u << (b - 1))));
  return r;
}

LagrangianClass lagrangian_classify(const InvariantLagrangian& L, double tol) {
  LagrangianClass c;
  c.degenerate = std::abs(L.discriminant()) <= tol;
  c.selfdual = std::abs(L.t2 - L.t0) <= tol && std::abs(L.t1) <= tol && std::abs(L.t3) <= tol;
  c.antiselfdual = std::abs(L.t2 + L.t0) <= tol;

  const FormValue<double> w = L.frame_value();
  const FormValue<double> ww = wedge(w, w);
  c.wedge_coefficient = ww.at(Mask(0b11110));
  c.degenerate_direct = max_abs(ww) <= tol;
  const FormValue<double> sw = star_kernel(w);
  c.star_plus_gap = max_abs(sw - w);
  c.star_minus_gap = max_abs(sw + w);
  c.selfdual_direct = c.star_plus_gap <= tol;
  c.antiselfdual_direct = c.star_minus_gap <= tol;
  c.agree = c.degenerate == c.degenerate_direct && c.selfdual == c.selfdual_direct &&
            c.antiselfdual == c.antiselfdual_direct;
  return c;
}

DLambdaSplit dLambda_decompose(const InvariantLagrangian& L, const FundamentalSystem& sys,
                               const RhoFamily& fam) {
  if (sys.n != 2) throw std::invalid_argument("dLambda_decompose requires a 3-dimensional base");
  const double s = sys.s, s2 = s * s;
  DLambdaSplit out;
  out.dLambda = ext_derivative(L.bind(sys));
  const FormField& r = fam.r;
  out.prime0 = (-L.t1 * wedge(r, sys.alpha[0]) + (L.t0 / s2) * sys.alpha[1] -
                (0.5 * L.t2) * wedge(r, sys.alpha[1]) + (2.0 * L.t1 / s2) * sys.alpha[2] +
                L.t2 * fam.gamma)
                   .renamed("Lambda0'");
  out.prime1 = ((s * L.t2) * wedge(sys.alpha[0], fam.rho)).renamed("Lambda1'");
  out.predicted = (wedge(sys.theta, out.prime0) + out.prime1).renamed("theta^Lambda0' + Lambda1'");
  return out;
}

namespace {

Eigen::Matrix<double, 10, 5> wedge_matrix(const FormValue<double>& lambda) {
  Eigen::Matrix<double, 10, 5> A;
  for (int j = 0; j < 5; ++j) {
    const FormValue<double> col = wedge(basis_form<double>(5, {j}), lambda);
    for (int i = 0; i < 10; ++i) A(i, j) = col.c[i];
  }
  return A;
}

}  // namespace

PrincipalIdealFit principal_ideal_fit(const FormField& Lambda, const FundamentalSystem& sys,
                                      const BundlePoint& p) {
  if (Lambda.degree() != 2 || sys.n != 2)
    throw std::invalid_argument("principal_ideal_fit expects a 2-form on the 5-dimensional bundle");
  p.validate(sys.metric);
  const Locus<double> at = p.locus(3);
  const FormValue<double> lam = frame_values(Lambda, sys.metric, at);
  const FormValue<double> dl = frame_values(ext_derivative(Lambda), sys.metric, at);
  const auto A = wedge_matrix(lam);
  Eigen::Matrix<double, 10, 1> b;
  for (int i = 0; i < 10; ++i) b(i) = dl.c[i];
  const Eigen::Matrix<double, 5, 1> psi = A.completeOrthogonalDecomposition().solve(b);
  PrincipalIdealFit fit;
  for (int j = 0; j < 5; ++j) fit.psi[j] = psi(j);
  fit.residual = (A * psi - b).cwiseAbs().maxCoeff();
  fit.dLambda_norm = max_abs(dl);
  return fit;
}

IntegrityKernel integrity_kernel(const InvariantLagrangian& L, double tol) {
  const FormValue<double> lam = L.frame_value();
  const auto A = wedge_matrix(lam);
  Eigen::JacobiSVD<Eigen::Matrix<double, 10, 5>> svd(A, Eigen::ComputeFullV);
  IntegrityKernel k;
  const auto& sv = svd.singularValues();
  for (int j = 0; j < 5; ++j) k.singular_values[j] = sv(j);
  const double cutoff = tol * std::max(1.0, sv(0));
  for (int j = 0; j < 5; ++j) {
    if (sv(j) > cutoff) continue;
    std::array<double, 5> beta{};
    for (int i = 0; i < 5; ++i) beta[i] = svd.matrixV()(i, j);
    k.max_wedge = std::max(k.max_wedge, wedge_residual(beta, L));
    k.basis.push_back(beta);
  }
  return k;
}

std::array<std::array<double, 5>, 2> integrity_conditions_basis(double t0, Branch branch) {
  // b₁ = ±t₀b₃ and b₂ = ±t₀b₄, b₀ = 0
  const double sg = branch_sign(branch);
  return {std::array<double, 5>{0, sg * t0, 0, 1, 0}, std::array<double, 5>{0, 0, sg * t0, 0, 1}};
}

double wedge_residual(const std::array<double, 5>& beta, const InvariantLagrangian& L) {
  return max_abs(wedge(one_form<double>(beta, 5), L.frame_value()));
}

// ---------------------------------------------------------------------------
// Surface catalog.

namespace {

std::map<std::string, SurfaceFactory>& registry();

double param(const std::map<std::string, double>& p, const char* key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

double negative_curvature(const std::map<std::string, double>& p) {
  const double c = param(p, "c", -1.0);
  if (!(c < 0)) throw std::invalid_argument("surface ambient requires c < 0");
  return c;
}

std::map<std::string, SurfaceFactory> builtin_surfaces() {
  std::map<std::string, SurfaceFactory> m;
  m["horosphere"] = [](const std::map<std::string, double>& p) {
    const double h = param(p, "h", 1.0);
    const double c = negative_curvature(p);
    if (!(h > 0)) throw std::invalid_argument("horosphere requires h > 0");
    return SurfaceImmersion::make("horosphere", {-1.0, 1.0}, {-1.0, 1.0},
                                  [h](auto a, auto b) {
                                    using T = decltype(a);
                                    return Vec3<T>{a, b, T(h)};
                                  })
        .with_ambient(make_metric("halfspace", {{"c", c}}));
  };
  m["geodesic_sphere"] = [](const std::map<std::string, double>& p) {
    const double r = param(p, "a", 1.0);
    const double c = negative_curvature(p);
    if (!(r > 0)) throw std::invalid_argument("geodesic_sphere requires a > 0");
    const double k = std::sqrt(-c);
    const double R = 2.0 / k * std::tanh(0.5 * k * r);  // Euclidean radius in the ball chart
    // (φ, ϑ) order makes the chart normal point inward.
    return SurfaceImmersion::make("geodesic_sphere", {0.0, 2.0 * std::numbers::pi}, {0.0, std::numbers::pi},
                                  [R](auto ph, auto th) {
                                    using std::cos;
                                    using std::sin;
                                    using T = decltype(ph);
                                    return Vec3<T>{R * sin(th) * cos(ph), R * sin(th) * sin(ph), R * cos(th)};
                                  })
        .with_ambient(make_metric("hyperbolic3", {{"c", c}}));
  };
  m["vertical_plane"] = [](const std::map<std::string, double>& p) {
    const double c = negative_curvature(p);
    return SurfaceImmersion::make("vertical_plane", {-1.0, 1.0}, {0.5, 2.0},
                                  [](auto a, auto b) {
                                    using T = decltype(a);
                                    return Vec3<T>{T(0.0), a, b};
                                  })
        .with_ambient(make_metric("halfspace", {{"c", c}}));
  };
  m["euclidean_sphere"] = [](const std::map<std::string, double>& p) {
    const double R = param(p, "a", 1.0);
    if (!(R > 0)) throw std::invalid_argument("euclidean_sphere requires a > 0");
    return SurfaceImmersion::make("euclidean_sphere", {0.0, 2.0 * std::numbers::pi}, {0.0, std::numbers::pi},
                                  [R](auto ph, auto th) {
                                    using std::cos;
                                    using std::sin;
                                    using T = decltype(ph);
                                    return Vec3<T>{R * sin(th) * cos(ph), R * sin(th) * sin(ph), R * cos(th)};
                                  })
        .with_ambient(make_metric("euclidean3"));
  };
  m["graph"] = [](const std::map<std::string, double>& p) {
    const double amp = param(p, "amp", 0.3);
    return SurfaceImmersion::make("graph", {-1.0, 1.0}, {-1.0, 1.0},
                                  [amp](auto a, auto b) {
                                    using std::cos;
                                    using std::sin;
                                    using T = decltype(a);
                                    return Vec3<T>{a, b, amp * sin(a) * cos(b)};
                                  })
        .with_ambient(make_metric("euclidean3"));
  };
  return m;
}

std::map<std::string, SurfaceFactory>& registry() {
  static std::map<std::string, SurfaceFactory> r = builtin_surfaces();
  return r;
}

}  // namespace

void register_surface(const std::string& name, SurfaceFactory factory) { registry()[name] = std::move(factory); }

std::vector<std::string> surface_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

SurfaceImmersion make_surface(const std::string& name, const std::map<std::string, double>& params) {
  auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown surface '" + name + "'");
  return it->second(params);
}

// ---------------------------------------------------------------------------
// Surface geometry.

namespace {

SD2 seed2(double v, int dir) {
  SD2 r{};
  r.v = detail::seed<double, 2>(v, dir);
  r.d[dir] = SD1(1.0);
  return r;
}

template <class T>
Vec3<T> unit_normal(const ChartMetric& m, const Vec3<T>& x, const Vec3<T>& pa, const Vec3<T>& pb) {
  using std::sqrt;
  // cross product as a covector, raised with g⁻¹
  const Vec3<T> n{pa[1] * pb[2] - pa[2] * pb[1], pa[2] * pb[0] - pa[0] * pb[2], pa[0] * pb[1] - pa[1] * pb[0]};
  const Mat3<T> g = m.g(x);
  const Mat3<T> gi = inverse3(g, 3);
  const Vec3<T> v = detail::lower(gi, n, 3);
  const T len2 = g_dot(g, v, v, 3);
  if (!(value_of(len2) > 1e-24)) throw GeometryError("degenerate immersion: normal undefined");
  const T len = sqrt(len2);
  Vec3<T> out{};
  for (int i = 0; i < 3; ++i) out[i] = v[i] / len;
  return out;
}

template <class T>
Vec3<double> values(const Vec3<T>& v) {
  return {value_of(v[0]), value_of(v[1]), value_of(v[2])};
}

// First-order data of the surface: point, tangents, unit normal and their
// (a, b)-derivatives.
struct LiftData {
  Vec3<double> x{}, pa{}, pb{}, nu{};
  Vec3<double> paa{}, pab{}, pba{}, pbb{};
  Vec3<double> nua{}, nub{};
};

LiftData lift_data(const SurfaceImmersion& S, const ChartMetric& m, double a, double b) {
  const Vec3<SD2> f = S.eval2(seed2(a, 0), seed2(b, 1));
  Vec3<SD1> x{}, pa{}, pb{};
  for (int i = 0; i < 3; ++i) {
    x[i] = f[i].v;
    pa[i] = f[i].d[0];
    pb[i] = f[i].d[1];
  }
  LiftData d;
  d.x = values(x);
  m.require_inside(d.x);
  d.pa = values(pa);
  d.pb = values(pb);
  const Vec3<SD1> nu = unit_normal(m, x, pa, pb);
  d.nu = values(nu);
  for (int i = 0; i < 3; ++i) {
    d.paa[i] = pa[i].d[0];
    d.pab[i] = pa[i].d[1];
    d.pba[i] = pb[i].d[0];
    d.pbb[i] = pb[i].d[1];
    d.nua[i] = nu[i].d[0];
    d.nub[i] = nu[i].d[1];
  }
  return d;
}

// Induced metric (E, F, G) at (a, b), exact in the first derivatives.
std::array<double, 3> first_form(const SurfaceImmersion& S, const ChartMetric& m, double a, double b) {
  const Vec3<SD1> f = S.eval1(detail::seed<double, 2>(a, 0), detail::seed<double, 2>(b, 1));
  Vec3<double> x{}, pa{}, pb{};
  for (int i = 0; i < 3; ++i) {
    x[i] = f[i].v;
    pa[i] = f[i].d[0];
    pb[i] = f[i].d[1];
  }
  const Mat3<double> g = m.g(x);
  return {g_dot(g, pa, pa, 3), g_dot(g, pa, pb, 3), g_dot(g, pb, pb, 3)};
}

// Brioschi formula with order-4 central differences of E, F, G.
double brioschi(const SurfaceImmersion& S, const ChartMetric& m, double a, double b) {
  const double h = 2e-3;
  const double w[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};          // first derivative
  const double w2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};  // second derivative
  std::array<std::array<std::array<double, 3>, 5>, 5> T{};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) T[i][j] = first_form(S, m, a + (i - 2) * h, b + (j - 2) * h);
  auto da = [&](int k) {
    double s = 0;
    for (int i = 0; i < 5; ++i) s += w[i] * T[i][2][k];
    return s / h;
  };
  auto db = [&](int k) {
    double s = 0;
    for (int j = 0; j < 5; ++j) s += w[j] * T[2][j][k];
    return s / h;
  };
  auto daa = [&](int k) {
    double s = 0;
    for (int i = 0; i < 5; ++i) s += w2[i] * T[i][2][k];
    return s / (h * h);
  };
  auto dbb = [&](int k) {
    double s = 0;
    for (int j = 0; j < 5; ++j) s += w2[j] * T[2][j][k];
    return s / (h * h);
  };
  auto dab = [&](int k) {
    double s = 0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) s += w[i] * w[j] * T[i][j][k];
    return s / (h * h);
  };
  const double E = T[2][2][0], F = T[2][2][1], G = T[2][2][2];
  const double Eu = da(0), Ev = db(0), Fu = da(1), Fv = db(1), Gu = da(2), Gv = db(2);
  const double Evv = dbb(0), Guu = daa(2), Fuv = dab(1);
  Mat3<double> M1{-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev, Fv - 0.5 * Gu, E, F, 0.5 * Gv, F, G};
  Mat3<double> M2{0.0, 0.5 * Ev, 0.5 * Gu, 0.5 * Ev, E, F, 0.5 * Gu, F, G};
  const double den = E * G - F * F;
  return (det3(M1, 3) - det3(M2, 3)) / (den * den);
}

// Principal data at a point; Brioschi only when requested.
SurfaceSample point_geometry(const SurfaceImmersion& S, const ChartMetric& m, double a, double b,
                             bool intrinsic) {
  if (m.dim() != 3) throw std::invalid_argument("surfaces need a 3-dimensional ambient metric");
  const LiftData d = lift_data(S, m, a, b);
  const Mat3<double> g = m.g(d.x);
  const Tensor3<double> gam = christoffel(m, d.x);
  SurfaceSample s;
  s.a = a;
  s.b = b;
  s.x = d.x;
  s.nu = d.nu;
  s.normal_norm = std::sqrt(g_dot(g, d.nu, d.nu, 3));

  const Vec3<double>* t[2] = {&d.pa, &d.pb};
  const Vec3<double>* second[2][2] = {{&d.paa, &d.pab}, {&d.pba, &d.pbb}};
  const Vec3<double>* dnu[2] = {&d.nua, &d.nub};
  double W[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      s.I[i * 2 + j] = g_dot(g, *t[i], *t[j], 3);
      const Vec3<double> gij = detail::gamma_contract(gam, *t[i], *t[j], 3);
      Vec3<double> acc{};
      for (int k = 0; k < 3; ++k) acc[k] = (*second[i][j])[k] + gij[k];
      s.II[i * 2 + j] = g_dot(g, acc, d.nu, 3);
      // Weingarten form: −g(∇_i ν, φ_j)
      const Vec3<double> gn = detail::gamma_contract(gam, *t[i], d.nu, 3);
      Vec3<double> cov{};
      for (int k = 0; k < 3; ++k) cov[k] = (*dnu[i])[k] + gn[k];
      W[i][j] = -g_dot(g, cov, *t[j], 3);
    }
  s.symmetry_residual = std::abs(W[0][1] - W[1][0]);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.symmetry_residual = std::max(s.symmetry_residual, std::abs(W[i][j] - s.II[i * 2 + j]));

  const double detI = s.I[0] * s.I[3] - s.I[1] * s.I[2];
  if (!(detI > 1e-24)) throw GeometryError("degenerate immersion: induced metric is singular");
  s.area = std::sqrt(detI);
  const double detII = s.II[0] * s.II[3] - s.II[1] * s.II[2];
  s.K_ext = detII / detI;
  s.H = 0.5 * (s.I[3] * s.II[0] - 2.0 * s.I[1] * s.II[1] + s.I[0] * s.II[3]) / detI;
  const double disc = std::sqrt(std::max(0.0, s.H * s.H - s.K_ext));
  s.lambda1 = s.H - disc;
  s.lambda2 = s.H + disc;

  // orthonormal basis of the tangent plane for the ambient sectional curvature
  Vec3<double> e1 = d.pa, e2 = d.pb;
  const double l1 = std::sqrt(g_dot(g, e1, e1, 3));
  for (auto& v : e1) v /= l1;
  const double pr = g_dot(g, e2, e1, 3);
  for (int k = 0; k < 3; ++k) e2[k] -= pr * e1[k];
  const double l2 = std::sqrt(g_dot(g, e2, e2, 3));
  for (auto& v : e2) v /= l2;
  s.c_ambient = contract4(riemann_t(m, d.x), e1, e2, e1, e2, 3);
  s.K_gauss = s.c_ambient + s.K_ext;
  if (intrinsic) s.K_intrinsic = brioschi(S, m, a, b);
  return s;
}

struct RectRule {
  std::vector<double> a, b, wa, wb;
};

RectRule rect_rule(const SurfaceImmersion& S, int na, int nb) {
  if (na < 1 || nb < 1) throw std::invalid_argument("surface grid must be positive");
  RectRule r;
  std::vector<double> xa, xb;
  gauss_legendre(na, xa, r.wa);
  gauss_legendre(nb, xb, r.wb);
  const auto A = S.a_range(), B = S.b_range();
  for (int i = 0; i < na; ++i) {
    r.a.push_back(A[0] + 0.5 * (A[1] - A[0]) * (xa[i] + 1.0));
    r.wa[i] *= 0.5 * (A[1] - A[0]);
  }
  for (int j = 0; j < nb; ++j) {
    r.b.push_back(B[0] + 0.5 * (B[1] - B[0]) * (xb[j] + 1.0));
    r.wb[j] *= 0.5 * (B[1] - B[0]);
  }
  return r;
}

}  // namespace

SurfaceSample surface_point(const SurfaceImmersion& S, const ChartMetric& m, double a, double b) {
  return point_geometry(S, m, a, b, true);
}

SurfaceGeometry surface_geometry(const SurfaceImmersion& S, const ChartMetric& m, int na, int nb) {
  const RectRule rule = rect_rule(S, na, nb);
  SurfaceGeometry out;
  for (double a : rule.a)
    for (double b : rule.b) {
      const SurfaceSample s = surface_point(S, m, a, b);
      out.max_curvature_gap = std::max(out.max_curvature_gap, std::abs(s.K_gauss - s.K_intrinsic));
      out.max_symmetry_residual = std::max(out.max_symmetry_residual, s.symmetry_residual);
      out.max_normal_error = std::max(out.max_normal_error, std::abs(s.normal_norm - 1.0));
      out.samples.push_back(s);
    }
  return out;
}

GaussLiftFactors gauss_lift_pullback(const SurfaceImmersion& S, const FundamentalSystem& sys, double a,
                                     double b) {
  if (std::abs(sys.s - 1.0) > 1e-12) throw std::invalid_argument("gauss_lift_pullback needs the unit sphere bundle (s = 1)");
  if (sys.n != 2) throw std::invalid_argument("gauss_lift_pullback needs a 3-dimensional base");
  const ChartMetric& m = sys.metric;
  const LiftData d = lift_data(S, m, a, b);
  const SurfaceSample geo = point_geometry(S, m, a, b, false);
  TmVec<double> z{}, fa{}, fb{};
  for (int i = 0; i < 3; ++i) {
    z[i] = d.x[i];
    z[3 + i] = d.nu[i];
    fa[i] = d.pa[i];
    fa[3 + i] = d.nua[i];
    fb[i] = d.pb[i];
    fb[3 + i] = d.nub[i];
  }
  GaussLiftFactors f;
  f.alpha0 = evaluate<double, TmVec<double>>(sys.alpha[0](z), {fa, fb}) / geo.area;
  f.alpha1 = evaluate<double, TmVec<double>>(sys.alpha[1](z), {fa, fb}) / geo.area;
  f.alpha2 = evaluate<double, TmVec<double>>(sys.alpha[2](z), {fa, fb}) / geo.area;
  f.expected0 = 1.0;
  f.expected1 = -(geo.lambda1 + geo.lambda2);
  f.expected2 = geo.lambda1 * geo.lambda2;
  const FormValue<double> th = sys.theta(z);
  f.theta = std::max(std::abs(evaluate<double, TmVec<double>>(th, {fa})), std::abs(evaluate<double, TmVec<double>>(th, {fb})));
  return f;
}

WeingartenReport weingarten_functional(const SurfaceImmersion& S, const ChartMetric& m, double t0,
                                       Branch branch, int na, int nb, double tol) {
  if (!(t0 > 0)) throw std::invalid_argument("weingarten_functional needs t0 > 0");
  double c = 0;
  if (m.dim() != 3 || !m.has_constant_curvature(&c) || std::abs(c + t0 * t0) > tol)
    throw std::invalid_argument("weingarten_functional needs a hyperbolic ambient with c = -t0^2");
  const FundamentalSystem sys = build_system(m, 1.0);
  const FormField L2 = InvariantLagrangian::lambda2(t0, branch).bind(sys);
  const double sg = branch_sign(branch);
  const RectRule rule = rect_rule(S, na, nb);
  WeingartenReport r;
  r.t0 = t0;
  r.branch = branch;
  for (size_t i = 0; i < rule.a.size(); ++i)
    for (size_t j = 0; j < rule.b.size(); ++j) {
      const double a = rule.a[i], b = rule.b[j], w = rule.wa[i] * rule.wb[j];
      const LiftData d = lift_data(S, m, a, b);
      const SurfaceSample s = point_geometry(S, m, a, b, false);
      const double integrand = s.K_gauss - sg * 2.0 * t0 * s.H + 2.0 * t0 * t0;
      r.max_residual = std::max(r.max_residual, std::abs(integrand));
      r.value += w * integrand * s.area;
      r.area += w * s.area;
      TmVec<double> z{}, fa{}, fb{};
      for (int k = 0; k < 3; ++k) {
        z[k] = d.x[k];
        z[3 + k] = d.nu[k];
        fa[k] = d.pa[k];
        fa[3 + k] = d.nua[k];
        fb[k] = d.pb[k];
        fb[3 + k] = d.nub[k];
      }
      r.pullback += w * evaluate<double, TmVec<double>>(L2(z), {fa, fb});
      ++r.nodes;
    }
  r.mean_residual = r.value / r.area;
  const double scale = std::max(1.0, std::abs(r.value));
  r.printed_gap = std::abs(r.pullback / t0 - r.value) / scale;
  r.derived_gap = std::abs(r.pullback * t0 - r.value) / scale;
  return r;
}

}  // namespace sbl
