#include "sbl/fiber_integration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRefinementTol = 1e-8;

Vec3<double> combine(const std::array<Vec3<double>, 3>& E, const Vec3<double>& w) {
  Vec3<double> v{};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i) v[i] += w[k] * E[k][i];
  return v;
}

void require_3d(const ChartMetric& m, const char* what) {
  if (m.dim() != 3) throw std::invalid_argument(std::string(what) + " requires a 3-dimensional base");
}

// Fibre tangent vectors ∂_φ w and ∂_z w of the unit sphere parametrisation.
std::array<Vec3<double>, 2> unit_sphere_tangents(double phi, double z) {
  const double a = std::sqrt(1.0 - z * z);
  const double c = std::cos(phi), s = std::sin(phi);
  return {Vec3<double>{-a * s, a * c, 0.0}, Vec3<double>{-z * c / a, -z * s / a, 1.0}};
}

// Σ R_abcd² over the orthonormal basis E.
double riemann_norm2(const CurvaturePack& pack, const std::array<Vec3<double>, 3>& E) {
  double acc = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          const double r = contract4(pack.Riem, E[a], E[b], E[c], E[d], 3);
          acc += r * r;
        }
  return acc;
}

struct PointScalars {
  double c, r, p2, q2;
};

// c, r, p², q² at (x, u) from a precomputed curvature pack.
PointScalars point_scalars(const ChartMetric& m, const CurvaturePack& pack, const BundlePoint& p) {
  const FrameT<double> fr = adapted_frame_t(m, p.locus(3));
  auto R = [&](int a, int b, int c, int d) {
    return contract4(pack.Riem, fr.b[a], fr.b[b], fr.b[c], fr.b[d], 3);
  };
  PointScalars out{};
  out.c = R(1, 2, 1, 2);
  out.r = R(1, 0, 1, 0) + R(2, 0, 2, 0);
  const double P = R(1, 0, 1, 1) + R(2, 0, 2, 1);
  const double Q = R(1, 0, 1, 2) + R(2, 0, 2, 2);
  out.p2 = P * P + Q * Q;
  const double diff = R(1, 0, 0, 1) - R(2, 0, 0, 2);
  out.q2 = 2.0 * R(1, 0, 0, 2) * R(1, 0, 0, 2) + 0.5 * diff * diff;
  return out;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = 2.0 * v0 * v0;
  }
}

FiberGrid FiberGrid::make(int n_phi, int n_z) {
  if (n_phi < 1 || n_z < 1) throw std::invalid_argument("FiberGrid: resolution must be positive");
  FiberGrid g;
  g.n_phi = n_phi;
  g.n_z = n_z;
  std::vector<double> zn, zw;
  gauss_legendre(n_z, zn, zw);
  const double dphi = 2.0 * kPi / n_phi;
  g.nodes.reserve(size_t(n_phi) * n_z);
  for (int i = 0; i < n_phi; ++i) {
    const double phi = i * dphi;
    for (int j = 0; j < n_z; ++j) {
      const double z = zn[j];
      const double a = std::sqrt(1.0 - z * z);
      g.nodes.push_back({phi, z, dphi * zw[j], {a * std::cos(phi), a * std::sin(phi), z}});
    }
  }
  return g;
}

FiberGrid FiberGrid::for_degree(int L) {
  if (L < 0) throw std::invalid_argument("FiberGrid: negative degree");
  return make(L + 1, L / 2 + 1);
}

int FiberGrid::exact_degree() const { return std::min(n_phi - 1, 2 * n_z - 1); }

double FiberGrid::weight_sum() const {
  double s = 0;
  for (const auto& n : nodes) s += n.weight;
  return s;
}

std::array<Vec3<double>, 3> fiber_basis(const ChartMetric& m, const Vec3<double>& x,
                                        const std::array<double, 9>* rotation) {
  require_3d(m, "fiber_basis");
  const Mat3<double> g = m.g(x);
  std::array<Vec3<double>, 3> E{};
  for (int k = 0; k < 3; ++k) {
    Vec3<double> v{};
    v[k] = 1.0;
    for (int p = 0; p < k; ++p) {
      const double proj = g_dot(g, v, E[p], 3);
      for (int i = 0; i < 3; ++i) v[i] -= proj * E[p][i];
    }
    const double len = std::sqrt(g_dot(g, v, v, 3));
    for (int i = 0; i < 3; ++i) E[k][i] = v[i] / len;
  }
  if (rotation) {
    const auto& R = *rotation;
    std::array<Vec3<double>, 3> out{};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 3; ++i) out[a][i] += R[a * 3 + b] * E[b][i];
    E = out;
  }
  return E;
}

double fiber_integrate(const ChartMetric& m, double s, const Vec3<double>& x, const FiberFunction& f,
                       const FiberGrid& grid, const std::array<double, 9>* rotation) {
  require_3d(m, "fiber_integrate");
  m.require_inside(x);
  if (!(s > 0)) throw std::invalid_argument("fiber_integrate: radius must be positive");
  const auto E = fiber_basis(m, x, rotation);
  double acc = 0;
  for (const auto& node : grid.nodes) {
    BundlePoint p;
    p.x = x;
    p.s = s;
    p.u = combine(E, node.w);
    for (auto& c : p.u) c *= s;
    const double v = f(p);
    if (!std::isfinite(v)) throw std::domain_error("fiber_integrate: non-finite integrand value");
    acc += node.weight * v;
  }
  return acc;
}

double fiber_alpha2_density(const FundamentalSystem& sys, const Vec3<double>& x, double phi, double z) {
  require_3d(sys.metric, "fiber_alpha2_density");
  const auto E = fiber_basis(sys.metric, x);
  const double a = std::sqrt(1.0 - z * z);
  BundlePoint p;
  p.x = x;
  p.s = sys.s;
  p.u = combine(E, {a * std::cos(phi), a * std::sin(phi), z});
  for (auto& c : p.u) c *= sys.s;
  const auto t = unit_sphere_tangents(phi, z);
  Vec3<double> dphi = combine(E, t[0]), dz = combine(E, t[1]);
  for (int i = 0; i < 3; ++i) {
    dphi[i] *= sys.s;
    dz[i] *= sys.s;
  }
  return evaluate<double, TmVec<double>>(sys.alpha[2](p.coords(3)), {vertical_lift(3, dphi), vertical_lift(3, dz)});
}

std::string to_string(Verdict v) { return v == Verdict::Match ? "match" : "mismatch-vs-paper"; }

FiberIntegralReport identity_battery(const FundamentalSystem& sys, const Vec3<double>& x, double tol,
                                     const FiberGrid& grid) {
  require_3d(sys.metric, "identity_battery");
  const ChartMetric& m = sys.metric;
  m.require_inside(x);
  const CurvaturePack pack = curvature_pack(m, x);
  FiberIntegralReport rep;
  rep.x = x;
  rep.scal = pack.scal;
  rep.norm_R2 = riemann_norm2(pack, fiber_basis(m, x));
  const double S = rep.scal, N = rep.norm_R2;

  struct Item {
    const char* id;
    const char* formula;
    double paper;
    double (*pick)(const PointScalars&);
  };
  const Item items[] = {
      {"one", "4 pi", 4.0 * kPi, [](const PointScalars&) { return 1.0; }},
      {"c", "(2 pi / 3) scal", 2.0 * kPi / 3.0 * S, [](const PointScalars& v) { return v.c; }},
      {"c2", "(pi / 15) (2 |R|^2 + scal^2)", kPi / 15.0 * (2.0 * N + S * S),
       [](const PointScalars& v) { return v.c * v.c; }},
      {"r", "(4 pi / 3) scal", 4.0 * kPi / 3.0 * S, [](const PointScalars& v) { return v.r; }},
      {"r2", "(2 pi / 15) (|R|^2 + 6 scal^2)", 2.0 * kPi / 15.0 * (N + 6.0 * S * S),
       [](const PointScalars& v) { return v.r * v.r; }},
      {"p2", "(pi / 15) (3 |R|^2 - 2 scal^2)", kPi / 15.0 * (3.0 * N - 2.0 * S * S),
       [](const PointScalars& v) { return v.p2; }},
      {"q2", "(2 pi / 15) (3 |R|^2 - 2 scal^2)", 2.0 * kPi / 15.0 * (3.0 * N - 2.0 * S * S),
       [](const PointScalars& v) { return v.q2; }},
  };

  // Evaluate the four scalars once per node and reuse them for every row.
  auto tabulate = [&](const FiberGrid& gr) {
    std::vector<double> sums(std::size(items), 0.0);
    const auto E = fiber_basis(m, x);
    for (const auto& node : gr.nodes) {
      BundlePoint p;
      p.x = x;
      p.s = sys.s;
      p.u = combine(E, node.w);
      for (auto& c : p.u) c *= sys.s;
      const PointScalars v = point_scalars(m, pack, p);
      for (size_t k = 0; k < std::size(items); ++k) sums[k] += node.weight * items[k].pick(v);
    }
    return sums;
  };
  const auto coarse = tabulate(grid);
  const auto fine = tabulate(grid.refined());
  for (size_t k = 0; k < std::size(items); ++k)
    if (!(std::abs(coarse[k] - fine[k]) <= kRefinementTol * std::max(1.0, std::abs(fine[k]))))
      throw std::runtime_error(std::string("identity_battery: quadrature of '") + items[k].id +
                               "' did not converge under refinement");
  for (size_t k = 0; k < std::size(items); ++k) {
    FiberIntegralRow row;
    row.id = items[k].id;
    row.formula = items[k].formula;
    row.paper = items[k].paper;
    row.computed = coarse[k];
    row.refined = fine[k];
    row.abs_err = std::abs(row.computed - row.paper);
    row.rel_err = row.abs_err / std::max(1.0, std::abs(row.paper));
    row.verdict = row.rel_err <= tol ? Verdict::Match : Verdict::MismatchVsPaper;
    rep.rows.push_back(row);
  }
  return rep;
}

PushforwardReport pushforward_checks(const FundamentalSystem& sys, const Vec3<double>& x,
                                     const FiberGrid& grid) {
  require_3d(sys.metric, "pushforward_checks");
  const ChartMetric& m = sys.metric;
  m.require_inside(x);
  const auto E = fiber_basis(m, x);
  const FormField vol = sys.vol();
  const FormField ta2 = wedge(sys.theta, sys.alpha[2]);
  const FormField a0a2 = wedge(sys.alpha[0], sys.alpha[2]);

  PushforwardReport rep;
  rep.expected_vol = 4.0 * kPi * sys.s * sys.s;
  double ta[3] = {0, 0, 0};
  double aa[3][3] = {};
  // Node weights are plain dφ dz weights; the form supplies its own density.
  for (const auto& node : grid.nodes) {
    BundlePoint p;
    p.x = x;
    p.s = sys.s;
    p.u = combine(E, node.w);
    for (auto& c : p.u) c *= sys.s;
    const auto t = unit_sphere_tangents(node.phi, node.z);
    Vec3<double> vp = combine(E, t[0]), vz = combine(E, t[1]);
    for (int i = 0; i < 3; ++i) {
      vp[i] *= sys.s;
      vz[i] *= sys.s;
    }
    const TmVec<double> fp = vertical_lift(3, vp), fz = vertical_lift(3, vz);
    TmVec<double> h[3];
    for (int i = 0; i < 3; ++i) h[i] = horizontal_lift(m, x, p.u, E[i]);
    const TmVec<double> z = p.coords(3);
    const double w = node.weight;
    rep.vol += w * evaluate<double, TmVec<double>>(vol(z), {h[0], h[1], h[2], fp, fz});
    const FormValue<double> v1 = ta2(z), v2 = a0a2(z);
    for (int i = 0; i < 3; ++i) {
      ta[i] += w * evaluate<double, TmVec<double>>(v1, {h[i], fp, fz});
      for (int j = i + 1; j < 3; ++j) aa[i][j] += w * evaluate<double, TmVec<double>>(v2, {h[i], h[j], fp, fz});
    }
  }
  for (int i = 0; i < 3; ++i) {
    rep.theta_alpha2 = std::max(rep.theta_alpha2, std::abs(ta[i]));
    for (int j = i + 1; j < 3; ++j) rep.alpha0_alpha2 = std::max(rep.alpha0_alpha2, std::abs(aa[i][j]));
  }
  return rep;
}

TensorLiftResult lift_square_integral(const ChartMetric& m, const Vec3<double>& x,
                                      const Vec3<double>& phi, const FiberGrid& grid) {
  require_3d(m, "lift_square_integral");
  const auto E = fiber_basis(m, x);
  TensorLiftResult r;
  for (const auto& node : grid.nodes) {
    const Vec3<double> u = combine(E, node.w);
    double v = 0;
    for (int i = 0; i < 3; ++i) v += phi[i] * u[i];
    r.quadrature += node.weight * v * v;
  }
  const Mat3<double> gi = inverse3(m.g(x), 3);
  double n2 = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) n2 += gi[i * 3 + j] * phi[i] * phi[j];
  r.closed_form = 4.0 * kPi / 3.0 * n2;
  return r;
}

TensorLiftResult lift_diagonal_integral(const ChartMetric& m, const Vec3<double>& x,
                                        const Mat3<double>& g1, const FiberGrid& grid) {
  require_3d(m, "lift_diagonal_integral");
  const auto E = fiber_basis(m, x);
  TensorLiftResult r;
  for (const auto& node : grid.nodes) {
    const Vec3<double> u = combine(E, node.w);
    r.quadrature += node.weight * g_dot(g1, u, u, 3);
  }
  const Mat3<double> gi = inverse3(m.g(x), 3);
  double tr = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tr += gi[i * 3 + j] * g1[j * 3 + i];
  r.closed_form = 4.0 * kPi / 3.0 * tr;
  return r;
}

}  // namespace sbl
