#include "sbl/metric_chart.hpp"

#include <algorithm>
#include <cmath>

namespace sbl {

std::string to_string(Backend b) { return b == Backend::Dual ? "dual" : "fd"; }

Backend backend_from_string(const std::string& s) {
  if (s == "dual") return Backend::Dual;
  if (s == "fd") return Backend::FiniteDifference;
  throw std::invalid_argument("unknown backend '" + s + "' (expected dual or fd)");
}

ChartMetric::ChartMetric(std::string name, int dim, MetricModel model, ChartDomain domain,
                         std::map<std::string, double> params, Backend backend)
    : name_(std::move(name)),
      dim_(dim),
      model_(std::move(model)),
      domain_(domain),
      params_(std::move(params)),
      backend_(backend) {
  if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("chart dimension must be 2 or 3");
}

bool ChartMetric::contains(const Vec3<double>& x) const {
  for (int i = 0; i < dim_; ++i)
    if (!std::isfinite(x[i])) return false;
  switch (domain_.kind) {
    case ChartDomain::Kind::All:
      return true;
    case ChartDomain::Kind::Ball: {
      double r2 = 0;
      for (int i = 0; i < dim_; ++i) r2 += x[i] * x[i];
      return r2 < domain_.radius * domain_.radius;
    }
    case ChartDomain::Kind::HalfSpace:
      return x[dim_ - 1] > 0.0;
  }
  return false;
}

void ChartMetric::require_inside(const Vec3<double>& x) const {
  if (!contains(x)) throw GeometryError("point outside the domain of chart '" + name_ + "'");
}

bool ChartMetric::has_constant_curvature(double* c) const {
  return std::visit(
      [&](const auto& m) -> bool {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, EuclideanModel>) {
          if (c) *c = 0.0;
          return true;
        } else if constexpr (std::is_same_v<M, ConformalModel> ||
                             std::is_same_v<M, HalfSpaceModel>) {
          if (c) *c = m.c;
          return true;
        } else {
          return false;
        }
      },
      model_);
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

ChartDomain box_domain(int dim, double half) {
  ChartDomain d;
  for (int i = 0; i < 3; ++i) {
    d.sample_lo[i] = i < dim ? -half : 0.0;
    d.sample_hi[i] = i < dim ? half : 0.0;
  }
  return d;
}

ChartMetric conformal(const std::string& name, int dim, double c, Backend backend) {
  ChartDomain d = box_domain(dim, c < 0 ? 0.6 / std::sqrt(-c) : 1.0);
  if (c < 0) {
    d.kind = ChartDomain::Kind::Ball;
    d.radius = 2.0 / std::sqrt(-c);
  }
  return ChartMetric(name, dim, ConformalModel{c}, d, {{"c", c}}, backend);
}

}  // namespace

ChartMetric make_metric(const std::string& name, const std::map<std::string, double>& params,
                        Backend backend) {
  if (name == "euclidean3" || name == "flat3")
    return ChartMetric("euclidean3", 3, EuclideanModel{}, box_domain(3, 1.0), {}, backend);
  if (name == "flat2d" || name == "euclidean2")
    return ChartMetric("flat2d", 2, EuclideanModel{}, box_domain(2, 1.0), {}, backend);
  if (name == "sphere3" || name == "sphere2") {
    const double c = param(params, "c", 1.0);
    if (!(c > 0)) throw std::invalid_argument(name + " requires c > 0");
    return conformal(name, name == "sphere3" ? 3 : 2, c, backend);
  }
  if (name == "hyperbolic3" || name == "hyperbolic2") {
    const double c = param(params, "c", -1.0);
    if (!(c < 0)) throw std::invalid_argument(name + " requires c < 0");
    return conformal(name, name == "hyperbolic3" ? 3 : 2, c, backend);
  }
  if (name == "halfspace") {
    const double c = param(params, "c", -1.0);
    if (!(c < 0)) throw std::invalid_argument("halfspace requires c < 0");
    ChartDomain d = box_domain(3, 1.0);
    d.kind = ChartDomain::Kind::HalfSpace;
    d.sample_lo[2] = 0.5;
    d.sample_hi[2] = 1.5;
    return ChartMetric("halfspace", 3, HalfSpaceModel{c}, d, {{"c", c}}, backend);
  }
  if (name == "heisenberg")
    return ChartMetric("heisenberg", 3, HeisenbergModel{}, box_domain(3, 1.0), {}, backend);
  if (name == "perturbed" || name == "perturbed2d") {
    const double eps = param(params, "eps", 0.05);
    if (std::abs(eps) >= 0.5) throw std::invalid_argument("perturbed requires |eps| < 0.5");
    const int dim = name == "perturbed" ? 3 : 2;
    return ChartMetric(name, dim, PerturbedModel{eps}, box_domain(dim, 1.0), {{"eps", eps}},
                       backend);
  }
  throw std::invalid_argument("unknown metric '" + name + "'");
}

Tensor3<double> christoffel(const ChartMetric& m, const Vec3<double>& x) {
  m.require_inside(x);
  return christoffel_t(m, x);
}

CurvaturePack curvature_pack(const ChartMetric& m, const Vec3<double>& x) {
  m.require_inside(x);
  CurvaturePack p;
  p.x = x;
  p.dim = m.dim();
  p.g = m.g(x);
  p.Gamma = christoffel_t(m, x);
  p.Riem = riemann_t(m, x);
  p.Ric = ricci_t(m, x);
  const Mat3<double> gi = inverse3(p.g, p.dim);
  p.scal = 0.0;
  for (int j = 0; j < p.dim; ++j)
    for (int k = 0; k < p.dim; ++k) p.scal += gi[j * 3 + k] * p.Ric[j * 3 + k];
  if (p.dim == 3) p.gradRic = grad_ricci_t(m, x);
  // ∂scal = g^{bc}∇_a Ric_bc (covariant derivative of the metric vanishes)
  if (p.dim == 3)
    for (int a = 0; a < 3; ++a) {
      double s = 0;
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) s += gi[b * 3 + c] * p.gradRic[a * 9 + b * 3 + c];
      p.dscal[a] = s;
    }
  return p;
}

double contract4(const Tensor4<double>& t, const Vec3<double>& a, const Vec3<double>& b,
                 const Vec3<double>& c, const Vec3<double>& d, int dim) {
  double s = 0;
  for (int l = 0; l < dim; ++l)
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          s += t[((l * 3 + k) * 3 + i) * 3 + j] * a[l] * b[k] * c[i] * d[j];
  return s;
}

double sectional(const CurvaturePack& pack, const Vec3<double>& v, const Vec3<double>& w) {
  return contract4(pack.Riem, v, w, v, w, pack.dim);
}

double sectional(const ChartMetric& m, const Vec3<double>& x, const Vec3<double>& v,
                 const Vec3<double>& w, double ortho_tol) {
  m.require_inside(x);
  const Mat3<double> g = m.g(x);
  const int dim = m.dim();
  if (std::abs(g_dot(g, v, v, dim) - 1.0) > ortho_tol ||
      std::abs(g_dot(g, w, w, dim) - 1.0) > ortho_tol || std::abs(g_dot(g, v, w, dim)) > ortho_tol)
    throw std::invalid_argument("sectional: plane basis is not g-orthonormal");
  const Tensor4<double> r = riemann_t(m, x);
  return contract4(r, v, w, v, w, dim);
}

}  // namespace sbl
