#include "sbl/sphere_bundle.hpp"

#include <cmath>
#include <string>

namespace sbl {

void BundlePoint::validate(const ChartMetric& m) const {
  m.require_inside(x);
  if (!(s > 0) || !std::isfinite(s)) throw GeometryError("sphere bundle radius must be positive");
  const Mat3<double> g = m.g(x);
  const double r2 = g_dot(g, u, u, m.dim());
  if (std::abs(r2 - s * s) > 1e-12 * std::max(1.0, s * s))
    throw GeometryError("fibre point has g(u,u) = " + std::to_string(r2) + ", expected s² = " +
                        std::to_string(s * s));
}

TmVec<double> BundlePoint::coords(int dim) const {
  TmVec<double> z{};
  for (int i = 0; i < dim; ++i) {
    z[i] = x[i];
    z[dim + i] = u[i];
  }
  return z;
}

Locus<double> BundlePoint::locus(int dim) const { return Locus<double>{coords(dim), std::nullopt}; }

BundlePoint make_bundle_point(const ChartMetric& m, const Vec3<double>& x, const Vec3<double>& u_dir,
                              double s) {
  m.require_inside(x);
  if (!(s > 0)) throw GeometryError("sphere bundle radius must be positive");
  const Mat3<double> g = m.g(x);
  const double len = std::sqrt(g_dot(g, u_dir, u_dir, m.dim()));
  if (!(len > 0)) throw GeometryError("zero fibre direction");
  BundlePoint p;
  p.x = x;
  p.s = s;
  for (int i = 0; i < m.dim(); ++i) p.u[i] = u_dir[i] * (s / len);
  return p;
}

int frame_pivot(const ChartMetric& m, const TmVec<double>& z) {
  const int dim = m.dim();
  Vec3<double> x{}, u{};
  for (int i = 0; i < dim; ++i) {
    x[i] = z[i];
    u[i] = z[dim + i];
  }
  const Vec3<double> gu = detail::lower(m.g(x), u, dim);
  int best = 0;
  for (int i = 1; i < dim; ++i)
    if (std::abs(gu[i]) > std::abs(gu[best])) best = i;
  return best;
}

AdaptedFrame adapted_frame(const ChartMetric& m, const BundlePoint& p, double rotation) {
  p.validate(m);
  const FrameT<double> f = adapted_frame_t(m, p.locus(m.dim()), rotation);
  AdaptedFrame a;
  a.at = p;
  a.n = f.n;
  a.pivot = f.pivot;
  for (int k = 0; k <= 2 * f.n; ++k) {
    a.e.push_back(f.E[k]);
    a.coframe.push_back(f.coE[k]);
  }
  a.xi = vertical_lift(m.dim(), p.u);
  for (int k = 0; k <= f.n; ++k) a.base[k] = f.b[k];
  return a;
}

TmVec<double> horizontal_lift(const ChartMetric& m, const Vec3<double>& x, const Vec3<double>& u,
                              const Vec3<double>& v) {
  const int dim = m.dim();
  const Vec3<double> corr = detail::gamma_contract(christoffel(m, x), v, u, dim);
  TmVec<double> r{};
  for (int i = 0; i < dim; ++i) {
    r[i] = v[i];
    r[dim + i] = -corr[i];
  }
  return r;
}

TmVec<double> vertical_lift(int dim, const Vec3<double>& v) {
  TmVec<double> r{};
  for (int i = 0; i < dim; ++i) r[dim + i] = v[i];
  return r;
}

double sasaki_inner(const ChartMetric& m, const BundlePoint& p, const TmVec<double>& y,
                    const TmVec<double>& z) {
  return sasaki_inner_t(m.g(p.x), christoffel(m, p.x), p.u, y, z, m.dim());
}

Vec3<double> connection_map(const ChartMetric& m, const BundlePoint& p, const TmVec<double>& y) {
  const int dim = m.dim();
  Vec3<double> yx{};
  for (int i = 0; i < dim; ++i) yx[i] = y[i];
  const Vec3<double> corr = detail::gamma_contract(christoffel(m, p.x), yx, p.u, dim);
  Vec3<double> k{};
  for (int i = 0; i < dim; ++i) k[i] = y[dim + i] + corr[i];
  return k;
}

TmVec<double> MirrorMap::apply(const std::array<double, 36>& op, const TmVec<double>& v) const {
  TmVec<double> r{};
  for (int i = 0; i < coords; ++i)
    for (int j = 0; j < coords; ++j) r[i] += op[i * coords + j] * v[j];
  return r;
}

MirrorMap mirror_map(const ChartMetric& m, const BundlePoint& p) {
  const int dim = m.dim();
  const int D = 2 * dim;
  MirrorMap mm;
  mm.coords = D;
  for (int j = 0; j < dim; ++j) mm.B[(dim + j) * D + j] = 1.0;
  for (int j = 0; j < D; ++j) {
    TmVec<double> ej{};
    ej[j] = 1.0;
    const TmVec<double> col = horizontal_lift(m, p.x, p.u, connection_map(m, p, ej));
    for (int i = 0; i < D; ++i) mm.Bt[i * D + j] = col[i];
  }
  for (int k = 0; k < D * D; ++k) mm.J[k] = mm.B[k] - mm.Bt[k];

  if (dim == 3) {
    const FrameT<double> f = adapted_frame_t(m, p.locus(dim));
    // images of e_0..e_5 under I±
    auto image = [&](int a, double sign) -> TmVec<double> {
      TmVec<double> r{};
      auto put = [&](int b, double c) {
        for (int i = 0; i < D; ++i) r[i] = c * f.E[b][i];
      };
      switch (a) {
        case 1: put(2, 1.0); break;
        case 2: put(1, -1.0); break;
        case 3: put(4, sign); break;
        case 4: put(3, -sign); break;
        default: break;
      }
      return r;
    };
    for (int j = 0; j < D; ++j)
      for (int a = 0; a < D; ++a) {
        const double w = f.coE[a][j];
        const TmVec<double> ip = image(a, 1.0), im = image(a, -1.0);
        for (int i = 0; i < D; ++i) {
          mm.Iplus[i * D + j] += w * ip[i];
          mm.Iminus[i * D + j] += w * im[i];
        }
      }
  }
  return mm;
}

}  // namespace sbl
