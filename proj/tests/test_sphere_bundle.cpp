#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace sbl;
using namespace sbl::test;

namespace {

/// Sasaki inner product from the Koszul oracle: g(y_x, z_x) + g(Ky, Kz) with
/// K(ẋ, u̇) = u̇ + Γ(ẋ, u).
struct SasakiOracle {
  const ChartMetric& m;
  BundlePoint p;
  Mat3<double> g;
  Tensor3<double> gam;

  SasakiOracle(const ChartMetric& metric, const BundlePoint& pt)
      : m(metric), p(pt), g(metric.g(pt.x)), gam(koszul_christoffel(metric, pt.x)) {}

  Vec3<double> K(const TmVec<double>& y) const {
    const int d = m.dim();
    Vec3<double> r{};
    for (int k = 0; k < d; ++k) {
      r[k] = y[d + k];
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) r[k] += gam[k * 9 + i * 3 + j] * y[i] * p.u[j];
    }
    return r;
  }
  Vec3<double> base(const TmVec<double>& y) const { return {y[0], y[1], m.dim() == 3 ? y[2] : 0.0}; }
  double inner(const TmVec<double>& y, const TmVec<double>& z) const {
    return gdot(g, base(y), base(z), m.dim()) + gdot(g, K(y), K(z), m.dim());
  }
};

TmVec<double> random_tm(Rng& rng, int coords) {
  TmVec<double> v{};
  for (int i = 0; i < coords; ++i) v[i] = rng.gauss();
  return v;
}

double dot_cov(const TmVec<double>& a, const TmVec<double>& b, int coords) {
  double s = 0;
  for (int i = 0; i < coords; ++i) s += a[i] * b[i];
  return s;
}

double max_gap(const TmVec<double>& a, const TmVec<double>& b, int coords) {
  double m = 0;
  for (int i = 0; i < coords; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

using Op = std::array<double, 36>;

Op matmul(const Op& a, const Op& b, int D) {
  Op r{};
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j)
      for (int k = 0; k < D; ++k) r[i * D + j] += a[i * D + k] * b[k * D + j];
  return r;
}

double op_gap(const Op& a, const Op& b, int D) {
  double m = 0;
  for (int i = 0; i < D * D; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<std::string> all_metrics() {
  std::vector<std::string> all = metrics3();
  all.insert(all.end(), metrics2().begin(), metrics2().end());
  return all;
}

}  // namespace

TEST_CASE("bundle points lie on the radius-s sphere") {
  Rng rng(11);
  for (const std::string& name : all_metrics()) {
    const ChartMetric m = make_metric(name);
    for (double s : {0.5, 1.0, 2.0}) {
      const BundlePoint p = rng.bundle_point(m, s);
      CHECK(std::abs(gdot(m.g(p.x), p.u, p.u, m.dim()) - s * s) < 1e-12 * s * s);
      CHECK_NOTHROW(p.validate(m));
      BundlePoint q = p;
      q.u[0] *= 1.01;
      q.u[1] *= 1.01;
      CHECK_THROWS(q.validate(m));
    }
  }
  const ChartMetric e = make_metric("euclidean3");
  CHECK_THROWS(make_bundle_point(e, {0, 0, 0}, {0, 0, 0}, 1.0));
  CHECK_THROWS(make_bundle_point(e, {0, 0, 0}, {1, 0, 0}, 0.0));
}

TEST_CASE("axis-aligned flat frame") {
  const ChartMetric m = make_metric("euclidean3");
  for (double s : {1.0, 2.0}) {
    const AdaptedFrame f = adapted_frame(m, make_bundle_point(m, {0, 0, 0}, {0, 0, 1}, s));
    REQUIRE(f.e.size() == 5);
    const TmVec<double> expected[5] = {{0, 0, 1, 0, 0, 0}, {1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0},
                                       {0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 1, 0}};
    for (int a = 0; a < 5; ++a) CHECK(max_gap(f.e[a], expected[a], 6) < 1e-15);
    CHECK(max_gap(f.xi, TmVec<double>{0, 0, 0, 0, 0, s}, 6) == 0.0);
  }
}

TEST_CASE("adapted frames: Sasaki orthonormality, lifts, tangency, orientation, duality") {
  Rng rng(12);
  for (const std::string& name : all_metrics()) {
    const ChartMetric m = make_metric(name);
    const int d = m.dim(), D = 2 * d, n = d - 1;
    double gram = 0, gram_oracle = 0, e0 = 0, mirror = 0, tangency = 0, dual = 0, base_gs = 0;
    for (int k = 0; k < 20; ++k) {
      const double s = rng.uniform(0.5, 2.0);
      const BundlePoint p = rng.bundle_point(m, s);
      const AdaptedFrame f = adapted_frame(m, p);
      const SasakiOracle S(m, p);
      REQUIRE(int(f.e.size()) == 2 * n + 1);
      std::vector<TmVec<double>> all = f.e;
      TmVec<double> nu{};
      for (int i = 0; i < D; ++i) nu[i] = f.xi[i] / s;
      all.push_back(nu);
      for (size_t a = 0; a < all.size(); ++a)
        for (size_t b = 0; b < all.size(); ++b) {
          const double want = a == b ? 1.0 : 0.0;
          gram = std::max(gram, std::abs(sasaki_inner(m, p, all[a], all[b]) - want));
          gram_oracle = std::max(gram_oracle, std::abs(S.inner(all[a], all[b]) - want));
        }
      // e0 is the horizontal lift of u/s: base part u/s, connection part zero
      Vec3<double> us{};
      for (int i = 0; i < d; ++i) us[i] = p.u[i] / s;
      const Vec3<double> Ke0 = S.K(f.e[0]);
      for (int i = 0; i < d; ++i) e0 = std::max({e0, std::abs(f.e[0][i] - us[i]), std::abs(Ke0[i])});
      // e_{i+n} = B e_i: vertical lift of the base part of e_i
      for (int i = 1; i <= n; ++i) {
        const TmVec<double> v = vertical_lift(d, S.base(f.e[i]));
        mirror = std::max(mirror, max_gap(f.e[i + n], v, D));
      }
      // d(g(u,u)) annihilates every frame vector
      for (const TmVec<double>& y : f.e) {
        const double h = 1e-4;
        auto guu = [&](double t) {
          Vec3<double> x = p.x, u = p.u;
          for (int i = 0; i < d; ++i) {
            x[i] += t * y[i];
            u[i] += t * y[d + i];
          }
          return gdot(m.g(x), u, u, d);
        };
        const double deriv = (8 * (guu(h) - guu(-h)) - (guu(2 * h) - guu(-2 * h))) / (12 * h);
        tangency = std::max(tangency, std::abs(deriv));
      }
      for (size_t a = 0; a < f.e.size(); ++a)
        for (size_t b = 0; b < f.e.size(); ++b)
          dual = std::max(dual, std::abs(dot_cov(f.coframe[a], f.e[b], D) - (a == b ? 1.0 : 0.0)));
      // base frame: g-orthonormal and positively oriented in the chart
      const Mat3<double> g = m.g(p.x);
      for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
          base_gs = std::max(base_gs, std::abs(gdot(g, f.base[a], f.base[b], d) - (a == b ? 1.0 : 0.0)));
      Mat3<double> B{};
      for (int a = 0; a <= n; ++a)
        for (int i = 0; i < d; ++i) B[a * 3 + i] = f.base[a][i];
      CHECK(det3(B, d) > 0);
    }
    INFO(name);
    CHECK(gram < 1e-10);
    CHECK(gram_oracle < 1e-7);
    CHECK(e0 < 1e-7);
    CHECK(mirror < 1e-14);
    CHECK(tangency < 1e-8);
    CHECK(dual < 1e-12);
    CHECK(base_gs < 1e-12);
  }
}

TEST_CASE("adapted frames are deterministic") {
  Rng rng(13);
  const ChartMetric m = make_metric("perturbed");
  for (int k = 0; k < 5; ++k) {
    const BundlePoint p = rng.bundle_point(m, 1.3);
    const AdaptedFrame a = adapted_frame(m, p), b = adapted_frame(m, p);
    CHECK(a.pivot == b.pivot);
    for (size_t i = 0; i < a.e.size(); ++i) CHECK(a.e[i] == b.e[i]);
  }
}

TEST_CASE("horizontal lift examples") {
  const ChartMetric e = make_metric("euclidean3");
  const TmVec<double> flat = horizontal_lift(e, {0.2, 0.1, -0.3}, {0, 1, 0}, {1, 2, 3});
  CHECK(max_gap(flat, TmVec<double>{1, 2, 3, 0, 0, 0}, 6) == 0.0);

  const ChartMetric hs = make_metric("halfspace");
  const Vec3<double> x{0, 0, 1}, u{0, 0, 1}, v{1, 0, 0};
  const TmVec<double> h = horizontal_lift(hs, x, u, v);
  // vertical part −Γ(v, u) with Γ¹₁₃ = −1
  const Tensor3<double> G = christoffel(hs, x);
  for (int k = 0; k < 3; ++k) {
    double c = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c += G[k * 9 + i * 3 + j] * v[i] * u[j];
    CHECK(h[3 + k] == doctest::Approx(-c));
  }
  CHECK(max_gap(h, TmVec<double>{1, 0, 0, 1, 0, 0}, 6) < 1e-14);
}

TEST_CASE("horizontal and vertical lifts are Sasaki orthogonal") {
  Rng rng(14);
  for (const std::string& name : metrics3()) {
    const ChartMetric m = make_metric(name);
    for (int k = 0; k < 10; ++k) {
      const BundlePoint p = rng.bundle_point(m, 1.0);
      const Vec3<double> v = rng.vec(3);
      const TmVec<double> h = horizontal_lift(m, p.x, p.u, v), w = vertical_lift(3, v);
      CHECK(std::abs(sasaki_inner(m, p, h, w)) < 1e-12);
      CHECK(sasaki_inner(m, p, h, h) == doctest::Approx(sasaki_inner(m, p, w, w)).epsilon(1e-12));
    }
  }
}

TEST_CASE("connection map: vertical part of y, and the covariant derivative of ξ along curves") {
  Rng rng(15);
  for (const std::string& name : metrics3()) {
    const ChartMetric m = make_metric(name);
    double split = 0, along_curve = 0;
    for (int k = 0; k < 20; ++k) {
      const BundlePoint p = rng.bundle_point(m, rng.uniform(0.5, 2.0));
      const Vec3<double> a = rng.vec(3), b = rng.vec(3);
      TmVec<double> y = horizontal_lift(m, p.x, p.u, a);
      const TmVec<double> vb = vertical_lift(3, b);
      for (int i = 0; i < 6; ++i) y[i] += vb[i];
      const Vec3<double> K = connection_map(m, p, y);
      for (int i = 0; i < 3; ++i) split = std::max(split, std::abs(K[i] - b[i]));

      // c(t) = (x + t y_x, u + t y_u + t² q); D/dt of u(t) at t = 0 by
      // differences of u(t) plus Γ from the Koszul oracle at x
      const Vec3<double> q = rng.vec(3);
      const double h = 1e-5;
      auto u_at = [&](double t) {
        Vec3<double> r{};
        for (int i = 0; i < 3; ++i) r[i] = p.u[i] + t * y[3 + i] + t * t * q[i];
        return r;
      };
      const Vec3<double> up = u_at(h), um = u_at(-h);
      const Tensor3<double> G = koszul_christoffel(m, p.x);
      for (int c = 0; c < 3; ++c) {
        double Du = (up[c] - um[c]) / (2 * h);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) Du += G[c * 9 + i * 3 + j] * y[i] * p.u[j];
        along_curve = std::max(along_curve, std::abs(Du - b[c]));
      }
    }
    INFO(name);
    CHECK(split < 1e-12);
    CHECK(along_curve < 1e-6);
  }
}

TEST_CASE("mirror map, J and I± relations") {
  Rng rng(16);
  for (const std::string& name : metrics3()) {
    const ChartMetric m = make_metric(name);
    const int D = 6;
    Op id{};
    for (int i = 0; i < D; ++i) id[i * D + i] = 1.0;
    Op minus_id{};
    for (int i = 0; i < D; ++i) minus_id[i * D + i] = -1.0;
    double b_lift = 0, bb = 0, jj = 0, comm = 0, anti = 0, conj = 0, adj = 0, cov = 0, iframe = 0;
    for (int k = 0; k < 20; ++k) {
      const BundlePoint p = rng.bundle_point(m, rng.uniform(0.5, 2.0));
      const MirrorMap mm = mirror_map(m, p);
      const AdaptedFrame f = adapted_frame(m, p);
      const Vec3<double> v = rng.vec(3);
      b_lift = std::max(b_lift, max_gap(mm.apply(mm.B, horizontal_lift(m, p.x, p.u, v)), vertical_lift(3, v), D));
      bb = std::max(bb, op_gap(matmul(mm.B, mm.B, D), Op{}, D));
      jj = std::max(jj, op_gap(matmul(mm.J, mm.J, D), minus_id, D));
      comm = std::max(comm, op_gap(matmul(mm.Iplus, mm.Iminus, D), matmul(mm.Iminus, mm.Iplus, D), D));
      Op neg = matmul(mm.Iminus, mm.J, D);
      for (double& x : neg) x = -x;
      anti = std::max(anti, op_gap(matmul(mm.J, mm.Iminus, D), neg, D));
      // the Sasaki adjoint of J is −J, so J I₊ Jᵗ = −J I₊ J
      Op Jadj = mm.J;
      for (double& x : Jadj) x = -x;
      conj = std::max(conj, op_gap(matmul(matmul(mm.J, mm.Iplus, D), Jadj, D), mm.Iplus, D));
      // Bᵗ is the Sasaki adjoint of B
      const TmVec<double> y = random_tm(rng, D), z = random_tm(rng, D);
      adj = std::max(adj, std::abs(sasaki_inner(m, p, mm.apply(mm.B, y), z) - sasaki_inner(m, p, y, mm.apply(mm.Bt, z))));
      adj = std::max(adj, std::abs(sasaki_inner(m, p, mm.apply(mm.J, y), z) + sasaki_inner(m, p, y, mm.apply(mm.J, z))));
      // e^{n+i} ∘ B = e^i as covectors
      for (int i = 1; i <= 2; ++i)
        for (int c = 0; c < D; ++c) {
          double s = 0;
          for (int r = 0; r < D; ++r) s += f.coframe[i + 2][r] * mm.B[r * D + c];
          cov = std::max(cov, std::abs(s - f.coframe[i][c]));
        }
      // I± on the frame: e0 ↦ 0, e1 ↦ e2 ↦ −e1, e3 ↦ ±e4 ↦ −e3, ξ ↦ 0
      for (double sign : {1.0, -1.0}) {
        const Op& I = sign > 0 ? mm.Iplus : mm.Iminus;
        TmVec<double> zero{};
        TmVec<double> me1 = f.e[1], me3 = f.e[3], se4 = f.e[4], mse3 = f.e[3];
        for (int c = 0; c < D; ++c) {
          me1[c] = -me1[c];
          me3[c] = -me3[c];
          se4[c] = sign * se4[c];
          mse3[c] = -sign * mse3[c];
        }
        iframe = std::max({iframe, max_gap(mm.apply(I, f.e[0]), zero, D), max_gap(mm.apply(I, f.e[1]), f.e[2], D),
                           max_gap(mm.apply(I, f.e[2]), me1, D), max_gap(mm.apply(I, f.e[3]), se4, D),
                           max_gap(mm.apply(I, f.e[4]), mse3, D), max_gap(mm.apply(I, f.xi), zero, D)});
      }
    }
    INFO(name);
    CHECK(b_lift < 1e-14);
    CHECK(bb < 1e-14);
    CHECK(jj < 1e-12);
    CHECK(comm < 1e-12);
    CHECK(anti < 1e-12);
    CHECK(conj < 1e-10);
    CHECK(adj < 1e-12);
    CHECK(cov < 1e-12);
    CHECK(iframe < 1e-12);
  }
}

TEST_CASE("frame rotation keeps e0 and turns the (e1, e2) and (e3, e4) pairs") {
  Rng rng(17);
  const ChartMetric m = make_metric("heisenberg");
  const BundlePoint p = rng.bundle_point(m, 1.0);
  const AdaptedFrame a = adapted_frame(m, p), b = adapted_frame(m, p, 0.7);
  CHECK(max_gap(a.e[0], b.e[0], 6) < 1e-14);
  for (int pair : {1, 3}) {
    TmVec<double> r1{}, r2{};
    for (int i = 0; i < 6; ++i) {
      r1[i] = std::cos(0.7) * a.e[pair][i] + std::sin(0.7) * a.e[pair + 1][i];
      r2[i] = -std::sin(0.7) * a.e[pair][i] + std::cos(0.7) * a.e[pair + 1][i];
    }
    const bool same = max_gap(b.e[pair], r1, 6) < 1e-12 && max_gap(b.e[pair + 1], r2, 6) < 1e-12;
    TmVec<double> r1m{}, r2m{};
    for (int i = 0; i < 6; ++i) {
      r1m[i] = std::cos(0.7) * a.e[pair][i] - std::sin(0.7) * a.e[pair + 1][i];
      r2m[i] = std::sin(0.7) * a.e[pair][i] + std::cos(0.7) * a.e[pair + 1][i];
    }
    const bool other = max_gap(b.e[pair], r1m, 6) < 1e-12 && max_gap(b.e[pair + 1], r2m, 6) < 1e-12;
    CHECK((same || other));
  }
}
