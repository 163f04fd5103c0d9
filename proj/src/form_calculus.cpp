#include "sbl/form_calculus.hpp"

#include <algorithm>
#include <cmath>

namespace sbl {

FormField FormField::renamed(std::string name) const {
  FormField r;
  auto impl = std::make_shared<Impl>(*impl_);
  impl->name = std::move(name);
  r.impl_ = std::move(impl);
  return r;
}

VectorField tautological_field(int dim) {
  return VectorField::make("xi", 2 * dim, [dim](const auto& at) {
    using T = std::decay_t<decltype(at.z[0])>;
    TmVec<T> v{};
    for (int i = 0; i < dim; ++i) v[dim + i] = at.z[dim + i];
    return v;
  });
}

namespace {

void require_same_space(const FormField& a, const FormField& b, const char* what) {
  if (a.coords() != b.coords()) throw std::invalid_argument(std::string(what) + ": chart mismatch");
}

Backend joint_backend(const FormField& a, const FormField& b) {
  return (a.backend() == Backend::FiniteDifference || b.backend() == Backend::FiniteDifference)
             ? Backend::FiniteDifference
             : Backend::Dual;
}

template <class T>
constexpr int scalar_level() {
  if constexpr (std::is_same_v<T, S0>)
    return 0;
  else if constexpr (std::is_same_v<T, S1>)
    return 1;
  else
    return 2;
}

template <class T>
FormValue<T> d_fd(const FormField& a, const Locus<T>& at) {
  const int D = a.coords();
  const int k = a.degree();
  Locus<T> l = at;
  if (!l.anchor) {
    TmVec<double> anchor{};
    for (int i = 0; i < D; ++i) anchor[i] = value_of(at.z[i]);
    l.anchor = anchor;
  }
  FormValue<T> r(k + 1, D);
  for (int j = 0; j < D; ++j) {
    const double h = form_fd_step(value_of(at.z[j]));
    auto shifted = [&](double t) {
      Locus<T> s = l;
      s.z[j] = s.z[j] + t;
      return a.eval(s);
    };
    const FormValue<T> fm2 = shifted(-2 * h), fm1 = shifted(-h), fp1 = shifted(h),
                       fp2 = shifted(2 * h);
    FormValue<T> deriv(k, D);
    for (int i = 0; i < deriv.size(); ++i)
      deriv.c[i] = (fm2.c[i] - 8.0 * fm1.c[i] + 8.0 * fp1.c[i] - fp2.c[i]) * (1.0 / (12.0 * h));
    FormValue<T> dz(1, D);
    dz.c[j] = T(1.0);
    r += wedge(dz, deriv);
  }
  return r;
}

template <class T>
FormValue<T> d_dual(const FormField& a, const Locus<T>& at) {
  using DT = Dual<T, 6>;
  const int D = a.coords();
  const int k = a.degree();
  Locus<DT> l;
  l.anchor = at.anchor;
  for (int j = 0; j < kMaxCoords; ++j) l.z[j] = detail::seed<T, 6>(at.z[j], j < D ? j : -1);
  const FormValue<DT> w = a.eval(l);
  FormValue<T> r(k + 1, D);
  for (int j = 0; j < D; ++j) {
    FormValue<T> deriv(k, D);
    for (int i = 0; i < deriv.size(); ++i) deriv.c[i] = w.c[i].d[j];
    FormValue<T> dz(1, D);
    dz.c[j] = T(1.0);
    r += wedge(dz, deriv);
  }
  return r;
}

}  // namespace

FormField operator+(const FormField& a, const FormField& b) {
  require_same_space(a, b, "sum");
  return FormField::compose("(" + a.name() + " + " + b.name() + ")", a.degree(), a.coords(),
                            joint_backend(a, b), std::min(a.depth(), b.depth()),
                            [a, b](const auto& at) { return a.eval(at) + b.eval(at); });
}

FormField operator-(const FormField& a, const FormField& b) {
  require_same_space(a, b, "difference");
  return FormField::compose("(" + a.name() + " - " + b.name() + ")", a.degree(), a.coords(),
                            joint_backend(a, b), std::min(a.depth(), b.depth()),
                            [a, b](const auto& at) { return a.eval(at) - b.eval(at); });
}

FormField operator*(double c, const FormField& a) {
  return FormField::compose(a.name(), a.degree(), a.coords(), a.backend(), a.depth(),
                            [a, c](const auto& at) {
                              auto w = a.eval(at);
                              for (auto& x : w.c) x = x * c;
                              return w;
                            });
}

FormField wedge(const FormField& a, const FormField& b) {
  require_same_space(a, b, "wedge");
  if (a.degree() + b.degree() > a.coords()) throw std::invalid_argument("wedge: degree overflow");
  return FormField::compose(a.name() + "^" + b.name(), a.degree() + b.degree(), a.coords(),
                            joint_backend(a, b), std::min(a.depth(), b.depth()),
                            [a, b](const auto& at) { return wedge(a.eval(at), b.eval(at)); });
}

FormField interior(const VectorField& v, const FormField& a) {
  if (a.degree() == 0) throw std::invalid_argument("interior product of a 0-form");
  return FormField::compose(v.name() + "_|" + a.name(), a.degree() - 1, a.coords(), a.backend(),
                            a.depth(),
                            [v, a](const auto& at) { return interior(v.eval(at), a.eval(at)); });
}

FormField constant_form(std::string name, int degree, int coords, const std::vector<double>& comps,
                        Backend backend) {
  if (int(comps.size()) != binomial(coords, degree))
    throw std::invalid_argument("constant_form: wrong number of components");
  return FormField::make<2>(std::move(name), degree, coords, backend,
                            [degree, coords, comps](const auto& at) {
                              using T = std::decay_t<decltype(at.z[0])>;
                              FormValue<T> w(degree, coords);
                              for (size_t i = 0; i < comps.size(); ++i) w.c[i] = T(comps[i]);
                              return w;
                            });
}

FormField ext_derivative(const FormField& a) { return ext_derivative(a, a.backend()); }

FormField ext_derivative(const FormField& a, Backend backend) {
  if (a.degree() >= a.coords()) throw std::invalid_argument("d of a top-degree form");
  const bool exact = backend == Backend::Dual && a.depth() >= 1;
  const int depth = exact ? a.depth() - 1 : a.depth();
  return FormField::compose("d" + a.name(), a.degree() + 1, a.coords(), backend, depth,
                            [a, backend](const auto& at) {
                              using T = std::decay_t<decltype(at.z[0])>;
                              if constexpr (scalar_level<T>() < 2) {
                                if (backend == Backend::Dual && a.depth() > scalar_level<T>())
                                  return d_dual(a, at);
                              }
                              return d_fd(a, at);
                            });
}

FormField hodge_star(const FormField& a, const ChartMetric& metric, double rotation) {
  const int top = 2 * metric.dim() - 1;
  if (a.coords() != 2 * metric.dim()) throw std::invalid_argument("hodge_star: chart mismatch");
  if (a.degree() > top) throw std::invalid_argument("hodge_star: degree exceeds bundle dimension");
  return FormField::compose("*" + a.name(), top - a.degree(), a.coords(), a.backend(), a.depth(),
                            [a, metric, rotation](const auto& at) {
                              const auto fr = adapted_frame_t(metric, at, rotation);
                              return from_frame(star(to_frame(a.eval(at), fr)), fr);
                            });
}

FormField codifferential(const FormField& a, const ChartMetric& metric) {
  if (a.degree() == 0) throw std::invalid_argument("codifferential of a 0-form");
  return (-1.0 * hodge_star(ext_derivative(hodge_star(a, metric)), metric))
      .renamed("delta" + a.name());
}

FormField laplacian(const FormField& a, const ChartMetric& metric) {
  const FormField dd = codifferential(ext_derivative(a), metric);
  if (a.degree() == 0) return dd.renamed("Lap" + a.name());
  return (ext_derivative(codifferential(a, metric)) + dd).renamed("Lap" + a.name());
}

FormValue<double> frame_values(const FormField& a, const ChartMetric& metric,
                               const Locus<double>& at, double rotation) {
  const FrameT<double> fr = adapted_frame_t(metric, at, rotation);
  return to_frame(a.eval(at), fr);
}

double frame_residual(const FormField& a, const FormField& b, const ChartMetric& metric,
                      const Locus<double>& at) {
  if (a.degree() != b.degree()) throw std::invalid_argument("frame_residual: degree mismatch");
  const FrameT<double> fr = adapted_frame_t(metric, at);
  return max_abs(to_frame(a.eval(at), fr) - to_frame(b.eval(at), fr));
}

double frame_norm(const FormField& a, const ChartMetric& metric, const Locus<double>& at) {
  return max_abs(frame_values(a, metric, at));
}

double RestrictedForm::evaluate(const BundlePoint& p, const std::vector<TmVec<double>>& vs,
                                double tol) const {
  const int dim = metric_.dim();
  const FrameT<double> fr = adapted_frame_t(metric_, p.locus(dim));
  for (const auto& v : vs) {
    const double len = std::sqrt(sasaki_inner_t(fr.g, fr.gamma, p.u, v, v, dim));
    const double normal = sasaki_inner_t(fr.g, fr.gamma, p.u, v, fr.E[2 * fr.n + 1], dim);
    if (std::abs(normal) > tol * std::max(1.0, len))
      throw GeometryError("vector not tangent to the sphere bundle");
  }
  return sbl::evaluate(form_.eval(p.locus(dim)), vs);
}

FormValue<double> RestrictedForm::frame_components(const BundlePoint& p) const {
  return frame_values(form_, metric_, p.locus(metric_.dim()));
}

const std::array<FormValue<double>, 10>& w_basis() {
  static const std::array<FormValue<double>, 10> basis = [] {
    using F = FormValue<double>;
    auto e = [](int a, int b) { return basis_form<double>(5, {a, b}); };
    return std::array<F, 10>{e(1, 2),           e(1, 4) - e(2, 3), e(3, 4),
                             e(3, 1) + e(4, 2), e(0, 1),           e(0, 2),
                             e(0, 3),           e(0, 4),           e(1, 4) + e(2, 3),
                             e(3, 1) - e(4, 2)};
  }();
  return basis;
}

FormValue<double> WDecomposition::reconstruct() const {
  const auto& b = w_basis();
  const double coef[10] = {a0, a1, a2, a3, w1[0], w1[1], w2[0], w2[1], w3[0], w3[1]};
  FormValue<double> r(2, 5);
  for (int i = 0; i < 10; ++i) r += coef[i] * b[i];
  return r;
}

WDecomposition w_decompose(const FormValue<double>& w) {
  if (w.degree != 2 || w.dim != 5) throw std::invalid_argument("w_decompose expects a 2-form on a 5-dimensional frame");
  const auto& b = w_basis();
  double coef[10];
  for (int i = 0; i < 10; ++i) coef[i] = inner(w, b[i]) / norm2(b[i]);
  WDecomposition d;
  d.a0 = coef[0];
  d.a1 = coef[1];
  d.a2 = coef[2];
  d.a3 = coef[3];
  d.w1 = {coef[4], coef[5]};
  d.w2 = {coef[6], coef[7]};
  d.w3 = {coef[8], coef[9]};
  d.residual = max_abs(d.reconstruct() - w);
  return d;
}

}  // namespace sbl
