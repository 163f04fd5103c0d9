#pragma once

// Differential forms on the tangent-manifold chart T_M (coordinates z = (x, u),
// D = 2m of them), stored as coordinate components over dz^I.
//
// A FormField carries type-erased evaluators for three scalar types:
// double, Dual<double,6> and Dual<Dual<double,6>,6>. Its `depth` says how many
// of these exist, i.e. how many exact (dual-number) exterior derivatives can be
// taken. When a derivative is requested beyond the available depth, or the
// backend is finite differences, d falls back to order-4 central differences.
//
// Forms restricted to the sphere bundle are compared through their components
// on the adapted frame e_0..e_2n (the unit normal is never fed in).

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sbl/form_value.hpp"
#include "sbl/sphere_bundle.hpp"

namespace sbl {

using S0 = double;
using S1 = Dual<double, 6>;
using S2 = Dual<S1, 6>;

template <class T>
using FormFn = std::function<FormValue<T>(const Locus<T>&)>;
template <class T>
using VectorFn = std::function<TmVec<T>(const Locus<T>&)>;

class FormField {
 public:
  FormField() = default;

  const std::string& name() const { return impl_->name; }
  int degree() const { return impl_->degree; }
  int coords() const { return impl_->coords; }
  int depth() const { return impl_->depth; }
  Backend backend() const { return impl_->backend; }
  bool valid() const { return impl_ != nullptr; }

  template <class T>
  FormValue<T> eval(const Locus<T>& at) const {
    if constexpr (std::is_same_v<T, S0>) {
      return impl_->f0(at);
    } else if constexpr (std::is_same_v<T, S1>) {
      if (!impl_->f1) throw std::logic_error("form '" + name() + "' has no first-order evaluator");
      return impl_->f1(at);
    } else {
      static_assert(std::is_same_v<T, S2>, "unsupported scalar type");
      if (!impl_->f2) throw std::logic_error("form '" + name() + "' has no second-order evaluator");
      return impl_->f2(at);
    }
  }
  FormValue<double> operator()(const TmVec<double>& z) const { return eval(Locus<double>{z, {}}); }

  FormField renamed(std::string name) const;

  /// Build from a generic callable f(const Locus<T>&) -> FormValue<T>,
  /// instantiated for the first Depth+1 scalar types.
  template <int Depth, class F>
  static FormField make(std::string name, int degree, int coords, Backend backend, F f) {
    static_assert(Depth >= 0 && Depth <= 2);
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->degree = degree;
    impl->coords = coords;
    impl->backend = backend;
    impl->depth = Depth;
    impl->f0 = [f](const Locus<S0>& l) { return f(l); };
    if constexpr (Depth >= 1) impl->f1 = [f](const Locus<S1>& l) { return f(l); };
    if constexpr (Depth >= 2) impl->f2 = [f](const Locus<S2>& l) { return f(l); };
    FormField r;
    r.impl_ = std::move(impl);
    return r;
  }

  /// Like make, but the available depth is decided at run time (combinators).
  template <class F>
  static FormField compose(std::string name, int degree, int coords, Backend backend, int depth,
                           F f) {
    FormField r = make<2>(std::move(name), degree, coords, backend, std::move(f));
    auto impl = std::make_shared<Impl>(*r.impl_);
    impl->depth = depth;
    if (depth < 2) impl->f2 = nullptr;
    if (depth < 1) impl->f1 = nullptr;
    r.impl_ = std::move(impl);
    return r;
  }

 private:
  struct Impl {
    std::string name;
    int degree = 0;
    int coords = 0;
    int depth = 0;
    Backend backend = Backend::Dual;
    FormFn<S0> f0;
    FormFn<S1> f1;
    FormFn<S2> f2;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Vector field on T_M, same evaluator scheme as FormField.
class VectorField {
 public:
  template <class F>
  static VectorField make(std::string name, int coords, F f) {
    VectorField v;
    v.name_ = std::move(name);
    v.coords_ = coords;
    v.f0_ = [f](const Locus<S0>& l) { return f(l); };
    v.f1_ = [f](const Locus<S1>& l) { return f(l); };
    v.f2_ = [f](const Locus<S2>& l) { return f(l); };
    return v;
  }
  template <class T>
  TmVec<T> eval(const Locus<T>& at) const {
    if constexpr (std::is_same_v<T, S0>)
      return f0_(at);
    else if constexpr (std::is_same_v<T, S1>)
      return f1_(at);
    else
      return f2_(at);
  }
  const std::string& name() const { return name_; }
  int coords() const { return coords_; }

 private:
  std::string name_;
  int coords_ = 0;
  VectorFn<S0> f0_;
  VectorFn<S1> f1_;
  VectorFn<S2> f2_;
};

/// The tautological vertical field ξ_(x,u) = (0, u).
VectorField tautological_field(int dim);

// ---------------------------------------------------------------------------
// Algebra.

FormField operator+(const FormField& a, const FormField& b);
FormField operator-(const FormField& a, const FormField& b);
FormField operator*(double c, const FormField& a);
FormField wedge(const FormField& a, const FormField& b);
FormField interior(const VectorField& v, const FormField& a);
/// Constant-coefficient coordinate form (components given over the masks of `degree`).
FormField constant_form(std::string name, int degree, int coords, const std::vector<double>& comps,
                        Backend backend = Backend::Dual);

// ---------------------------------------------------------------------------
// Exterior derivative.

/// Central-difference step for the exterior derivative at coordinate value z.
inline double form_fd_step(double z) { return 1e-4 * (1.0 + std::abs(z)); }

/// dω. Uses dual numbers when the backend is Dual and ω has depth ≥ 1,
/// otherwise order-4 central differences.
FormField ext_derivative(const FormField& a);
FormField ext_derivative(const FormField& a, Backend backend);

// ---------------------------------------------------------------------------
// Change of basis between coordinate and frame components.

/// Pull a k-form back through a linear map given column-wise:
/// out(A) = Σ_I in_I · det(M[I, A]), with M[i][a] = row i, column a.
template <class T>
FormValue<T> transform_form(const FormValue<T>& w, const std::array<std::array<T, kMaxCoords>, kMaxCoords>& M,
                            int out_dim) {
  const int k = w.degree;
  FormValue<T> r(k, out_dim);
  const auto& in_masks = masks_of(w.dim, k);
  const auto& out_masks = masks_of(out_dim, k);
  if (k == 0) {
    r.c[0] = w.c[0];
    return r;
  }
  for (size_t oa = 0; oa < out_masks.size(); ++oa) {
    int cols[kMaxCoords];
    int nc = 0;
    for (int a = 0; a < out_dim; ++a)
      if (out_masks[oa] & (1u << a)) cols[nc++] = a;
    T acc(0.0);
    for (size_t ii = 0; ii < in_masks.size(); ++ii) {
      int rows[kMaxCoords];
      int nr = 0;
      for (int i = 0; i < w.dim; ++i)
        if (in_masks[ii] & (1u << i)) rows[nr++] = i;
      // determinant of the k×k minor by Laplace expansion (k ≤ 3 here)
      T det;
      if (k == 1) {
        det = M[rows[0]][cols[0]];
      } else if (k == 2) {
        det = M[rows[0]][cols[0]] * M[rows[1]][cols[1]] - M[rows[0]][cols[1]] * M[rows[1]][cols[0]];
      } else if (k == 3) {
        auto e = [&](int r_, int c_) -> const T& { return M[rows[r_]][cols[c_]]; };
        det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) -
              e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
              e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
      } else {
        // general k: Leibniz via wedge of rows
        FormValue<T> blade(0, k);
        blade.c[0] = T(1.0);
        for (int r_ = 0; r_ < k; ++r_) {
          FormValue<T> row(1, k);
          for (int c_ = 0; c_ < k; ++c_) row.c[c_] = M[rows[r_]][cols[c_]];
          blade = wedge(blade, row);
        }
        det = blade.c[0];
      }
      acc += w.c[ii] * det;
    }
    r.c[oa] = acc;
  }
  return r;
}

/// Components ω(e_A) on the adapted frame e_0..e_2n (index space 2n+1).
template <class T>
FormValue<T> to_frame(const FormValue<T>& w, const FrameT<T>& f) {
  std::array<std::array<T, kMaxCoords>, kMaxCoords> M{};
  for (int i = 0; i < f.coords(); ++i)
    for (int a = 0; a < f.bundle_dim(); ++a) M[i][a] = f.E[a][i];
  return transform_form(w, M, f.bundle_dim());
}

/// Coordinate components of Σ c_A e^A built from the adapted coframe.
template <class T>
FormValue<T> from_frame(const FormValue<T>& c, const FrameT<T>& f) {
  std::array<std::array<T, kMaxCoords>, kMaxCoords> M{};
  for (int a = 0; a < f.bundle_dim(); ++a)
    for (int i = 0; i < f.coords(); ++i) M[a][i] = f.coE[a][i];
  return transform_form(c, M, f.coords());
}

/// Form defined by its adapted-frame components: f(frame, locus) -> FormValue
/// in the (2n+1)-dimensional frame index space. The result carries no
/// component along the unit normal.
template <int Depth, class F>
FormField frame_form(std::string name, int degree, const ChartMetric& metric, F f,
                     double rotation = 0.0) {
  const int coords = 2 * metric.dim();
  return FormField::make<Depth>(std::move(name), degree, coords, metric.backend(),
                                [metric, f, rotation](const auto& at) {
                                  const auto fr = adapted_frame_t(metric, at, rotation);
                                  return from_frame(f(fr, at), fr);
                                });
}

// ---------------------------------------------------------------------------
// Metric operators on the sphere bundle (adapted frame, orientation e^{01…2n}).

FormField hodge_star(const FormField& a, const ChartMetric& metric, double rotation = 0.0);
/// δ = −*d*.
FormField codifferential(const FormField& a, const ChartMetric& metric);
/// Δ = dδ + δd.
FormField laplacian(const FormField& a, const ChartMetric& metric);

/// Frame components of a form at a point (index space 2n+1).
FormValue<double> frame_values(const FormField& a, const ChartMetric& metric,
                               const Locus<double>& at, double rotation = 0.0);
/// max over adapted-frame k-tuples of |a − b|.
double frame_residual(const FormField& a, const FormField& b, const ChartMetric& metric,
                      const Locus<double>& at);
double frame_norm(const FormField& a, const ChartMetric& metric, const Locus<double>& at);

/// Evaluation restricted to vectors tangent to the sphere bundle.
class RestrictedForm {
 public:
  RestrictedForm(FormField form, ChartMetric metric) : form_(std::move(form)), metric_(std::move(metric)) {}
  const FormField& form() const { return form_; }
  /// ω(v_1..v_k); throws GeometryError if some v has a normal component
  /// above tol (relative to its Sasaki length).
  double evaluate(const BundlePoint& p, const std::vector<TmVec<double>>& vs, double tol = 1e-9) const;
  FormValue<double> frame_components(const BundlePoint& p) const;

 private:
  FormField form_;
  ChartMetric metric_;
};

// ---------------------------------------------------------------------------
// Decomposition of 2-forms on the 5-dimensional bundle (n = 2).

struct WDecomposition {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;  // α₀, α₁, α₂, dθ
  std::array<double, 2> w1{};             // e^{01}, e^{02}
  std::array<double, 2> w2{};             // e^{03}, e^{04}
  std::array<double, 2> w3{};             // f₁ = e^{14}+e^{23}, f₂ = e^{31}−e^{42}
  double residual = 0;                    // reconstruction error

  FormValue<double> reconstruct() const;
};

/// The ten basis 2-forms of the decomposition in frame components, in the
/// order α₀, α₁, α₂, dθ, e^{01}, e^{02}, e^{03}, e^{04}, f₁, f₂.
const std::array<FormValue<double>, 10>& w_basis();
WDecomposition w_decompose(const FormValue<double>& frame2form);

}  // namespace sbl
