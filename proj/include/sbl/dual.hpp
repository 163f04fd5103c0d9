#pragma once

// Forward-mode dual numbers with a fixed number of derivative directions.
// Nesting (Dual<Dual<double, N>, M>) yields exact higher mixed partials, which
// is how every metric and form derivative in this library is computed when the
// dual backend is selected.

#include <array>
#include <cmath>
#include <type_traits>

namespace sbl {

template <class T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  constexpr Dual() = default;
  constexpr Dual(double c) : v(c) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(const T& value, const std::array<T, N>& grad) : v(value), d(grad) {}

  template <class U = T, std::enable_if_t<!std::is_same_v<U, double>, int> = 0>
  explicit constexpr Dual(const T& value) : v(value) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator*=(double c) {
    v *= c;
    for (auto& x : d) x *= c;
    return *this;
  }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }
  Dual& operator+=(double c) {
    v += c;
    return *this;
  }
  Dual& operator-=(double c) {
    v -= c;
    return *this;
  }

  friend Dual operator-(const Dual& a) {
    Dual r;
    r.v = -a.v;
    for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v / b.v;
    const T inv = T(1.0) / b.v;
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
    return r;
  }
  friend Dual operator+(Dual a, double c) { return a += c; }
  friend Dual operator+(double c, Dual a) { return a += c; }
  friend Dual operator-(Dual a, double c) { return a -= c; }
  friend Dual operator-(double c, const Dual& a) {
    Dual r = -a;
    r.v += c;
    return r;
  }
  friend Dual operator*(Dual a, double c) { return a *= c; }
  friend Dual operator*(double c, Dual a) { return a *= c; }
  friend Dual operator/(Dual a, double c) { return a *= (1.0 / c); }
  friend Dual operator/(double c, const Dual& a) { return Dual(c) / a; }
};

template <class T>
struct is_dual : std::false_type {};
template <class T, int N>
struct is_dual<Dual<T, N>> : std::true_type {};

/// Innermost real value of a (possibly nested) dual number.
inline double value_of(double x) { return x; }
template <class T, int N>
double value_of(const Dual<T, N>& x) {
  return value_of(x.v);
}

namespace detail {
// Chain rule helper: f(a) with f(a.v) = fv and f'(a.v) = dfv.
template <class T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& fv, const T& dfv) {
  Dual<T, N> r;
  r.v = fv;
  for (int i = 0; i < N; ++i) r.d[i] = dfv * a.d[i];
  return r;
}
}  // namespace detail

template <class T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return detail::chain(a, s, T(0.5) / s);
}
template <class T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return detail::chain(a, sin(a.v), cos(a.v));
}
template <class T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return detail::chain(a, cos(a.v), -sin(a.v));
}
template <class T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  using std::exp;
  const T e = exp(a.v);
  return detail::chain(a, e, e);
}
template <class T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
  using std::log;
  return detail::chain(a, log(a.v), T(1.0) / a.v);
}
template <class T, int N>
Dual<T, N> sinh(const Dual<T, N>& a) {
  using std::cosh;
  using std::sinh;
  return detail::chain(a, sinh(a.v), cosh(a.v));
}
template <class T, int N>
Dual<T, N> cosh(const Dual<T, N>& a) {
  using std::cosh;
  using std::sinh;
  return detail::chain(a, cosh(a.v), sinh(a.v));
}
template <class T, int N>
Dual<T, N> tanh(const Dual<T, N>& a) {
  using std::tanh;
  const T t = tanh(a.v);
  return detail::chain(a, t, T(1.0) - t * t);
}

/// Integer power by repeated multiplication (exact for duals).
template <class T>
T ipow(const T& x, int k) {
  T r(1.0);
  for (int i = 0; i < k; ++i) r = r * x;
  return r;
}

}  // namespace sbl
