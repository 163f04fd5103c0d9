#pragma once

// Pointwise exterior algebra over an index space of at most six directions.
// A k-form is stored by its components on strictly increasing multi-indices,
// encoded as bitmasks; antisymmetry is therefore exact by construction.
// Wedge convention: (a∧b)(v,w) = a(v)b(w) − a(w)b(v) (no 1/2 factors).

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sbl/dual.hpp"

namespace sbl {

constexpr int kMaxIndexDim = 6;
constexpr int kMaxComponents = 20;  // C(6,3)

using Mask = std::uint8_t;

/// Masks with popcount k inside an index space of size dim, in lexicographic
/// order of the sorted index tuples.
const std::vector<Mask>& masks_of(int dim, int k);
/// Position of `mask` in masks_of(dim, popcount(mask)).
int mask_rank(int dim, Mask mask);
/// Sign of the shuffle that sorts the concatenation (A, B) of disjoint masks.
int shuffle_sign(Mask a, Mask b);
int binomial(int n, int k);

template <class T>
struct FormValue {
  int degree = 0;
  int dim = 0;
  std::array<T, kMaxComponents> c{};

  FormValue() = default;
  FormValue(int k, int n) : degree(k), dim(n) {
    if (k < 0 || k > n || n > kMaxIndexDim) throw std::invalid_argument("FormValue: bad degree");
  }

  int size() const { return binomial(dim, degree); }
  T& at(Mask m) { return c[mask_rank(dim, m)]; }
  const T& at(Mask m) const { return c[mask_rank(dim, m)]; }

  FormValue& operator+=(const FormValue& o) {
    check_same(o);
    for (int i = 0; i < size(); ++i) c[i] += o.c[i];
    return *this;
  }
  FormValue& operator-=(const FormValue& o) {
    check_same(o);
    for (int i = 0; i < size(); ++i) c[i] -= o.c[i];
    return *this;
  }
  FormValue& operator*=(const T& s) {
    for (int i = 0; i < size(); ++i) c[i] = c[i] * s;
    return *this;
  }
  friend FormValue operator+(FormValue a, const FormValue& b) { return a += b; }
  friend FormValue operator-(FormValue a, const FormValue& b) { return a -= b; }
  friend FormValue operator*(FormValue a, const T& s) { return a *= s; }
  friend FormValue operator*(const T& s, FormValue a) { return a *= s; }

 private:
  void check_same(const FormValue& o) const {
    if (o.degree != degree || o.dim != dim) throw std::invalid_argument("form degree mismatch");
  }
};

template <class T>
FormValue<T> wedge(const FormValue<T>& a, const FormValue<T>& b) {
  if (a.dim != b.dim) throw std::invalid_argument("wedge: index space mismatch");
  if (a.degree + b.degree > a.dim) throw std::invalid_argument("wedge: degree overflow");
  FormValue<T> r(a.degree + b.degree, a.dim);
  const auto& ma = masks_of(a.dim, a.degree);
  const auto& mb = masks_of(b.dim, b.degree);
  for (size_t i = 0; i < ma.size(); ++i) {
    if (value_of(a.c[i]) == 0.0 && !is_dual<T>::value) continue;
    for (size_t j = 0; j < mb.size(); ++j) {
      if (ma[i] & mb[j]) continue;
      const int s = shuffle_sign(ma[i], mb[j]);
      T term = a.c[i] * b.c[j];
      if (s < 0)
        r.at(ma[i] | mb[j]) -= term;
      else
        r.at(ma[i] | mb[j]) += term;
    }
  }
  return r;
}

/// Interior product v⌟ω with v given by components in the same index space.
template <class T, class V>
FormValue<T> interior(const V& v, const FormValue<T>& w) {
  if (w.degree == 0) throw std::invalid_argument("interior: 0-form");
  FormValue<T> r(w.degree - 1, w.dim);
  const auto& mr = masks_of(w.dim, w.degree - 1);
  for (size_t i = 0; i < mr.size(); ++i) {
    T s(0.0);
    for (int j = 0; j < w.dim; ++j) {
      const Mask bit = Mask(1u << j);
      if (mr[i] & bit) continue;
      const int below = std::popcount(unsigned(mr[i] & (bit - 1)));
      const T term = v[j] * w.at(mr[i] | bit);
      if (below % 2) s -= term;
      else s += term;
    }
    r.c[i] = s;
  }
  return r;
}

/// Single covector as a 1-form.
template <class T, class V>
FormValue<T> one_form(const V& comps, int dim) {
  FormValue<T> r(1, dim);
  for (int i = 0; i < dim; ++i) r.c[i] = comps[i];
  return r;
}

/// e^{a1...ak} in the index space (unit component on the sorted mask,
/// signed by the permutation sorting the given order).
template <class T>
FormValue<T> basis_form(int dim, std::initializer_list<int> idx) {
  FormValue<T> r(0, dim);
  r.c[0] = T(1.0);
  for (int i : idx) {
    FormValue<T> e(1, dim);
    e.c[i] = T(1.0);
    r = wedge(r, e);
  }
  return r;
}

/// ω(v1, ..., vk) where each v is indexable by the index-space coordinate.
template <class T, class V>
T evaluate(const FormValue<T>& w, const std::vector<V>& vs) {
  if (int(vs.size()) != w.degree) throw std::invalid_argument("evaluate: wrong number of vectors");
  FormValue<T> blade(0, w.dim);
  blade.c[0] = T(1.0);
  for (const auto& v : vs) blade = wedge(blade, one_form<T>(v, w.dim));
  T s(0.0);
  for (int i = 0; i < w.size(); ++i) s += w.c[i] * blade.c[i];
  return s;
}

/// Euclidean norm of the component vector (frame inner product on Λ^k when
/// the index space is orthonormal).
template <class T>
double max_abs(const FormValue<T>& w) {
  double m = 0;
  for (int i = 0; i < w.size(); ++i) m = std::max(m, std::abs(value_of(w.c[i])));
  return m;
}

inline double norm2(const FormValue<double>& w) {
  double s = 0;
  for (int i = 0; i < w.size(); ++i) s += w.c[i] * w.c[i];
  return s;
}

inline double inner(const FormValue<double>& a, const FormValue<double>& b) {
  if (a.degree != b.degree || a.dim != b.dim) throw std::invalid_argument("inner: mismatch");
  double s = 0;
  for (int i = 0; i < a.size(); ++i) s += a.c[i] * b.c[i];
  return s;
}

/// Hodge star in an oriented orthonormal index space: *e^A = sign(A, A^c) e^{A^c}.
template <class T>
FormValue<T> star(const FormValue<T>& w) {
  FormValue<T> r(w.dim - w.degree, w.dim);
  const Mask full = Mask((1u << w.dim) - 1);
  const auto& ms = masks_of(w.dim, w.degree);
  for (size_t i = 0; i < ms.size(); ++i) {
    const Mask comp = Mask(full & ~ms[i]);
    if (shuffle_sign(ms[i], comp) < 0)
      r.at(comp) -= w.c[i];
    else
      r.at(comp) += w.c[i];
  }
  return r;
}

}  // namespace sbl
