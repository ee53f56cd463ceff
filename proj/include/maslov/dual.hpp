#pragma once

// Forward-mode dual numbers with a fixed-capacity tangent. Nesting Dual<Dual<double, N>, N>
// carries value, gradient and Hessian through one evaluation pass.

#include <array>
#include <cmath>

namespace maslov::ad {

inline double primal(double x) { return x; }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double pow(double x, double c) { return std::pow(x, c); }

template <class T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;
  Dual(double c) : v(c) {}  // NOLINT: constants promote implicitly
};

template <class T, int N>
double primal(const Dual<T, N>& x) {
  return primal(x.v);
}

template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.v = -a.v;
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}

template <class T, int N>
Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v + b.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v - b.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

template <class T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v * b.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

template <class T, int N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v / b.v;
  for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
  return r;
}

template <class T, int N>
Dual<T, N> operator*(double c, const Dual<T, N>& a) {
  Dual<T, N> r;
  r.v = c * a.v;
  for (int i = 0; i < N; ++i) r.d[i] = c * a.d[i];
  return r;
}

template <class T, int N>
Dual<T, N> operator/(double c, const Dual<T, N>& a) {
  return Dual<T, N>(c) / a;
}

namespace detail {

// f(x) given f(x.v) and f'(x.v).
template <class T, int N>
Dual<T, N> chain(const Dual<T, N>& x, const T& fx, const T& dfx) {
  Dual<T, N> r;
  r.v = fx;
  for (int i = 0; i < N; ++i) r.d[i] = dfx * x.d[i];
  return r;
}

}  // namespace detail

template <class T, int N>
Dual<T, N> sin(const Dual<T, N>& x) {
  return detail::chain(x, sin(x.v), cos(x.v));
}

template <class T, int N>
Dual<T, N> cos(const Dual<T, N>& x) {
  return detail::chain(x, cos(x.v), T(-sin(x.v)));
}

template <class T, int N>
Dual<T, N> exp(const Dual<T, N>& x) {
  const T e = exp(x.v);
  return detail::chain(x, e, e);
}

template <class T, int N>
Dual<T, N> log(const Dual<T, N>& x) {
  return detail::chain(x, log(x.v), T(1.0 / x.v));
}

template <class T, int N>
Dual<T, N> sqrt(const Dual<T, N>& x) {
  const T s = sqrt(x.v);
  return detail::chain(x, s, T(0.5 / s));
}

template <class T, int N>
Dual<T, N> pow(const Dual<T, N>& x, double c) {
  if (c == 0.0) return Dual<T, N>(1.0);
  return detail::chain(x, pow(x.v, c), T(c * pow(x.v, c - 1.0)));
}

}  // namespace maslov::ad
