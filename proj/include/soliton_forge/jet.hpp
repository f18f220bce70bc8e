#pragma once

// Truncated multivariate Taylor jets.
//
// A Jet<N> carries the value of a scalar field at a point together with all
// of its partial derivatives up to order N (N <= 3) with respect to the chart
// coordinates. Arithmetic follows the truncated Taylor (Leibniz / Faa di
// Bruno) rules, so derivatives are exact up to floating-point rounding.
//
// Derivative blocks are stored densely. Higher blocks are computed on sorted
// index tuples only and mirrored, so d2 and d3 are exactly symmetric.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "soliton_forge/errors.hpp"

namespace sforge {

template <int Order>
class Jet {
  static_assert(Order >= 0 && Order <= 3, "jets are supported through order 3");

 public:
  static constexpr int order = Order;

  Jet() = default;

  /// Constant jet of the given dimension.
  explicit Jet(int dim, double value = 0.0) : dim_(dim), c_(storage_size(dim), 0.0) {
    c_[0] = value;
  }

  static Jet constant(int dim, double value) { return Jet(dim, value); }

  /// Coordinate function x^index, seeded at `value`.
  static Jet variable(int dim, double value, int index) {
    Jet j(dim, value);
    if constexpr (Order >= 1) j.c_[1 + index] = 1.0;
    return j;
  }

  int dim() const noexcept { return dim_; }
  double value() const noexcept { return c_[0]; }

  double d1(int i) const {
    static_assert(Order >= 1);
    return c_[off1() + i];
  }
  double d2(int i, int j) const {
    static_assert(Order >= 2);
    return c_[off2() + i * dim_ + j];
  }
  double d3(int i, int j, int k) const {
    static_assert(Order >= 3);
    return c_[off3() + (i * dim_ + j) * dim_ + k];
  }

  /// Gradient block as a vector.
  std::vector<double> gradient() const {
    static_assert(Order >= 1);
    return {c_.begin() + off1(), c_.begin() + off1() + dim_};
  }

  /// Partial derivative along coordinate i, one order lower.
  Jet<Order - 1> derivative(int i) const {
    static_assert(Order >= 1);
    Jet<Order - 1> out(dim_, d1(i));
    if constexpr (Order >= 2) {
      for (int a = 0; a < dim_; ++a) out.raw(1 + a) = d2(i, a);
    }
    if constexpr (Order >= 3) {
      for (int a = 0; a < dim_; ++a)
        for (int b = 0; b < dim_; ++b) out.raw(1 + dim_ + a * dim_ + b) = d3(i, a, b);
    }
    return out;
  }

  /// Drop derivative blocks above order M.
  template <int M>
  Jet<M> truncate() const {
    static_assert(M <= Order);
    Jet<M> out(dim_);
    for (std::size_t a = 0; a < Jet<M>::storage_size(dim_); ++a) out.raw(a) = c_[a];
    return out;
  }

  /// True when every derivative entry is exactly zero.
  bool is_constant() const {
    for (std::size_t a = 1; a < c_.size(); ++a)
      if (c_[a] != 0.0) return false;
    return true;
  }

  /// Coordinates with a nonzero first derivative.
  std::vector<int> support() const {
    std::vector<int> out;
    if constexpr (Order >= 1) {
      for (int i = 0; i < dim_; ++i)
        if (d1(i) != 0.0) out.push_back(i);
    }
    return out;
  }

  static std::size_t storage_size(int dim) {
    std::size_t n = 1, p = 1;
    for (int k = 1; k <= Order; ++k) {
      p *= static_cast<std::size_t>(dim);
      n += p;
    }
    return n;
  }

  double& raw(std::size_t a) { return c_[a]; }
  double raw(std::size_t a) const { return c_[a]; }

  Jet& operator+=(const Jet& o) {
    for (std::size_t a = 0; a < c_.size(); ++a) c_[a] += o.c_[a];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t a = 0; a < c_.size(); ++a) c_[a] -= o.c_[a];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = multiply(*this, o); }
  Jet& operator/=(const Jet& o) { return *this = multiply(*this, reciprocal(o)); }
  Jet& operator/=(double s) { return *this *= (1.0 / s); }

  friend Jet operator-(Jet a) {
    for (double& x : a.c_) x = -x;
    return a;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) { return multiply(a, b); }
  friend Jet operator/(const Jet& a, const Jet& b) { return multiply(a, reciprocal(b)); }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a) { return reciprocal(a) *= s; }

  /// Composition phi(a) given phi and its first three derivatives at a.value().
  static Jet compose(const Jet& a, double f0, double f1, double f2, double f3) {
    Jet h(a.dim_, f0);
    const int n = a.dim_;
    if constexpr (Order >= 1) {
      for (int i = 0; i < n; ++i) h.c_[h.off1() + i] = f1 * a.d1(i);
    }
    if constexpr (Order >= 2) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          h.set2(i, j, f2 * a.d1(i) * a.d1(j) + f1 * a.d2(i, j));
    }
    if constexpr (Order >= 3) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k) {
            const double v = f3 * a.d1(i) * a.d1(j) * a.d1(k) +
                             f2 * (a.d2(i, j) * a.d1(k) + a.d2(i, k) * a.d1(j) + a.d2(j, k) * a.d1(i)) +
                             f1 * a.d3(i, j, k);
            h.set3(i, j, k, v);
          }
    }
    return h;
  }

  static Jet multiply(const Jet& a, const Jet& b) {
    const int n = a.dim_;
    Jet h(n, a.value() * b.value());
    const double a0 = a.value(), b0 = b.value();
    if constexpr (Order >= 1) {
      for (int i = 0; i < n; ++i) h.c_[h.off1() + i] = a.d1(i) * b0 + a0 * b.d1(i);
    }
    if constexpr (Order >= 2) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          h.set2(i, j, a.d2(i, j) * b0 + a.d1(i) * b.d1(j) + a.d1(j) * b.d1(i) + a0 * b.d2(i, j));
    }
    if constexpr (Order >= 3) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k) {
            const double v = a.d3(i, j, k) * b0 + a.d2(i, j) * b.d1(k) + a.d2(i, k) * b.d1(j) +
                             a.d2(j, k) * b.d1(i) + a.d1(i) * b.d2(j, k) + a.d1(j) * b.d2(i, k) +
                             a.d1(k) * b.d2(i, j) + a0 * b.d3(i, j, k);
            h.set3(i, j, k, v);
          }
    }
    return h;
  }

  static Jet reciprocal(const Jet& a) {
    const double x = a.value();
    if (x == 0.0) throw DomainError("division by zero", a.support());
    const double r = 1.0 / x;
    return compose(a, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
  }

 private:
  std::size_t off1() const { return 1; }
  std::size_t off2() const { return 1 + static_cast<std::size_t>(dim_); }
  std::size_t off3() const { return off2() + static_cast<std::size_t>(dim_) * dim_; }

  void set2(int i, int j, double v) {
    c_[off2() + i * dim_ + j] = v;
    c_[off2() + j * dim_ + i] = v;
  }
  void set3(int i, int j, int k, double v) {
    const auto at = [&](int p, int q, int r) -> double& { return c_[off3() + (p * dim_ + q) * dim_ + r]; };
    at(i, j, k) = v;
    at(i, k, j) = v;
    at(j, i, k) = v;
    at(j, k, i) = v;
    at(k, i, j) = v;
    at(k, j, i) = v;
  }

  int dim_ = 0;
  std::vector<double> c_ = std::vector<double>(1, 0.0);
};

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;
using Jet3 = Jet<3>;

namespace detail {
inline std::string format_value(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}
}  // namespace detail

template <int N>
Jet<N> log(const Jet<N>& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("ln of non-positive argument " + detail::format_value(x), a.support());
  const double r = 1.0 / x;
  return Jet<N>::compose(a, std::log(x), r, -r * r, 2.0 * r * r * r);
}

template <int N>
Jet<N> exp(const Jet<N>& a) {
  const double e = std::exp(a.value());
  return Jet<N>::compose(a, e, e, e, e);
}

template <int N>
Jet<N> sin(const Jet<N>& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return Jet<N>::compose(a, s, c, -s, -c);
}

template <int N>
Jet<N> cos(const Jet<N>& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return Jet<N>::compose(a, c, -s, -c, s);
}

template <int N>
Jet<N> atan(const Jet<N>& a) {
  const double x = a.value();
  const double q = 1.0 / (1.0 + x * x);
  // d/dx atan = q, q' = -2x q^2, q'' = (6x^2 - 2) q^3
  return Jet<N>::compose(a, std::atan(x), q, -2.0 * x * q * q, (6.0 * x * x - 2.0) * q * q * q);
}

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("sqrt of non-positive argument " + detail::format_value(x), a.support());
  const double s = std::sqrt(x);
  return Jet<N>::compose(a, s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x));
}

/// a^p for a constant exponent. Integer exponents accept negative bases.
template <int N>
Jet<N> pow(const Jet<N>& a, double p) {
  const double x = a.value();
  const bool integral = std::floor(p) == p;
  if (!integral && !(x > 0.0))
    throw DomainError("non-integer power of non-positive argument " + detail::format_value(x), a.support());
  if (x == 0.0 && p < 0.0) throw DomainError("negative power of zero", a.support());
  const auto term = [&](double coeff, double e) { return coeff == 0.0 ? 0.0 : coeff * std::pow(x, e); };
  return Jet<N>::compose(a, std::pow(x, p), term(p, p - 1.0), term(p * (p - 1.0), p - 2.0),
                         term(p * (p - 1.0) * (p - 2.0), p - 3.0));
}

/// General power a^b = exp(b ln a); falls back to the constant-exponent rule.
template <int N>
Jet<N> pow(const Jet<N>& a, const Jet<N>& b) {
  if (b.is_constant()) return pow(a, b.value());
  return exp(b * log(a));
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& x) {
  return x.value();
}

/// Zero of the same shape as `like` (plain 0.0 for doubles).
inline double zero_like(double) { return 0.0; }
template <int N>
Jet<N> zero_like(const Jet<N>& like) {
  return Jet<N>(like.dim());
}

}  // namespace sforge
