#pragma once

// Dense tensor components at a point.
//
// Slot order: contravariant slots first, then covariant slots. Components are
// stored row-major with slot 0 most significant. The element type is either
// double (plain components) or a Jet (components together with their partial
// derivatives), so the same contraction code serves both.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "soliton_forge/errors.hpp"
#include "soliton_forge/jet.hpp"

namespace sforge {

struct Valence {
  int up = 0;
  int down = 0;

  int rank() const noexcept { return up + down; }
  friend bool operator==(const Valence&, const Valence&) = default;
};

enum class IndexMove { raise, lower };

template <class T>
class Tensor {
 public:
  Tensor() = default;

  Tensor(Valence valence, int dim, const T& fill)
      : valence_(valence), dim_(dim), data_(checked_size(valence, dim), fill) {}

  Tensor(Valence valence, int dim, std::vector<T> data) : valence_(valence), dim_(dim), data_(std::move(data)) {
    if (data_.size() != checked_size(valence, dim)) throw UsageError("tensor data length does not match dim^(r+s)");
  }

  Valence valence() const noexcept { return valence_; }
  int rank() const noexcept { return valence_.rank(); }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  template <class... I>
  T& operator()(I... idx) {
    return data_[flat(idx...)];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return data_[flat(idx...)];
  }

  T& at(std::span<const int> idx) { return data_[flat_span(idx)]; }
  const T& at(std::span<const int> idx) const { return data_[flat_span(idx)]; }

  /// Decode a flat position into a multi-index.
  void unflatten(std::size_t pos, std::span<int> idx) const {
    for (int s = rank() - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(pos % static_cast<std::size_t>(dim_));
      pos /= static_cast<std::size_t>(dim_);
    }
  }

  std::size_t flat_span(std::span<const int> idx) const {
    std::size_t pos = 0;
    for (int i : idx) pos = pos * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    return pos;
  }

  Tensor& operator+=(const Tensor& o) {
    require_same_shape(o);
    for (std::size_t a = 0; a < data_.size(); ++a) data_[a] += o.data_[a];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    require_same_shape(o);
    for (std::size_t a = 0; a < data_.size(); ++a) data_[a] -= o.data_[a];
    return *this;
  }
  Tensor& operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double s) { return a *= s; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }

 private:
  static std::size_t checked_size(Valence v, int dim) {
    if (v.up < 0 || v.down < 0 || dim < 1) throw UsageError("invalid tensor shape");
    std::size_t n = 1;
    for (int s = 0; s < v.rank(); ++s) n *= static_cast<std::size_t>(dim);
    return n;
  }

  template <class... I>
  std::size_t flat(I... idx) const {
    std::size_t pos = 0;
    ((pos = pos * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx)), ...);
    return pos;
  }

  void require_same_shape(const Tensor& o) const {
    if (!(o.valence_ == valence_) || o.dim_ != dim_) throw UsageError("tensor shapes differ");
  }

  Valence valence_{};
  int dim_ = 1;
  std::vector<T> data_ = std::vector<T>(1);
};

using TensorComponents = Tensor<double>;

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> zeros_like(Valence v, int dim, const T& like) {
  return Tensor<T>(v, dim, zero_like(like));
}

inline TensorComponents zeros(Valence v, int dim) { return TensorComponents(v, dim, 0.0); }

inline TensorComponents identity_11(int dim) {
  TensorComponents id = zeros({1, 1}, dim);
  for (int i = 0; i < dim; ++i) id(i, i) = 1.0;
  return id;
}

/// Plain component values of a jet tensor.
template <int N>
TensorComponents values(const Tensor<Jet<N>>& t) {
  TensorComponents out = zeros(t.valence(), t.dim());
  for (std::size_t a = 0; a < t.size(); ++a) out.data()[a] = t.data()[a].value();
  return out;
}

inline const TensorComponents& values(const TensorComponents& t) { return t; }

template <int M, int N>
Tensor<Jet<M>> truncate(const Tensor<Jet<N>>& t) {
  std::vector<Jet<M>> data;
  data.reserve(t.size());
  for (const auto& x : t.data()) data.push_back(x.template truncate<M>());
  return Tensor<Jet<M>>(t.valence(), t.dim(), std::move(data));
}

/// Partial derivative of every component along coordinate i.
template <int N>
Tensor<Jet<N - 1>> partial(const Tensor<Jet<N>>& t, int i) {
  std::vector<Jet<N - 1>> data;
  data.reserve(t.size());
  for (const auto& x : t.data()) data.push_back(x.derivative(i));
  return Tensor<Jet<N - 1>>(t.valence(), t.dim(), std::move(data));
}

// ---------------------------------------------------------------------------
// Algebra
// ---------------------------------------------------------------------------

/// Outer product. Result slots: ups of a, ups of b, downs of a, downs of b.
template <class T>
Tensor<T> tensor_product(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.dim() != b.dim()) throw UsageError("tensor_product: dimensions differ");
  const Valence va = a.valence(), vb = b.valence();
  const Valence v{va.up + vb.up, va.down + vb.down};
  Tensor<T> out = zeros_like(v, a.dim(), a.data()[0]);
  std::vector<int> idx(v.rank()), ia(va.rank()), ib(vb.rank());
  for (std::size_t pos = 0; pos < out.size(); ++pos) {
    out.unflatten(pos, idx);
    for (int s = 0; s < va.up; ++s) ia[s] = idx[s];
    for (int s = 0; s < vb.up; ++s) ib[s] = idx[va.up + s];
    for (int s = 0; s < va.down; ++s) ia[va.up + s] = idx[va.up + vb.up + s];
    for (int s = 0; s < vb.down; ++s) ib[vb.up + s] = idx[va.up + vb.up + va.down + s];
    out.data()[pos] = a.at(ia) * b.at(ib);
  }
  return out;
}

/// Sum over a contravariant slot paired with a covariant slot.
/// `slot_up` counts among contravariant slots, `slot_down` among covariant ones.
template <class T>
Tensor<T> contract(const Tensor<T>& t, int slot_up, int slot_down) {
  const Valence v = t.valence();
  if (slot_up < 0 || slot_up >= v.up) throw UsageError("contract: slot_up is not a contravariant slot");
  if (slot_down < 0 || slot_down >= v.down) throw UsageError("contract: slot_down is not a covariant slot");
  const Valence rv{v.up - 1, v.down - 1};
  const int dim = t.dim();
  Tensor<T> out = zeros_like(rv, dim, t.data()[0]);
  const int su = slot_up, sd = v.up + slot_down;
  std::vector<int> ridx(rv.rank()), idx(v.rank());
  for (std::size_t pos = 0; pos < out.size(); ++pos) {
    out.unflatten(pos, ridx);
    int r = 0;
    for (int s = 0; s < v.rank(); ++s) {
      if (s == su || s == sd) continue;
      idx[s] = ridx[r++];
    }
    T acc = zero_like(t.data()[0]);
    for (int k = 0; k < dim; ++k) {
      idx[su] = k;
      idx[sd] = k;
      acc += t.at(idx);
    }
    out.data()[pos] = acc;
  }
  return out;
}

/// Flip the variance of one slot by contracting with g (lower) or g^-1 (raise).
/// A lowered slot becomes the first covariant slot; a raised slot becomes the
/// last contravariant slot. `metric` must be (0,2) to lower and (2,0) to raise.
template <class T>
Tensor<T> musical(const Tensor<T>& t, const Tensor<T>& metric, int slot, IndexMove move) {
  const Valence v = t.valence();
  if (metric.dim() != t.dim()) throw UsageError("musical: dimensions differ");
  if (move == IndexMove::lower) {
    if (!(metric.valence() == Valence{0, 2})) throw UsageError("musical: lowering needs a (0,2) metric");
    if (slot < 0 || slot >= v.up) throw UsageError("musical: slot is not contravariant");
    // g_{ja} T^{..a..}: product slots up(T without a.., a) -> contract a with g's second slot
    Tensor<T> prod = tensor_product(metric, t);  // ups of T, then g_{j a}, then downs of T
    Tensor<T> c = contract(prod, slot, 1);       // ups of T minus slot, g_j, downs of T
    return c;
  }
  if (!(metric.valence() == Valence{2, 0})) throw UsageError("musical: raising needs a (2,0) inverse metric");
  if (slot < 0 || slot >= v.down) throw UsageError("musical: slot is not covariant");
  Tensor<T> prod = tensor_product(t, metric);  // ups of T, g^{a j}, downs of T
  Tensor<T> c = contract(prod, v.up, slot);    // ups of T, g^j, downs of T minus slot
  return c;
}

// ---------------------------------------------------------------------------
// Dense linear algebra over doubles or jets
// ---------------------------------------------------------------------------

inline bool is_exact_zero(double x) { return x == 0.0; }
template <int N>
bool is_exact_zero(const Jet<N>& x) {
  return x.value() == 0.0 && x.is_constant();
}

/// Row-major square matrix solve with partial pivoting on the values.
/// Throws SingularMetricError when a pivot is negligible.
template <class T>
std::vector<T> solve_linear(std::vector<T> a, std::vector<T> b, int n, const char* what = "matrix") {
  double scale = 0.0;
  for (const auto& x : a) scale = std::max(scale, std::abs(value_of(x)));
  double pmin = INFINITY, pmax = 0.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(value_of(a[r * n + col])) > std::abs(value_of(a[piv * n + col]))) piv = r;
    const double p = std::abs(value_of(a[piv * n + col]));
    if (!(p > 1e-14 * scale) || scale == 0.0) {
      const double cond = p == 0.0 || pmax == 0.0 ? INFINITY : std::max(pmax, scale) / p;
      throw SingularMetricError(std::string(what) + " is singular (condition estimate " +
                                    detail::format_value(cond) + ")",
                                cond);
    }
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    const T inv = 1.0 / a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const T m = a[r * n + col] * inv;
      if (is_exact_zero(m)) continue;
      for (int c = col; c < n; ++c) a[r * n + c] -= m * a[col * n + c];
      b[r] -= m * b[col];
    }
  }
  std::vector<T> x(b);
  for (int r = n - 1; r >= 0; --r) {
    T acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r * n + c] * x[c];
    x[r] = acc / a[r * n + r];
  }
  return x;
}

/// Inverse of a symmetric (0,2) metric, returned as a (2,0) tensor.
template <class T>
Tensor<T> inverse_metric(const Tensor<T>& g) {
  if (!(g.valence() == Valence{0, 2})) throw UsageError("inverse_metric: expected a (0,2) tensor");
  const int n = g.dim();
  const T zero = zero_like(g.data()[0]);
  Tensor<T> inv = zeros_like({2, 0}, n, g.data()[0]);
  std::vector<T> a(g.data().begin(), g.data().end());
  // Solve column by column; n is small.
  for (int col = 0; col < n; ++col) {
    std::vector<T> e(n, zero);
    e[col] += 1.0;
    std::vector<T> x = solve_linear(a, std::move(e), n, "metric");
    for (int r = 0; r < n; ++r) inv(r, col) = x[r];
  }
  return inv;
}

inline double frobenius_norm(const TensorComponents& t) {
  double s = 0.0;
  for (double x : t.data()) s += x * x;
  return std::sqrt(s);
}

inline double max_abs(const TensorComponents& t) {
  double m = 0.0;
  for (double x : t.data()) m = std::max(m, std::abs(x));
  return m;
}

inline double frobenius_inner(const TensorComponents& a, const TensorComponents& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

}  // namespace sforge
