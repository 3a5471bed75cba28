#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "xp/error.hpp"

// Truncated multivariate Taylor arithmetic (n <= 3 variables, total degree
// <= kMaxTableOrder). Coefficients are stored per graded monomial basis so the
// derivative of multi-index a is a! * c[a].

namespace xp {

inline constexpr int kMaxDim = 3;
inline constexpr int kMaxTableOrder = 10;

using MultiIndex = std::array<int, kMaxDim>;

inline int total_order(const MultiIndex& a) { return a[0] + a[1] + a[2]; }

class MonomialBasis {
 public:
  struct Product {
    int lhs, rhs, out;
  };

  static const MonomialBasis& get(int n, int m) {
    static const auto table = build_all();
    if (n < 1 || n > kMaxDim) throw Error(ErrorCode::BadParams, "dimension must be 1, 2 or 3");
    if (m < 0 || m > kMaxTableOrder) throw Error(ErrorCode::JetOrderExceeded, "order beyond table limit");
    return *table[(n - 1) * (kMaxTableOrder + 1) + m];
  }

  int dim() const { return n_; }
  int order() const { return m_; }
  int size() const { return static_cast<int>(alphas_.size()); }
  const MultiIndex& operator[](int i) const { return alphas_[i]; }
  std::span<const MultiIndex> alphas() const { return alphas_; }

  /// Position of `a` in the graded ordering, or -1.
  int index_of(const MultiIndex& a) const {
    for (int d = n_; d < kMaxDim; ++d)
      if (a[d] != 0) return -1;
    if (a[0] < 0 || a[1] < 0 || a[2] < 0 || total_order(a) > m_) return -1;
    return lookup_[(a[0] * (m_ + 1) + a[1]) * (m_ + 1) + a[2]];
  }

  /// Indices [first_of_order(d), first_of_order(d + 1)) have total order d.
  int first_of_order(int d) const { return offsets_[d]; }
  int count_of_order(int d) const { return offsets_[d + 1] - offsets_[d]; }

  double factorial_weight(int i) const { return weights_[i]; }
  std::span<const Product> products() const { return products_; }

 private:
  MonomialBasis(int n, int m) : n_(n), m_(m) {
    offsets_.push_back(0);
    for (int d = 0; d <= m; ++d) {
      for (int a0 = d; a0 >= 0; --a0) {
        if (n == 1) {
          if (a0 == d) alphas_.push_back({a0, 0, 0});
          continue;
        }
        for (int a1 = d - a0; a1 >= 0; --a1) {
          int a2 = d - a0 - a1;
          if (n == 2 && a2 != 0) continue;
          alphas_.push_back({a0, a1, a2});
        }
      }
      offsets_.push_back(static_cast<int>(alphas_.size()));
    }
    lookup_.assign(static_cast<std::size_t>((m + 1) * (m + 1) * (m + 1)), -1);
    for (int i = 0; i < size(); ++i) {
      const auto& a = alphas_[i];
      lookup_[(a[0] * (m + 1) + a[1]) * (m + 1) + a[2]] = i;
      double w = 1.0;
      for (int d = 0; d < kMaxDim; ++d)
        for (int j = 2; j <= a[d]; ++j) w *= j;
      weights_.push_back(w);
    }
    for (int i = 0; i < size(); ++i)
      for (int j = 0; j < size(); ++j) {
        const auto& a = alphas_[i];
        const auto& b = alphas_[j];
        if (total_order(a) + total_order(b) > m) continue;
        MultiIndex c{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
        products_.push_back({i, j, index_of(c)});
      }
  }

  static std::vector<std::unique_ptr<MonomialBasis>> build_all() {
    std::vector<std::unique_ptr<MonomialBasis>> all;
    for (int n = 1; n <= kMaxDim; ++n)
      for (int m = 0; m <= kMaxTableOrder; ++m) all.emplace_back(new MonomialBasis(n, m));
    return all;
  }

  int n_;
  int m_;
  std::vector<MultiIndex> alphas_;
  std::vector<int> offsets_;
  std::vector<int> lookup_;
  std::vector<double> weights_;
  std::vector<Product> products_;
};

class Taylor {
 public:
  explicit Taylor(const MonomialBasis& basis, double constant = 0.0)
      : basis_(&basis), c_(static_cast<std::size_t>(basis.size()), 0.0) {
    c_[0] = constant;
  }

  /// The coordinate function x_axis expanded around `at`.
  static Taylor variable(const MonomialBasis& basis, int axis, double at) {
    Taylor t(basis, at);
    if (basis.order() >= 1) {
      MultiIndex e{0, 0, 0};
      e[axis] = 1;
      t.c_[basis.index_of(e)] = 1.0;
    }
    return t;
  }

  const MonomialBasis& basis() const { return *basis_; }
  double constant() const { return c_[0]; }
  std::span<const double> coefficients() const { return c_; }
  double& operator[](int i) { return c_[i]; }
  double operator[](int i) const { return c_[i]; }

  Taylor& operator+=(const Taylor& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Taylor& operator*=(double a) {
    for (auto& v : c_) v *= a;
    return *this;
  }
  Taylor& operator+=(double a) {
    c_[0] += a;
    return *this;
  }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(Taylor a, double s) { return a *= s; }
  friend Taylor operator*(double s, Taylor a) { return a *= s; }
  friend Taylor operator+(Taylor a, double s) { return a += s; }
  friend Taylor operator-(double s, Taylor a) {
    a *= -1.0;
    return a += s;
  }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r(*a.basis_);
    for (const auto& p : a.basis_->products()) r.c_[p.out] += a.c_[p.lhs] * b.c_[p.rhs];
    return r;
  }

  /// f(this) given d[j] = f^{(j)}(c0) / j!, j = 0..order.
  Taylor compose(std::span<const double> d) const {
    const int m = basis_->order();
    Taylor dx = *this;
    dx.c_[0] = 0.0;
    Taylor r(*basis_, d[m]);
    for (int j = m - 1; j >= 0; --j) {
      r = r * dx;
      r.c_[0] += d[j];
    }
    return r;
  }

  bool is_zero() const {
    for (double v : c_)
      if (v != 0.0) return false;
    return true;
  }

 private:
  const MonomialBasis* basis_;
  std::vector<double> c_;
};

inline Taylor exp(const Taylor& t) {
  const int m = t.basis().order();
  std::array<double, kMaxTableOrder + 1> d{};
  double e = std::exp(t.constant());
  double fact = 1.0;
  for (int j = 0; j <= m; ++j) {
    if (j > 0) fact *= j;
    d[j] = e / fact;
  }
  return t.compose(std::span<const double>(d.data(), m + 1));
}

inline Taylor reciprocal(const Taylor& t) {
  const int m = t.basis().order();
  std::array<double, kMaxTableOrder + 1> d{};
  double inv = 1.0 / t.constant();
  double pw = inv;
  for (int j = 0; j <= m; ++j) {
    d[j] = (j % 2 == 0) ? pw : -pw;
    pw *= inv;
  }
  return t.compose(std::span<const double>(d.data(), m + 1));
}

namespace detail {
inline Taylor trig(const Taylor& t, int phase) {
  const int m = t.basis().order();
  std::array<double, kMaxTableOrder + 1> d{};
  const double c = std::cos(t.constant());
  const double s = std::sin(t.constant());
  double fact = 1.0;
  for (int j = 0; j <= m; ++j) {
    if (j > 0) fact *= j;
    double v = 0.0;
    switch ((j + phase) % 4) {
      case 0: v = c; break;
      case 1: v = -s; break;
      case 2: v = -c; break;
      case 3: v = s; break;
    }
    d[j] = v / fact;
  }
  return t.compose(std::span<const double>(d.data(), m + 1));
}
}  // namespace detail

inline Taylor cos(const Taylor& t) { return detail::trig(t, 0); }
inline Taylor sin(const Taylor& t) { return detail::trig(t, 3); }

/// All partial derivatives D^a u(x) with |a| <= order at one point.
class Jet {
 public:
  Jet(const MonomialBasis& basis, std::vector<double> values)
      : basis_(&basis), values_(std::move(values)) {}

  static Jet zero(const MonomialBasis& basis) {
    return Jet(basis, std::vector<double>(static_cast<std::size_t>(basis.size()), 0.0));
  }

  static Jet from_taylor(const Taylor& t) {
    const auto& b = t.basis();
    std::vector<double> v(static_cast<std::size_t>(b.size()));
    for (int i = 0; i < b.size(); ++i) v[i] = t[i] * b.factorial_weight(i);
    return Jet(b, std::move(v));
  }

  int order() const { return basis_->order(); }
  int dim() const { return basis_->dim(); }
  const MonomialBasis& basis() const { return *basis_; }

  double operator[](const MultiIndex& a) const {
    int i = basis_->index_of(a);
    if (i < 0) throw Error(ErrorCode::JetOrderExceeded, "multi-index outside jet");
    return values_[i];
  }
  double at(int i) const { return values_[i]; }
  double value() const { return values_[0]; }

  /// Derivatives of total order d, in basis order.
  std::span<const double> of_order(int d) const {
    return std::span<const double>(values_).subspan(basis_->first_of_order(d), basis_->count_of_order(d));
  }

  /// max over |a| = d of |D^a u|.
  double max_abs(int d) const {
    double m = 0.0;
    for (double v : of_order(d)) m = std::max(m, std::abs(v));
    return m;
  }

  std::span<const double> values() const { return values_; }

 private:
  const MonomialBasis* basis_;
  std::vector<double> values_;
};

}  // namespace xp
