#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xp/error.hpp"
#include "xp/taylor.hpp"

// Closed-form compactly supported smooth test functions on R^n (n <= 3).
//
// Functions are immutable expression trees evaluated by forward propagation of
// truncated Taylor series, so every partial derivative up to the requested
// order is exact up to rounding. The only compact-support primitives are the
// standard bump exp(-1/(1-|x|^2)) and the plateau built from it.

namespace xp {

inline constexpr int kDefaultMaxJetOrder = 6;

/// Bump arguments with 1 - |x|^2 below this produce the zero jet.
inline constexpr double kBoundaryCutoff = 1e-12;

using Point = std::array<double, kMaxDim>;

struct Ball {
  Point center{0.0, 0.0, 0.0};
  double radius = 0.0;
};

namespace detail {

class Node {
 public:
  virtual ~Node() = default;
  virtual Taylor eval(std::span<const Taylor> y) const = 0;
  virtual std::optional<Ball> support() const = 0;
};

using NodePtr = std::shared_ptr<const Node>;

inline Taylor squared_norm(std::span<const Taylor> y, double inv_scale) {
  Taylor t(y[0].basis());
  for (const auto& yi : y) {
    Taylor s = yi * inv_scale;
    t += s * s;
  }
  return t;
}

class BumpNode final : public Node {
 public:
  explicit BumpNode(double radius) : radius_(radius) {}
  Taylor eval(std::span<const Taylor> y) const override {
    Taylor g = 1.0 - squared_norm(y, 1.0 / radius_);
    if (g.constant() <= kBoundaryCutoff) return Taylor(y[0].basis());
    Taylor h = reciprocal(g);
    h *= -1.0;
    return xp::exp(h);
  }
  std::optional<Ball> support() const override { return Ball{{0, 0, 0}, radius_}; }

 private:
  double radius_;
};

// Equal to 1 on |x| <= rho, 0 for |x| >= R, smooth transition through
// f(z) / (f(z) + f(1 - z)) with f(z) = exp(-1/z).
class PlateauNode final : public Node {
 public:
  PlateauNode(double outer, double inner) : outer_(outer), inner_(inner) {}
  Taylor eval(std::span<const Taylor> y) const override {
    const auto& basis = y[0].basis();
    const double r2 = outer_ * outer_;
    Taylor z = (r2 - squared_norm(y, 1.0)) * (1.0 / (r2 - inner_ * inner_));
    const double z0 = z.constant();
    if (z0 <= kBoundaryCutoff) return Taylor(basis);
    if (1.0 - z0 <= kBoundaryCutoff) return Taylor(basis, 1.0);
    Taylor a = reciprocal(z);
    a *= -1.0;
    a = xp::exp(a);
    Taylor b = reciprocal(1.0 - z);
    b *= -1.0;
    b = xp::exp(b);
    return a * reciprocal(a + b);
  }
  std::optional<Ball> support() const override { return Ball{{0, 0, 0}, outer_}; }

 private:
  double outer_;
  double inner_;
};

class MonomialNode final : public Node {
 public:
  MonomialNode(int axis, int degree) : axis_(axis), degree_(degree) {}
  Taylor eval(std::span<const Taylor> y) const override {
    Taylor r(y[0].basis(), 1.0);
    for (int i = 0; i < degree_; ++i) r = r * y[axis_];
    return r;
  }
  std::optional<Ball> support() const override { return std::nullopt; }

 private:
  int axis_;
  int degree_;
};

class CosineNode final : public Node {
 public:
  CosineNode(int axis, double omega) : axis_(axis), omega_(omega) {}
  Taylor eval(std::span<const Taylor> y) const override { return xp::cos(y[axis_] * omega_); }
  std::optional<Ball> support() const override { return std::nullopt; }

 private:
  int axis_;
  double omega_;
};

class SumNode final : public Node {
 public:
  SumNode(NodePtr a, NodePtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Taylor eval(std::span<const Taylor> y) const override { return a_->eval(y) + b_->eval(y); }
  std::optional<Ball> support() const override {
    auto sa = a_->support();
    auto sb = b_->support();
    if (!sa || !sb) return std::nullopt;
    double d = 0.0;
    for (int i = 0; i < kMaxDim; ++i) d += (sa->center[i] - sb->center[i]) * (sa->center[i] - sb->center[i]);
    d = std::sqrt(d);
    return Ball{sa->center, std::max(sa->radius, d + sb->radius)};
  }

 private:
  NodePtr a_, b_;
};

class ProductNode final : public Node {
 public:
  ProductNode(NodePtr a, NodePtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Taylor eval(std::span<const Taylor> y) const override {
    Taylor fa = a_->eval(y);
    if (fa.is_zero()) return fa;
    return fa * b_->eval(y);
  }
  std::optional<Ball> support() const override {
    auto sa = a_->support();
    auto sb = b_->support();
    if (sa && sb) return sa->radius <= sb->radius ? sa : sb;
    return sa ? sa : sb;
  }

 private:
  NodePtr a_, b_;
};

class ScaleNode final : public Node {
 public:
  ScaleNode(double amplitude, NodePtr child) : amplitude_(amplitude), child_(std::move(child)) {}
  Taylor eval(std::span<const Taylor> y) const override { return child_->eval(y) * amplitude_; }
  std::optional<Ball> support() const override { return child_->support(); }

 private:
  double amplitude_;
  NodePtr child_;
};

// x -> child(lambda * (x - shift)).
class PullbackNode final : public Node {
 public:
  PullbackNode(double lambda, Point shift, NodePtr child)
      : lambda_(lambda), shift_(shift), child_(std::move(child)) {}
  Taylor eval(std::span<const Taylor> y) const override {
    std::vector<Taylor> z;
    z.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z.push_back((y[i] + (-shift_[i])) * lambda_);
    return child_->eval(z);
  }
  std::optional<Ball> support() const override {
    auto s = child_->support();
    if (!s) return std::nullopt;
    Ball b;
    for (int i = 0; i < kMaxDim; ++i) b.center[i] = shift_[i] + s->center[i] / lambda_;
    b.radius = s->radius / lambda_;
    return b;
  }

 private:
  double lambda_;
  Point shift_;
  NodePtr child_;
};

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return s;
}

}  // namespace detail

class TestFunction {
 public:
  TestFunction(detail::NodePtr root, int n, std::string family, std::string dsl)
      : root_(std::move(root)), n_(n), family_(std::move(family)), dsl_(std::move(dsl)) {
    if (n < 1 || n > kMaxDim) throw Error(ErrorCode::BadParams, "dimension must be 1, 2 or 3");
    auto s = root_->support();
    if (!s) throw Error(ErrorCode::BadParams, "function is not compactly supported");
    support_ = *s;
  }

  int dim() const { return n_; }
  double support_radius() const { return support_.radius; }
  const Point& support_center() const { return support_.center; }
  const Ball& support() const { return support_; }
  const std::string& family() const { return family_; }
  const std::string& dsl() const { return dsl_; }
  const detail::NodePtr& node() const { return root_; }

  bool outside_support(const Point& x) const {
    double d = 0.0;
    for (int i = 0; i < n_; ++i) d += (x[i] - support_.center[i]) * (x[i] - support_.center[i]);
    return d >= support_.radius * support_.radius;
  }

  /// Jet without the order guard; see evaluate_jet.
  Jet jet(const Point& x, int order) const {
    const auto& basis = MonomialBasis::get(n_, order);
    if (outside_support(x)) return Jet::zero(basis);
    std::array<Taylor, kMaxDim> ys{Taylor(basis), Taylor(basis), Taylor(basis)};
    for (int i = 0; i < n_; ++i) ys[i] = Taylor::variable(basis, i, x[i]);
    return Jet::from_taylor(root_->eval(std::span<const Taylor>(ys.data(), static_cast<std::size_t>(n_))));
  }

  double operator()(const Point& x) const { return jet(x, 0).value(); }

 private:
  detail::NodePtr root_;
  int n_;
  std::string family_;
  std::string dsl_;
  Ball support_;
};

inline Jet evaluate_jet(const TestFunction& u, const Point& x, int order,
                        int max_order = kDefaultMaxJetOrder) {
  if (order < 0 || order > max_order || order > kMaxTableOrder)
    throw Error(ErrorCode::JetOrderExceeded,
                "order " + std::to_string(order) + " exceeds maximum " + std::to_string(max_order));
  return u.jet(x, order);
}

/// v(x) = u(lambda x).
inline TestFunction dilate(const TestFunction& u, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::BadParams, "dilation must be positive");
  return TestFunction(std::make_shared<detail::PullbackNode>(lambda, Point{0, 0, 0}, u.node()), u.dim(),
                      u.family(), u.dsl() + "*dilate(" + detail::format_number(lambda) + ")");
}

/// v(x) = u(x - c).
inline TestFunction translate(const TestFunction& u, const Point& c) {
  std::string args;
  for (int i = 0; i < u.dim(); ++i) args += (i ? "," : "") + detail::format_number(c[i]);
  Point shift{0, 0, 0};
  for (int i = 0; i < u.dim(); ++i) shift[i] = c[i];
  return TestFunction(std::make_shared<detail::PullbackNode>(1.0, shift, u.node()), u.dim(), u.family(),
                      u.dsl() + "*translate(" + args + ")");
}

/// v(x) = a u(x).
inline TestFunction scale_amplitude(const TestFunction& u, double a) {
  return TestFunction(std::make_shared<detail::ScaleNode>(a, u.node()), u.dim(), u.family(),
                      u.dsl() + "*amp(" + detail::format_number(a) + ")");
}

inline TestFunction sum(const TestFunction& u, const TestFunction& v) {
  if (u.dim() != v.dim()) throw Error(ErrorCode::BadParams, "dimension mismatch in sum");
  return TestFunction(std::make_shared<detail::SumNode>(u.node(), v.node()), u.dim(), "sum",
                      u.dsl() + " + " + v.dsl());
}

using FamilyParams = std::map<std::string, double, std::less<>>;

/// bump, bump_poly, bump_wave or plateau with named parameters.
///
///   bump(R)                 phi(x/R)
///   bump_poly(R, deg, axis) phi(x/R) * x_axis^deg, 0 <= deg <= 6
///   bump_wave(R, omega, axis) phi(x/R) * cos(omega * x_axis)
///   plateau(R, rho)         mollified indicator, 1 on |x| <= rho < R
inline TestFunction standard_family(std::string_view name, const FamilyParams& params, int n) {
  if (n < 1 || n > kMaxDim) throw Error(ErrorCode::BadParams, "dimension must be 1, 2 or 3");
  auto get = [&](std::string_view key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  auto allow = [&](std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : params) {
      bool known = false;
      for (auto key : keys) known = known || key == k;
      if (!known) throw Error(ErrorCode::BadParams, "unknown parameter '" + k + "' for " + std::string(name));
      if (!std::isfinite(v)) throw Error(ErrorCode::BadParams, "non-finite parameter '" + k + "'");
    }
  };
  auto integral = [&](std::string_view key, double v, int lo, int hi) {
    if (v != std::floor(v) || v < lo || v > hi)
      throw Error(ErrorCode::BadParams, std::string(key) + " must be an integer in [" + std::to_string(lo) + ", " +
                                            std::to_string(hi) + "]");
    return static_cast<int>(v);
  };
  using detail::format_number;

  const double R = get("R", 1.0);
  if (!(R > 0.0)) throw Error(ErrorCode::BadParams, "R must be positive");
  auto bump = std::make_shared<detail::BumpNode>(R);

  if (name == "bump") {
    allow({"R"});
    return TestFunction(bump, n, "bump", "bump(R=" + format_number(R) + ")");
  }
  if (name == "bump_poly") {
    allow({"R", "deg", "axis"});
    int deg = integral("deg", get("deg", 2.0), 0, 6);
    int axis = integral("axis", get("axis", 0.0), 0, n - 1);
    auto node = std::make_shared<detail::ProductNode>(bump, std::make_shared<detail::MonomialNode>(axis, deg));
    return TestFunction(node, n, "bump_poly",
                        "bump_poly(R=" + format_number(R) + ",deg=" + std::to_string(deg) +
                            ",axis=" + std::to_string(axis) + ")");
  }
  if (name == "bump_wave") {
    allow({"R", "omega", "axis"});
    double omega = get("omega", 8.0);
    int axis = integral("axis", get("axis", 0.0), 0, n - 1);
    auto node = std::make_shared<detail::ProductNode>(bump, std::make_shared<detail::CosineNode>(axis, omega));
    std::string dsl = "bump_wave(R=" + format_number(R) + ",omega=" + format_number(omega);
    if (axis != 0) dsl += ",axis=" + std::to_string(axis);
    return TestFunction(node, n, "bump_wave", dsl + ")");
  }
  if (name == "plateau") {
    allow({"R", "rho"});
    double R2 = get("R", 2.0);
    double rho = get("rho", 1.0);
    if (!(rho > 0.0) || !(rho < R2)) throw Error(ErrorCode::BadParams, "plateau needs 0 < rho < R");
    return TestFunction(std::make_shared<detail::PlateauNode>(R2, rho), n, "plateau",
                        "plateau(R=" + format_number(R2) + ",rho=" + format_number(rho) + ")");
  }
  throw Error(ErrorCode::UnknownFamily, "unknown family '" + std::string(name) + "'");
}

namespace detail {

class DslParser {
 public:
  DslParser(std::string_view text, int n) : text_(text), n_(n) {}

  TestFunction parse() {
    TestFunction f = term();
    skip();
    while (peek() == '+') {
      ++pos_;
      f = xp::sum(f, term());
      skip();
    }
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  TestFunction term() {
    std::string name = ident();
    auto args = named_args();
    FamilyParams params(args.begin(), args.end());
    TestFunction f = standard_family(name, params, n_);
    skip();
    while (peek() == '*') {
      ++pos_;
      std::string op = ident();
      auto vals = positional_args();
      if (op == "dilate") {
        if (vals.size() != 1) fail("dilate takes one value");
        f = dilate(f, vals[0]);
      } else if (op == "amp") {
        if (vals.size() != 1) fail("amp takes one value");
        f = scale_amplitude(f, vals[0]);
      } else if (op == "translate") {
        if (vals.empty() || static_cast<int>(vals.size()) > n_) fail("translate takes 1..n values");
        Point c{0, 0, 0};
        for (std::size_t i = 0; i < vals.size(); ++i) c[i] = vals[i];
        f = translate(f, c);
      } else {
        fail("unknown transform '" + op + "'");
      }
      skip();
    }
    return f;
  }

  std::vector<std::pair<std::string, double>> named_args() {
    expect('(');
    std::vector<std::pair<std::string, double>> out;
    skip();
    if (peek() == ')') {
      ++pos_;
      return out;
    }
    for (;;) {
      std::string key = ident();
      expect('=');
      out.emplace_back(key, number());
      skip();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(')');
      return out;
    }
  }

  std::vector<double> positional_args() {
    expect('(');
    std::vector<double> out;
    for (;;) {
      out.push_back(number());
      skip();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(')');
      return out;
    }
  }

  double number() {
    skip();
    double v = plain_number();
    skip();
    if (peek() == '/') {
      ++pos_;
      double d = plain_number();
      if (d == 0.0) fail("zero denominator");
      v /= d;
    }
    return v;
  }

  double plain_number() {
    skip();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  std::string ident() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::ParseError,
                why + " at position " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the function DSL, e.g. "bump_wave(R=1,omega=8)*dilate(2)*amp(3)".
inline TestFunction parse_function(std::string_view text, int n) { return detail::DslParser(text, n).parse(); }

/// Deterministic parameter samples of the standard families.
///
/// R in [0.5, 2], polynomial degree 1..3, omega in [1, 10], rho/R in [0.2, 0.8],
/// optional translation of up to R/2 and amplitude in [0.5, 3].
inline std::vector<TestFunction> sample_family(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto quant = [](double v) { return std::round(v * 1000.0) / 1000.0; };
  std::vector<TestFunction> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double R = quant(0.5 + 1.5 * unit(rng));
    const int axis = static_cast<int>(unit(rng) * n) % n;
    std::string dsl;
    switch (i % 4) {
      case 0: dsl = "bump(R=" + detail::format_number(R) + ")"; break;
      case 1:
        dsl = "bump_poly(R=" + detail::format_number(R) + ",deg=" + std::to_string(1 + i % 3) +
              ",axis=" + std::to_string(axis) + ")";
        break;
      case 2:
        dsl = "bump_wave(R=" + detail::format_number(R) + ",omega=" + detail::format_number(quant(1.0 + 9.0 * unit(rng))) +
              ",axis=" + std::to_string(axis) + ")";
        break;
      default:
        dsl = "plateau(R=" + detail::format_number(R) + ",rho=" + detail::format_number(quant(R * (0.2 + 0.6 * unit(rng)))) + ")";
        break;
    }
    if (unit(rng) < 0.3) dsl += "*translate(" + detail::format_number(quant(0.5 * R * (unit(rng) - 0.5))) + ")";
    dsl += "*amp(" + detail::format_number(quant(0.5 + 2.5 * unit(rng))) + ")";
    out.push_back(parse_function(dsl, n));
  }
  return out;
}

}  // namespace xp
