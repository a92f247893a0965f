#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "curvewire/numeric.hpp"

namespace curvewire {

enum class Parity { even, odd };

/// How a profile is rescaled in a width scan: `shape` stretches amplitude and
/// width together (the slope profile keeps its shape), `width_only` stretches
/// the width alone.
enum class StretchMode { shape, width_only };

/// Height and first three derivatives of the wire profile at one position.
struct ProfilePoint {
  double f;
  double f1;
  double f2;
  double f3;
};

namespace profile_detail {

inline void accumulate_gaussian(double x, double amplitude, double center, double width,
                                ProfilePoint& p) {
  const double u = x - center;
  const double w2 = width * width;
  const double g = amplitude * std::exp(-u * u / (2.0 * w2));
  p.f += g;
  p.f1 += -u / w2 * g;
  p.f2 += (u * u - w2) / (w2 * w2) * g;
  p.f3 += u * (3.0 * w2 - u * u) / (w2 * w2 * w2) * g;
}

struct FlatShape {
  double level = 0.0;
};

struct SingleGaussianShape {
  double amplitude;
  double center;
  double width;
};

struct DoubleGaussianShape {
  double amplitude;
  double center;
  double width;
  double shift;
  Parity parity;
};

/// Uniform-grid samples of f and its derivatives; evaluation interpolates
/// each nodal array locally.
struct TabulatedShape {
  double step;
  std::vector<double> f, f1, f2, f3;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace profile_detail

/// The wire profile f(x) on [0, L]. Immutable after construction; all
/// evaluation is pure and thread-safe.
class Profile {
 public:
  /// Largest endpoint slope accepted as "flat enough to attach a lead".
  static constexpr double default_flatness_tol = 0.1;

  static Profile flat(double length) {
    Profile p(profile_detail::FlatShape{}, length, default_flatness_tol);
    p.descriptor_ = "flat(L=" + profile_detail::format_number(length) + ")";
    return p;
  }

  static Profile single_gaussian(double length, double amplitude, double center,
                                 double width, double flatness_tol = default_flatness_tol) {
    if (!(width > 0.0)) throw std::invalid_argument("single_gaussian: width must be > 0");
    Profile p(profile_detail::SingleGaussianShape{amplitude, center, width}, length,
              flatness_tol);
    p.descriptor_ = "single_gaussian(L=" + profile_detail::format_number(length) +
                    ",A=" + profile_detail::format_number(amplitude) +
                    ",x0=" + profile_detail::format_number(center) +
                    ",sigma=" + profile_detail::format_number(width) + ")";
    p.check_flatness();
    return p;
  }

  static Profile double_gaussian(double length, double amplitude, double center,
                                 double width, double shift, Parity parity,
                                 double flatness_tol = default_flatness_tol) {
    if (!(width > 0.0)) throw std::invalid_argument("double_gaussian: width must be > 0");
    if (!(shift > 0.0)) throw std::invalid_argument("double_gaussian: shift must be > 0");
    Profile p(profile_detail::DoubleGaussianShape{amplitude, center, width, shift, parity},
              length, flatness_tol);
    p.descriptor_ = "double_gaussian(L=" + profile_detail::format_number(length) +
                    ",A=" + profile_detail::format_number(amplitude) +
                    ",x0=" + profile_detail::format_number(center) +
                    ",sigma=" + profile_detail::format_number(width) +
                    ",s=" + profile_detail::format_number(shift) +
                    ",parity=" + (parity == Parity::even ? "even" : "odd") + ")";
    p.check_flatness();
    return p;
  }

  /// Samples (x, f); x strictly increasing, at least 7 points. The samples
  /// are shifted so the domain starts at 0, brought onto a uniform grid
  /// (a C2 spline resample when the input spacing is non-uniform), and
  /// differentiated with order-4 centered stencils (one-sided at the ends).
  static Profile tabulated(std::span<const double> x, std::span<const double> f,
                           double flatness_tol = default_flatness_tol) {
    const std::size_t n = x.size();
    if (f.size() != n) throw std::invalid_argument("tabulated: x/f size mismatch");
    if (n < 7)
      throw std::invalid_argument("tabulated: need at least 7 samples, got " +
                                  std::to_string(n));
    for (std::size_t i = 1; i < n; ++i)
      if (!(x[i] > x[i - 1]))
        throw std::invalid_argument("tabulated: abscissae must be strictly increasing");
    const double length = x.back() - x.front();
    if (!(length > 0.0)) throw std::invalid_argument("tabulated: zero-length domain");

    const auto [fmin, fmax] = std::minmax_element(f.begin(), f.end());
    if (*fmin == *fmax) {
      // Constant height carries no geometry; treat as a flat wire.
      Profile p(profile_detail::FlatShape{*fmin}, length, flatness_tol);
      p.descriptor_ = "tabulated(n=" + std::to_string(n) +
                      ",L=" + profile_detail::format_number(length) + ",constant)";
      return p;
    }

    std::vector<double> xs(x.begin(), x.end());
    for (auto& v : xs) v -= x.front();

    profile_detail::TabulatedShape shape;
    bool uniform = true;
    const double h0 = length / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(xs[i] - static_cast<double>(i) * h0) > 1e-9 * length) {
        uniform = false;
        break;
      }
    if (uniform) {
      shape.step = h0;
      shape.f.assign(f.begin(), f.end());
    } else {
      const std::size_t m =
          std::clamp<std::size_t>(4 * n, std::size_t{2001}, std::size_t{200001});
      numeric::CubicSpline spline(xs, f);
      shape.step = length / static_cast<double>(m - 1);
      shape.f.resize(m);
      for (std::size_t i = 0; i < m; ++i)
        shape.f[i] = spline(static_cast<double>(i) * shape.step);
      shape.f.front() = f.front();
      shape.f.back() = f.back();
    }
    differentiate(shape);

    Profile p(std::move(shape), length, flatness_tol);
    p.descriptor_ = "tabulated(n=" + std::to_string(n) +
                    ",L=" + profile_detail::format_number(length) + ")";
    p.check_flatness();
    return p;
  }

  double length() const noexcept { return length_; }
  double flatness_tol() const noexcept { return flatness_tol_; }
  bool is_flat() const noexcept {
    return std::holds_alternative<profile_detail::FlatShape>(shape_);
  }
  const std::string& descriptor() const noexcept { return descriptor_; }

  /// f and its first three derivatives at x in [0, L].
  ProfilePoint eval(double x) const {
    if (x < -domain_slack() || x > length_ + domain_slack())
      throw std::domain_error("profile evaluated outside its domain [0, " +
                              profile_detail::format_number(length_) + "]: x = " +
                              profile_detail::format_number(x));
    x = std::clamp(x, 0.0, length_);
    ProfilePoint p{0.0, 0.0, 0.0, 0.0};
    if (const auto* s = std::get_if<profile_detail::FlatShape>(&shape_)) {
      p.f = s->level;
    } else if (const auto* s = std::get_if<profile_detail::SingleGaussianShape>(&shape_)) {
      profile_detail::accumulate_gaussian(x, s->amplitude, s->center, s->width, p);
    } else if (const auto* s = std::get_if<profile_detail::DoubleGaussianShape>(&shape_)) {
      profile_detail::accumulate_gaussian(x, s->amplitude, s->center - s->shift, s->width, p);
      const double second = s->parity == Parity::even ? s->amplitude : -s->amplitude;
      profile_detail::accumulate_gaussian(x, second, s->center + s->shift, s->width, p);
    } else {
      const auto& t = std::get<profile_detail::TabulatedShape>(shape_);
      p.f = numeric::lagrange_uniform(t.f, t.step, x);
      p.f1 = numeric::lagrange_uniform(t.f1, t.step, x);
      p.f2 = numeric::lagrange_uniform(t.f2, t.step, x);
      p.f3 = numeric::lagrange_uniform(t.f3, t.step, x);
    }
    return p;
  }

  /// Arc length of the graph between a and b by adaptive quadrature.
  double arc_length(double a, double b, double rel_tol = 1e-9) const {
    if (a > b) std::swap(a, b);
    if (a < -domain_slack() || b > length_ + domain_slack())
      throw std::domain_error("arc_length: [a, b] must lie inside [0, L]");
    if (is_flat()) return b - a;
    auto integrand = [this](double x) {
      const double f1 = eval(x).f1;
      return std::sqrt(1.0 + f1 * f1);
    };
    return numeric::adaptive_simpson(integrand, a, b, rel_tol);
  }

  /// Rescaled copy for width scans; analytic shapes only.
  Profile stretched(double factor, StretchMode mode = StretchMode::shape) const {
    if (!(factor > 0.0)) throw std::invalid_argument("stretched: factor must be > 0");
    if (const auto* s = std::get_if<profile_detail::FlatShape>(&shape_)) {
      (void)s;
      return flat(length_);
    }
    if (const auto* s = std::get_if<profile_detail::SingleGaussianShape>(&shape_)) {
      const double amp = mode == StretchMode::shape ? s->amplitude * factor : s->amplitude;
      return single_gaussian(length_, amp, s->center, s->width * factor, flatness_tol_);
    }
    if (const auto* s = std::get_if<profile_detail::DoubleGaussianShape>(&shape_)) {
      const double amp = mode == StretchMode::shape ? s->amplitude * factor : s->amplitude;
      const double shift = mode == StretchMode::shape ? s->shift * factor : s->shift;
      return double_gaussian(length_, amp, s->center, s->width * factor, shift, s->parity,
                             flatness_tol_);
    }
    throw std::invalid_argument("stretched: tabulated profiles cannot be rescaled");
  }

 private:
  using Shape = std::variant<profile_detail::FlatShape, profile_detail::SingleGaussianShape,
                             profile_detail::DoubleGaussianShape,
                             profile_detail::TabulatedShape>;

  Profile(Shape shape, double length, double flatness_tol)
      : shape_(std::move(shape)), length_(length), flatness_tol_(flatness_tol) {
    if (!(length > 0.0)) throw std::invalid_argument("profile: length must be > 0");
    if (!(flatness_tol > 0.0))
      throw std::invalid_argument("profile: flatness tolerance must be > 0");
  }

  double domain_slack() const { return 1e-9 * length_; }

  void check_flatness() const {
    const double left = std::abs(eval(0.0).f1);
    const double right = std::abs(eval(length_).f1);
    if (left >= flatness_tol_)
      throw std::invalid_argument("profile is not asymptotically flat at the left endpoint"
                                  " x = 0: |f'| = " + profile_detail::format_number(left));
    if (right >= flatness_tol_)
      throw std::invalid_argument("profile is not asymptotically flat at the right endpoint"
                                  " x = L: |f'| = " + profile_detail::format_number(right));
  }

  static void differentiate(profile_detail::TabulatedShape& t) {
    const std::size_t m = t.f.size();
    t.f1.assign(m, 0.0);
    t.f2.assign(m, 0.0);
    t.f3.assign(m, 0.0);
    // One weight set covers every interior node; only the few nodes near the
    // ends need shifted (one-sided) stencils.
    const auto weights_at = [&](std::size_t node, int order, int width) {
      const int half = width / 2;
      std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(node) - half;
      i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(m) - width);
      std::vector<double> offs(static_cast<std::size_t>(width));
      for (int j = 0; j < width; ++j)
        offs[static_cast<std::size_t>(j)] =
            static_cast<double>(i0 + j - static_cast<std::ptrdiff_t>(node)) * t.step;
      return std::make_pair(numeric::fd_weights(0.0, offs, order), i0);
    };
    const auto apply = [&](std::vector<double>& out, int order, int width) {
      const int half = width / 2;
      const auto centered = weights_at(static_cast<std::size_t>(half), order, width).first;
      for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> const* w = &centered;
        std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(i) - half;
        std::vector<double> edge;
        if (i < static_cast<std::size_t>(half) || i + half >= m) {
          auto [ew, e0] = weights_at(i, order, width);
          edge = std::move(ew);
          w = &edge;
          i0 = e0;
        }
        double acc = 0.0;
        for (int j = 0; j < width; ++j)
          acc += (*w)[static_cast<std::size_t>(j)] * t.f[static_cast<std::size_t>(i0 + j)];
        out[i] = acc;
      }
    };
    apply(t.f1, 1, 5);
    apply(t.f2, 2, 5);
    apply(t.f3, 3, 7);
  }

  Shape shape_;
  double length_;
  double flatness_tol_;
  std::string descriptor_;
};

}  // namespace curvewire
