#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace curvewire::numeric {

/// Finite-difference weights for the m-th derivative at `x0` on the nodes
/// `xs` (Fornberg's recursion). Works for arbitrary node placement, so the
/// same routine serves centered and one-sided stencils.
inline std::vector<double> fd_weights(double x0, std::span<const double> xs, int m) {
  const std::size_t n = xs.size();
  if (m < 0 || n < static_cast<std::size_t>(m) + 1)
    throw std::invalid_argument("fd_weights: need more nodes than the derivative order");
  std::vector<std::vector<double>> c(n, std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = static_cast<int>(std::min<std::size_t>(i, static_cast<std::size_t>(m)));
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][static_cast<std::size_t>(m)];
  return w;
}

namespace detail {

template <class F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with a relative tolerance on the final value.
/// The interval is pre-split into uniform panels (each refined adaptively) so
/// features much narrower than the interval cannot slip between the probes
/// of a single top-level Simpson rule.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-9, int max_depth = 34) {
  if (a == b) return 0.0;
  const int panels = 128;
  const double h = (b - a) / panels;
  // Coarse composite pass fixes the error scale before recursing.
  double scale = 0.0;
  for (int i = 0; i < panels; ++i)
    scale += std::abs(f(a + (i + 0.5) * h)) * std::abs(h);
  const double eps = rel_tol * std::max(scale, std::numeric_limits<double>::min());
  double total = 0.0;
  double fl = f(a);
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = i + 1 == panels ? b : lo + h;
    const double fm = f(0.5 * (lo + hi));
    const double fr = f(hi);
    const double whole = (hi - lo) / 6.0 * (fl + 4.0 * fm + fr);
    total += detail::adaptive_simpson_rec(f, lo, hi, fl, fm, fr, whole, eps / panels,
                                          max_depth);
    fl = fr;
  }
  return total;
}

/// Natural cubic spline through (x, y); x strictly increasing.
class CubicSpline {
 public:
  CubicSpline(std::span<const double> x, std::span<const double> y)
      : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m2_(x.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n < 3) throw std::invalid_argument("CubicSpline: need at least 3 points");
    if (y_.size() != n) throw std::invalid_argument("CubicSpline: size mismatch");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw std::invalid_argument("CubicSpline: abscissae must be strictly increasing");
    // Thomas solve for the interior second derivatives; the natural end
    // conditions leave m2 zero at both boundaries.
    std::vector<double> diag(n, 2.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = x_[i] - x_[i - 1];
      const double hr = x_[i + 1] - x_[i];
      sub[i] = hl / (hl + hr);
      sup[i] = hr / (hl + hr);
      rhs[i] = 6.0 / (hl + hr) * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m2_[i] = (rhs[i] - sup[i] * m2_[i + 1]) / diag[i];
      if (i == 1) break;
    }
  }

  double operator()(double x) const {
    const std::size_t n = x_.size();
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        it - x_.begin() - 1, 0, static_cast<std::ptrdiff_t>(n) - 2));
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double u = 1.0 - t;
    return u * y_[i] + t * y_[i + 1] +
           h * h / 6.0 * ((u * u * u - u) * m2_[i] + (t * t * t - t) * m2_[i + 1]);
  }

 private:
  std::vector<double> x_, y_, m2_;
};

/// Local Lagrange interpolation of nodal values on the uniform grid
/// x_i = i * step; the stencil slides to one-sided near the ends.
inline double lagrange_uniform(std::span<const double> ys, double step, double x,
                               int points = 6) {
  const std::size_t n = ys.size();
  if (n < static_cast<std::size_t>(points)) points = static_cast<int>(n);
  const double s = x / step;
  std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor(s)) - points / 2 + 1;
  i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(n) - points);
  double acc = 0.0;
  for (int j = 0; j < points; ++j) {
    double lj = 1.0;
    for (int k = 0; k < points; ++k) {
      if (k == j) continue;
      lj *= (s - (i0 + k)) / double(j - k);
    }
    acc += lj * ys[static_cast<std::size_t>(i0 + j)];
  }
  return acc;
}

struct LinearFit {
  double slope;
  double intercept;
  double max_abs_residual;
};

/// Least-squares straight line through (x, y).
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("linear_fit: need >= 2 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit fit{sxy / sxx, 0.0, 0.0};
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i)
    fit.max_abs_residual =
        std::max(fit.max_abs_residual, std::abs(y[i] - (fit.slope * x[i] + fit.intercept)));
  return fit;
}

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
/// Returns (argmax, max).
template <class F>
std::pair<double, double> golden_section_maximize(F&& f, double lo, double hi,
                                                  double x_tol, int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace curvewire::numeric
