#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace owc {

/// Raised when an adaptive rule exhausts its interval budget before meeting
/// the requested tolerance. Carries the best estimate reached.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}
  double estimate() const { return estimate_; }
  double error() const { return error_; }

 private:
  double estimate_;
  double error_;
};

template <typename Scalar>
struct QuadratureResult {
  Scalar value = 0;
  Scalar error = 0;
  int intervals = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1]; odd indices are the Gauss nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Scalar>
struct Panel {
  Scalar a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename Scalar, typename F>
Panel<Scalar> gauss_kronrod_15(F& f, Scalar a, Scalar b) {
  const Scalar center = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  const Scalar fc = f(center);
  Scalar kronrod = fc * Scalar(kKronrodWeights[7]);
  Scalar gauss = fc * Scalar(kGaussWeights[3]);
  for (int j = 0; j < 7; ++j) {
    const Scalar dx = half * Scalar(kKronrodNodes[j]);
    const Scalar sum = f(center - dx) + f(center + dx);
    kronrod += Scalar(kKronrodWeights[j]) * sum;
    if (j % 2 == 1) gauss += Scalar(kGaussWeights[j / 2]) * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b].
///
/// `breakpoints` are interior abscissae where f is known to be non-smooth; the
/// initial partition splits there so kinks never sit inside a panel. The loop
/// bisects the panel with the largest error estimate until the summed estimate
/// is below max(abs_tol, rel_tol * |I|).
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, Scalar a, Scalar b, Scalar rel_tol,
                                            Scalar abs_tol = Scalar(1e-15),
                                            std::vector<Scalar> breakpoints = {},
                                            int max_intervals = 4000) {
  QuadratureResult<Scalar> out;
  if (!(b > a)) return out;

  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  std::priority_queue<detail::Panel<Scalar>> panels;
  Scalar total = 0;
  Scalar total_error = 0;
  Scalar prev = a;
  for (Scalar x : breakpoints) {
    x = std::clamp(x, a, b);
    if (x > prev) {
      auto p = detail::gauss_kronrod_15(f, prev, x);
      total += p.value;
      total_error += p.error;
      panels.push(p);
      prev = x;
    }
  }

  auto converged = [&] { return total_error <= std::max(abs_tol, rel_tol * std::abs(total)); };
  while (!converged()) {
    if (static_cast<int>(panels.size()) >= max_intervals) {
      throw QuadratureError("adaptive quadrature did not reach tolerance", total, total_error);
    }
    auto worst = panels.top();
    panels.pop();
    const Scalar mid = (worst.a + worst.b) / 2;
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("adaptive quadrature panel underflow", total, total_error);
    }
    auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum to shed the drift from incremental updates.
  out.value = 0;
  out.error = 0;
  out.intervals = static_cast<int>(panels.size());
  while (!panels.empty()) {
    out.value += panels.top().value;
    out.error += panels.top().error;
    panels.pop();
  }
  return out;
}

}  // namespace owc
