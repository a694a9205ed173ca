#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "sbal/errors.hpp"
#include "sbal/matrix.hpp"
#include "sbal/spectral.hpp"

// Continuous structural-balance dynamics dX/dt = X^2.
namespace sbal {

struct EscapeTime {
  bool finite = false;
  std::optional<double> t_star;
};

struct TrajectorySample {
  double t;
  FriendlinessMatrix state;
  FriendlinessMatrix normalized_state;
};

struct BalancePrediction {
  SignPattern pattern;
  std::vector<std::size_t> faction_pos;
  std::vector<std::size_t> faction_neg;
  std::vector<std::size_t> ambiguous;
  GenericityReport genericity;
  bool reliable = false;  // false whenever the initial state is not generic
  double lambda1 = 0.0;
  Vector w1;
};

inline constexpr double kBlowUpNorm = 1e12;

inline EscapeTime escape_time(const Spectrum& s) {
  if (s.size() == 0 || !(s.values[0] > 0.0)) return {false, std::nullopt};
  return {true, 1.0 / s.values[0]};
}

inline EscapeTime escape_time(const FriendlinessMatrix& x0) { return escape_time(symmetric_eigen(x0)); }

namespace detail {

inline std::string describe(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace detail

// X(t) = X0 (I - t X0)^{-1}, evaluated as Q diag(lambda_i / (1 - lambda_i t)) Q^T
// from the spectrum of X0. The result is exactly symmetric.
inline FriendlinessMatrix closed_form_state(const FriendlinessMatrix& x0, const Spectrum& s, double t) {
  if (!std::isfinite(t)) throw InputError("time must be finite");
  const std::size_t n = x0.size();
  const EscapeTime esc = escape_time(s);
  if (esc.finite && t >= *esc.t_star)
    throw DomainError("t = " + detail::describe(t) + " is at or beyond the escape time t* = " +
                          detail::describe(*esc.t_star),
                      esc.t_star);

  Vector scale(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double denom = 1.0 - s.values[k] * t;
    if (std::abs(denom) <= 4.0 * std::numeric_limits<double>::epsilon())
      throw DomainError("I - t X0 is singular at t = " + detail::describe(t));
    scale[k] = s.values[k] / denom;
  }

  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += s.vectors(i, k) * scale[k] * s.vectors(j, k);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  }
  return x0.with_entries(std::move(out));
}

inline FriendlinessMatrix closed_form_state(const FriendlinessMatrix& x0, double t) {
  return closed_form_state(x0, symmetric_eigen(x0), t);
}

inline constexpr double kDefaultTrajectoryFraction = 0.99;
inline constexpr std::size_t kDefaultTrajectorySamples = 200;

inline TrajectorySample make_sample(double t, FriendlinessMatrix state) {
  const double nf = frobenius_norm(state.entries());
  FriendlinessMatrix normalized = nf > 0.0 ? state.scaled(1.0 / nf) : state;
  return {t, std::move(state), std::move(normalized)};
}

// Equispaced samples of X(t) on [0, fraction * t*]. The first sample is X0 itself.
inline std::vector<TrajectorySample> sample_trajectory(const FriendlinessMatrix& x0,
                                                       double fraction = kDefaultTrajectoryFraction,
                                                       std::size_t num_samples = kDefaultTrajectorySamples) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InputError("fraction must lie in (0, 1)");
  if (num_samples < 2) throw InputError("at least two samples are required");
  const Spectrum s = symmetric_eigen(x0);
  const EscapeTime esc = escape_time(s);
  if (!esc.finite)
    throw DomainError("no finite escape time (lambda1 <= 0); integrate over an explicit horizon instead");

  const double horizon = fraction * *esc.t_star;
  std::vector<TrajectorySample> samples;
  samples.reserve(num_samples);
  samples.push_back(make_sample(0.0, x0));
  for (std::size_t k = 1; k < num_samples; ++k) {
    const double t = horizon * static_cast<double>(k) / static_cast<double>(num_samples - 1);
    samples.push_back(make_sample(t, closed_form_state(x0, s, t)));
  }
  return samples;
}

namespace detail {

// X^2 for symmetric X, mirrored from the upper triangle.
inline Matrix symmetric_square(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += x(i, k) * x(k, j);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  }
  return out;
}

inline Matrix rk4_step(const Matrix& x, double h) {
  const Matrix k1 = symmetric_square(x);
  const Matrix k2 = symmetric_square(x + (0.5 * h) * k1);
  const Matrix k3 = symmetric_square(x + (0.5 * h) * k2);
  const Matrix k4 = symmetric_square(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void symmetrize(Matrix& x) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = i + 1; j < x.cols(); ++j) {
      const double avg = 0.5 * (x(i, j) + x(j, i));
      x(i, j) = avg;
      x(j, i) = avg;
    }
  }
}

}  // namespace detail

// Adaptive step-doubling RK4 integration of dX/dt = X^2 from 0 to t_end.
// Uses no spectral information, so it serves as an independent check of the closed form.
inline FriendlinessMatrix integrate_numerically(const FriendlinessMatrix& x0, double t_end, double rel_tol) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InputError("t_end must be finite and nonnegative");
  if (!(rel_tol > 0.0)) throw InputError("rel_tol must be positive");

  const double local_tol = 0.1 * rel_tol;
  Matrix x = x0.entries();
  double t = 0.0;
  double h = t_end / 64.0;

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h <= 1e-15 * std::max(1.0, t))
      throw BlowUpError("step size underflow near t = " + detail::describe(t), t);

    const Matrix full = detail::rk4_step(x, h);
    const Matrix half = detail::rk4_step(detail::rk4_step(x, 0.5 * h), 0.5 * h);
    const double err = frobenius_norm(half - full) / 15.0;
    const double scale = frobenius_norm(half);

    if (std::isfinite(err) && err <= local_tol * scale) {
      x = half + (1.0 / 15.0) * (half - full);
      detail::symmetrize(x);
      const double nx = frobenius_norm(x);
      if (!(nx <= kBlowUpNorm))
        throw BlowUpError("state norm exceeded blow-up guard after t = " + detail::describe(t), t);
      t += h;
      const double grow = err == 0.0 ? 4.0 : 0.9 * std::pow(local_tol * scale / err, 0.2);
      h *= std::clamp(grow, 0.2, 4.0);
    } else {
      const double shrink = std::isfinite(err) && err > 0.0 ? 0.9 * std::pow(local_tol * scale / err, 0.2) : 0.2;
      h *= std::clamp(shrink, 0.1, 0.9);
    }
  }
  return x0.with_entries(std::move(x));
}

inline BalancePrediction predict_balanced_state(const FriendlinessMatrix& x0, const Spectrum& s) {
  BalancePrediction p;
  p.lambda1 = s.values.at(0);
  p.w1 = s.eigenvector(0);
  const double zero_tol = default_zero_tolerance(p.w1);
  auto signs = sign_pattern_of(p.w1, zero_tol);
  p.pattern = std::move(signs.pattern);
  p.ambiguous = std::move(signs.ambiguous);
  for (std::size_t k = 0; k < x0.size(); ++k) {
    if (p.w1[k] > zero_tol)
      p.faction_pos.push_back(k);
    else if (p.w1[k] < -zero_tol)
      p.faction_neg.push_back(k);
  }
  p.genericity = genericity_check(s);
  p.reliable = p.genericity.overall_generic;
  return p;
}

// Factions predicted from the sign pattern of the dominant eigenvector.
inline BalancePrediction predict_balanced_state(const FriendlinessMatrix& x0) {
  return predict_balanced_state(x0, symmetric_eigen(x0));
}

}  // namespace sbal
