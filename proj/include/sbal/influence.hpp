#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sbal/errors.hpp"
#include "sbal/matrix.hpp"
#include "sbal/spectral.hpp"

// Single-agent steering of the dominant eigenvector and the influence index built on it.
//
// Vectors tagged "agent-first" are expressed in the ordering obtained by
// swapping the steering agent with index 0. The swap is a transposition, so
// the same map converts in both directions.
namespace sbal {

// Index map of the transposition (0 agent).
inline std::size_t agent_first_index(std::size_t agent, std::size_t k) {
  if (k == 0) return agent;
  if (k == agent) return 0;
  return k;
}

inline Vector to_agent_first(std::size_t agent, std::span<const double> v) {
  Vector out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[agent_first_index(agent, k)];
  return out;
}

// The transposition is self-inverse.
inline Vector from_agent_first(std::size_t agent, std::span<const double> v) { return to_agent_first(agent, v); }

inline Matrix permute_agent_first(const Matrix& x, std::size_t agent) {
  const std::size_t n = x.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = x(agent_first_index(agent, i), agent_first_index(agent, j));
  return out;
}

// Symmetric perturbation confined to one agent's row and column.
struct ArrowheadPerturbation {
  std::size_t agent = 0;
  Vector dx;  // agent-first: dx[0] is the diagonal entry, dx[1..] the off-diagonal ones

  std::size_t size() const { return dx.size(); }

  // The perturbation as a matrix in the original agent ordering. Entries outside
  // the agent's row and column are exactly zero.
  Matrix realize() const {
    const std::size_t n = dx.size();
    Matrix m(n, n);
    m(agent, agent) = dx.at(0);
    for (std::size_t j = 1; j < n; ++j) {
      const std::size_t other = agent_first_index(agent, j);
      m(agent, other) = dx[j];
      m(other, agent) = dx[j];
    }
    return m;
  }

  double off_diagonal_norm() const { return dx.size() < 2 ? 0.0 : norm2(std::span(dx).subspan(1)); }
};

// dx = V^{-1} r for the arrowhead system Delta(dx) v_hat = r, in agent-first order:
//   dx_j = r_j / v_1                           (j >= 2)
//   dx_1 = (r_1 - sum_{j>=2} dx_j v_j) / v_1
inline Vector build_vinv_apply(std::span<const double> v_hat, std::span<const double> r) {
  if (v_hat.size() != r.size()) throw InputError("v_hat and r must have the same length");
  if (v_hat.empty()) throw InputError("empty vectors");
  const double v1 = v_hat[0];
  if (v1 == 0.0) throw InputError("leading component of v_hat must be nonzero");
  Vector dx(r.size());
  double coupled = 0.0;
  for (std::size_t j = 1; j < r.size(); ++j) {
    dx[j] = r[j] / v1;
    coupled += dx[j] * v_hat[j];
  }
  dx[0] = (r[0] - coupled) / v1;
  return dx;
}

struct ArrowheadSpectrum {
  double mu_plus = 0.0;
  double mu_minus = 0.0;
  // True when the off-diagonal part vanishes: the perturbation is then rank one
  // and no longer has two nonzero eigenvalues of opposite sign.
  bool degenerate = false;
};

// Nonzero eigenvalues (d1 +- sqrt(d1^2 + 4 |dbar|^2)) / 2; the other n - 2 are zero.
inline ArrowheadSpectrum arrowhead_eigenvalues(const ArrowheadPerturbation& p) {
  if (p.size() < 2) throw InputError("arrowhead perturbation needs at least two agents");
  const double d1 = p.dx[0];
  const double bar = p.off_diagonal_norm();
  const double bar_sq = bar * bar;
  const double root = std::hypot(d1, 2.0 * bar);
  ArrowheadSpectrum s;
  s.degenerate = bar == 0.0;
  // Evaluate the larger-magnitude root directly and recover the other from
  // mu_plus * mu_minus = -|dbar|^2 to avoid cancellation.
  if (d1 >= 0.0) {
    s.mu_plus = 0.5 * (d1 + root);
    s.mu_minus = s.mu_plus > 0.0 ? -bar_sq / s.mu_plus : 0.0;
  } else {
    s.mu_minus = 0.5 * (d1 - root);
    s.mu_plus = -bar_sq / s.mu_minus;
  }
  return s;
}

inline double dominance_tolerance(double lambda1) { return 1e-9 * std::max(1.0, std::abs(lambda1)); }

struct DominanceCheck {
  double lambda1_initial = 0.0;
  double lambda1_perturbed = 0.0;
  double lambda2_perturbed = 0.0;
  bool verified = false;
  // lambda_star strictly separated from the rest of the perturbed spectrum.
  bool unique = false;
};

inline DominanceCheck dominance_details(const Matrix& x0, double lambda1_initial, const ArrowheadPerturbation& p,
                                        double lambda_star) {
  if (p.size() != x0.rows()) throw InputError("perturbation size does not match matrix");
  const Spectrum s = symmetric_eigen(x0 + p.realize());
  const double tol = dominance_tolerance(lambda1_initial);
  DominanceCheck c;
  c.lambda1_initial = lambda1_initial;
  c.lambda1_perturbed = s.values[0];
  c.lambda2_perturbed = s.size() > 1 ? s.values[1] : -std::numeric_limits<double>::infinity();
  c.verified = c.lambda2_perturbed <= lambda1_initial + tol && std::abs(c.lambda1_perturbed - lambda_star) <= tol;
  c.unique = c.lambda2_perturbed < lambda_star - tol;
  return c;
}

// lambda_2(X0 + dX) <= lambda_1(X0) and lambda_1(X0 + dX) = lambda_star, both to
// 1e-9 * max(1, |lambda_1(X0)|).
inline bool verify_dominance(const FriendlinessMatrix& x0, const ArrowheadPerturbation& p, double lambda_star) {
  const double lambda1 = symmetric_eigen(x0).values.at(0);
  return dominance_details(x0.entries(), lambda1, p, lambda_star).verified;
}

struct SteeringSolution {
  ArrowheadPerturbation perturbation;
  double lambda_star = 0.0;
  Vector v_hat;  // agent-first
  double epsilon = 0.0;
  double residual = 0.0;
  bool dominance_verified = false;
  double magnitude = 0.0;
  DominanceCheck dominance;
  bool degenerate_arrowhead = false;

  Vector v_hat_original() const { return from_agent_first(perturbation.agent, v_hat); }
};

namespace detail {

inline void check_steering_args(const FriendlinessMatrix& x0, std::size_t agent, const SignPattern& v_star,
                                double epsilon) {
  if (x0.size() == 0) throw InputError("empty network");
  if (agent >= x0.size()) throw InputError("agent index out of range");
  if (v_star.size() != x0.size()) throw InputError("sign pattern length does not match network size");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be positive and finite");
}

inline void check_lambda_star(double lambda1, double lambda_star) {
  if (!std::isfinite(lambda_star) || lambda_star < lambda1 - dominance_tolerance(lambda1))
    throw ConstraintError("lambda_star must be at least lambda_1(X0) = " + std::to_string(lambda1));
}

// Steering with lambda_1(X0) already known.
inline SteeringSolution steer(const FriendlinessMatrix& x0, double lambda1, std::size_t agent,
                              const SignPattern& v_star, double epsilon, double lambda_star) {
  const std::size_t n = x0.size();
  const Matrix xi = permute_agent_first(x0.entries(), agent);

  Vector v_hat = to_agent_first(agent, v_star.values());
  for (std::size_t j = 1; j < n; ++j) v_hat[j] *= epsilon;

  // r = (lambda_star I - X_i) v_hat
  Vector r = xi * v_hat;
  for (std::size_t j = 0; j < n; ++j) r[j] = lambda_star * v_hat[j] - r[j];

  SteeringSolution sol;
  sol.perturbation = ArrowheadPerturbation{agent, build_vinv_apply(v_hat, r)};
  sol.lambda_star = lambda_star;
  sol.v_hat = std::move(v_hat);
  sol.epsilon = epsilon;
  sol.magnitude = norm2(sol.perturbation.dx);
  sol.degenerate_arrowhead = sol.perturbation.off_diagonal_norm() == 0.0;

  const Matrix perturbed = x0.entries() + sol.perturbation.realize();
  const Vector v_orig = sol.v_hat_original();
  Vector res = perturbed * v_orig;
  for (std::size_t j = 0; j < n; ++j) res[j] -= lambda_star * v_orig[j];
  sol.residual = norm2(res);

  sol.dominance = dominance_details(x0.entries(), lambda1, sol.perturbation, lambda_star);
  sol.dominance_verified = sol.dominance.verified;
  if (!sol.dominance_verified)
    throw ConsistencyError("steering dominance check failed: lambda_2 = " + std::to_string(sol.dominance.lambda2_perturbed) +
                           ", lambda_1 = " + std::to_string(sol.dominance.lambda1_perturbed) +
                           ", lambda_star = " + std::to_string(lambda_star));
  return sol;
}

}  // namespace detail

inline constexpr double kDefaultEpsilon = 1e-2;

// Perturbation of agent's row/column making v_star (scaled by epsilon off the
// agent) an eigenvector of X0 + dX with eigenvalue lambda_star, which is then
// the dominant eigenvalue. lambda_star defaults to lambda_1(X0).
inline SteeringSolution solve_steering(const FriendlinessMatrix& x0, std::size_t agent, const SignPattern& v_star,
                                       double epsilon = kDefaultEpsilon,
                                       std::optional<double> lambda_star = std::nullopt) {
  detail::check_steering_args(x0, agent, v_star, epsilon);
  const double lambda1 = symmetric_eigen(x0).values[0];
  const double target = lambda_star.value_or(lambda1);
  detail::check_lambda_star(lambda1, target);
  return detail::steer(x0, lambda1, agent, v_star, epsilon, target);
}

struct UpperBoundDiagnostics {
  Vector alpha;  // v_j / v_1 for the n - 1 non-agent entries, agent-first
  double L1_norm = 0.0;
  double residual_term_norm = 0.0;
  double bound = 0.0;
  double exact_magnitude = 0.0;
};

// Triangle-inequality bound |L_1| + |(-alpha^T Lbar alpha, Lbar alpha)| on the
// steering magnitude, with L = lambda_star I - X_i. `v_star_values` is given in
// the original ordering and its entry at `agent` must be nonzero.
inline UpperBoundDiagnostics upper_bound(const FriendlinessMatrix& x0, std::size_t agent,
                                         std::span<const double> v_star_values, double lambda_star) {
  const std::size_t n = x0.size();
  if (agent >= n) throw InputError("agent index out of range");
  if (v_star_values.size() != n) throw InputError("vector length does not match network size");
  if (v_star_values[agent] == 0.0) throw InputError("the agent's component of v_star must be nonzero");
  const double lambda1 = symmetric_eigen(x0).values[0];
  detail::check_lambda_star(lambda1, lambda_star);

  const Vector v = to_agent_first(agent, v_star_values);
  Matrix l = permute_agent_first(x0.entries(), agent) * -1.0;
  for (std::size_t i = 0; i < n; ++i) l(i, i) += lambda_star;

  UpperBoundDiagnostics d;
  d.alpha.resize(n - 1);
  for (std::size_t j = 1; j < n; ++j) d.alpha[j - 1] = v[j] / v[0];

  const Vector l1 = l.column(0);
  Vector term(n, 0.0);
  double quad = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 1; j < n; ++j) acc += l(i, j) * d.alpha[j - 1];
    term[i] = acc;
    quad += d.alpha[i - 1] * acc;
  }
  term[0] = -quad;

  d.L1_norm = norm2(l1);
  d.residual_term_norm = norm2(term);
  d.bound = d.L1_norm + d.residual_term_norm;
  d.exact_magnitude = norm2(build_vinv_apply(v, l * v));
  if (d.bound < d.exact_magnitude * (1.0 - 1e-12) - 1e-12)
    throw ConsistencyError("upper bound is below the exact steering magnitude");
  return d;
}

struct SBIIResult {
  std::size_t agent = 0;
  double value = 0.0;
  SignPattern pattern;
  double epsilon = 0.0;
};

// Structural Balance Influence Index: steering magnitude with lambda_star = lambda_1(X).
inline SBIIResult sbii(const FriendlinessMatrix& x, std::size_t agent, const SignPattern& v_star,
                       double epsilon = kDefaultEpsilon) {
  const SteeringSolution sol = solve_steering(x, agent, v_star, epsilon);
  return {agent, sol.magnitude, v_star, epsilon};
}

// SBII for every agent, most influential (smallest value) first; ties by agent index.
inline std::vector<SBIIResult> sbii_ranking(const FriendlinessMatrix& x, const SignPattern& v_star,
                                            double epsilon = kDefaultEpsilon) {
  std::vector<SBIIResult> out;
  if (x.size() == 0) return out;
  detail::check_steering_args(x, 0, v_star, epsilon);
  // permutation is a similarity, so one eigensolve serves every agent
  const double lambda1 = symmetric_eigen(x).values[0];
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const SteeringSolution sol = detail::steer(x, lambda1, i, v_star, epsilon, lambda1);
    out.push_back({i, sol.magnitude, v_star, epsilon});
  }
  std::stable_sort(out.begin(), out.end(), [](const SBIIResult& a, const SBIIResult& b) {
    return a.value < b.value || (a.value == b.value && a.agent < b.agent);
  });
  return out;
}

}  // namespace sbal
