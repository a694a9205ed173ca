#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sbal/dynamics.hpp"
#include "sbal/influence.hpp"
#include "sbal/matrix_io.hpp"

// Report formats shared by the command-line tool and the tests.
namespace sbal {

// Long-format trajectory: t,i,j,x_ij,x_ij_normalized for 1-based i <= j.
inline void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& samples) {
  out << "t,i,j,x_ij,x_ij_normalized\n";
  for (const auto& s : samples) {
    const std::string t = detail::format12(s.t);
    const std::size_t n = s.state.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        out << t << ',' << (i + 1) << ',' << (j + 1) << ',' << detail::format12(s.state(i, j)) << ','
            << detail::format12(s.normalized_state(i, j)) << '\n';
  }
}

inline nlohmann::json genericity_to_json(const GenericityReport& g) {
  return {{"lambda1_positive", g.lambda1_positive}, {"spectral_gap", g.spectral_gap},
          {"gap_ok", g.gap_ok},                     {"min_component", g.min_component},
          {"components_nonzero", g.components_nonzero}, {"overall_generic", g.overall_generic}};
}

inline nlohmann::json prediction_to_json(const FriendlinessMatrix& x0, const BalancePrediction& p,
                                         const EscapeTime& esc) {
  auto names = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (std::size_t i : idx) out.push_back(x0.labels()[i]);
    return out;
  };
  nlohmann::json j;
  j["labels"] = x0.labels();
  j["lambda1"] = p.lambda1;
  j["escape_time"] = {{"finite", esc.finite}, {"t_star", esc.t_star ? nlohmann::json(*esc.t_star) : nlohmann::json()}};
  j["pattern"] = p.pattern.to_string();
  j["faction_pos"] = names(p.faction_pos);
  j["faction_neg"] = names(p.faction_neg);
  j["ambiguous"] = names(p.ambiguous);
  j["reliable"] = p.reliable;
  j["genericity"] = genericity_to_json(p.genericity);
  return j;
}

// Steering solution export; dx is in agent-first order.
inline nlohmann::json steering_to_json(const FriendlinessMatrix& x0, const SignPattern& v_star,
                                       const SteeringSolution& s) {
  return {{"agent", x0.labels()[s.perturbation.agent]},
          {"pattern", v_star.to_string()},
          {"epsilon", s.epsilon},
          {"lambda_star", s.lambda_star},
          {"dx", s.perturbation.dx},
          {"residual", s.residual},
          {"magnitude", s.magnitude},
          {"dominance_verified", s.dominance_verified},
          {"lambda2_perturbed", s.dominance.lambda2_perturbed},
          {"degenerate_arrowhead", s.degenerate_arrowhead}};
}

struct SteeringCheck {
  double residual = 0.0;
  double residual_bound = 0.0;
  bool residual_ok = false;
  bool dominance_ok = false;
  bool sign_match = false;
  bool passed() const { return residual_ok && dominance_ok && sign_match; }
};

// Re-verifies an exported steering solution against the matrix it was computed for,
// without trusting any derived value stored in the JSON.
inline SteeringCheck check_steering_json(const FriendlinessMatrix& x0, const nlohmann::json& j) {
  const auto agent = x0.index_of(j.at("agent").get<std::string>());
  if (!agent) throw InputError("agent '" + j.at("agent").get<std::string>() + "' not in matrix");
  const SignPattern v_star = SignPattern::parse(j.at("pattern").get<std::string>());
  const double epsilon = j.at("epsilon").get<double>();
  const double lambda_star = j.at("lambda_star").get<double>();
  ArrowheadPerturbation p{*agent, j.at("dx").get<Vector>()};
  const std::size_t n = x0.size();
  if (v_star.size() != n || p.size() != n) throw InputError("solution size does not match matrix");

  Vector v_hat = v_star.values();
  for (std::size_t k = 0; k < n; ++k)
    if (k != *agent) v_hat[k] *= epsilon;

  const Matrix perturbed = x0.entries() + p.realize();
  Vector res = perturbed * v_hat;
  for (std::size_t k = 0; k < n; ++k) res[k] -= lambda_star * v_hat[k];

  SteeringCheck c;
  c.residual = norm2(res);
  c.residual_bound = 1e-9 * std::max(1.0, lambda_star) * norm2(v_hat);
  c.residual_ok = c.residual <= c.residual_bound;
  c.dominance_ok = verify_dominance(x0, p, lambda_star);

  Vector w = symmetric_eigen(perturbed).eigenvector(0);
  if ((w[*agent] > 0) != (v_star[*agent] > 0))
    for (double& x : w) x = -x;
  c.sign_match = true;
  for (std::size_t k = 0; k < n; ++k)
    if (!((w[k] > 0 && v_star[k] > 0) || (w[k] < 0 && v_star[k] < 0))) c.sign_match = false;
  return c;
}

}  // namespace sbal
