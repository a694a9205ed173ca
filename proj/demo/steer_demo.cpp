// Predicts the factions of a random network, then lets one agent steer it to global harmony.

#include <cstdio>

#include "sbal/sbal.hpp"

int main() {
  const auto x0 = sbal::random_symmetric(8, 42);

  const auto prediction = sbal::predict_balanced_state(x0);
  std::printf("predicted pattern: %s (escape time %.6g)\n", prediction.pattern.to_string().c_str(),
              *sbal::escape_time(x0).t_star);

  const auto harmony = sbal::SignPattern::all_positive(x0.size());
  const auto sol = sbal::solve_steering(x0, 0, harmony);
  const auto steered = sbal::predict_balanced_state(sbal::FriendlinessMatrix(x0.entries() + sol.perturbation.realize()));
  std::printf("agent1 steers with |dx| = %.6g, residual %.3g -> pattern %s\n", sol.magnitude, sol.residual,
              steered.pattern.to_string().c_str());

  for (const auto& r : sbal::sbii_ranking(x0, harmony))
    std::printf("  %-8s SBII %.6g\n", x0.labels()[r.agent].c_str(), r.value);
}
