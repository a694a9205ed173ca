#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sbal/errors.hpp"
#include "sbal/spectral.hpp"

namespace sbal {

// Complete signed graph: off-diagonal entries are +1 or -1 and symmetric.
// The diagonal carries no relationship and is ignored.
class SignedCompleteGraph {
 public:
  explicit SignedCompleteGraph(std::size_t n) : n_(n), signs_(n * n, 1) {}

  // Build from a row-major n*n table of signs. Diagonal values are not inspected.
  SignedCompleteGraph(std::size_t n, std::vector<int> signs) : n_(n), signs_(n * n, 1) {
    if (signs.size() != n * n) throw InputError("sign table must hold n*n entries");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const int s = signs[i * n + j];
        if (s != 1 && s != -1) throw InputError("edge signs must be +1 or -1");
        if (s != signs[j * n + i]) throw InputError("edge signs must be symmetric");
        signs_[i * n + j] = static_cast<std::int8_t>(s);
      }
    }
  }

  // Edge signs of a friendliness matrix. A zero off-diagonal entry has no sign.
  static SignedCompleteGraph from_matrix(const FriendlinessMatrix& x) {
    const std::size_t n = x.size();
    std::vector<int> s(n * n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (x(i, j) == 0.0) throw InputError("zero friendliness level has no sign");
        s[i * n + j] = x(i, j) > 0.0 ? 1 : -1;
      }
    }
    return SignedCompleteGraph(n, std::move(s));
  }

  std::size_t size() const { return n_; }
  int sign(std::size_t i, std::size_t j) const { return signs_[i * n_ + j]; }

  void set_sign(std::size_t i, std::size_t j, int s) {
    if (i == j) return;
    if (s != 1 && s != -1) throw InputError("edge signs must be +1 or -1");
    signs_[i * n_ + j] = static_cast<std::int8_t>(s);
    signs_[j * n_ + i] = static_cast<std::int8_t>(s);
  }

  friend bool operator==(const SignedCompleteGraph&, const SignedCompleteGraph&) = default;

 private:
  std::size_t n_;
  std::vector<std::int8_t> signs_;
};

struct FactionPartition {
  std::vector<std::size_t> faction_a;  // always contains vertex 0
  std::vector<std::size_t> faction_b;  // may be empty
};

struct BalanceReport {
  bool balanced = false;
  std::optional<std::array<std::size_t, 3>> violating_triangle;
  std::optional<FactionPartition> partition;
};

inline bool triangle_balanced(int s_ij, int s_jk, int s_ik) { return s_ij * s_jk * s_ik == 1; }

inline BalanceReport is_structurally_balanced(const SignedCompleteGraph& g) {
  const std::size_t n = g.size();
  BalanceReport report;
  if (n == 0) {
    report.balanced = true;
    report.partition = FactionPartition{};
    return report;
  }

  // Vertex 0 anchors faction A; everyone friendly to it joins A.
  std::vector<int> side(n, 1);
  for (std::size_t j = 1; j < n; ++j) side[j] = g.sign(0, j);

  bool consistent = true;
  for (std::size_t i = 0; i < n && consistent; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (g.sign(i, j) != side[i] * side[j]) {
        consistent = false;
        break;
      }

  if (consistent) {
    FactionPartition p;
    for (std::size_t k = 0; k < n; ++k) (side[k] > 0 ? p.faction_a : p.faction_b).push_back(k);
    report.balanced = true;
    report.partition = std::move(p);
    return report;
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (!triangle_balanced(g.sign(i, j), g.sign(j, k), g.sign(i, k))) {
          report.violating_triangle = std::array<std::size_t, 3>{i, j, k};
          return report;
        }
  throw ConsistencyError("inconsistent partition without a violating triangle");
}

// The balanced complete graph whose factions are the sign classes of p: s_ij = p_i p_j.
inline SignedCompleteGraph balanced_state_pattern(const SignPattern& p) {
  const std::size_t n = p.size();
  std::vector<int> s(n * n, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s[i * n + j] = p[i] * p[j];
  return SignedCompleteGraph(n, std::move(s));
}

}  // namespace sbal
