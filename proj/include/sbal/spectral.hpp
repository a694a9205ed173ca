#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbal/errors.hpp"
#include "sbal/matrix.hpp"

namespace sbal {

inline std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("agent" + std::to_string(i + 1));
  return labels;
}

// Symmetric matrix of pairwise friendliness levels with one label per agent.
// Symmetry is exact: construction rejects any matrix with x_ij != x_ji.
class FriendlinessMatrix {
 public:
  explicit FriendlinessMatrix(Matrix entries) : FriendlinessMatrix(entries, default_labels(entries.rows())) {}

  FriendlinessMatrix(Matrix entries, std::vector<std::string> labels)
      : entries_(std::move(entries)), labels_(std::move(labels)) {
    if (!entries_.square()) throw InputError("friendliness matrix must be square");
    if (!all_finite(entries_)) throw InputError("friendliness matrix has non-finite entries");
    if (asymmetry(entries_) != 0.0) throw InputError("friendliness matrix is not symmetric");
    if (labels_.size() != entries_.rows()) throw InputError("label count does not match matrix size");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw InputError("agent labels must be unique");
  }

  // Accepts entries that are symmetric to within `tol` and replaces each
  // off-diagonal pair by its average.
  static FriendlinessMatrix symmetrized(Matrix entries, std::vector<std::string> labels, double tol) {
    if (!entries.square()) throw InputError("friendliness matrix must be square");
    if (!all_finite(entries)) throw InputError("friendliness matrix has non-finite entries");
    const double asym = asymmetry(entries);
    if (asym > tol)
      throw InputError("matrix is not symmetric (max |x_ij - x_ji| = " + std::to_string(asym) + ")");
    for (std::size_t i = 0; i < entries.rows(); ++i) {
      for (std::size_t j = i + 1; j < entries.cols(); ++j) {
        const double avg = 0.5 * (entries(i, j) + entries(j, i));
        entries(i, j) = avg;
        entries(j, i) = avg;
      }
    }
    return FriendlinessMatrix(std::move(entries), std::move(labels));
  }

  std::size_t size() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<std::size_t> index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

  FriendlinessMatrix with_entries(Matrix entries) const { return FriendlinessMatrix(std::move(entries), labels_); }
  FriendlinessMatrix scaled(double c) const { return with_entries(entries_ * c); }

 private:
  Matrix entries_;
  std::vector<std::string> labels_;
};

// Vector over {-1, +1} describing a two-faction split.
class SignPattern {
 public:
  SignPattern() = default;
  explicit SignPattern(std::vector<int> signs) : signs_(std::move(signs)) {
    for (int s : signs_)
      if (s != 1 && s != -1) throw InputError("sign pattern entries must be +1 or -1");
  }

  static SignPattern all_positive(std::size_t n) { return SignPattern(std::vector<int>(n, 1)); }

  // "+--+" style notation.
  static SignPattern parse(std::string_view text) {
    std::vector<int> signs;
    signs.reserve(text.size());
    for (char c : text) {
      if (c == '+')
        signs.push_back(1);
      else if (c == '-')
        signs.push_back(-1);
      else
        throw InputError("sign pattern may only contain '+' and '-'");
    }
    return SignPattern(std::move(signs));
  }

  std::size_t size() const { return signs_.size(); }
  int operator[](std::size_t i) const { return signs_[i]; }
  const std::vector<int>& signs() const { return signs_; }

  Vector values() const { return Vector(signs_.begin(), signs_.end()); }

  SignPattern negated() const {
    std::vector<int> s(signs_);
    for (int& x : s) x = -x;
    return SignPattern(std::move(s));
  }

  std::string to_string() const {
    std::string s;
    for (int x : signs_) s.push_back(x > 0 ? '+' : '-');
    return s;
  }

  friend bool operator==(const SignPattern&, const SignPattern&) = default;

 private:
  std::vector<int> signs_;
};

// Eigenvalues in descending order; column k of `vectors` pairs with values[k].
struct Spectrum {
  Vector values;
  Matrix vectors;

  std::size_t size() const { return values.size(); }
  Vector eigenvector(std::size_t k) const { return vectors.column(k); }
};

struct GenericityReport {
  bool lambda1_positive = false;
  double spectral_gap = 0.0;
  bool gap_ok = false;
  double min_component = 0.0;
  bool components_nonzero = false;
  bool overall_generic = false;
};

namespace detail {

inline constexpr double kJacobiOffTolerance = 1e-13;
inline constexpr int kJacobiMaxSweeps = 100;

// Relative slack under which two magnitudes count as tied for the sign convention.
inline constexpr double kSignTieTolerance = 1e-12;

// Flip v so that its largest-magnitude entry (lowest index among ties) is nonnegative.
inline void apply_sign_convention(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best]) * (1.0 + kSignTieTolerance)) best = i;
  if (!v.empty() && v[best] < 0.0)
    for (double& x : v) x = -x;
}

// Cyclic Jacobi eigenvalue iteration on a symmetric matrix.
inline Spectrum jacobi_eigen(Matrix a) {
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);
  const double norm_f = frobenius_norm(a);
  const double target = kJacobiOffTolerance * norm_f;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > target) {
    if (++sweep > kJacobiMaxSweeps) throw ConsistencyError("Jacobi eigensolver did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // negligible relative to both diagonal entries
        const double eps = std::numeric_limits<double>::epsilon();
        if (std::abs(apq) < 0.1 * eps * std::abs(app) && std::abs(apq) < 0.1 * eps * std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double new_kp = c * akp - s * akq;
          const double new_kq = s * akp + c * akq;
          a(k, p) = new_kp;
          a(p, k) = new_kp;
          a(k, q) = new_kq;
          a(q, k) = new_kq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  Spectrum out{Vector(n), Matrix(n, n)};
  Vector col(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, order[k]);
    apply_sign_convention(col);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = col[i];
  }
  return out;
}

}  // namespace detail

// Full eigendecomposition of a symmetric matrix. Deterministic for fixed input.
inline Spectrum symmetric_eigen(const FriendlinessMatrix& a) { return detail::jacobi_eigen(a.entries()); }

// Overload for raw matrices (perturbed states, oracles). Requires symmetry to
// roundoff; the strictly lower triangle is replaced by the upper one.
inline Spectrum symmetric_eigen(const Matrix& a) {
  if (!a.square()) throw InputError("eigensolver requires a square matrix");
  if (!all_finite(a)) throw InputError("eigensolver input has non-finite entries");
  if (asymmetry(a) > 1e-12 * std::max(1.0, max_abs(a))) throw InputError("eigensolver input is not symmetric");
  Matrix sym(a);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) sym(j, i) = sym(i, j);
  return detail::jacobi_eigen(std::move(sym));
}

inline std::pair<double, Vector> dominant_eigenpair(const Spectrum& s) {
  if (s.size() == 0) throw InputError("empty spectrum");
  return {s.values[0], s.eigenvector(0)};
}

inline std::pair<double, Vector> dominant_eigenpair(const FriendlinessMatrix& a) {
  return dominant_eigenpair(symmetric_eigen(a));
}

inline double default_gap_tolerance(double lambda1) { return 1e-9 * std::max(1.0, std::abs(lambda1)); }
inline double default_zero_tolerance(std::span<const double> v) { return 1e-8 * norm2(v); }

inline GenericityReport genericity_check(const Spectrum& s, double gap_tol, double comp_tol) {
  if (s.size() == 0) throw InputError("empty spectrum");
  GenericityReport r;
  r.lambda1_positive = s.values[0] > 0.0;
  r.spectral_gap = s.size() > 1 ? s.values[0] - s.values[1] : std::numeric_limits<double>::infinity();
  r.gap_ok = r.spectral_gap > gap_tol;
  const Vector w1 = s.eigenvector(0);
  r.min_component = std::abs(w1[0]);
  for (double x : w1) r.min_component = std::min(r.min_component, std::abs(x));
  r.components_nonzero = r.min_component > comp_tol;
  r.overall_generic = r.lambda1_positive && r.gap_ok && r.components_nonzero;
  return r;
}

inline GenericityReport genericity_check(const Spectrum& s) {
  return genericity_check(s, default_gap_tolerance(s.values.at(0)), 1e-8);
}

inline GenericityReport genericity_check(const FriendlinessMatrix& a, double gap_tol, double comp_tol) {
  if (!(gap_tol > 0.0) || !(comp_tol > 0.0)) throw InputError("tolerances must be positive");
  return genericity_check(symmetric_eigen(a), gap_tol, comp_tol);
}

inline GenericityReport genericity_check(const FriendlinessMatrix& a) { return genericity_check(symmetric_eigen(a)); }

struct SignPatternResult {
  SignPattern pattern;
  std::vector<std::size_t> ambiguous;  // indices with |v_i| <= zero_tol, assigned +1
};

inline SignPatternResult sign_pattern_of(std::span<const double> v, double zero_tol) {
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
    throw InputError("sign pattern of the zero vector is undefined");
  std::vector<int> signs(v.size());
  std::vector<std::size_t> ambiguous;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > zero_tol) {
      signs[i] = 1;
    } else if (v[i] < -zero_tol) {
      signs[i] = -1;
    } else {
      signs[i] = 1;
      ambiguous.push_back(i);
    }
  }
  return {SignPattern(std::move(signs)), std::move(ambiguous)};
}

inline SignPatternResult sign_pattern_of(std::span<const double> v) {
  return sign_pattern_of(v, default_zero_tolerance(v));
}

inline FriendlinessMatrix frobenius_normalize(const FriendlinessMatrix& a) {
  const double nf = frobenius_norm(a.entries());
  if (nf == 0.0) throw InputError("cannot normalize the zero matrix");
  return a.scaled(1.0 / nf);
}

}  // namespace sbal
