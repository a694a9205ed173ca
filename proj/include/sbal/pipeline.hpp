#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sbal/dynamics.hpp"
#include "sbal/errors.hpp"
#include "sbal/influence.hpp"
#include "sbal/matrix_io.hpp"
#include "sbal/spectral.hpp"

// Roll-call votes and GDP series to yearly friendliness matrices.
namespace sbal {

enum class Vote { yes, abstain, no };

struct VoteRecord {
  int year = 0;
  std::string resolution_id;
  std::string country;
  Vote vote = Vote::yes;

  friend bool operator==(const VoteRecord&, const VoteRecord&) = default;
};

struct VoteParseResult {
  std::vector<VoteRecord> records;
  std::size_t skipped = 0;  // rows whose vote code is not 1, 2 or 3
};

struct GdpRecord {
  int year = 0;
  std::string country;
  double gdp = 0.0;
};

namespace detail {

inline bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

// Reads the first non-blank line and checks it against the expected header.
inline std::size_t expect_header(std::istream& in, const std::vector<std::string>& expected) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (split_csv_line(line) != expected) {
      std::string want;
      for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
      throw ParseError("expected header '" + want + "'", line_no);
    }
    return line_no;
  }
  throw ParseError("empty input", line_no);
}

}  // namespace detail

// votes.csv: year,resolution_id,country,vote with 1 = yes, 2 = abstain, 3 = no.
inline VoteParseResult parse_votes(std::istream& in) {
  std::size_t line_no = detail::expect_header(in, {"year", "resolution_id", "country", "vote"});
  VoteParseResult out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 4) throw ParseError("expected 4 fields, found " + std::to_string(f.size()), line_no);
    VoteRecord r;
    if (!detail::parse_int(f[0], r.year)) throw ParseError("non-integer year '" + f[0] + "'", line_no);
    if (f[1].empty() || f[2].empty()) throw ParseError("empty resolution or country", line_no);
    int code = 0;
    if (!detail::parse_int(f[3], code) || code < 1 || code > 3) {
      ++out.skipped;
      continue;
    }
    r.resolution_id = f[1];
    r.country = f[2];
    r.vote = code == 1 ? Vote::yes : (code == 2 ? Vote::abstain : Vote::no);
    out.records.push_back(std::move(r));
  }
  return out;
}

// gdp.csv: year,country,gdp with gdp > 0.
inline std::vector<GdpRecord> parse_gdp(std::istream& in) {
  std::size_t line_no = detail::expect_header(in, {"year", "country", "gdp"});
  std::vector<GdpRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 3) throw ParseError("expected 3 fields, found " + std::to_string(f.size()), line_no);
    GdpRecord r;
    if (!detail::parse_int(f[0], r.year)) throw ParseError("non-integer year '" + f[0] + "'", line_no);
    if (f[1].empty()) throw ParseError("empty country", line_no);
    r.country = f[1];
    if (!detail::parse_double(f[2], r.gdp) || !std::isfinite(r.gdp) || !(r.gdp > 0.0))
      throw ParseError("gdp must be a positive number, got '" + f[2] + "'", line_no);
    out.push_back(std::move(r));
  }
  return out;
}

inline VoteParseResult parse_votes_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open votes file '" + path + "'");
  return parse_votes(in);
}

inline std::vector<GdpRecord> parse_gdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open gdp file '" + path + "'");
  return parse_gdp(in);
}

// One country's votes in one year, keyed by resolution id.
using VoteMap = std::map<std::string, Vote>;

namespace detail {

// Distance in half units: 0 same, 1 across an abstention, 2 yes against no.
inline int vote_distance_halves(Vote a, Vote b) {
  if (a == b) return 0;
  if (a == Vote::abstain || b == Vote::abstain) return 1;
  return 2;
}

}  // namespace detail

inline std::size_t joint_vote_count(const VoteMap& a, const VoteMap& b) {
  std::size_t d = 0;
  for (const auto& [res, _] : a) d += b.count(res);
  return d;
}

// s = 1 - 2 * sum(d) / D over the D resolutions both voted on, with d = 0 for
// matching votes, 1/2 when one side abstained and 1 for yes against no.
// Returns 0 when there are no joint votes.
inline double affinity_index(const VoteMap& a, const VoteMap& b) {
  std::size_t joint = 0;
  long halves = 0;
  for (const auto& [res, va] : a) {
    auto it = b.find(res);
    if (it == b.end()) continue;
    ++joint;
    halves += detail::vote_distance_halves(va, it->second);
  }
  if (joint == 0) return 0.0;
  return 1.0 - static_cast<double>(halves) / static_cast<double>(joint);
}

struct NetworkOptions {
  double self_affinity = 1.0;  // diagonal x_ii = self_affinity * g_i^2
};

struct YearlyNetwork {
  int year = 0;
  FriendlinessMatrix matrix;
  Matrix affinity;
  Vector gdp_weights;  // g_i = gdp_i / max_k gdp_k
  std::vector<std::vector<std::size_t>> joint_vote_counts;
  std::vector<std::pair<std::size_t, std::size_t>> zero_joint_pairs;  // affinity set to 0
};

// year -> country -> votes
using VoteIndex = std::map<int, std::map<std::string, VoteMap>>;
// year -> country -> gdp
using GdpIndex = std::map<int, std::map<std::string, double>>;

// Later records for the same (year, resolution, country) replace earlier ones.
inline VoteIndex index_votes(const std::vector<VoteRecord>& votes) {
  VoteIndex idx;
  for (const auto& v : votes) idx[v.year][v.country][v.resolution_id] = v.vote;
  return idx;
}

inline GdpIndex index_gdp(const std::vector<GdpRecord>& gdps) {
  GdpIndex idx;
  for (const auto& g : gdps) idx[g.year][g.country] = g.gdp;
  return idx;
}

inline YearlyNetwork build_yearly_network(const VoteIndex& votes, const GdpIndex& gdps, int year,
                                          const std::vector<std::string>& countries,
                                          const NetworkOptions& options = {}) {
  const std::size_t n = countries.size();
  if (n == 0) throw InputError("no countries requested");
  auto vy = votes.find(year);
  if (vy == votes.end()) throw DataError("no vote data for year " + std::to_string(year));
  auto gy = gdps.find(year);

  Vector g(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (gy == gdps.end() || !gy->second.count(countries[i]))
      throw DataError("missing GDP for " + countries[i] + " in " + std::to_string(year));
    g[i] = gy->second.at(countries[i]);
  }
  const double gmax = *std::max_element(g.begin(), g.end());
  for (double& x : g) x /= gmax;

  static const VoteMap kNoVotes;
  std::vector<const VoteMap*> maps(n, &kNoVotes);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = vy->second.find(countries[i]);
    if (it != vy->second.end()) maps[i] = &it->second;
  }

  Matrix affinity(n, n);
  Matrix x(n, n);
  std::vector<std::vector<std::size_t>> joint(n, std::vector<std::size_t>(n, 0));
  std::vector<std::pair<std::size_t, std::size_t>> zero_pairs;
  for (std::size_t i = 0; i < n; ++i) {
    affinity(i, i) = 1.0;
    joint[i][i] = maps[i]->size();
    x(i, i) = options.self_affinity * g[i] * g[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t d = joint_vote_count(*maps[i], *maps[j]);
      const double s = affinity_index(*maps[i], *maps[j]);
      if (d == 0) zero_pairs.emplace_back(i, j);
      joint[i][j] = joint[j][i] = d;
      affinity(i, j) = affinity(j, i) = s;
      const double xij = s * g[i] * g[j];
      x(i, j) = x(j, i) = xij;
    }
  }
  return YearlyNetwork{year, FriendlinessMatrix(std::move(x), countries), std::move(affinity), std::move(g),
                       std::move(joint), std::move(zero_pairs)};
}

inline YearlyNetwork build_yearly_network(const std::vector<VoteRecord>& votes, const std::vector<GdpRecord>& gdps,
                                          int year, const std::vector<std::string>& countries,
                                          const NetworkOptions& options = {}) {
  return build_yearly_network(index_votes(votes), index_gdp(gdps), year, countries, options);
}

// Sorted list of every country that cast a counted vote.
inline std::vector<std::string> countries_in(const std::vector<VoteRecord>& votes) {
  std::set<std::string> s;
  for (const auto& v : votes) s.insert(v.country);
  return {s.begin(), s.end()};
}

struct YearAnalysis {
  int year = 0;
  YearlyNetwork network;
  BalancePrediction prediction;
  std::vector<SBIIResult> ranking;
};

struct YearFailure {
  int year = 0;
  std::string message;
};

struct SeriesResult {
  std::vector<std::string> countries;
  double epsilon = 0.0;
  std::vector<YearAnalysis> years;
  std::vector<YearFailure> failures;
};

// Per-year faction prediction and SBII ranking against v_star over [first_year, last_year].
// Years that cannot be built are recorded in `failures` and skipped.
inline SeriesResult yearly_series(const std::vector<VoteRecord>& votes, const std::vector<GdpRecord>& gdps,
                                  int first_year, int last_year, const std::vector<std::string>& countries,
                                  const SignPattern& v_star, double epsilon = kDefaultEpsilon,
                                  const NetworkOptions& options = {}) {
  if (first_year > last_year) throw InputError("empty year range");
  if (v_star.size() != countries.size()) throw InputError("sign pattern length does not match country count");
  const VoteIndex vidx = index_votes(votes);
  const GdpIndex gidx = index_gdp(gdps);
  SeriesResult out;
  out.countries = countries;
  out.epsilon = epsilon;
  for (int year = first_year; year <= last_year; ++year) {
    try {
      YearlyNetwork net = build_yearly_network(vidx, gidx, year, countries, options);
      BalancePrediction pred = predict_balanced_state(net.matrix);
      std::vector<SBIIResult> ranking = sbii_ranking(net.matrix, v_star, epsilon);
      out.years.push_back({year, std::move(net), std::move(pred), std::move(ranking)});
    } catch (const DataError& e) {
      out.failures.push_back({year, e.what()});
    }
  }
  return out;
}

// factions.csv: year,country,faction,ambiguous
inline void write_factions_csv(std::ostream& out, const SeriesResult& series) {
  out << "year,country,faction,ambiguous\n";
  for (const auto& y : series.years) {
    const auto& amb = y.prediction.ambiguous;
    for (std::size_t i = 0; i < series.countries.size(); ++i) {
      const bool is_amb = std::find(amb.begin(), amb.end(), i) != amb.end();
      out << y.year << ',' << series.countries[i] << ',' << y.prediction.pattern[i] << ',' << (is_amb ? 1 : 0)
          << '\n';
    }
  }
}

// sbii.csv: year,country,sbii_value,rank,epsilon, rows in rank order within each year.
inline void write_sbii_csv(std::ostream& out, const SeriesResult& series) {
  out << "year,country,sbii_value,rank,epsilon\n";
  for (const auto& y : series.years) {
    for (std::size_t r = 0; r < y.ranking.size(); ++r) {
      const auto& res = y.ranking[r];
      out << y.year << ',' << series.countries[res.agent] << ',' << detail::format12(res.value) << ',' << (r + 1)
          << ',' << detail::format12(res.epsilon) << '\n';
    }
  }
}

}  // namespace sbal
