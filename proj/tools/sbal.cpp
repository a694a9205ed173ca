// sbal: command-line front end for structural-balance simulation, faction
// prediction, single-agent steering and influence ranking.
//
// Exit codes: 0 success, 1 input or file error, 2 domain error (including a
// failed `check`), 3 internal consistency failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sbal/sbal.hpp"

namespace fs = std::filesystem;

namespace {

enum class Command { simulate, predict, steer, sbii, ingest, series, check };

struct RunConfig {
  Command command = Command::simulate;
  std::string input;
  std::string votes_path;
  std::string gdp_path;
  std::string solution_path;
  std::string out_dir = ".";
  double epsilon = sbal::kDefaultEpsilon;
  double fraction = sbal::kDefaultTrajectoryFraction;
  std::size_t samples = sbal::kDefaultTrajectorySamples;
  std::optional<std::size_t> random_n;
  std::uint64_t seed = 0;
  std::string agent;
  std::string pattern;
  std::optional<double> lambda_star;
  std::string years;
  bool plot = false;
};

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitDomain = 2;
constexpr int kExitInternal = 3;

class UsageError : public sbal::InputError {
 public:
  using sbal::InputError::InputError;
};

sbal::FriendlinessMatrix load_matrix(const RunConfig& cfg) {
  if (cfg.random_n && !cfg.input.empty()) throw UsageError("give either --input or --random, not both");
  if (cfg.random_n) {
    if (*cfg.random_n == 0) throw UsageError("--random needs a positive size");
    return sbal::random_symmetric(*cfg.random_n, cfg.seed);
  }
  if (cfg.input.empty()) throw UsageError("a matrix is required: --input PATH or --random N");
  return sbal::read_matrix_csv(cfg.input);
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return fs::path(cfg.out_dir) / name;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  const fs::path p = out_path(cfg, name);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw sbal::InputError("cannot write '" + p.string() + "'");
  return out;
}

void save_random_matrix(const RunConfig& cfg, const sbal::FriendlinessMatrix& x) {
  if (!cfg.random_n) return;
  auto out = open_out(cfg, "initial_matrix.csv");
  sbal::write_matrix_csv(out, x);
}

sbal::SignPattern pattern_for(const RunConfig& cfg, std::size_t n) {
  if (cfg.pattern.empty()) return sbal::SignPattern::all_positive(n);
  sbal::SignPattern p = sbal::SignPattern::parse(cfg.pattern);
  if (p.size() != n)
    throw UsageError("--pattern has " + std::to_string(p.size()) + " signs but the network has " + std::to_string(n) +
                     " agents");
  return p;
}

std::pair<int, int> parse_years(const std::string& range) {
  if (range.empty()) throw UsageError("--years A:B is required");
  const auto colon = range.find(':');
  int a = 0;
  int b = 0;
  const std::string first = range.substr(0, colon);
  const std::string last = colon == std::string::npos ? first : range.substr(colon + 1);
  if (!sbal::detail::parse_int(first, a) || !sbal::detail::parse_int(last, b) || a > b)
    throw UsageError("--years must look like 1946:2008");
  return {a, b};
}

struct PipelineInputs {
  sbal::VoteParseResult votes;
  std::vector<sbal::GdpRecord> gdps;
};

PipelineInputs load_pipeline(const RunConfig& cfg) {
  std::string votes = cfg.votes_path;
  std::string gdp = cfg.gdp_path;
  if (!cfg.input.empty()) {
    if (votes.empty()) votes = (fs::path(cfg.input) / "votes.csv").string();
    if (gdp.empty()) gdp = (fs::path(cfg.input) / "gdp.csv").string();
  }
  if (votes.empty() || gdp.empty()) throw UsageError("need --input DIR (votes.csv, gdp.csv) or --votes and --gdp");
  PipelineInputs in{sbal::parse_votes_file(votes), sbal::parse_gdp_file(gdp)};
  if (in.votes.skipped > 0) std::cerr << "skipped " << in.votes.skipped << " vote rows with unrecognized codes\n";
  return in;
}

int cmd_simulate(const RunConfig& cfg) {
  const auto x0 = load_matrix(cfg);
  const auto esc = sbal::escape_time(x0);
  if (!esc.finite) {
    std::cerr << "no finite escape time (lambda1 <= 0)\n";
    return kExitDomain;
  }
  const auto samples = sbal::sample_trajectory(x0, cfg.fraction, cfg.samples);
  save_random_matrix(cfg, x0);
  {
    auto out = open_out(cfg, "trajectory.csv");
    sbal::write_trajectory_csv(out, samples);
  }
  if (cfg.plot) {
    sbal::plot::LinePlot plot{"Friendliness trajectories", "t", "x_ij(t)", {}, false};
    const std::size_t n = x0.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        sbal::plot::Series s;
        for (const auto& smp : samples) {
          s.x.push_back(smp.t);
          s.y.push_back(smp.state(i, j));
        }
        s.color = s.y.back() >= 0.0 ? "#1f77b4" : "#d62728";
        plot.series.push_back(std::move(s));
      }
    }
    auto out = open_out(cfg, "trajectory.svg");
    sbal::plot::write_line_plot_svg(out, plot);
  }
  std::cout << "t* = " << sbal::detail::format12(*esc.t_star) << "\nsamples = " << samples.size() << '\n';
  return kExitOk;
}

int cmd_predict(const RunConfig& cfg) {
  const auto x0 = load_matrix(cfg);
  const auto spectrum = sbal::symmetric_eigen(x0);
  const auto pred = sbal::predict_balanced_state(x0, spectrum);
  const auto esc = sbal::escape_time(spectrum);
  save_random_matrix(cfg, x0);
  {
    auto out = open_out(cfg, "prediction.json");
    out << sbal::prediction_to_json(x0, pred, esc).dump(2) << '\n';
  }
  std::cout << "faction +1:";
  for (auto i : pred.faction_pos) std::cout << ' ' << x0.labels()[i];
  std::cout << "\nfaction -1:";
  for (auto i : pred.faction_neg) std::cout << ' ' << x0.labels()[i];
  std::cout << '\n';
  if (!pred.ambiguous.empty()) std::cout << "ambiguous agents: " << pred.ambiguous.size() << '\n';
  if (!pred.reliable) std::cout << "warning: initial state is not generic; prediction unreliable\n";
  return kExitOk;
}

int cmd_steer(const RunConfig& cfg) {
  const auto x0 = load_matrix(cfg);
  if (cfg.agent.empty()) throw UsageError("--agent LABEL is required");
  const auto agent = x0.index_of(cfg.agent);
  if (!agent) throw UsageError("unknown agent '" + cfg.agent + "'");
  if (cfg.pattern.empty()) throw UsageError("--pattern is required, e.g. --pattern +--");
  const auto v_star = pattern_for(cfg, x0.size());
  const auto sol = sbal::solve_steering(x0, *agent, v_star, cfg.epsilon, cfg.lambda_star);
  save_random_matrix(cfg, x0);
  {
    auto out = open_out(cfg, "steering.json");
    out << sbal::steering_to_json(x0, v_star, sol).dump(2) << '\n';
  }
  std::cout << "magnitude = " << sbal::detail::format12(sol.magnitude)
            << "\nresidual = " << sbal::detail::format12(sol.residual) << '\n';
  if (sol.degenerate_arrowhead) std::cout << "note: perturbation touches only the diagonal entry\n";
  if (!sol.dominance.unique) std::cout << "warning: lambda_star is not separated from lambda_2\n";
  return kExitOk;
}

int cmd_check(const RunConfig& cfg) {
  const auto x0 = load_matrix(cfg);
  if (cfg.solution_path.empty()) throw UsageError("--solution PATH is required");
  std::ifstream in(cfg.solution_path);
  if (!in) throw sbal::InputError("cannot open '" + cfg.solution_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw sbal::InputError(std::string("invalid JSON: ") + e.what());
  }
  sbal::SteeringCheck c;
  try {
    c = sbal::check_steering_json(x0, j);
  } catch (const nlohmann::json::exception& e) {
    throw sbal::InputError(std::string("malformed steering solution: ") + e.what());
  }
  std::cout << "residual " << sbal::detail::format12(c.residual) << " (bound " << sbal::detail::format12(c.residual_bound)
            << "): " << (c.residual_ok ? "ok" : "FAIL") << "\ndominance: " << (c.dominance_ok ? "ok" : "FAIL")
            << "\nsign pattern: " << (c.sign_match ? "ok" : "FAIL") << '\n';
  return c.passed() ? kExitOk : kExitDomain;
}

int cmd_sbii(const RunConfig& cfg) {
  const auto x = load_matrix(cfg);
  const auto v_star = pattern_for(cfg, x.size());
  const auto ranking = sbal::sbii_ranking(x, v_star, cfg.epsilon);
  save_random_matrix(cfg, x);
  {
    auto out = open_out(cfg, "sbii.csv");
    out << "agent,sbii_value,rank,epsilon\n";
    for (std::size_t r = 0; r < ranking.size(); ++r)
      out << x.labels()[ranking[r].agent] << ',' << sbal::detail::format12(ranking[r].value) << ',' << (r + 1) << ','
          << sbal::detail::format12(ranking[r].epsilon) << '\n';
  }
  if (cfg.plot) {
    sbal::plot::BarChart chart{"Structural Balance Influence Index (" + v_star.to_string() + ")", "SBII", {}, {}};
    for (const auto& r : ranking) {
      chart.labels.push_back(x.labels()[r.agent]);
      chart.values.push_back(r.value);
    }
    auto out = open_out(cfg, "sbii.svg");
    sbal::plot::write_bar_chart_svg(out, chart);
  }
  for (std::size_t r = 0; r < ranking.size(); ++r)
    std::cout << (r + 1) << ' ' << x.labels()[ranking[r].agent] << ' ' << sbal::detail::format12(ranking[r].value)
              << '\n';
  return kExitOk;
}

int cmd_ingest(const RunConfig& cfg) {
  const auto [first, last] = parse_years(cfg.years);
  const auto in = load_pipeline(cfg);
  const auto countries = sbal::countries_in(in.votes.records);
  const auto vidx = sbal::index_votes(in.votes.records);
  const auto gidx = sbal::index_gdp(in.gdps);
  int built = 0;
  for (int year = first; year <= last; ++year) {
    try {
      const auto net = sbal::build_yearly_network(vidx, gidx, year, countries);
      auto out = open_out(cfg, "network_" + std::to_string(year) + ".csv");
      sbal::write_matrix_csv(out, net.matrix);
      for (const auto& [i, j] : net.zero_joint_pairs)
        std::cerr << "warning: " << year << ": no joint votes for " << countries[i] << "/" << countries[j]
                  << ", affinity set to 0\n";
      ++built;
    } catch (const sbal::DataError& e) {
      std::cerr << "skipping " << year << ": " << e.what() << '\n';
    }
  }
  std::cout << "built " << built << " yearly networks\n";
  return built > 0 ? kExitOk : kExitInput;
}

int cmd_series(const RunConfig& cfg) {
  const auto [first, last] = parse_years(cfg.years);
  const auto in = load_pipeline(cfg);
  const auto countries = sbal::countries_in(in.votes.records);
  const auto v_star = pattern_for(cfg, countries.size());
  const auto series = sbal::yearly_series(in.votes.records, in.gdps, first, last, countries, v_star, cfg.epsilon);
  for (const auto& f : series.failures) std::cerr << "skipping " << f.year << ": " << f.message << '\n';
  for (const auto& y : series.years)
    for (const auto& [i, j] : y.network.zero_joint_pairs)
      std::cerr << "warning: " << y.year << ": no joint votes for " << countries[i] << "/" << countries[j]
                << ", affinity set to 0\n";
  if (series.years.empty()) {
    std::cerr << "no year could be processed\n";
    return kExitInput;
  }
  {
    auto out = open_out(cfg, "factions.csv");
    sbal::write_factions_csv(out, series);
  }
  {
    auto out = open_out(cfg, "sbii.csv");
    sbal::write_sbii_csv(out, series);
  }
  if (cfg.plot) {
    sbal::plot::FactionHeatmap map{"Predicted factions by year", countries, {}, {}};
    map.cells.assign(countries.size(), {});
    for (const auto& y : series.years) {
      map.column_labels.push_back(std::to_string(y.year));
      for (std::size_t i = 0; i < countries.size(); ++i) map.cells[i].push_back(y.prediction.pattern[i]);
    }
    {
      auto out = open_out(cfg, "factions.svg");
      sbal::plot::write_faction_heatmap_svg(out, map);
    }
    sbal::plot::LinePlot plot{"Influence required for pattern " + v_star.to_string(), "year", "SBII", {}, true};
    for (std::size_t i = 0; i < countries.size(); ++i) {
      sbal::plot::Series s{countries[i], {}, {}, {}};
      for (const auto& y : series.years) {
        for (const auto& r : y.ranking) {
          if (r.agent != i) continue;
          s.x.push_back(y.year);
          s.y.push_back(r.value);
        }
      }
      plot.series.push_back(std::move(s));
    }
    auto out = open_out(cfg, "sbii.svg");
    sbal::plot::write_line_plot_svg(out, plot);
  }
  std::cout << "processed " << series.years.size() << " years, skipped " << series.failures.size() << '\n';
  return kExitOk;
}

int dispatch(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::simulate: return cmd_simulate(cfg);
    case Command::predict: return cmd_predict(cfg);
    case Command::steer: return cmd_steer(cfg);
    case Command::sbii: return cmd_sbii(cfg);
    case Command::ingest: return cmd_ingest(cfg);
    case Command::series: return cmd_series(cfg);
    case Command::check: return cmd_check(cfg);
  }
  return kExitInternal;
}

void add_matrix_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input", cfg.input, "Matrix CSV (header of labels, then n rows)");
  sub->add_option("--random", cfg.random_n, "Use a random symmetric n x n matrix with uniform[-1,1] entries");
  sub->add_option("--seed", cfg.seed, "Seed for --random");
}

void add_pipeline_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input", cfg.input, "Directory holding votes.csv and gdp.csv");
  sub->add_option("--votes", cfg.votes_path, "votes.csv (year,resolution_id,country,vote)");
  sub->add_option("--gdp", cfg.gdp_path, "gdp.csv (year,country,gdp)");
  sub->add_option("--years", cfg.years, "Year range A:B")->required();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Structural balance dynamics, steering and influence ranking"};
  app.require_subcommand(1);
  app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();

  auto positive = CLI::PositiveNumber;

  auto* simulate = app.add_subcommand("simulate", "Sample X(t) up to a fraction of the escape time");
  add_matrix_options(simulate, cfg);
  simulate->add_option("--fraction", cfg.fraction, "Fraction of t* to cover")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--samples", cfg.samples, "Number of samples")->check(CLI::Range(2, 1000000));
  simulate->add_flag("--plot", cfg.plot, "Also write trajectory.svg");

  auto* predict = app.add_subcommand("predict", "Predict the emerging factions");
  add_matrix_options(predict, cfg);

  auto* steer = app.add_subcommand("steer", "Single-agent perturbation reaching a sign pattern");
  add_matrix_options(steer, cfg);
  steer->add_option("--agent", cfg.agent, "Label of the steering agent");
  steer->add_option("--pattern", cfg.pattern, "Desired sign pattern, e.g. +--+");
  steer->add_option("--epsilon", cfg.epsilon, "Off-agent scale of the target eigenvector")->check(positive);
  steer->add_option("--lambda-star", cfg.lambda_star, "Target dominant eigenvalue (default lambda_1)");

  auto* sbii = app.add_subcommand("sbii", "Rank agents by the Structural Balance Influence Index");
  add_matrix_options(sbii, cfg);
  sbii->add_option("--pattern", cfg.pattern, "Desired sign pattern (default all +)");
  sbii->add_option("--epsilon", cfg.epsilon, "Off-agent scale of the target eigenvector")->check(positive);
  sbii->add_flag("--plot", cfg.plot, "Also write sbii.svg");

  auto* ingest = app.add_subcommand("ingest", "Build yearly friendliness matrices from votes and GDP");
  add_pipeline_options(ingest, cfg);

  auto* series = app.add_subcommand("series", "Factions and SBII for every year in a range");
  add_pipeline_options(series, cfg);
  series->add_option("--pattern", cfg.pattern, "Desired sign pattern over countries (default all +)");
  series->add_option("--epsilon", cfg.epsilon, "Off-agent scale of the target eigenvector")->check(positive);
  series->add_flag("--plot", cfg.plot, "Also write factions.svg and sbii.svg");

  auto* check = app.add_subcommand("check", "Re-verify a steering.json against its matrix");
  add_matrix_options(check, cfg);
  check->add_option("--solution", cfg.solution_path, "steering.json to verify");

  for (auto* sub : {simulate, predict, steer, sbii, ingest, series, check})
    sub->add_option("--out", cfg.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  if (simulate->parsed()) cfg.command = Command::simulate;
  else if (predict->parsed()) cfg.command = Command::predict;
  else if (steer->parsed()) cfg.command = Command::steer;
  else if (sbii->parsed()) cfg.command = Command::sbii;
  else if (ingest->parsed()) cfg.command = Command::ingest;
  else if (series->parsed()) cfg.command = Command::series;
  else if (check->parsed()) cfg.command = Command::check;

  try {
    return dispatch(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return kExitInput;
  } catch (const sbal::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const sbal::ConstraintError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const sbal::ConsistencyError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const sbal::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
