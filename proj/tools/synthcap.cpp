#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthcap/builtins.hpp"
#include "synthcap/errors.hpp"
#include "synthcap/game.hpp"
#include "synthcap/info.hpp"
#include "synthcap/json_io.hpp"
#include "synthcap/regions.hpp"
#include "synthcap/softcover.hpp"
#include "synthcap/synthesis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace synthcap;

namespace {

struct CommonArgs {
  std::string channel_file;
  std::vector<std::string> builtin;
  std::string out_dir = ".";
  std::string config_file;
  std::uint64_t seed = 0;
  int threads = 0;
  bool gnuplot = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_channel) {
  auto* ch = cmd->add_option("--channel", args.channel_file, "channel spec JSON file");
  auto* bi = cmd->add_option("--builtin", args.builtin,
                             "builtin channel: NAME PARAM (erasure, reverse-erasure, "
                             "scatter, bsc, identity)")
                 ->expected(1, 2);
  if (needs_channel) {
    ch->excludes(bi);
    bi->excludes(ch);
  }
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--config", args.config_file, "optimizer config JSON");
  cmd->add_option("--seed", args.seed, "root seed");
  cmd->add_option("--threads", args.threads, "thread cap (0 = hardware)");
  cmd->add_flag("--gnuplot", args.gnuplot, "also emit a gnuplot script");
}

std::pair<Pmf, Channel> resolve_channel(const CommonArgs& args) {
  if (!args.builtin.empty()) {
    const double param = args.builtin.size() > 1 ? std::stod(args.builtin[1]) : 0.0;
    return builtin_channel(args.builtin[0], param);
  }
  if (args.channel_file.empty())
    throw ParseError("either --channel FILE or --builtin NAME PARAM is required");
  if (!fs::exists(args.channel_file))
    throw ParseError("missing file: " + args.channel_file);
  return channel_spec_from_file(args.channel_file);
}

OptimizerConfig resolve_config(const CommonArgs& args) {
  OptimizerConfig cfg;
  if (!args.config_file.empty()) {
    if (!fs::exists(args.config_file)) throw ParseError("missing file: " + args.config_file);
    cfg = optimizer_config_from_file(args.config_file);
  }
  cfg.seed = args.seed;
  if (args.threads > 0) cfg.threads = args.threads;
  return cfg;
}

fs::path out_path(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out_dir);
  return fs::path(args.out_dir) / name;
}

void emit(const CommonArgs& args, const std::string& name, const std::string& content,
          const std::string& summary) {
  const fs::path path = out_path(args, name);
  write_text_atomic(path, content);
  std::cout << "wrote " << path.string() << " (" << summary << ")\n";
}

void emit_gnuplot(const CommonArgs& args, const std::string& csv_name,
                  const std::string& xlabel, const std::string& ylabel) {
  if (!args.gnuplot) return;
  std::string script;
  script += "set datafile separator ','\n";
  script += "set key autotitle columnhead\n";
  script += "set xlabel '" + xlabel + "'\n";
  script += "set ylabel '" + ylabel + "'\n";
  script += "plot '" + csv_name + "' using 1:2 with linespoints\n";
  emit(args, csv_name + ".gp", script, "gnuplot script");
}

std::vector<double> rate_grid_between(double lo, double hi, int count) {
  std::vector<double> grid;
  if (count <= 1 || hi <= lo) {
    grid.push_back(lo);
    return grid;
  }
  for (int i = 0; i < count; ++i)
    grid.push_back(lo + (hi - lo) * i / static_cast<double>(count - 1));
  return grid;
}

int cmd_region(const CommonArgs& args, const std::string& variant, double memory_b, int grid_n) {
  auto [input, channel] = resolve_channel(args);
  OptimizerConfig cfg = resolve_config(args);

  RegionBoundary region;
  if (variant == "public") {
    region = public_channel_region(input, channel, cfg);
  } else if (variant == "local") {
    auto triples = local_randomness_region(input, channel, cfg);
    region.points = triples;
    region.target_description = "local-randomness";
  } else {
    // Grid between the frontier extremes.
    JointPmf joint = JointPmf::from_input_and_channel(input, channel);
    const double lo = mutual_information(joint);
    CommonInformationResult ci = wyner_common_information(joint, cfg);
    std::vector<double> grid = rate_grid_between(lo, std::max(ci.bits, lo + 1e-6), grid_n);
    if (variant == "synthesis") {
      region = synthesis_region(input, channel, grid, cfg);
    } else if (variant == "limited") {
      region = limited_memory_region(input, channel, memory_b, grid, cfg);
    } else {
      throw ParseError("unknown region variant '" + variant + "'");
    }
  }
  emit(args, "region.csv", region_to_csv(region),
       std::to_string(region.points.size()) + " points");
  // Witness decompositions for reproducibility.
  json witnesses = json::array();
  for (const auto& pt : region.points) {
    if (!pt.witness) continue;
    witnesses.push_back(json::parse(witness_to_json(*pt.witness)));
  }
  emit(args, "witnesses.json", witnesses.dump(2), std::to_string(witnesses.size()) + " witnesses");
  emit_gnuplot(args, "region.csv", "R (bits)", "R0 (bits)");
  return 0;
}

int cmd_common_info(const CommonArgs& args) {
  auto [input, channel] = resolve_channel(args);
  OptimizerConfig cfg = resolve_config(args);
  JointPmf joint = JointPmf::from_input_and_channel(input, channel);
  CommonInformationResult result = wyner_common_information(joint, cfg);
  std::cout << "common information: " << format_number(result.bits) << " bits\n";
  emit(args, "witness.json", witness_to_json(result.witness), "witness decomposition");
  return 0;
}

int cmd_simulate(const CommonArgs& args, const std::string& spec_file) {
  if (!fs::exists(spec_file)) throw ParseError("missing file: " + spec_file);
  json spec = json::parse(read_text_file(spec_file), nullptr, false);
  if (spec.is_discarded()) throw ParseError("invalid JSON in " + spec_file);

  Pmf input = Pmf::uniform({"0", "1"});
  Channel channel = bsc_channel(0.1);
  if (spec.contains("builtin")) {
    const auto& b = spec.at("builtin");
    auto pair = builtin_channel(b.at(0).get<std::string>(), b.at(1).get<double>());
    input = pair.first;
    channel = pair.second;
  } else if (spec.contains("channel")) {
    channel = channel_from_json_text(spec.at("channel").dump());
    input = spec.contains("input") ? pmf_from_json_text(spec.at("input").dump())
                                   : Pmf::uniform(channel.input());
  } else {
    throw ParseError("simulate spec requires 'builtin' or 'channel'");
  }

  AuxDecomposition aux = spec.contains("witness")
                             ? witness_from_json_text(spec.at("witness").dump())
                             : aux_from_u_equals_y(input, channel);
  RatePoint rates;
  rates.r = spec.at("R").get<double>();
  rates.r0 = spec.at("R0").get<double>();
  std::vector<int> n_list = spec.at("n_list").get<std::vector<int>>();

  std::vector<std::uint64_t> seeds;
  if (spec.contains("seeds") && spec.at("seeds").is_array()) {
    seeds = spec.at("seeds").get<std::vector<std::uint64_t>>();
  } else {
    const int count = spec.contains("seeds") ? spec.at("seeds").get<int>() : 10;
    for (int i = 0; i < count; ++i) seeds.push_back(args.seed + static_cast<std::uint64_t>(i));
  }

  const std::string mode = spec.contains("mode") ? spec.at("mode").get<std::string>() : "exact";
  std::vector<DecayRow> rows;
  if (mode == "exact") {
    rows = tv_decay_experiment(aux, input, channel, rates, n_list, seeds);
  } else if (mode == "monte-carlo") {
    const int trials = spec.contains("trials") ? spec.at("trials").get<int>() : 10000;
    for (int n : n_list) {
      double sum = 0.0, sum2 = 0.0;
      for (std::uint64_t seed : seeds) {
        SynthesisCode code = generate_code(aux, n, rates.r, rates.r0, seed);
        const double tv = monte_carlo_synthesis_tv(code, input, channel, trials, seed);
        sum += tv;
        sum2 += tv * tv;
      }
      const double cnt = static_cast<double>(seeds.size());
      const double mean = sum / cnt;
      rows.push_back(DecayRow{n, mean, std::sqrt(std::max(0.0, sum2 / cnt - mean * mean)),
                              static_cast<int>(seeds.size())});
    }
  } else {
    throw ParseError("simulate: unknown mode '" + mode + "'");
  }
  emit(args, "decay.csv", decay_rows_to_csv(rows), std::to_string(rows.size()) + " rows");
  // One representative codebook dump for reproducibility.
  if (!n_list.empty()) {
    SynthesisCode code = generate_code(aux, n_list.front(), rates.r, rates.r0, seeds.front());
    emit(args, "codebook.json", codebook_to_json(code),
         "M=" + std::to_string(code.m) + " M0=" + std::to_string(code.m0));
  }
  emit_gnuplot(args, "decay.csv", "n", "mean TV");
  return 0;
}

int cmd_softcover(const CommonArgs& args, std::size_t m_entries, const std::vector<int>& n_list,
                  int trials, double rate) {
  auto [input, channel] = resolve_channel(args);
  JointPmf joint = JointPmf::from_input_and_channel(input, channel);
  std::vector<DecayRow> rows;
  std::string csv = "n,mean_tv,std,bound\n";
  for (int n : n_list) {
    const std::size_t m = rate > 0.0 ? codebook_size(n, rate) : m_entries;
    ExpectedTv tv = expected_tv(input, channel, m, n,
                                trials > 0 ? TrialSpec::count(trials) : TrialSpec::exhaustive(),
                                args.seed);
    const double bound = rate > 0.0 ? lemma2_bound(joint, rate, n)
                                    : corollary1_bound_min(joint, m).bound;
    csv += std::to_string(n) + "," + format_number(tv.mean) + "," + format_number(tv.stddev) +
           "," + format_number(bound) + "\n";
  }
  emit(args, "softcover.csv", csv, std::to_string(n_list.size()) + " rows");
  emit_gnuplot(args, "softcover.csv", "n", "mean TV");
  return 0;
}

int cmd_exponent(const CommonArgs& args, double rate) {
  auto [input, channel] = resolve_channel(args);
  JointPmf joint = JointPmf::from_input_and_channel(input, channel);
  ExponentReport report = exponents(joint, rate);
  emit(args, "exponents.json", exponent_report_to_json(report),
       "gamma=" + format_number(report.gamma));
  emit(args, "renyi_curve.csv", renyi_curve_to_csv(report.renyi_curve),
       std::to_string(report.renyi_curve.size()) + " samples");
  return 0;
}

int cmd_game(const CommonArgs& args, const std::string& payoff_file, int grid_n) {
  if (!fs::exists(payoff_file)) throw ParseError("missing file: " + payoff_file);
  json j = json::parse(read_text_file(payoff_file), nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON in " + payoff_file);
  // Payoff as nested array pi[x][y][z].
  auto cube = j.at("payoff").get<std::vector<std::vector<std::vector<double>>>>();
  const std::size_t nx = cube.size();
  const std::size_t ny = nx ? cube[0].size() : 0;
  const std::size_t nz = ny ? cube[0][0].size() : 0;
  std::vector<double> flat;
  for (const auto& plane : cube)
    for (const auto& row : plane)
      for (double v : row) flat.push_back(v);
  PayoffTable payoff(nx, ny, nz, std::move(flat));

  GameConfig cfg;
  cfg.seed = args.seed;
  std::vector<double> grid = rate_grid_between(0.0, std::log2(static_cast<double>(nx * ny)),
                                               grid_n);
  std::vector<GamePoint> pts = game_region(payoff, grid, cfg);
  std::string csv = "R,payoff\n";
  for (const auto& pt : pts)
    csv += format_number(pt.rate) + "," + format_number(pt.payoff) + "\n";
  emit(args, "game.csv", csv, std::to_string(pts.size()) + " points");
  emit_gnuplot(args, "game.csv", "R (bits/iteration)", "payoff");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed channel synthesis toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string variant = "synthesis";
  double memory_b = 1.0;
  int grid_n = 10;
  std::string spec_file;
  std::string payoff_file;
  std::size_t m_entries = 2;
  std::vector<int> n_list{1, 2, 3};
  int trials = 0;
  double rate = -1.0;

  auto* region = app.add_subcommand("region", "achievable rate region boundary");
  add_common(region, args, true);
  region->add_option("--variant", variant, "synthesis|broadcast via spec|public|limited|local");
  region->add_option("--b", memory_b, "memory fraction for --variant limited");
  region->add_option("--grid", grid_n, "number of R grid points");

  auto* common_info = app.add_subcommand("common-info", "Wyner common information");
  add_common(common_info, args, true);

  auto* simulate = app.add_subcommand("simulate", "codebook TV decay experiment");
  add_common(simulate, args, false);
  simulate->add_option("--spec", spec_file, "experiment spec JSON")->required();
  simulate->get_option("--seed")->required();

  auto* softcover = app.add_subcommand("softcover", "soft-covering expected TV and bounds");
  add_common(softcover, args, true);
  softcover->add_option("--entries", m_entries, "codebook size M (when --rate absent)");
  softcover->add_option("--nlist", n_list, "block lengths");
  softcover->add_option("--trials", trials, "Monte Carlo trials (0 = exhaustive)");
  softcover->add_option("--rate", rate, "codebook rate; enables the exponential bound column");
  softcover->get_option("--seed")->required();

  auto* exponent = app.add_subcommand("exponent", "TV decay exponents and Renyi curve");
  add_common(exponent, args, true);
  exponent->add_option("--rate", rate, "codebook rate R")->required();

  auto* game = app.add_subcommand("game", "repeated-game payoff vs rate region");
  add_common(game, args, false);
  game->add_option("--payoff", payoff_file, "payoff table JSON")->required();
  game->add_option("--grid", grid_n, "number of rate grid points");
  game->get_option("--seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (region->parsed()) return cmd_region(args, variant, memory_b, grid_n);
    if (common_info->parsed()) return cmd_common_info(args);
    if (simulate->parsed()) return cmd_simulate(args, spec_file);
    if (softcover->parsed()) return cmd_softcover(args, m_entries, n_list, trials, rate);
    if (exponent->parsed()) return cmd_exponent(args, rate);
    if (game->parsed()) return cmd_game(args, payoff_file, grid_n);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
