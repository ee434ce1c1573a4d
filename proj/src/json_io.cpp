#include "synthcap/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "synthcap/errors.hpp"

namespace synthcap {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON");
  return j;
}

json pmf_to_node(const Pmf& pmf) {
  return json{{"atoms", pmf.atoms()}, {"probs", pmf.probs()}};
}

Pmf pmf_from_node(const json& j) {
  if (!j.contains("atoms") || !j.contains("probs"))
    throw ParseError("Pmf JSON requires 'atoms' and 'probs'");
  return Pmf(j.at("atoms").get<Alphabet>(), j.at("probs").get<std::vector<double>>());
}

json channel_to_node(const Channel& channel) {
  std::vector<std::vector<double>> rows;
  for (std::size_t x = 0; x < channel.num_inputs(); ++x) rows.push_back(channel.row(x));
  return json{{"input", channel.input()}, {"output", channel.output()}, {"rows", rows}};
}

Channel channel_from_node(const json& j) {
  if (!j.contains("input") || !j.contains("output") || !j.contains("rows"))
    throw ParseError("Channel JSON requires 'input', 'output', 'rows'");
  return Channel(j.at("input").get<Alphabet>(), j.at("output").get<Alphabet>(),
                 j.at("rows").get<std::vector<std::vector<double>>>());
}

}  // namespace

std::string pmf_to_json(const Pmf& pmf) { return pmf_to_node(pmf).dump(2); }

Pmf pmf_from_json_text(const std::string& text) { return pmf_from_node(parse(text)); }

std::string channel_to_json(const Channel& channel) { return channel_to_node(channel).dump(2); }

Channel channel_from_json_text(const std::string& text) {
  return channel_from_node(parse(text));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<Pmf, Channel> channel_spec_from_file(const std::filesystem::path& path) {
  json j = parse(read_text_file(path));
  Channel ch = j.contains("channel") ? channel_from_node(j.at("channel"))
                                     : channel_from_node(j);
  Pmf input = j.contains("input") && j.at("input").is_object()
                  ? pmf_from_node(j.at("input"))
                  : Pmf::uniform(ch.input());
  if (input.size() != ch.num_inputs())
    throw ParseError("channel spec: input pmf does not match channel");
  return {std::move(input), std::move(ch)};
}

std::string witness_to_json(const AuxDecomposition& aux) {
  json ys = json::array();
  for (const auto& ch : aux.p_y_given_u) ys.push_back(channel_to_node(ch));
  return json{{"p_u", pmf_to_node(aux.p_u)},
              {"p_x_given_u", channel_to_node(aux.p_x_given_u)},
              {"p_y_given_u", ys}}
      .dump(2);
}

AuxDecomposition witness_from_json_text(const std::string& text) {
  json j = parse(text);
  if (!j.contains("p_u") || !j.contains("p_x_given_u") || !j.contains("p_y_given_u"))
    throw ParseError("witness JSON requires 'p_u', 'p_x_given_u', 'p_y_given_u'");
  std::vector<Channel> ys;
  for (const auto& node : j.at("p_y_given_u")) ys.push_back(channel_from_node(node));
  if (ys.empty()) throw ParseError("witness JSON: at least one receiver channel required");
  return AuxDecomposition{pmf_from_node(j.at("p_u")), channel_from_node(j.at("p_x_given_u")),
                          std::move(ys)};
}

std::string optimizer_config_to_json(const OptimizerConfig& cfg) {
  return json{{"restarts", cfg.restarts}, {"mu_grid", cfg.mu_grid},
              {"max_iters", cfg.max_iters}, {"seed", cfg.seed},
              {"tol", cfg.tol}}
      .dump(2);
}

OptimizerConfig optimizer_config_from_file(const std::filesystem::path& path) {
  json j = parse(read_text_file(path));
  OptimizerConfig cfg;
  if (j.contains("restarts")) cfg.restarts = j.at("restarts").get<int>();
  if (j.contains("mu_grid")) cfg.mu_grid = j.at("mu_grid").get<std::vector<double>>();
  if (j.contains("max_iters")) cfg.max_iters = j.at("max_iters").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  return cfg;
}

std::string codebook_to_json(const SynthesisCode& code) {
  std::vector<std::vector<int>> words;
  words.reserve(code.codewords.size());
  for (const auto& w : code.codewords) words.emplace_back(w.begin(), w.end());
  return json{{"n", code.n},
              {"R", code.rate_r},
              {"R0", code.rate_r0},
              {"M", code.m},
              {"M0", code.m0},
              {"u_alphabet", code.aux.p_u.atoms()},
              {"codewords", words}}
      .dump(2);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write file: " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string region_to_csv(const RegionBoundary& region) {
  bool has_rl = false;
  for (const auto& pt : region.points) has_rl |= pt.r_l.has_value();
  std::string out = has_rl ? "R,R0,RL\n" : "R,R0\n";
  for (const auto& pt : region.points) {
    if (!pt.attainable) continue;
    out += format_number(pt.r);
    out += ',';
    out += format_number(pt.r0);
    if (has_rl) {
      out += ',';
      out += format_number(pt.r_l.value_or(0.0));
    }
    out += '\n';
  }
  return out;
}

std::string decay_rows_to_csv(std::span<const DecayRow> rows) {
  std::string out = "n,mean_tv,std_tv,trials\n";
  for (const auto& row : rows) {
    out += std::to_string(row.n);
    out += ',';
    out += format_number(row.mean_tv);
    out += ',';
    out += format_number(row.std_tv);
    out += ',';
    out += std::to_string(row.trials);
    out += '\n';
  }
  return out;
}

std::string renyi_curve_to_csv(std::span<const RenyiSample> samples) {
  std::string out = "alpha,I_breve,I_bar\n";
  for (const auto& s : samples) {
    out += format_number(s.alpha);
    out += ',';
    out += format_number(s.i_breve);
    out += ',';
    out += format_number(s.i_bar);
    out += '\n';
  }
  return out;
}

std::string exponent_report_to_json(const ExponentReport& report) {
  json curve = json::array();
  for (const auto& s : report.renyi_curve)
    curve.push_back(json{{"alpha", s.alpha}, {"I_breve", s.i_breve}, {"I_bar", s.i_bar}});
  return json{{"rate", report.rate},
              {"I_UV", report.i_uv},
              {"gamma", report.gamma},
              {"gamma_hat", report.gamma_hat},
              {"gamma_hathat", report.gamma_hathat},
              {"gamma_argmax", {{"alpha", report.gamma_alpha}, {"alpha_prime", report.gamma_alpha_prime}}},
              {"gamma_hat_argmax_alpha", report.gamma_hat_alpha},
              {"gamma_hathat_argmax_alpha", report.gamma_hathat_alpha},
              {"delta_I", report.delta_i},
              {"renyi_curve", curve}}
      .dump(2);
}

}  // namespace synthcap
