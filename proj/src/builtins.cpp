#include "synthcap/builtins.hpp"

#include <cmath>

#include "synthcap/errors.hpp"

namespace synthcap {

Channel erasure_channel(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParseError("erasure channel: p outside (0,1)");
  Alphabet x{"0", "1"};
  Alphabet y{"0", "e", "1"};
  return Channel(x, y, {{1.0 - p, p, 0.0}, {0.0, p, 1.0 - p}});
}

Channel reverse_erasure_channel() {
  Alphabet x{"0", "e", "1"};
  Alphabet y{"0", "1"};
  return Channel(x, y, {{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}});
}

Pmf reverse_erasure_input(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParseError("reverse erasure input: p outside (0,1)");
  return Pmf({"0", "e", "1"}, {(1.0 - p) / 2.0, p, (1.0 - p) / 2.0});
}

Channel scatter_channel(int m) {
  if (m < 3) throw ParseError("scatter channel: m must be >= 3");
  Alphabet symbols;
  for (int i = 1; i <= m; ++i) symbols.push_back(std::to_string(i));
  std::vector<std::vector<double>> rows(m, std::vector<double>(m, 1.0 / (m - 1)));
  for (int i = 0; i < m; ++i) rows[i][i] = 0.0;
  return Channel(symbols, symbols, std::move(rows));
}

Channel bsc_channel(double p) {
  if (p < 0.0 || p > 1.0) throw ParseError("bsc channel: p outside [0,1]");
  Alphabet b{"0", "1"};
  return Channel(b, b, {{1.0 - p, p}, {p, 1.0 - p}});
}

std::pair<Pmf, Channel> builtin_channel(const std::string& name, double param) {
  if (name == "erasure") {
    Channel ch = erasure_channel(param);
    return {Pmf::uniform(ch.input()), ch};
  }
  if (name == "reverse-erasure") {
    return {reverse_erasure_input(param), reverse_erasure_channel()};
  }
  if (name == "scatter") {
    const int m = static_cast<int>(param);
    if (param != m) throw ParseError("scatter channel: m must be an integer");
    Channel ch = scatter_channel(m);
    return {Pmf::uniform(ch.input()), ch};
  }
  if (name == "bsc") {
    Channel ch = bsc_channel(param);
    return {Pmf::uniform(ch.input()), ch};
  }
  if (name == "identity") {
    const int k = static_cast<int>(param);
    if (param != k || k < 1) throw ParseError("identity channel: k must be a positive integer");
    Alphabet symbols;
    for (int i = 0; i < k; ++i) symbols.push_back(std::to_string(i));
    Channel ch = Channel::identity(symbols);
    return {Pmf::uniform(ch.input()), ch};
  }
  throw ParseError("unknown builtin channel '" + name + "'");
}

}  // namespace synthcap
