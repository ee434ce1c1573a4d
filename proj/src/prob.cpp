#include "synthcap/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthcap/errors.hpp"

namespace synthcap {

namespace {
constexpr double kNormTol = 1e-12;

void check_distribution(std::span<const double> probs, const char* what) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ParseError(std::string(what) + ": negative or NaN probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormTol * std::max<double>(1.0, probs.size()))
    throw ParseError(std::string(what) + ": probabilities sum to " + std::to_string(sum));
}
}  // namespace

Pmf::Pmf(Alphabet atoms, std::vector<double> probs)
    : atoms_(std::move(atoms)), probs_(std::move(probs)) {
  if (atoms_.empty() || atoms_.size() != probs_.size())
    throw ParseError("Pmf: atom/probability count mismatch");
  check_distribution(probs_, "Pmf");
}

std::size_t Pmf::index_of(const std::string& atom) const {
  auto it = std::find(atoms_.begin(), atoms_.end(), atom);
  if (it == atoms_.end()) throw ParseError("Pmf: unknown atom '" + atom + "'");
  return static_cast<std::size_t>(it - atoms_.begin());
}

Pmf Pmf::uniform(Alphabet atoms) {
  std::vector<double> p(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
  return Pmf(std::move(atoms), std::move(p));
}

Pmf Pmf::point_mass(Alphabet atoms, std::size_t at) {
  std::vector<double> p(atoms.size(), 0.0);
  p.at(at) = 1.0;
  return Pmf(std::move(atoms), std::move(p));
}

Channel::Channel(Alphabet input, Alphabet output, std::vector<std::vector<double>> rows)
    : input_(std::move(input)), output_(std::move(output)), rows_(std::move(rows)) {
  if (rows_.size() != input_.size())
    throw ParseError("Channel: one row per input atom required");
  for (const auto& row : rows_) {
    if (row.size() != output_.size()) throw ParseError("Channel: row width mismatch");
    check_distribution(row, "Channel row");
  }
}

Channel Channel::identity(Alphabet symbols) {
  std::vector<std::vector<double>> rows(symbols.size(), std::vector<double>(symbols.size(), 0.0));
  for (std::size_t i = 0; i < symbols.size(); ++i) rows[i][i] = 1.0;
  return Channel(symbols, symbols, std::move(rows));
}

JointPmf::JointPmf(std::vector<Alphabet> axes, std::vector<double> table)
    : axes_(std::move(axes)), table_(std::move(table)) {
  if (axes_.empty()) throw ParseError("JointPmf: needs at least one coordinate");
  std::size_t expect = 1;
  for (const auto& a : axes_) {
    if (a.empty()) throw ParseError("JointPmf: empty axis");
    expect *= a.size();
  }
  if (expect != table_.size()) throw ParseError("JointPmf: table size mismatch");
  check_distribution(table_, "JointPmf");
  strides_.assign(axes_.size(), 1);
  for (std::size_t c = axes_.size(); c-- > 1;)
    strides_[c - 1] = strides_[c] * axes_[c].size();
}

std::size_t JointPmf::flat_index(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t c = 0; c < axes_.size(); ++c) flat += idx[c] * strides_[c];
  return flat;
}

void JointPmf::unflatten(std::size_t flat, std::span<std::size_t> idx) const {
  for (std::size_t c = 0; c < axes_.size(); ++c) {
    idx[c] = flat / strides_[c];
    flat %= strides_[c];
  }
}

Pmf JointPmf::marginal(std::size_t coord) const {
  std::vector<double> out(axes_[coord].size(), 0.0);
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t i = 0; i < table_.size(); ++i) {
    unflatten(i, idx);
    out[idx[coord]] += table_[i];
  }
  return Pmf(axes_[coord], std::move(out));
}

JointPmf JointPmf::marginal_joint(std::span<const std::size_t> coords) const {
  std::vector<Alphabet> axes;
  std::vector<std::size_t> out_sizes;
  for (std::size_t c : coords) {
    axes.push_back(axes_[c]);
    out_sizes.push_back(axes_[c].size());
  }
  std::size_t total = 1;
  for (std::size_t s : out_sizes) total *= s;
  std::vector<double> out(total, 0.0);
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t i = 0; i < table_.size(); ++i) {
    unflatten(i, idx);
    std::size_t flat = 0;
    for (std::size_t c = 0; c < coords.size(); ++c) flat = flat * out_sizes[c] + idx[coords[c]];
    out[flat] += table_[i];
  }
  return JointPmf(std::move(axes), std::move(out));
}

JointPmf JointPmf::merge_axes(std::span<const std::size_t> group_a,
                              std::span<const std::size_t> group_b) const {
  auto group_alphabet = [this](std::span<const std::size_t> group) {
    std::vector<Alphabet> axes;
    for (std::size_t c : group) axes.push_back(axes_[c]);
    return product_alphabet(axes);
  };
  Alphabet alpha_a = group_alphabet(group_a);
  Alphabet alpha_b = group_alphabet(group_b);
  std::vector<double> out(alpha_a.size() * alpha_b.size(), 0.0);
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t i = 0; i < table_.size(); ++i) {
    unflatten(i, idx);
    std::size_t ia = 0, ib = 0;
    for (std::size_t c : group_a) ia = ia * axes_[c].size() + idx[c];
    for (std::size_t c : group_b) ib = ib * axes_[c].size() + idx[c];
    out[ia * alpha_b.size() + ib] += table_[i];
  }
  return JointPmf({std::move(alpha_a), std::move(alpha_b)}, std::move(out));
}

Pmf JointPmf::flatten() const {
  return Pmf(product_alphabet(axes_), table_);
}

JointPmf JointPmf::product(const Pmf& a, const Pmf& b) {
  std::vector<double> table(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) table[i * b.size() + j] = a[i] * b[j];
  return JointPmf({a.atoms(), b.atoms()}, std::move(table));
}

JointPmf JointPmf::from_input_and_channel(const Pmf& input, const Channel& channel) {
  if (input.size() != channel.num_inputs())
    throw ParseError("input pmf does not match channel input alphabet");
  std::vector<double> table(input.size() * channel.num_outputs());
  for (std::size_t x = 0; x < input.size(); ++x)
    for (std::size_t y = 0; y < channel.num_outputs(); ++y)
      table[x * channel.num_outputs() + y] = input[x] * channel.at(x, y);
  return JointPmf({input.atoms(), channel.output()}, std::move(table));
}

JointPmf JointPmf::iid(const Pmf& single, std::size_t n) {
  if (n == 0) throw ParseError("iid: n must be positive");
  std::vector<Alphabet> axes(n, single.atoms());
  std::size_t total = 1;
  for (std::size_t t = 0; t < n; ++t) total *= single.size();
  std::vector<double> table(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    double p = 1.0;
    for (std::size_t c = n; c-- > 0;) {
      p *= single[rem % single.size()];
      rem /= single.size();
    }
    table[i] = p;
  }
  return JointPmf(std::move(axes), std::move(table));
}

std::string join_labels(std::span<const std::string> parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

Alphabet product_alphabet(std::span<const Alphabet> axes) {
  if (axes.size() == 1) return axes[0];
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  Alphabet out;
  out.reserve(total);
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t i = 0; i < total; ++i) {
    std::vector<std::string> parts;
    parts.reserve(axes.size());
    for (std::size_t c = 0; c < axes.size(); ++c) parts.push_back(axes[c][idx[c]]);
    out.push_back(join_labels(parts));
    for (std::size_t c = axes.size(); c-- > 0;) {
      if (++idx[c] < axes[c].size()) break;
      idx[c] = 0;
    }
  }
  return out;
}

Alphabet sequence_alphabet(const Alphabet& symbols, std::size_t n) {
  std::vector<Alphabet> axes(n, symbols);
  return product_alphabet(axes);
}

}  // namespace synthcap
