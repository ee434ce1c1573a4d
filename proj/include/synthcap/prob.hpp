#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace synthcap {

using Alphabet = std::vector<std::string>;

// Finite probability mass function over an ordered alphabet of opaque labels.
// Immutable after construction; construction validates nonnegativity and
// normalization to 1 within 1e-12.
class Pmf {
 public:
  // Point mass on a one-symbol alphabet; placeholder for default-constructed
  // aggregates.
  Pmf() : atoms_{"0"}, probs_{1.0} {}
  Pmf(Alphabet atoms, std::vector<double> probs);

  const Alphabet& atoms() const { return atoms_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  // Index of a label; throws ParseError when absent.
  std::size_t index_of(const std::string& atom) const;

  static Pmf uniform(Alphabet atoms);
  static Pmf point_mass(Alphabet atoms, std::size_t at);

 private:
  Alphabet atoms_;
  std::vector<double> probs_;
};

// Conditional pmf (row-stochastic matrix): one output distribution per input
// atom.  Rows are validated like Pmfs.
class Channel {
 public:
  // Identity on a one-symbol alphabet; placeholder for default-constructed
  // aggregates.
  Channel() : input_{"0"}, output_{"0"}, rows_{{1.0}} {}
  Channel(Alphabet input, Alphabet output, std::vector<std::vector<double>> rows);

  const Alphabet& input() const { return input_; }
  const Alphabet& output() const { return output_; }
  std::size_t num_inputs() const { return rows_.size(); }
  std::size_t num_outputs() const { return output_.size(); }
  double at(std::size_t x, std::size_t y) const { return rows_[x][y]; }
  const std::vector<double>& row(std::size_t x) const { return rows_[x]; }

  Pmf row_pmf(std::size_t x) const { return Pmf(output_, rows_[x]); }
  static Channel identity(Alphabet symbols);

 private:
  Alphabet input_;
  Alphabet output_;
  std::vector<std::vector<double>> rows_;
};

// Joint pmf over two or more coordinates, stored as a flattened row-major
// table (last coordinate fastest).  Product alphabets are represented by
// tuple labels joined with ','.
class JointPmf {
 public:
  JointPmf(std::vector<Alphabet> axes, std::vector<double> table);

  std::size_t rank() const { return axes_.size(); }
  const Alphabet& axis(std::size_t coord) const { return axes_[coord]; }
  const std::vector<Alphabet>& axes() const { return axes_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t size() const { return table_.size(); }

  double at(std::span<const std::size_t> idx) const { return table_[flat_index(idx)]; }
  double at_flat(std::size_t i) const { return table_[i]; }
  std::size_t flat_index(std::span<const std::size_t> idx) const;
  void unflatten(std::size_t flat, std::span<std::size_t> idx) const;

  Pmf marginal(std::size_t coord) const;
  // Marginal joint over a subset of coordinates, in the order given.
  JointPmf marginal_joint(std::span<const std::size_t> coords) const;
  // Two-coordinate view with the axes in `group_a` merged into coordinate 0
  // and `group_b` merged into coordinate 1 (tuple-labelled alphabets).
  JointPmf merge_axes(std::span<const std::size_t> group_a,
                      std::span<const std::size_t> group_b) const;
  // Collapse everything to a single Pmf over tuple labels.
  Pmf flatten() const;

  static JointPmf product(const Pmf& a, const Pmf& b);
  static JointPmf from_input_and_channel(const Pmf& input, const Channel& channel);
  // n-fold i.i.d. extension of a single-letter distribution (one coordinate
  // per letter).
  static JointPmf iid(const Pmf& single, std::size_t n);

 private:
  std::vector<Alphabet> axes_;
  std::vector<double> table_;
  std::vector<std::size_t> strides_;
};

// Tuple label for flattened product alphabets.
std::string join_labels(std::span<const std::string> parts);
// Alphabet of all tuples over the given axes, row-major order.
Alphabet product_alphabet(std::span<const Alphabet> axes);
// Alphabet of all length-n sequences over `symbols`, row-major order.
Alphabet sequence_alphabet(const Alphabet& symbols, std::size_t n);

}  // namespace synthcap
