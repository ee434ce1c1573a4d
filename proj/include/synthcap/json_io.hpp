#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "synthcap/prob.hpp"
#include "synthcap/regions.hpp"
#include "synthcap/softcover.hpp"
#include "synthcap/synthesis.hpp"

namespace synthcap {

// JSON schemas:
//   Pmf      {"atoms": [...], "probs": [...]}
//   Channel  {"input": [...], "output": [...], "rows": [[...]]}
//   witness  {"p_u": Pmf, "p_x_given_u": Channel, "p_y_given_u": [Channel...]}
//   config   {"restarts": n, "mu_grid": [...], "max_iters": n, "seed": n, "tol": x}

std::string pmf_to_json(const Pmf& pmf);
Pmf pmf_from_json_text(const std::string& text);

std::string channel_to_json(const Channel& channel);
Channel channel_from_json_text(const std::string& text);

// {"input": Pmf, "channel": Channel} pairs used by CLI channel files; the
// input block is optional and defaults to uniform.
std::pair<Pmf, Channel> channel_spec_from_file(const std::filesystem::path& path);

std::string witness_to_json(const AuxDecomposition& aux);
AuxDecomposition witness_from_json_text(const std::string& text);

std::string optimizer_config_to_json(const OptimizerConfig& cfg);
OptimizerConfig optimizer_config_from_file(const std::filesystem::path& path);

std::string codebook_to_json(const SynthesisCode& code);

// Formats a double with 9 significant digits, '.' decimal separator.
std::string format_number(double v);

// CSV emission (writes via temp file + rename so outputs appear atomically).
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string region_to_csv(const RegionBoundary& region);
std::string decay_rows_to_csv(std::span<const DecayRow> rows);
std::string renyi_curve_to_csv(std::span<const RenyiSample> samples);
std::string exponent_report_to_json(const ExponentReport& report);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace synthcap
