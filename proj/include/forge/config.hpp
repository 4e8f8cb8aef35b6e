#pragma once

#include <map>
#include <optional>
#include <string>

#include "forge/backforth.hpp"
#include "forge/ordinal.hpp"
#include "forge/presentation.hpp"

namespace forge {

// Plain-text run configuration: `key = value` lines, '#' comments. Unknown
// and duplicate keys are errors with line numbers.
struct RunConfig {
  std::string structure = "w";  // w^k.. | <n> | q | vq, optional perm:seed
  Ordinal eta = Ordinal::nat(1);
  Ordinal ordinal_bound = Ordinal::omega_omega();
  int budget = 100;
  uint64_t seed = 1;
  Leq0Variant variant = Leq0Variant::paper_truncated;
  std::string godel = "godel-v1";
  SearchBound bound;
  std::string set_spec;       // comma list for code-jump
  std::string schedule_spec;  // seed:<n>
  std::string out_path;
  std::string diagram_path;

  Presentation make_presentation() const;
  std::vector<int> parse_set() const;
};

RunConfig parse_config(const std::string& text);

// Structure spec parser shared with the CLI: "w", "w^2", "w*2", "5", "q",
// "vq", with an optional ",perm:<seed>:<window>" suffix.
Presentation presentation_from_spec(const std::string& spec,
                                    const Ordinal& bound);

}  // namespace forge
