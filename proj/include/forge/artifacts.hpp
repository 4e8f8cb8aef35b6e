#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "forge/constructions.hpp"
#include "forge/etasystem.hpp"
#include "forge/truestage.hpp"

namespace forge {

struct MissingArtifact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// temp file + rename in the target directory
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);  // throws MissingArtifact
// Prefix relative paths with FORGE_TRACE_DIR when the variable is set.
std::string resolve_out_path(const std::string& path);

// Diagram files: `family <desc>`, `stage <s>`, then one fact per line.
std::string diagram_to_text(const Presentation& p,
                            const std::vector<Fact>& facts, int stage);
std::vector<Fact> diagram_from_text(const std::string& text,
                                    const Signature& sig);

// Iso map files: lines `b<i> -> a<j>`.
std::string iso_map_to_text(const PartialMap& m);
PartialMap iso_map_from_text(const std::string& text);

// Jump-coding traces: a JSON header line carrying everything needed for a
// deterministic replay, then one record per stage.
std::string jump_run_to_jsonl(const CodingRun& run,
                              const std::string& structure_spec);
CodingRun replay_jump_trace(const std::string& text);

// Main-system run traces, same scheme (the family rides along inline).
std::string eta_run_to_jsonl(const MainBuildResult& result,
                             const std::string& structure_spec,
                             const ApproximationFamily& fam,
                             Leq0Variant v, const SearchBound& bound);
struct EtaReplay {
  MainBuildResult result;
  ApproximationFamily family;
  Presentation base;
};
EtaReplay replay_eta_trace(const std::string& text);

// Aggregated artifact verification. Exit code semantics: 0 pass,
// 2 invariant violation, 3 missing or malformed resource.
int verify_paths(const std::vector<std::string>& paths, std::ostream& log);

}  // namespace forge
