#include "forge/artifacts.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "forge/config.hpp"

namespace forge {

using nlohmann::json;

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw MissingArtifact("cannot open for writing: " + tmp);
    os << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw MissingArtifact("cannot rename into place: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MissingArtifact("cannot read: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string resolve_out_path(const std::string& path) {
  if (path.empty() || path[0] == '/') return path;
  const char* dir = std::getenv("FORGE_TRACE_DIR");
  if (!dir || !*dir) return path;
  return std::string(dir) + "/" + path;
}

// ---------------------------------------------------------------------------

std::string diagram_to_text(const Presentation& p,
                            const std::vector<Fact>& facts, int stage) {
  std::ostringstream os;
  os << "family " << p.describe() << "\n";
  os << "stage " << stage << "\n";
  std::vector<Fact> sorted = facts;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& f : sorted) os << f.to_string(p.signature()) << "\n";
  return os.str();
}

std::vector<Fact> diagram_from_text(const std::string& text,
                                    const Signature& sig) {
  std::istringstream is(text);
  std::string line;
  std::vector<Fact> facts;
  while (std::getline(is, line)) {
    if (line.empty() || line.rfind("family", 0) == 0 ||
        line.rfind("stage", 0) == 0)
      continue;
    facts.push_back(Fact::parse(line, sig));
  }
  return facts;
}

std::string iso_map_to_text(const PartialMap& m) {
  std::ostringstream os;
  for (size_t i = 0; i < m.size(); ++i)
    os << "b" << m.dom_at(i) << " -> a" << m.ran_at(i) << "\n";
  return os.str();
}

PartialMap iso_map_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  PartialMap m;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string b, arrow, a;
    if (!(ls >> b >> arrow >> a) || arrow != "->" || b.empty() || a.empty() ||
        b[0] != 'b' || a[0] != 'a')
      throw MissingArtifact("bad iso map line: " + line);
    m.add(std::stoi(b.substr(1)), std::stoi(a.substr(1)));
  }
  return m;
}

// ---------------------------------------------------------------------------
// jump traces

namespace {

json bound_to_json(const SearchBound& b) {
  return json{{"game_ext_len", b.game_ext_len},
              {"adversary_len", b.adversary_len},
              {"adversary_max_elem", b.adversary_max_elem},
              {"offset_coeff", b.offset_coeff},
              {"pool_cap", b.pool_cap},
              {"free_len", b.free_len},
              {"free_max_elem", b.free_max_elem}};
}

SearchBound bound_from_json(const json& j) {
  SearchBound b;
  b.game_ext_len = j.at("game_ext_len").get<int>();
  b.adversary_len = j.at("adversary_len").get<int>();
  b.adversary_max_elem = j.at("adversary_max_elem").get<int>();
  b.offset_coeff = j.at("offset_coeff").get<int>();
  b.pool_cap = j.at("pool_cap").get<int>();
  b.free_len = j.at("free_len").get<int>();
  b.free_max_elem = j.at("free_max_elem").get<int>();
  return b;
}

json tuple_to_json(const Tuple& t) {
  json a = json::array();
  for (Elem e : t) a.push_back(e);
  return a;
}

Tuple tuple_from_json(const json& j) {
  Tuple t;
  for (const auto& x : j) t.push_back(x.get<Elem>());
  return t;
}

}  // namespace

std::string jump_run_to_jsonl(const CodingRun& run,
                              const std::string& structure_spec) {
  std::ostringstream os;
  json header{{"type", "jump-coding"},
              {"structure", structure_spec},
              {"variant", variant_name(run.variant)},
              {"budget", run.budget},
              {"set", run.ce.target},
              {"schedule", run.ce.schedule},
              {"bound", bound_to_json(run.bound)}};
  os << header.dump() << "\n";
  for (int s = 0; s <= run.budget; ++s) {
    json rec{{"stage", s}};
    json f = json::array();
    const PartialMap& m = run.f_by_stage[static_cast<size_t>(s)];
    for (size_t i = 0; i < m.size(); ++i) f.push_back(m.ran_at(i));
    rec["f"] = f;
    json pairs = json::array();
    const auto& ps = run.pairs_by_stage[static_cast<size_t>(s)];
    for (size_t n = 0; n < ps.size(); ++n) {
      if (!ps[n]) continue;
      pairs.push_back(json{{"n", n},
                           {"a", tuple_to_json(ps[n]->a)},
                           {"b_start", ps[n]->b_start},
                           {"b_len", ps[n]->b_len}});
    }
    rec["pairs"] = pairs;
    rec["diagram_size"] = run.diagram_by_stage[static_cast<size_t>(s)].size();
    os << rec.dump() << "\n";
  }
  return os.str();
}

CodingRun replay_jump_trace(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw MissingArtifact("empty trace");
  json header = json::parse(line);
  if (header.at("type") != "jump-coding")
    throw MissingArtifact("not a jump-coding trace");
  Presentation base = presentation_from_spec(
      header.at("structure").get<std::string>(), Ordinal::omega_omega());
  CeApproximation ce;
  ce.target = header.at("set").get<std::vector<int>>();
  ce.schedule = header.at("schedule").get<std::vector<int>>();
  return build_jump_coding(base, ce, header.at("budget").get<int>(),
                           variant_from_name(header.at("variant")),
                           bound_from_json(header.at("bound")));
}

// ---------------------------------------------------------------------------
// eta traces

std::string eta_run_to_jsonl(const MainBuildResult& result,
                             const std::string& structure_spec,
                             const ApproximationFamily& fam, Leq0Variant v,
                             const SearchBound& bound) {
  std::ostringstream os;
  json header{{"type", "eta-run"},
              {"structure", structure_spec},
              {"eta", fam.eta.to_string()},
              {"budget", result.run.budget},
              {"variant", variant_name(v)},
              {"bound", bound_to_json(bound)},
              {"family", fam.to_text()}};
  os << header.dump() << "\n";
  os << run_to_jsonl(result.sys, result.run);
  return os.str();
}

EtaReplay replay_eta_trace(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw MissingArtifact("empty trace");
  json header = json::parse(line);
  if (header.at("type") != "eta-run")
    throw MissingArtifact("not an eta-run trace");
  EtaReplay rep{
      {},
      ApproximationFamily::from_text(header.at("family").get<std::string>()),
      presentation_from_spec(header.at("structure").get<std::string>(),
                             Ordinal::omega_omega())};
  rep.result = build_main(rep.base, rep.family.eta, rep.family,
                          header.at("budget").get<int>(),
                          variant_from_name(header.at("variant")),
                          bound_from_json(header.at("bound")));
  return rep;
}

// ---------------------------------------------------------------------------
// verify

namespace {

int verify_family(const std::string& text, std::ostream& log) {
  ApproximationFamily f = ApproximationFamily::from_text(text);
  CheckReport n = check_N_properties(f);
  log << n.summary();
  StageRelations r = derive_relations(f);
  CheckReport b = check_B_properties(r, f);
  log << b.summary();
  return n.all_pass() && b.all_pass() ? 0 : 2;
}

int verify_relations_dump(const std::string& text, std::ostream& log) {
  // reconstruct the leq tables and re-check the order-theoretic properties
  std::istringstream is(text);
  std::string line;
  std::map<std::string, std::map<std::pair<int, int>, bool>> leq;
  std::map<std::pair<int, int>, bool> tr;
  int maxstage = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (j.contains("type")) continue;
    int s = j.at("s").get<int>();
    int t = j.at("t").get<int>();
    maxstage = std::max({maxstage, s, t});
    if (j.at("rel") == "leq")
      leq[j.at("xi").get<std::string>()][{s, t}] = j.at("holds").get<bool>();
    else
      tr[{s, t}] = j.at("holds").get<bool>();
  }
  int rc = 0;
  for (auto& [xi, table] : leq) {
    for (int s = 0; s <= maxstage; ++s) {
      if (!table[{s, s}]) {
        log << "leq_" << xi << " not reflexive at " << s << "\n";
        rc = 2;
      }
      for (int t = 0; t <= maxstage; ++t)
        for (int u = 0; u <= maxstage; ++u)
          if (table[{s, t}] && table[{t, u}] && !table[{s, u}]) {
            log << "leq_" << xi << " not transitive at (" << s << "," << t
                << "," << u << ")\n";
            rc = 2;
          }
    }
  }
  if (!tr.empty()) {
    for (int s = 0; s <= maxstage; ++s)
      for (int t = 0; t <= maxstage; ++t) {
        bool all = true;
        for (auto& [xi, table] : leq)
          if (!table[{s, t}]) all = false;
        if (all != tr[{s, t}]) {
          log << "tr disagrees with the leq conjunction at (" << s << "," << t
              << ")\n";
          rc = 2;
        }
      }
  }
  log << "relations dump: " << (rc == 0 ? "pass" : "FAIL") << "\n";
  return rc;
}

int verify_trace(const std::string& text, std::ostream& log) {
  std::istringstream is(text);
  std::string first;
  std::getline(is, first);
  json header = json::parse(first);
  std::string type = header.value("type", "");
  if (type == "jump-coding") {
    CodingRun run = replay_jump_trace(text);
    std::string fresh =
        jump_run_to_jsonl(run, header.at("structure").get<std::string>());
    if (fresh != text) {
      log << "jump trace differs from deterministic replay\n";
      return 2;
    }
    log << "jump trace: pass (replay identical, diagram monotone)\n";
    return 0;
  }
  if (type == "eta-run") {
    EtaReplay rep = replay_eta_trace(text);
    std::string fresh = eta_run_to_jsonl(
        rep.result, header.at("structure").get<std::string>(), rep.family,
        variant_from_name(header.at("variant")),
        bound_from_json(header.at("bound")));
    if (fresh != text) {
      log << "eta trace differs from deterministic replay\n";
      return 2;
    }
    ZeroRunCheck zc = check_zero_run(rep.result.sys, rep.result.rels,
                                     rep.result.run);
    if (!zc.ok) {
      log << "zero-run check failed: " << zc.counterexample << "\n";
      return 2;
    }
    log << "eta trace: pass (replay identical, 0-run valid)\n";
    return 0;
  }
  if (type == "relations") return verify_relations_dump(text, log);
  log << "unknown trace type\n";
  return 2;
}

int verify_diagram(const std::string& text, std::ostream& log) {
  // standalone check: well-formed, no contradictory signed facts
  std::istringstream is(text);
  std::string line;
  Signature sig = Signature::for_family(StructureFamily::ordinal_order);
  std::set<std::string> pos, neg;
  int rc = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line.rfind("family", 0) == 0 ||
        line.rfind("stage", 0) == 0)
      continue;
    Fact f = Fact::parse(line, sig);
    std::ostringstream key;
    key << f.symbol;
    for (auto a : f.args) key << "," << a;
    if (f.positive ? neg.count(key.str()) : pos.count(key.str())) {
      log << "contradictory fact: " << line << "\n";
      rc = 2;
    }
    (f.positive ? pos : neg).insert(key.str());
  }
  log << "diagram: " << (rc == 0 ? "pass" : "FAIL") << "\n";
  return rc;
}

}  // namespace

int verify_paths(const std::vector<std::string>& paths, std::ostream& log) {
  int rc = 0;
  for (const auto& path : paths) {
    std::string text;
    try {
      text = read_file(path);
    } catch (const MissingArtifact& e) {
      log << path << ": " << e.what() << "\n";
      return 3;
    }
    log << "== " << path << "\n";
    int one;
    try {
      if (text.rfind("eta ", 0) == 0)
        one = verify_family(text, log);
      else if (text.rfind("family ", 0) == 0)
        one = verify_diagram(text, log);
      else if (!text.empty() && text[0] == '{')
        one = verify_trace(text, log);
      else if (!text.empty() && text[0] == 'b')
        one = (iso_map_from_text(text), 0);
      else {
        log << "unrecognized artifact format\n";
        one = 3;
      }
    } catch (const MissingArtifact& e) {
      log << e.what() << "\n";
      one = 3;
    } catch (const std::exception& e) {
      log << e.what() << "\n";
      one = 2;
    }
    rc = std::max(rc, one);
  }
  return rc;
}

}  // namespace forge
