#include "forge/config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace forge {

Presentation presentation_from_spec(const std::string& spec,
                                    const Ordinal& bound) {
  std::string base = spec;
  std::optional<std::pair<uint64_t, int>> perm;
  auto comma = spec.find(',');
  if (comma != std::string::npos) {
    base = spec.substr(0, comma);
    std::string mod = spec.substr(comma + 1);
    if (mod.rfind("perm:", 0) != 0)
      throw std::invalid_argument("unknown structure modifier: " + mod);
    std::string rest = mod.substr(5);
    auto colon = rest.find(':');
    uint64_t seed = std::stoull(rest.substr(0, colon));
    int window = colon == std::string::npos ? 64
                                            : std::stoi(rest.substr(colon + 1));
    perm = {seed, window};
  }
  Presentation p = [&]() {
    if (base == "q") return Presentation::rational_order();
    if (base == "vq") return Presentation::rational_vector_space();
    Ordinal alpha = parse_ordinal_below(base, bound);
    return Presentation::ordinal_order(alpha);
  }();
  if (perm) p = p.permuted(perm->first, perm->second);
  return p;
}

Presentation RunConfig::make_presentation() const {
  return presentation_from_spec(structure, ordinal_bound);
}

std::vector<int> RunConfig::parse_set() const {
  std::vector<int> out;
  std::istringstream is(set_spec);
  std::string part;
  while (std::getline(is, part, ','))
    if (!part.empty()) out.push_back(std::stoi(part));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(lineno) +
                                ": " + msg);
  };
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto notspace = line.find_first_not_of(" \t\r");
    if (notspace == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string()
                                    : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (!seen.insert(key).second) fail("duplicate key '" + key + "'");
    try {
      if (key == "structure") cfg.structure = val;
      else if (key == "eta") cfg.eta = parse_ordinal_below(val, cfg.ordinal_bound);
      else if (key == "ordinal_bound") cfg.ordinal_bound = Ordinal::parse(val);
      else if (key == "budget") cfg.budget = std::stoi(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "variant") cfg.variant = variant_from_name(val);
      else if (key == "godel") cfg.godel = val;
      else if (key == "set") cfg.set_spec = val;
      else if (key == "schedule") cfg.schedule_spec = val;
      else if (key == "out") cfg.out_path = val;
      else if (key == "diagram") cfg.diagram_path = val;
      else if (key == "game_ext_len") cfg.bound.game_ext_len = std::stoi(val);
      else if (key == "adversary_len") cfg.bound.adversary_len = std::stoi(val);
      else if (key == "free_max_elem") cfg.bound.free_max_elem = std::stoi(val);
      else if (key == "pool_cap") cfg.bound.pool_cap = std::stoi(val);
      else fail("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    } catch (const std::out_of_range&) {
      fail("value out of range for '" + key + "'");
    }
    if (key == "budget" && cfg.budget < 1) fail("budget must be >= 1");
  }
  if (cfg.godel != "godel-v1")
    throw std::invalid_argument(
        "config: unknown godel numbering '" + cfg.godel +
        "' (godel-v1 is the only registered numbering)");
  // validate the structure spec eagerly so errors carry context
  cfg.make_presentation();
  return cfg;
}

}  // namespace forge
