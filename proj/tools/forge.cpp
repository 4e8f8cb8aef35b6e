#include <iostream>

#include "CLI11.hpp"

#include "forge/artifacts.hpp"
#include "forge/config.hpp"
#include "forge/scott.hpp"

using namespace forge;

namespace {

struct Common {
  uint64_t seed = 1;
  int budget = 100;
  std::string variant = "paper-truncated";
  std::string godel = "godel-v1";
  int bound_scale = 0;  // bumps the search caps
  std::string config_path;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "deterministic seed");
    cmd->add_option("--budget", budget, "stage budget");
    cmd->add_option("--variant", variant, "leq0 variant: paper-truncated|fullqf");
    cmd->add_option("--godel", godel, "godel numbering id (godel-v1)");
    cmd->add_option("--bound", bound_scale, "extra search-bound headroom");
    cmd->add_option("--config", config_path, "key=value config file");
  }

  RunConfig to_config() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_config(read_file(config_path));
    cfg.seed = seed;
    cfg.budget = budget;
    cfg.variant = variant_from_name(variant);
    if (godel != "godel-v1")
      throw std::invalid_argument("unknown godel numbering: " + godel);
    cfg.bound.pool_cap += 8 * bound_scale;
    cfg.bound.free_max_elem += 8 * bound_scale;
    return cfg;
  }
};

Tuple parse_tuple(const std::string& s) {
  Tuple t;
  std::istringstream is(s);
  std::string part;
  while (std::getline(is, part, ','))
    if (!part.empty()) t.push_back(std::stoi(part));
  return t;
}

int self_verify(const std::vector<std::string>& written) {
  if (written.empty()) return 0;
  std::ostringstream log;
  int rc = verify_paths(written, log);
  if (rc != 0) {
    std::cerr << "self-verification failed:\n" << log.str();
    return rc;
  }
  std::cout << "self-verification: pass (" << written.size()
            << " artifact(s))\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: a workbench for back-and-forth calculus, true-stage "
               "systems, and isomorphism codings"};
  app.require_subcommand(1);

  // ---- bf
  auto* bf = app.add_subcommand("bf", "back-and-forth queries and freeness");
  Common bf_common;
  std::string bf_structure = "w", bf_a, bf_b, bf_beta = "1", bf_free_over;
  bool bf_find_free = false;
  bf->add_option("--structure", bf_structure, "structure spec (w, w^2, 5, q)");
  bf->add_option("--a", bf_a, "left tuple, comma separated");
  bf->add_option("--b", bf_b, "right tuple");
  bf->add_option("--beta", bf_beta, "relation level (ordinal notation)");
  bf->add_option("--free-over", bf_free_over,
                 "report alpha-freeness of --a over this tuple");
  bf->add_flag("--find-free", bf_find_free,
               "search the least free tuple over --free-over");
  bf_common.add_to(bf);

  // ---- oracle
  auto* orc = app.add_subcommand("oracle",
                                 "exhaustive EF-game oracle on finite orders");
  Common orc_common;
  int orc_size = 3;
  std::string orc_a, orc_b, orc_beta = "1";
  orc->add_option("--size", orc_size, "finite order size");
  orc->add_option("--a", orc_a, "left tuple");
  orc->add_option("--b", orc_b, "right tuple");
  orc->add_option("--beta", orc_beta, "level (natural number)");
  orc_common.add_to(orc);

  // ---- stages
  auto* stg = app.add_subcommand("stages",
                                 "simulate a nabla-family and its relations");
  Common stg_common;
  std::string stg_eta = "2", stg_source = "injected", stg_family_out,
      stg_rel_out;
  stg->add_option("--eta", stg_eta, "eta (ordinal notation)");
  stg->add_option("--source", stg_source, "injected|machine");
  stg->add_option("--family-out", stg_family_out, "family file");
  stg->add_option("--relations-out", stg_rel_out, "relations JSONL");
  stg_common.add_to(stg);

  // ---- run-eta
  auto* re = app.add_subcommand("run-eta", "run the metatheorem");
  Common re_common;
  std::string re_system = "main", re_structure = "w", re_eta = "1",
      re_family_path, re_trace_out;
  re->add_option("--system", re_system, "main|onestate");
  re->add_option("--structure", re_structure, "base structure spec");
  re->add_option("--eta", re_eta, "eta when no family file is given");
  re->add_option("--family", re_family_path, "family file to drive the run");
  re->add_option("--trace-out", re_trace_out, "run trace JSONL");
  re_common.add_to(re);

  // ---- code-jump
  auto* cj = app.add_subcommand("code-jump",
                                "Theorem-4.6-style jump coding of a c.e. set");
  Common cj_common;
  std::string cj_structure = "w", cj_set, cj_schedule = "seed:1", cj_out,
      cj_diagram;
  cj->add_option("--structure", cj_structure, "base structure spec");
  cj->add_option("--set", cj_set, "the coded set, comma separated");
  cj->add_option("--schedule", cj_schedule, "seed:<n> enumeration schedule");
  cj->add_option("--out", cj_out, "run trace JSONL");
  cj->add_option("--diagram", cj_diagram, "diagram file for B");
  cj_common.add_to(cj);

  // ---- decode
  auto* dec = app.add_subcommand("decode", "decode a run against an isomorphism");
  Common dec_common;
  std::string dec_run, dec_iso;
  dec->add_option("--run", dec_run, "run trace")->required();
  dec->add_option("--iso", dec_iso, "iso map file (b<i> -> a<j>)");
  dec_common.add_to(dec);

  // ---- scott
  auto* sc = app.add_subcommand("scott", "Scott-family invariant sets");
  Common sc_common;
  std::string sc_structure = "w", sc_presentation, sc_emit = "S", sc_out;
  int sc_bound = 50;
  sc->add_option("--structure", sc_structure, "w|q|vq");
  sc->add_option("--presentation", sc_presentation, "perm:<seed>[:window]");
  sc->add_option("--bound", sc_bound, "exploration bound");
  sc->add_option("--emit", sc_emit, "S|T|iso");
  sc->add_option("--out", sc_out, "output file");
  sc_common.add_to(sc);

  // ---- verify
  auto* vf = app.add_subcommand("verify", "re-run checkers on artifacts");
  std::vector<std::string> vf_paths;
  vf->add_option("paths", vf_paths, "artifact files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::string> written;

    if (bf->parsed()) {
      RunConfig cfg = bf_common.to_config();
      Presentation p = presentation_from_spec(bf_structure, cfg.ordinal_bound);
      Ordinal beta = Ordinal::parse(bf_beta);
      if (bf_find_free) {
        Tuple over = parse_tuple(bf_free_over);
        Tuple t = find_free_tuple(p, over, beta, cfg.variant, cfg.bound);
        std::cout << "{\"free_tuple\":\"" << tuple_to_string(t) << "\"}\n";
      } else if (!bf_free_over.empty() || bf_b.empty()) {
        Tuple a = parse_tuple(bf_a);
        Tuple over = parse_tuple(bf_free_over);
        FreenessVerdict fv =
            is_alpha_free(p, over, a, beta, cfg.variant, cfg.bound);
        std::cout << "{\"verdict\":\""
                  << (fv.kind == FreenessVerdict::Kind::free
                          ? "free"
                          : fv.kind == FreenessVerdict::Kind::not_free
                                ? "not-free"
                                : "unknown")
                  << "\"";
        if (fv.kind == FreenessVerdict::Kind::not_free)
          std::cout << ",\"refuting\":\"" << tuple_to_string(fv.refuting)
                    << "\"";
        std::cout << ",\"witnesses\":" << fv.witnesses.size() << "}\n";
        for (const auto& w : fv.witnesses)
          std::cout << "{\"adversary\":\"" << tuple_to_string(w.adversary)
                    << "\",\"a_prime\":\"" << tuple_to_string(w.a_prime)
                    << "\",\"a1_prime\":\"" << tuple_to_string(w.a1_prime)
                    << "\"}\n";
      } else {
        Tuple a = parse_tuple(bf_a);
        Tuple b = parse_tuple(bf_b);
        Tri r = leq_beta(p, a, b, beta, cfg.variant, cfg.bound);
        std::cout << "{\"a\":\"" << tuple_to_string(a) << "\",\"b\":\""
                  << tuple_to_string(b) << "\",\"beta\":\"" << beta.to_string()
                  << "\",\"holds\":"
                  << (r == Tri::yes ? "true"
                                    : r == Tri::no ? "false" : "\"unknown\"")
                  << "}\n";
      }
    }

    if (orc->parsed()) {
      RunConfig cfg = orc_common.to_config();
      Presentation p = Presentation::finite_order(orc_size);
      bool r = ef_oracle(p, parse_tuple(orc_a), parse_tuple(orc_b),
                         Ordinal::parse(orc_beta), cfg.variant, cfg.bound);
      std::cout << "{\"oracle\":" << (r ? "true" : "false") << "}\n";
    }

    if (stg->parsed()) {
      RunConfig cfg = stg_common.to_config();
      FamilySource src = stg_source == "machine" ? FamilySource::machine_pool
                                                 : FamilySource::injected_truth;
      ApproximationFamily fam = simulate_family(
          parse_ordinal_below(stg_eta, cfg.ordinal_bound), cfg.budget, src,
          cfg.seed);
      CheckReport nrep = check_N_properties(fam);
      StageRelations rels = derive_relations(fam);
      CheckReport brep = check_B_properties(rels, fam);
      std::cout << nrep.summary() << brep.summary();
      if (!stg_family_out.empty()) {
        std::string path = resolve_out_path(stg_family_out);
        atomic_write(path, fam.to_text());
        written.push_back(path);
      }
      if (!stg_rel_out.empty()) {
        std::string path = resolve_out_path(stg_rel_out);
        atomic_write(path,
                     "{\"type\":\"relations\"}\n" + relations_to_jsonl(rels));
        written.push_back(path);
      }
      if (!nrep.all_pass() || !brep.all_pass()) return 2;
    }

    if (re->parsed()) {
      RunConfig cfg = re_common.to_config();
      if (re_system == "onestate") {
        Ordinal eta = parse_ordinal_below(re_eta, cfg.ordinal_bound);
        ApproximationFamily fam = simulate_family(
            eta, cfg.budget, FamilySource::injected_truth, cfg.seed);
        StageRelations rels = derive_relations(fam);
        EtaSystem sys = one_state_system(eta);
        Run run = run_metatheorem(sys, rels, cfg.budget);
        ZeroRunCheck zc = check_zero_run(sys, rels, run);
        std::cout << "one-state run: " << (zc.ok ? "valid" : "INVALID") << "\n";
        if (!zc.ok) return 2;
      } else {
        ApproximationFamily fam =
            re_family_path.empty()
                ? simulate_family(parse_ordinal_below(re_eta, cfg.ordinal_bound),
                                  cfg.budget, FamilySource::injected_truth,
                                  cfg.seed)
                : ApproximationFamily::from_text(read_file(re_family_path));
        Presentation base =
            presentation_from_spec(re_structure, cfg.ordinal_bound);
        MainBuildResult res = build_main(base, fam.eta, fam, cfg.budget,
                                         cfg.variant, cfg.bound);
        std::cout << "main run: " << res.run.states.size() << " states, "
                  << res.diagram.size() << " diagram facts\n";
        if (!re_trace_out.empty()) {
          std::string path = resolve_out_path(re_trace_out);
          atomic_write(path, eta_run_to_jsonl(res, re_structure, fam,
                                              cfg.variant, cfg.bound));
          written.push_back(path);
        }
      }
    }

    if (cj->parsed()) {
      RunConfig cfg = cj_common.to_config();
      cfg.set_spec = cj_set;
      Presentation base = presentation_from_spec(cj_structure, cfg.ordinal_bound);
      uint64_t sched_seed = cfg.seed;
      if (cj_schedule.rfind("seed:", 0) == 0)
        sched_seed = std::stoull(cj_schedule.substr(5));
      CeApproximation ce =
          CeApproximation::seeded(cfg.parse_set(), cfg.budget, sched_seed);
      CodingRun run =
          build_jump_coding(base, ce, cfg.budget, cfg.variant, cfg.bound);
      std::cout << "jump coding: " << run.final_map().size()
                << " mapped constants, " << run.final_diagram().size()
                << " diagram facts\n";
      if (!cj_out.empty()) {
        std::string path = resolve_out_path(cj_out);
        atomic_write(path, jump_run_to_jsonl(run, cj_structure));
        written.push_back(path);
      }
      if (!cj_diagram.empty()) {
        std::string path = resolve_out_path(cj_diagram);
        atomic_write(path, diagram_to_text(base, run.final_diagram(),
                                           run.budget));
        written.push_back(path);
      }
    }

    if (dec->parsed()) {
      std::string text = read_file(dec_run);
      std::string first = text.substr(0, text.find('\n'));
      if (first.find("jump-coding") != std::string::npos) {
        CodingRun run = replay_jump_trace(text);
        PartialMap iso = dec_iso.empty()
                             ? limit_isomorphism(run, run.ce.target)
                             : iso_map_from_text(read_file(dec_iso));
        std::vector<int> c = decode_ce_set(run, iso);
        std::cout << "{\"decoded_set\":[";
        for (size_t i = 0; i < c.size(); ++i)
          std::cout << (i ? "," : "") << c[i];
        std::cout << "]}\n";
      } else {
        EtaReplay rep = replay_eta_trace(text);
        PartialMap iso =
            dec_iso.empty()
                ? iso_from_true_path(rep.result.run, true_path(rep.family))
                : iso_map_from_text(read_file(dec_iso));
        std::vector<int> path = decode_true_path(rep.base, rep.result.run, iso,
                                                 rep.result.run.budget);
        std::cout << "{\"decoded_true_path\":[";
        for (size_t i = 0; i < path.size(); ++i)
          std::cout << (i ? "," : "") << path[i];
        std::cout << "]}\n";
      }
    }

    if (sc->parsed()) {
      RunConfig cfg = sc_common.to_config();
      std::string spec = sc_structure;
      if (!sc_presentation.empty()) spec += "," + sc_presentation;
      Presentation p = presentation_from_spec(spec, cfg.ordinal_bound);
      ScottFamily fam = ScottFamily::for_family(p.family());
      std::ostringstream out;
      if (sc_emit == "S") {
        InvariantSet s = compute_S(p, fam, sc_bound);
        for (const auto& e : s.entries)
          out << "{\"tuple\":\"" << tuple_to_string(e.a) << "\",\"formula\":\""
              << e.formula << "\"}\n";
      } else if (sc_emit == "T") {
        InvariantSet t = compute_T(p, fam, sc_bound);
        for (const auto& e : t.entries)
          out << "{\"tuple\":\"" << tuple_to_string(e.a) << "\",\"witness\":\""
              << tuple_to_string(e.witness) << "\",\"formula\":\"" << e.formula
              << "\"}\n";
      } else if (sc_emit == "iso") {
        Presentation canonical =
            sc_structure == "q"
                ? Presentation::rational_order()
                : sc_structure == "vq" ? Presentation::rational_vector_space()
                                       : Presentation::ordinal_order(
                                             Ordinal::parse(sc_structure));
        PartialMap m = iso_from_S(canonical, p, fam, sc_bound, sc_bound);
        out << iso_map_to_text(m);
      } else {
        throw std::invalid_argument("scott --emit must be S, T, or iso");
      }
      if (sc_out.empty()) {
        std::cout << out.str();
      } else {
        std::string path = resolve_out_path(sc_out);
        atomic_write(path, out.str());
        if (sc_emit == "iso") written.push_back(path);
      }
    }

    if (vf->parsed()) {
      int rc = verify_paths(vf_paths, std::cout);
      return rc;
    }

    return self_verify(written);
  } catch (const MissingArtifact& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SearchExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InvariantViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
