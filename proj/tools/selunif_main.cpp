// Command-line front end: solve problem files and run differential checks
// between the solvers and the brute-force reference.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selunif/selunif.hpp"

namespace {

constexpr int kExitSolution = 0;
constexpr int kExitFail = 1;
constexpr int kExitInputError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw selunif::Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct SolveArgs {
  std::string file;
  std::string algorithm = "auto";
  std::optional<std::size_t> max_depth;
  bool all = false;
  bool linear_only = false;
  std::optional<std::uint64_t> seed;
  bool json = false;
};

selunif::AlgorithmTag pick_algorithm(const std::string& name, const selunif::Problem& p) {
  if (auto tag = selunif::algorithm_from_string(name)) return *tag;
  bool lin = selunif::is_linear(p.atom);
  for (const selunif::Atom& h : p.must_unify) lin = lin && selunif::is_linear(h);
  selunif::AlgorithmTag tag =
      lin ? selunif::AlgorithmTag::SuLin : selunif::AlgorithmTag::SuStar;
  std::cerr << "algorithm: " << selunif::to_string(tag) << " ("
            << (lin ? "linear inputs" : "non-linear inputs") << ")\n";
  return tag;
}

int run_solve(const SolveArgs& args) {
  selunif::Problem p = selunif::parse_problem(read_file(args.file));
  selunif::AlgorithmTag tag = pick_algorithm(args.algorithm, p);

  selunif::SolveOptions opts;
  opts.max_depth = args.max_depth;
  opts.linear_only = args.linear_only;
  opts.seed = args.seed;

  if (args.all) {
    selunif::SolveResult envelope;
    std::vector<selunif::Solution> sols = selunif::solve_all(p, tag, opts, &envelope);
    if (args.json) {
      nlohmann::ordered_json j = selunif::render_json(envelope, tag);
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const selunif::Solution& s : sols) {
        nlohmann::ordered_json sub = nlohmann::ordered_json::object();
        for (const auto& [v, t] : s.sigma.bindings())
          sub[selunif::to_string(v)] = selunif::to_string(t);
        list.push_back(std::move(sub));
      }
      j["solutions"] = std::move(list);
      std::cout << j.dump(2) << "\n";
    } else if (sols.empty()) {
      std::cout << selunif::print_solution(envelope) << "\n";
    } else {
      for (const selunif::Solution& s : sols)
        std::cout << selunif::to_string(s.sigma) << "\n";
    }
    return sols.empty() ? kExitFail : kExitSolution;
  }

  selunif::SolveResult res = selunif::solve(p, tag, opts);
  if (args.json)
    std::cout << selunif::render_json(res, tag).dump(2) << "\n";
  else
    std::cout << selunif::print_solution(res) << "\n";
  return res.solution ? kExitSolution : kExitFail;
}

struct DiffArgs {
  std::string file;
  bool random = false;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  bool linear = false;
  std::vector<std::string> algorithms;
  std::uint64_t max_candidates = 200000;
};

struct DiffStats {
  std::size_t agreements = 0;
  std::size_t comparisons = 0;
  std::size_t violations = 0;
};

struct AlgRun {
  bool capped = false;
  bool found = false;
  bool conclusive = false;
  /// Canonical instantiated atom -> representative substitution string.
  /// Solutions in the same variant class collapse to one key.
  std::map<std::string, std::string> classes;
};

/// Runs the selected algorithms on one problem and checks the cross-cutting
/// properties: every reported solution really solves the problem, su's
/// solution classes are contained in su-star's, and on linear inputs su-lin's
/// verdict matches the reference oracle.  Set comparisons are skipped when a
/// run hit the candidate cap, since a capped sweep may stop short of classes
/// the other side reached.
void diff_one(const selunif::Problem& p, const std::vector<selunif::AlgorithmTag>& algs,
              const selunif::SolveOptions& base_opts, const std::string& label,
              bool verbose, DiffStats& stats, std::ostream& out) {
  bool lin = selunif::is_linear(p.atom);
  for (const selunif::Atom& h : p.must_unify) lin = lin && selunif::is_linear(h);

  std::map<selunif::AlgorithmTag, AlgRun> runs;
  out << label << ":";
  for (selunif::AlgorithmTag tag : algs) {
    selunif::SolveOptions opts = base_opts;
    if ((tag == selunif::AlgorithmTag::SuLin) && !lin) {
      out << " " << selunif::to_string(tag) << "=n/a";
      continue;
    }
    if (tag == selunif::AlgorithmTag::Oracle && lin) opts.linear_only = true;
    std::string cell;
    try {
      selunif::SolveResult envelope;
      std::vector<selunif::Solution> sols = selunif::solve_all(p, tag, opts, &envelope);
      AlgRun run;
      run.capped = envelope.capped;
      run.found = !sols.empty();
      run.conclusive = envelope.conclusive;
      bool unsound = false;
      for (const selunif::Solution& s : sols) {
        if (!selunif::check_solution(s.sigma, p)) {
          ++stats.violations;
          unsound = true;
        }
        run.classes.emplace(selunif::canonical_form(s.sigma(p.atom)),
                            selunif::to_string(s.sigma));
      }
      cell = run.found ? "found(" + std::to_string(run.classes.size()) + ")"
                       : (run.conclusive ? "fail(conclusive)" : "fail");
      if (run.capped) cell += "+capped";
      if (unsound) cell += " UNSOUND";
      runs.emplace(tag, std::move(run));
    } catch (const selunif::EnumerationLimitError&) {
      cell = "skipped";
    }
    out << " " << selunif::to_string(tag) << "=" << cell;
  }
  out << "\n";

  auto su = runs.find(selunif::AlgorithmTag::Su);
  auto star = runs.find(selunif::AlgorithmTag::SuStar);
  if (su != runs.end() && star != runs.end() && !su->second.capped &&
      !star->second.capped) {
    std::size_t missing = 0;
    for (const auto& [key, sigma] : su->second.classes) {
      if (star->second.classes.count(key)) continue;
      ++missing;
      out << "  VIOLATION: su class " << sigma << " missing from su-star\n";
    }
    stats.violations += missing;
    if (missing == 0 && verbose) {
      for (const auto& [key, sigma] : star->second.classes)
        if (!su->second.classes.count(key))
          out << "  su-star only: " << sigma << "\n";
    }
  }

  // A verdict is trustworthy when the solver found something, or swept its
  // whole bound without being capped.
  auto reliable = [](const AlgRun& r) { return r.found || !r.capped; };
  auto sulin = runs.find(selunif::AlgorithmTag::SuLin);
  auto oracle = runs.find(selunif::AlgorithmTag::Oracle);
  if (lin && sulin != runs.end() && oracle != runs.end() &&
      reliable(sulin->second) && reliable(oracle->second)) {
    ++stats.comparisons;
    if (sulin->second.found == oracle->second.found)
      ++stats.agreements;
    else {
      ++stats.violations;
      out << "  DISAGREE: su-lin " << (sulin->second.found ? "solved" : "failed")
          << " but oracle " << (oracle->second.found ? "solved" : "failed") << "\n";
    }
  }
}

int run_diff(const DiffArgs& args) {
  std::vector<selunif::AlgorithmTag> algs;
  if (args.algorithms.empty()) {
    algs = {selunif::AlgorithmTag::Su, selunif::AlgorithmTag::SuStar,
            selunif::AlgorithmTag::SuLin, selunif::AlgorithmTag::Oracle};
  } else {
    for (const std::string& name : args.algorithms) {
      auto tag = selunif::algorithm_from_string(name);
      if (!tag) throw selunif::Error("unknown algorithm '" + name + "'");
      algs.push_back(*tag);
    }
  }

  selunif::SolveOptions opts;
  opts.max_candidates = args.max_candidates;

  DiffStats stats;
  if (args.random) {
    selunif::GenConfig cfg;
    cfg.linear = args.linear;
    if (args.linear) cfg.allow_binary = false;
    selunif::ProblemGenerator gen(args.seed, cfg);
    for (std::size_t i = 0; i < args.trials; ++i) {
      selunif::Problem p = gen.next();
      diff_one(p, algs, opts, "trial " + std::to_string(i), /*verbose=*/false, stats,
               std::cout);
    }
  } else {
    if (args.file.empty()) throw selunif::Error("diff needs a file or --random");
    selunif::Problem p = selunif::parse_problem(read_file(args.file));
    diff_one(p, algs, opts, args.file, /*verbose=*/true, stats, std::cout);
  }

  if (stats.comparisons)
    std::cout << stats.agreements << "/" << stats.comparisons << " agree\n";
  if (stats.violations) {
    std::cout << stats.violations << " violation(s)\n";
    return kExitFail;
  }
  std::cout << "ok\n";
  return kExitSolution;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"selective unification solver"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one problem file");
  solve_cmd->add_option("file", solve_args.file, "problem file")->required();
  solve_cmd->add_option("-a,--algorithm", solve_args.algorithm,
                        "su, su-star, su-lin, oracle or auto")
      ->check(CLI::IsMember({"auto", "su", "su-star", "su-lin", "oracle"}));
  solve_cmd->add_option("--max-depth", solve_args.max_depth, "depth bound override");
  solve_cmd->add_flag("--all", solve_args.all, "list every solution within the bound");
  solve_cmd->add_flag("--linear-only", solve_args.linear_only,
                      "restrict enumeration to linear bindings");
  solve_cmd->add_option("--seed", solve_args.seed, "randomize tie-breaking within layers");
  solve_cmd->add_flag("--json", solve_args.json, "machine-readable output");

  DiffArgs diff_args;
  CLI::App* diff_cmd = app.add_subcommand("diff", "differential checks between algorithms");
  diff_cmd->add_option("file", diff_args.file, "problem file");
  diff_cmd->add_flag("--random", diff_args.random, "use generated problems instead");
  diff_cmd->add_option("--trials", diff_args.trials, "number of generated problems");
  diff_cmd->add_option("--seed", diff_args.seed, "generator seed");
  diff_cmd->add_flag("--linear", diff_args.linear, "generate linear problems only");
  diff_cmd->add_option("--algorithms", diff_args.algorithms,
                       "subset to compare (default: all four)")
      ->delimiter(',');
  diff_cmd->add_option("--max-candidates", diff_args.max_candidates,
                       "per-solve candidate cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(solve_args);
    return run_diff(diff_args);
  } catch (const selunif::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const selunif::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInputError;
  }
}
