// matlog: validate, classify, solve, compare and benchmark linear binary Datalog programs.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "matlog/analysis.hpp"
#include "matlog/bench.hpp"
#include "matlog/compiler.hpp"
#include "matlog/data_io.hpp"
#include "matlog/front.hpp"
#include "matlog/solver.hpp"

namespace {

using namespace matlog;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Syntax error in a named input file.
struct SourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Inputs {
  std::string program_path;
  std::vector<std::string> fact_paths;
  std::string format = "atoms";
  std::string predicate = "r1";
  bool builtin_diag = false;
  std::size_t random_n = 0;
  double random_pe = 0.0;
  std::uint64_t seed = 1;
};

void add_fact_options(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--facts", in.fact_paths, "Fact file (repeatable)");
  cmd->add_option("--format", in.format, "Fact file format: atoms, tsv or konect")->check(CLI::IsMember({"atoms", "tsv", "konect"}));
  cmd->add_option("--predicate", in.predicate, "Relation name for tsv/konect facts");
  cmd->add_flag("--builtin-diag", in.builtin_diag, "Populate diag(c,c) for every constant");
  cmd->add_option("--random-n", in.random_n, "Add a random relation over N constants as --predicate facts");
  cmd->add_option("--random-pe", in.random_pe, "Edge probability of the random relation")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", in.seed, "Seed of the random relation");
}

Program load_program(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_program(text);
  } catch (const ParseError& e) {
    throw SourceError(path + ": " + e.what());
  }
}

FactSet load_facts(const Inputs& in) {
  FactSet facts;
  const FactFormat format = parse_fact_format(in.format);
  for (const auto& path : in.fact_paths) {
    const std::string text = read_text_file(path);
    try {
      facts = facts.merged(parse_facts(text, format, in.predicate));
    } catch (const ParseError& e) {
      throw SourceError(path + ": " + e.what());
    }
  }
  if (in.random_n > 0) {
    facts = facts.merged(facts_from_matrix(random_adjacency({in.random_n, in.random_pe, in.seed}), in.predicate));
  }
  return facts;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text_file(path, text);
}

int cmd_validate(const Inputs& in) {
  const Program program = load_program(in.program_path);
  const auto report = validate_clin(program);
  std::cout << format_validation(program, report);
  if (!report.ok) return kFailure;
  const auto layered = analyze(program);
  std::cout << layered.layers.size() << " layers\n";
  return kOk;
}

int cmd_classify(const Inputs& in, bool emit_equations) {
  const Program program = load_program(in.program_path);
  const auto report = validate_clin(program);
  if (!report.ok) {
    std::cout << format_validation(program, report);
    return kFailure;
  }
  std::cout << format_layers(program, analyze(program));
  if (emit_equations) {
    std::vector<EquationSystem> systems;
    evaluate_program(program, load_facts(in), {}, in.builtin_diag, &systems);
    for (const auto& s : systems) std::cout << format_system(s);
  }
  return kOk;
}

struct SolveFlags {
  std::string method = "auto";
  std::optional<double> tau;
  std::optional<double> epsilon;
  std::string out;
  std::string dump_dir;
  std::string stats_out;
  bool quiet = false;
  std::string inject_fault;
};

SolveOptions make_options(const SolveFlags& f) {
  SolveOptions o;
  o.method = parse_method(f.method);
  o.tau = f.tau;
  o.epsilon = f.epsilon;
  if (!f.inject_fault.empty()) o.inject_fault = parse_method(f.inject_fault);
  return o;
}

int cmd_solve(const Inputs& in, const SolveFlags& flags) {
  const Program program = load_program(in.program_path);
  const FactSet facts = load_facts(in);
  const Model model = evaluate_program(program, facts, make_options(flags), in.builtin_diag);
  emit(flags.out, render_model(model.relations, model.constants));
  const Stats stats = write_stats(model);
  if (!flags.stats_out.empty()) write_text_file(flags.stats_out, format_stats_records(stats));
  if (!flags.dump_dir.empty()) dump_model_matrices(model, flags.dump_dir);
  if (!flags.quiet) std::cerr << format_stats_table(stats) << format_provenance(model);
  return kOk;
}

int cmd_compare(const Inputs& in, const SolveFlags& flags) {
  const Program program = load_program(in.program_path);
  const FactSet facts = load_facts(in);
  SolveOptions base = make_options(flags);
  base.method = Method::auto_select;
  const CompareReport report = compare_methods(program, facts, base, in.builtin_diag);
  std::cout << format_compare(report);
  return report.ok() ? kOk : kFailure;
}

struct BenchFlags {
  std::string task = "trcl";
  std::size_t n = 1000;
  std::vector<double> pe;
  std::uint64_t seed = 1;
  std::size_t repeat = 5;
  std::string methods;
  double timeout = 3600.0;
  std::string csv;
  std::vector<std::string> datasets;
  std::string dataset_format = "konect";
  bool verbose = false;
};

int cmd_bench(const BenchFlags& f) {
  if (!f.datasets.empty()) {
    std::vector<DatasetRow> rows;
    for (const auto& path : f.datasets) rows.push_back(run_dataset(path, parse_fact_format(f.dataset_format), f.timeout));
    std::cout << format_dataset_table(rows);
    bool ok = true;
    for (const auto& r : rows) ok = ok && r.status != "mismatch";
    return ok ? kOk : kFailure;
  }
  BenchConfig config;
  config.task = parse_bench_task(f.task);
  config.n = f.n;
  if (!f.pe.empty()) config.pe = f.pe;
  config.seed = f.seed;
  config.repeat = f.repeat;
  config.timeout_seconds = f.timeout;
  std::stringstream list(f.methods);
  for (std::string m; std::getline(list, m, ',');) {
    if (!m.empty()) config.methods.push_back(parse_method(m));
  }
  const auto rows = run_bench(config, f.verbose ? &std::cerr : nullptr);
  std::cout << format_bench_table(rows);
  if (!f.csv.empty()) emit(f.csv, bench_csv(rows));
  for (const auto& r : rows) {
    if (r.status == "mismatch") return kFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least models of linear binary Datalog programs by matrix equations"};
  app.require_subcommand(1);

  Inputs in;
  SolveFlags solve_flags;
  BenchFlags bench_flags;
  bool emit_equations = false;

  auto* validate = app.add_subcommand("validate", "Check membership in the linear chain class");
  validate->add_option("program", in.program_path, "Program file")->required();

  auto* classify = app.add_subcommand("classify", "Print layers and their solver classes");
  classify->add_option("program", in.program_path, "Program file")->required();
  classify->add_flag("--emit-equations", emit_equations, "Also print each layer's compiled equations");
  add_fact_options(classify, in);

  auto add_solve_flags = [&](CLI::App* cmd) {
    cmd->add_option("program", in.program_path, "Program file")->required();
    add_fact_options(cmd, in);
    cmd->add_option("--tau", solve_flags.tau, "Support threshold")->check(CLI::NonNegativeNumber);
    cmd->add_option("--epsilon", solve_flags.epsilon, "Override the computed epsilon of every equation");
    cmd->add_option("--inject-fault", solve_flags.inject_fault)->group("");
  };

  auto* solve = app.add_subcommand("solve", "Compute the least model");
  add_solve_flags(solve);
  solve->add_option("--method", solve_flags.method, "auto, boolean, scaled, direct, sylvester, kron_oracle, warshall");
  solve->add_option("--out", solve_flags.out, "Model output path (default stdout)");
  solve->add_option("--dump-matrices", solve_flags.dump_dir, "Directory for binary matrix dumps");
  solve->add_option("--stats", solve_flags.stats_out, "Write key=value statistics here");
  solve->add_flag("--quiet", solve_flags.quiet, "Do not print statistics and provenance to stderr");

  auto* compare = app.add_subcommand("compare", "Solve with every applicable method and diff the models");
  add_solve_flags(compare);

  auto* bench = app.add_subcommand("bench", "Time methods on random graphs or edge-list datasets");
  bench->add_option("--task", bench_flags.task, "trcl or sgen")->check(CLI::IsMember({"trcl", "sgen"}));
  bench->add_option("--n", bench_flags.n, "Number of constants")->check(CLI::PositiveNumber);
  bench->add_option("--pe", bench_flags.pe, "Edge probability (repeatable)")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--seed", bench_flags.seed, "First seed; repeat r uses seed + r");
  bench->add_option("--repeat", bench_flags.repeat, "Graphs per edge probability")->check(CLI::PositiveNumber);
  bench->add_option("--methods", bench_flags.methods, "Comma-separated methods");
  bench->add_option("--timeout", bench_flags.timeout, "Seconds per run before it is marked timeout");
  bench->add_option("--csv", bench_flags.csv, "CSV output path");
  bench->add_option("--dataset", bench_flags.datasets, "Edge-list file for a transitive closure row (repeatable)");
  bench->add_option("--dataset-format", bench_flags.dataset_format, "konect or tsv")->check(CLI::IsMember({"konect", "tsv"}));
  bench->add_flag("--verbose", bench_flags.verbose, "Print each run to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(in);
    if (*classify) return cmd_classify(in, emit_equations);
    if (*solve) return cmd_solve(in, solve_flags);
    if (*compare) return cmd_compare(in, solve_flags);
    if (*bench) return cmd_bench(bench_flags);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const EpsilonError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
