#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matlog/data_io.hpp"
#include "matlog/front.hpp"
#include "matlog/solver.hpp"

namespace matlog {

enum class BenchTask { trcl, sgen };

std::string_view to_string(BenchTask t);
BenchTask parse_bench_task(std::string_view name);

/// r2 = trcl(r1).
std::string_view trcl_source();
/// Same generation over r1 with diag as equality.
std::string_view sgen_source();
Program bench_program(BenchTask task);

struct BenchConfig {
  BenchTask task = BenchTask::trcl;
  std::size_t n = 1000;
  std::vector<double> pe{0.001, 0.01, 0.1};
  std::uint64_t seed = 1;
  std::size_t repeat = 5;
  std::vector<Method> methods;  // empty: {direct, boolean} for trcl, {sylvester, boolean} for sgen
  double timeout_seconds = 3600.0;
};

std::vector<Method> default_bench_methods(BenchTask task);

struct BenchRow {
  std::string task;
  std::size_t n = 0;
  double pe = 0.0;
  std::string method;
  std::size_t repeat = 0;  // completed runs
  double mean_seconds = 0.0;
  double min_seconds = 0.0;
  double max_seconds = 0.0;
  double mean_edges = 0.0;
  double mean_result = 0.0;
  std::string status = "ok";  // ok | timeout | mismatch | error: ...
};

/// Runs every (pe, method) cell over `repeat` graphs seeded seed, seed+1, ...; all methods
/// see the same graphs and their r2 results must be equal for a cell to report "ok".
/// Only the solve phase is timed.
std::vector<BenchRow> run_bench(const BenchConfig& config, std::ostream* progress = nullptr);

/// One row per p_e, one column per method (mean seconds or "timeout").
std::string format_bench_table(const std::vector<BenchRow>& rows);
std::string bench_csv(const std::vector<BenchRow>& rows);
inline constexpr std::string_view kBenchCsvHeader =
    "task,n,pe,method,repeat,mean_seconds,min_seconds,max_seconds,mean_edges,mean_result,status";

struct DatasetRow {
  std::string dataset;
  std::size_t n = 0;
  std::size_t edges = 0;
  std::size_t closure = 0;
  std::optional<double> iteration_seconds;  // unset on timeout
  std::optional<double> matrix_seconds;
  std::string status = "ok";
};

/// Transitive closure of an edge list by boolean iteration and by the direct solve.
DatasetRow run_dataset(const std::filesystem::path& path, FactFormat format = FactFormat::konect,
                       double timeout_seconds = 3600.0);
DatasetRow run_dataset(const std::string& name, const FactSet& facts, double timeout_seconds = 3600.0);
std::string format_dataset_table(const std::vector<DatasetRow>& rows);

struct EntryDiff {
  std::string method;  // differs from the reference
  std::string predicate;
  std::vector<std::pair<std::size_t, std::size_t>> entries;
};

struct CompareReport {
  std::string reference;
  ConstantTable constants;
  std::vector<std::string> methods;  // ran successfully
  std::vector<std::string> skipped;  // "method: reason"
  std::vector<EntryDiff> diffs;
  std::size_t differing_entries = 0;
  bool ok() const { return differing_entries == 0 && methods.size() >= 1; }
};

/// Evaluates with every concrete method that applies to all layers and diffs the models
/// against the boolean-iteration model.
CompareReport compare_methods(const Program& program, const FactSet& facts, const SolveOptions& base = {},
                              bool builtin_diag = false);
std::string format_compare(const CompareReport& report);

}  // namespace matlog
