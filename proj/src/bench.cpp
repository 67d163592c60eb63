#include "matlog/bench.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace matlog {

std::string_view to_string(BenchTask t) { return t == BenchTask::trcl ? "trcl" : "sgen"; }

BenchTask parse_bench_task(std::string_view name) {
  if (name == "trcl") return BenchTask::trcl;
  if (name == "sgen") return BenchTask::sgen;
  throw std::invalid_argument("unknown bench task '" + std::string(name) + "' (expected trcl or sgen)");
}

std::string_view trcl_source() {
  return "r2(X,Y) :- r1(X,Y).\n"
         "r2(X,Z) :- r1(X,Y), r2(Y,Z).\n";
}

std::string_view sgen_source() {
  return "r2(X,W) :- diag(X,W).\n"
         "r2(X,W) :- r1(X,Y), r2(Y,Z), r1(W,Z).\n";
}

Program bench_program(BenchTask task) {
  return parse_program(task == BenchTask::trcl ? trcl_source() : sgen_source());
}

std::vector<Method> default_bench_methods(BenchTask task) {
  if (task == BenchTask::trcl) return {Method::direct, Method::boolean};
  return {Method::sylvester, Method::boolean};
}

namespace {

struct Cell {
  std::vector<double> seconds;
  double edges = 0.0;
  double result = 0.0;
  std::string status = "ok";
};

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(s < 10 ? 4 : 1) << s;
  return os.str();
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config, std::ostream* progress) {
  if (config.repeat < 1) throw std::invalid_argument("bench: repeat must be >= 1");
  const auto methods = config.methods.empty() ? default_bench_methods(config.task) : config.methods;
  const Program program = bench_program(config.task);
  const bool diag = config.task == BenchTask::sgen;

  std::vector<BenchRow> rows;
  for (double pe : config.pe) {
    std::vector<Cell> cells(methods.size());
    for (std::size_t r = 0; r < config.repeat; ++r) {
      const BitMatrix r1 = random_adjacency({config.n, pe, config.seed + r});
      const FactSet facts = facts_from_matrix(r1, "r1");
      std::optional<BitMatrix> reference;
      for (std::size_t k = 0; k < methods.size(); ++k) {
        Cell& cell = cells[k];
        if (cell.status != "ok") continue;
        SolveOptions options;
        options.method = methods[k];
        options.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                              std::chrono::duration<double>(config.timeout_seconds));
        try {
          const Model model = evaluate_program(program, facts, options, diag);
          const BitMatrix& r2 = model.relations.at("r2");
          cell.seconds.push_back(model.solve_seconds);
          cell.edges += static_cast<double>(r1.count());
          cell.result += static_cast<double>(r2.count());
          if (!reference) reference = r2;
          else if (!(*reference == r2)) {
            for (auto& c : cells) c.status = "mismatch";
          }
          if (progress) {
            *progress << to_string(config.task) << " n=" << config.n << " pe=" << pe << " seed=" << config.seed + r
                      << " " << to_string(methods[k]) << ": " << fmt_seconds(model.solve_seconds) << " s\n";
          }
        } catch (const TimeoutError&) {
          cell.status = "timeout";
        } catch (const std::exception& e) {
          cell.status = std::string("error: ") + e.what();
        }
      }
    }
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const Cell& cell = cells[k];
      BenchRow row;
      row.task = std::string(to_string(config.task));
      row.n = config.n;
      row.pe = pe;
      row.method = std::string(to_string(methods[k]));
      row.repeat = cell.seconds.size();
      row.status = cell.status;
      if (!cell.seconds.empty()) {
        const double count = static_cast<double>(cell.seconds.size());
        double sum = 0.0;
        for (double s : cell.seconds) sum += s;
        row.mean_seconds = sum / count;
        row.min_seconds = *std::min_element(cell.seconds.begin(), cell.seconds.end());
        row.max_seconds = *std::max_element(cell.seconds.begin(), cell.seconds.end());
        row.mean_edges = cell.edges / count;
        row.mean_result = cell.result / count;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_bench_table(const std::vector<BenchRow>& rows) {
  std::vector<std::string> methods;
  std::vector<double> pes;
  std::map<std::pair<double, std::string>, const BenchRow*> index;
  for (const auto& r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    if (std::find(pes.begin(), pes.end(), r.pe) == pes.end()) pes.push_back(r.pe);
    index[{r.pe, r.method}] = &r;
  }
  std::ostringstream os;
  if (!rows.empty()) os << rows.front().task << ", N = " << rows.front().n << " (mean solve seconds)\n";
  os << std::left << std::setw(10) << "p_e";
  for (const auto& m : methods) os << std::right << std::setw(14) << m;
  os << std::right << std::setw(14) << "|R1|" << std::setw(14) << "|result|" << "\n";
  for (double pe : pes) {
    std::ostringstream p;
    p << pe;
    os << std::left << std::setw(10) << p.str();
    double edges = 0.0, result = 0.0;
    for (const auto& m : methods) {
      const BenchRow* r = index.at({pe, m});
      std::string cell = r->status == "ok" ? fmt_seconds(r->mean_seconds) : r->status.substr(0, r->status.find(':'));
      os << std::right << std::setw(14) << cell;
      if (r->repeat > 0) {
        edges = r->mean_edges;
        result = r->mean_result;
      }
    }
    os << std::right << std::setw(14) << std::fixed << std::setprecision(1) << edges << std::setw(14) << result
       << std::defaultfloat << "\n";
  }
  return os.str();
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << kBenchCsvHeader << "\n";
  os << std::setprecision(9);
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << r.task << "," << r.n << "," << r.pe << "," << r.method << "," << r.repeat << "," << r.mean_seconds << ","
       << r.min_seconds << "," << r.max_seconds << "," << r.mean_edges << "," << r.mean_result << "," << status
       << "\n";
  }
  return os.str();
}

// ------------------------------------------------------------------ dataset

DatasetRow run_dataset(const std::string& name, const FactSet& facts, double timeout_seconds) {
  const Program program = bench_program(BenchTask::trcl);
  DatasetRow row;
  row.dataset = name;
  row.n = facts.constants().size();
  row.edges = facts.pairs("r1").size();

  std::optional<BitMatrix> iteration, matrix;
  auto timed = [&](Method m, std::optional<double>& seconds, std::optional<BitMatrix>& out) {
    SolveOptions options;
    options.method = m;
    options.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                          std::chrono::duration<double>(timeout_seconds));
    try {
      Model model = evaluate_program(program, facts, options);
      seconds = model.solve_seconds;
      out = std::move(model.relations.at("r2"));
    } catch (const TimeoutError&) {
      row.status = "timeout";
    }
  };
  timed(Method::boolean, row.iteration_seconds, iteration);
  timed(Method::direct, row.matrix_seconds, matrix);
  if (iteration) row.closure = iteration->count();
  else if (matrix) row.closure = matrix->count();
  if (iteration && matrix && !(*iteration == *matrix)) row.status = "mismatch";
  return row;
}

DatasetRow run_dataset(const std::filesystem::path& path, FactFormat format, double timeout_seconds) {
  const FactSet facts = parse_facts(read_text_file(path), format, "r1");
  if (facts.empty()) throw IoError(path.string() + ": edge list is empty");
  return run_dataset(path.stem().string(), facts, timeout_seconds);
}

std::string format_dataset_table(const std::vector<DatasetRow>& rows) {
  std::size_t width = 7;
  for (const auto& r : rows) width = std::max(width, r.dataset.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "Dataset" << std::right << std::setw(10) << "N"
     << std::setw(12) << "|R1|" << std::setw(14) << "|trcl(R1)|" << std::setw(12) << "Iteration" << std::setw(12)
     << "Matrix" << "  status\n";
  auto t = [](const std::optional<double>& s) { return s ? fmt_seconds(*s) : std::string("timeout"); };
  for (const auto& r : rows) {
    os << std::left << std::setw(static_cast<int>(width)) << r.dataset << std::right << std::setw(10) << r.n
       << std::setw(12) << r.edges << std::setw(14) << r.closure << std::setw(12) << t(r.iteration_seconds)
       << std::setw(12) << t(r.matrix_seconds) << "  " << r.status << "\n";
  }
  return os.str();
}

// ------------------------------------------------------------------ compare

CompareReport compare_methods(const Program& program, const FactSet& facts, const SolveOptions& base,
                              bool builtin_diag) {
  CompareReport report;
  report.reference = std::string(to_string(Method::boolean));
  std::optional<Model> reference;
  for (Method m : concrete_methods()) {
    SolveOptions options = base;
    options.method = m;
    try {
      Model model = evaluate_program(program, facts, options, builtin_diag);
      report.methods.push_back(std::string(to_string(m)));
      if (!reference) {
        report.constants = model.constants;
        reference = std::move(model);
        continue;
      }
      for (const auto& [name, ref] : reference->relations) {
        const BitMatrix& got = model.relations.at(name);
        EntryDiff diff{std::string(to_string(m)), name, {}};
        for (std::size_t i = 0; i < ref.size(); ++i) {
          for (std::size_t j = 0; j < ref.size(); ++j) {
            if (ref.get(i, j) != got.get(i, j)) diff.entries.push_back({i, j});
          }
        }
        if (!diff.entries.empty()) {
          report.differing_entries += diff.entries.size();
          report.diffs.push_back(std::move(diff));
        }
      }
    } catch (const NotApplicableError& e) {
      report.skipped.push_back(std::string(to_string(m)) + ": " + e.what());
    }
  }
  return report;
}

std::string format_compare(const CompareReport& report) {
  const ConstantTable& constants = report.constants;
  std::ostringstream os;
  os << report.methods.size() << " methods, " << report.differing_entries << " differing entries\n";
  os << "ran:";
  for (const auto& m : report.methods) os << " " << m;
  os << " (reference " << report.reference << ")\n";
  for (const auto& s : report.skipped) os << "skipped " << s << "\n";
  for (const auto& d : report.diffs) {
    os << d.method << " differs on " << d.predicate << " at " << d.entries.size() << " entries:";
    const std::size_t shown = std::min<std::size_t>(d.entries.size(), 20);
    for (std::size_t k = 0; k < shown; ++k) {
      const auto [i, j] = d.entries[k];
      os << " (" << i << "," << j << ")";
      if (i < constants.size() && j < constants.size()) os << "=" << constants.name(i) << "," << constants.name(j);
    }
    if (shown < d.entries.size()) os << " ...";
    os << "\n";
  }
  return os.str();
}

}  // namespace matlog
