// Prints one PASS/FAIL/SKIP line per acceptance criterion; exits 1 if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "matlog/bench.hpp"
#include "matlog/data_io.hpp"
#include "matlog/solver.hpp"

using namespace matlog;

namespace {

struct Outcome {
  bool pass = true;
  bool skip = false;
  std::string detail;
};

Outcome fail(const std::string& why) { return {false, false, why}; }

SolveOptions with_method(Method m) {
  SolveOptions o;
  o.method = m;
  return o;
}

FactSet random_r1(std::size_t n, double pe, std::uint64_t seed) {
  return facts_from_matrix(random_adjacency({n, pe, seed}), "r1");
}

EquationSystem top_layer(const Program& program, const FactSet& facts, bool diag) {
  std::vector<EquationSystem> systems;
  evaluate_program(program, facts, {}, diag, &systems);
  return systems.back();
}

Outcome golden_example() {
  const FactSet facts = parse_facts("r1(e1,e2). r1(e2,e3). r1(e3,e1). r1(e4,e1).", FactFormat::atoms);
  const EquationSystem top = top_layer(bench_program(BenchTask::trcl), facts, false);
  const double eps = top.equations[0].epsilon;
  if (eps != 0.5) return fail("eps = " + std::to_string(eps));
  const auto sol = solve_tail_recursive_direct(top);
  const double expect[4][4] = {{0.1428, 0.5714, 0.2857, 0.0}, {0.2857, 0.1428, 0.5714, 0.0},
                               {0.5714, 0.2857, 0.1428, 0.0}, {0.5714, 0.2857, 0.1428, 0.0}};
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) worst = std::max(worst, std::abs(sol.scaled[0](i, j) - expect[i][j]));
  if (worst > 1e-3) return fail("max deviation " + std::to_string(worst));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (sol.support[0].get(i, j) != (j < 3)) return fail("support differs at (" + std::to_string(i) + "," + std::to_string(j) + ")");
  std::ostringstream os;
  os << "eps=0.5, max deviation " << worst << ", support columns 1-3";
  return {true, false, os.str()};
}

Outcome oracle_triangle() {
  std::size_t runs = 0;
  for (std::size_t n : {10, 50, 200})
    for (double pe : {0.01, 0.05, 0.2})
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const FactSet facts = random_r1(n, pe, seed);
        const Program program = bench_program(BenchTask::trcl);
        const BitMatrix direct = evaluate_program(program, facts, with_method(Method::direct)).relations.at("r2");
        const BitMatrix boolean = evaluate_program(program, facts, with_method(Method::boolean)).relations.at("r2");
        const BitMatrix warshall = evaluate_program(program, facts, with_method(Method::warshall)).relations.at("r2");
        if (direct != boolean || warshall != boolean) {
          std::ostringstream os;
          os << "disagreement at n=" << n << " pe=" << pe << " seed=" << seed;
          return fail(os.str());
        }
        ++runs;
      }
  return {true, false, std::to_string(runs) + " instances, direct = boolean = warshall"};
}

Outcome same_generation() {
  const Program program = bench_program(BenchTask::sgen);
  const double pes[] = {0.01, 0.05, 0.2, 0.02, 0.1};
  std::size_t runs = 0;
  for (std::size_t n : {10, 50, 200})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const FactSet facts = random_r1(n, pes[seed - 1], seed);
      const Model syl = evaluate_program(program, facts, with_method(Method::sylvester), true);
      const Model boolean = evaluate_program(program, facts, with_method(Method::boolean), true);
      if (syl.layers.back().used != Method::sylvester) return fail("sylvester fell back at n=" + std::to_string(n));
      if (syl.relations.at("r2") != boolean.relations.at("r2"))
        return fail("mismatch at n=" + std::to_string(n) + " seed=" + std::to_string(seed));
      ++runs;
    }
  const FactSet family = parse_facts("r1(c1,a). r1(c2,a). r1(g1,c1). r1(g2,c2).", FactFormat::atoms);
  const Model m = evaluate_program(program, family, with_method(Method::sylvester), true);
  BitMatrix expect = BitMatrix::identity(m.constants.size());
  for (auto [x, y] : {std::pair{"c1", "c2"}, std::pair{"c2", "c1"}, std::pair{"g1", "g2"}, std::pair{"g2", "g1"}})
    expect.set(m.constants.at(x), m.constants.at(y));
  if (m.relations.at("r2") != expect) return fail("five-person tree: " + render_model({{"r2", m.relations.at("r2")}}, m.constants));
  return {true, false, std::to_string(runs) + " instances match boolean; five-person tree matches"};
}

Outcome kron_agreement() {
  double worst = 0.0;
  std::size_t runs = 0;
  const char* mutual =
      "r2(X,Y) :- r1(X,Y).\nr2(X,W) :- r1(X,Y), r3(Y,Z), r1(Z,W).\nr3(X,Z) :- r2(X,Y), r1(Y,Z).\n";
  for (const Program& program : {bench_program(BenchTask::sgen), parse_program(mutual)})
    for (std::size_t n : {2, 4, 8, 12})
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const EquationSystem top = top_layer(program, random_r1(n, 0.2, seed), true);
        if (top.cls != LayerClass::two_sided) return fail("layer is not two-sided");
        const auto fixed = solve_sylvester(top);
        const auto kron = solve_kron_system(top);
        for (std::size_t h = 0; h < top.equations.size(); ++h)
          worst = std::max(worst, max_abs_diff(fixed.scaled[h], kron.scaled[h]));
        ++runs;
      }
  std::ostringstream os;
  os << runs << " instances, max |fixed point - kron| = " << worst;
  if (worst >= 1e-9) return fail(os.str());
  return {true, false, os.str()};
}

Outcome iterate_properties() {
  const char* transposed = "r2(X,Y) :- r1(X,Y).\nr2(X,Z) :- r1(X,Y), r2(Z,Y).\n";
  std::size_t checks = 0;
  for (const Program& program : {bench_program(BenchTask::trcl), bench_program(BenchTask::sgen), parse_program(transposed)})
    for (std::size_t n : {5, 12, 20})
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const FactSet facts = random_r1(n, 0.15, seed);
        const EquationSystem top = top_layer(program, facts, true);
        auto s = zero_state(top), b = zero_state(top);
        for (int k = 1; k <= 20; ++k) {
          const auto s_next = scaled_step(top, s), b_next = boolean_step(top, b);
          for (std::size_t h = 0; h < s.size(); ++h) {
            if (threshold_positive(s_next[h], 0.0) != threshold_positive(b_next[h], 0.0))
              return fail("support of scaled iterate " + std::to_string(k) + " differs");
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < n; ++j)
                if (s_next[h](i, j) < s[h](i, j) || s_next[h](i, j) > 1.0) return fail("iterates not monotone in [0,1]");
          }
          s = s_next;
          b = b_next;
          ++checks;
        }
        SolveOptions half;
        half.epsilon_scale = 0.5;
        if (evaluate_program(program, facts, {}, true).relations != evaluate_program(program, facts, half, true).relations)
          return fail("halving eps changed the model");
      }
  return {true, false, std::to_string(checks) + " iterate pairs; eps halving invariant"};
}

Outcome performance() {
  BenchConfig big;
  big.task = BenchTask::trcl;
  big.n = 2000;
  big.pe = {0.01, 0.1};
  big.repeat = 2;
  big.methods = {Method::direct, Method::boolean};
  const auto rows = run_bench(big);
  std::ostringstream os;
  os << std::setprecision(3);
  for (double pe : big.pe) {
    double direct = 0.0, boolean = 0.0;
    for (const auto& r : rows) {
      if (r.pe != pe) continue;
      if (r.status != "ok") return fail("N=2000 run status " + r.status);
      (r.method == "direct" ? direct : boolean) = r.mean_seconds;
    }
    os << "N=2000 pe=" << pe << " speedup " << boolean / direct << "; ";
    if (direct > boolean) return fail(os.str() + "direct slower than boolean");
  }
  BenchConfig flat;
  flat.n = 1000;
  flat.pe = {0.001, 0.01, 0.1};
  flat.repeat = 3;
  flat.methods = {Method::direct};
  double lo = 1e300, hi = 0.0;
  for (const auto& r : run_bench(flat)) {
    if (r.status != "ok") return fail("N=1000 run status " + r.status);
    lo = std::min(lo, r.mean_seconds);
    hi = std::max(hi, r.mean_seconds);
  }
  os << "N=1000 direct max/min " << hi / lo;
  if (hi / lo >= 3.0) return fail(os.str());
  return {true, false, os.str()};
}

Outcome konect_table() {
  const char* path = std::getenv("MATLOG_KONECT_FILE");
  if (!path || !*path) return {true, true, "set MATLOG_KONECT_FILE to a KONECT edge list"};
  const DatasetRow row = run_dataset(path, FactFormat::konect);
  std::cout << format_dataset_table({row});
  if (row.status != "ok") return fail("status " + row.status);
  const std::string p = path;
  if (p.find("moreno") != std::string::npos && p.find("blogs") != std::string::npos &&
      (row.n != 1224 || row.edges != 19025)) {
    return fail("moreno-blogs: N=" + std::to_string(row.n) + " |R1|=" + std::to_string(row.edges));
  }
  return {true, false, "N=" + std::to_string(row.n) + " |R1|=" + std::to_string(row.edges) +
                           " |trcl(R1)|=" + std::to_string(row.closure)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, 1.0, golden_example},    {2, 30.0, oracle_triangle},  {3, 60.0, same_generation},
      {4, 10.0, kron_agreement},   {5, 30.0, iterate_properties}, {6, 600.0, performance},
      {7, 3600.0, konect_table},
  };
  bool ok = true;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && !o.skip && seconds >= c.budget_seconds) {
      o = fail(o.detail + "; took " + std::to_string(seconds) + " s, budget " + std::to_string(c.budget_seconds) + " s");
    }
    ok = ok && o.pass;
    std::ostringstream line;
    line << (o.skip ? "SKIP" : o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << o.detail;
    if (!o.skip) line << " (" << std::fixed << std::setprecision(2) << seconds << " s)";
    std::cout << line.str() << std::endl;
  }
  return ok ? 0 : 1;
}
