#pragma once

#include <random>
#include <string>

#include "matlog/bench.hpp"
#include "matlog/compiler.hpp"
#include "matlog/data_io.hpp"
#include "matlog/front.hpp"
#include "matlog/matrix.hpp"
#include "matlog/solver.hpp"

namespace matlog::testing {

inline const char* kCycleFacts = "r1(e1,e2). r1(e2,e3). r1(e3,e1). r1(e4,e1).";
inline const char* kFamilyFacts = "r1(c1,a). r1(c2,a). r1(g1,c1). r1(g2,c2).";
inline const char* kTransposedSource = "r2(X,Y) :- r1(X,Y).\nr2(X,Z) :- r1(X,Y), r2(Z,Y).\n";
inline const char* kMutualSource =
    "r2(X,Y) :- r1(X,Y).\n"
    "r2(X,W) :- r1(X,Y), r3(Y,Z), r1(Z,W).\n"
    "r3(X,Z) :- r2(X,Y), r1(Y,Z).\n";

inline BitMatrix cycle_r1() {
  return BitMatrix::from_rows({{0, 1, 0, 0}, {0, 0, 1, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}});
}

/// Compiled systems of every layer of `source` over `facts`.
inline std::vector<EquationSystem> compile_all(const std::string& source, const FactSet& facts, bool diag = false,
                                               SolveOptions options = {}) {
  std::vector<EquationSystem> systems;
  evaluate_program(parse_program(source), facts, options, diag, &systems);
  return systems;
}

/// The recursive (last) layer of `source` over a random r1.
inline EquationSystem random_top_layer(const std::string& source, std::size_t n, double pe, std::uint64_t seed,
                                       bool diag = false) {
  auto systems = compile_all(source, facts_from_matrix(random_adjacency({n, pe, seed}), "r1"), diag);
  return systems.back();
}

inline RealMatrix random_real(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  RealMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
  return m;
}

inline BitMatrix random_bits(std::size_t n, double p, std::uint64_t seed) { return random_adjacency({n, p, seed}); }

}  // namespace matlog::testing
