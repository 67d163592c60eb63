#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"

using namespace matlog;
using namespace matlog::testing;

namespace {

PredicateId pid(const Program& p, const std::string& name) { return *p.predicates.find(name); }

FactSet cycle_facts() { return parse_facts(kCycleFacts, FactFormat::atoms); }

}  // namespace

TEST_CASE("fold_chain orientation") {
  const Program p = parse_program("t(X,Z) :- s1(X,Y), s2(Y,Z).\nu(X,Z) :- s1(X,Y), s2(Z,Y).\n");
  const std::size_t n = 5;
  const BitMatrix s1 = random_bits(n, 0.4, 1), s2 = random_bits(n, 0.4, 2);
  const RelationMap rel{{pid(p, "s1"), s1}, {pid(p, "s2"), s2}};

  const auto& straight = p.clauses[0].body;
  CHECK(fold_chain(straight, rel, n) == bool_product(s1, s2).to_real());
  const auto& flipped = p.clauses[1].body;
  CHECK(fold_chain(flipped, rel, n) == bool_product(s1, s2.transposed()).to_real());
  CHECK(fold_chain(std::span<const Atom>{}, rel, n) == RealMatrix::identity(n));

  // Every entry of the fold is the truth value of the chain formula.
  for (const auto* body : {&straight, &flipped}) {
    const RealMatrix f = fold_chain(*body, rel, n);
    for (ConstantId i = 0; i < n; ++i)
      for (ConstantId j = 0; j < n; ++j)
        CHECK(f(i, j) == denote_formula(*body, rel, {{"X", i}, {"Z", j}}, n));
  }
}

TEST_CASE("transitive closure compiles to R2 = eps (R1 + R1 R2)") {
  const auto systems = compile_all(std::string(trcl_source()), cycle_facts());
  REQUIRE(systems.size() == 2);
  const EquationSystem& top = systems[1];
  CHECK(top.cls == LayerClass::tail_recursive);
  REQUIRE(top.equations.size() == 1);
  const Equation& eq = top.equations[0];
  CHECK(eq.head == "r2");
  CHECK(eq.constant == cycle_r1().to_real());
  REQUIRE(eq.terms.size() == 1);
  REQUIRE(eq.terms[0].left);
  CHECK(*eq.terms[0].left == cycle_r1().to_real());
  CHECK_FALSE(eq.terms[0].right);
  CHECK(eq.terms[0].core == OrientedRef{0, false});
  CHECK(eq.epsilon == 0.5);
  CHECK(eq.epsilon * eq.ones_max <= 1.0);
  CHECK(eq.is_contractive());

  const std::string text = format_system(top);
  CHECK(text.find("fold(r1) . R(r2) . fold(I)") != std::string::npos);
  CHECK(text.find("eps=0.5") != std::string::npos);
}

TEST_CASE("same generation compiles to R2 = eps (I + R1 R2 R1^T)") {
  const auto systems = compile_all(std::string(sgen_source()), parse_facts(kFamilyFacts, FactFormat::atoms), true);
  const EquationSystem& top = systems.back();
  CHECK(top.cls == LayerClass::two_sided);
  const Equation& eq = top.equations.at(0);
  const std::size_t n = top.n;
  CHECK(eq.constant == RealMatrix::identity(n));
  REQUIRE(eq.terms.size() == 1);
  const BitMatrix r1 = parse_facts(kFamilyFacts, FactFormat::atoms).matrix("r1");
  CHECK(*eq.terms[0].left == r1.to_real());
  CHECK(*eq.terms[0].right == r1.transposed().to_real());
  CHECK(eq.epsilon * eq.ones_max <= 1.0);

  // eps = 1/(1 + d^2) for a d-regular r1.
  for (std::size_t d : {1, 2, 3}) {
    BitMatrix reg(8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t k = 1; k <= d; ++k) reg.set(i, (i + k) % 8);
    const auto s = compile_all(std::string(sgen_source()), facts_from_matrix(reg, "r1"), true);
    CHECK(s.back().equations[0].epsilon == doctest::Approx(1.0 / (1.0 + d * d)));
  }
}

TEST_CASE("a transposed recursive reference is kept transposed") {
  const auto systems = compile_all(kTransposedSource, cycle_facts());
  const EquationSystem& top = systems.back();
  CHECK(top.cls == LayerClass::transposed);
  const Equation& eq = top.equations[0];
  REQUIRE(eq.terms.size() == 1);
  CHECK(eq.terms[0].core.transposed);
  CHECK(*eq.terms[0].left == cycle_r1().to_real());
  CHECK_FALSE(eq.terms[0].right);
}

TEST_CASE("epsilon admissibility") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const char* src : {trcl_source().data(), sgen_source().data(), kTransposedSource, kMutualSource}) {
      const EquationSystem top = random_top_layer(src, 10, 0.3, seed, true);
      for (const auto& eq : top.equations) {
        CHECK(eq.epsilon > 0.0);
        CHECK(eq.epsilon <= 1.0);
        CHECK(eq.epsilon * max_entry(evaluate_on_ones(eq, top.n)) <= 1.0 + 1e-15);
        CHECK(eq.is_contractive());
      }
    }
  }

  const auto empty = compile_all(std::string(trcl_source()), facts_from_matrix(BitMatrix(4), "r1"));
  CHECK(empty.back().equations[0].epsilon == 1.0);
  CHECK(empty.back().equations[0].ones_max == 0.0);
}

TEST_CASE("set_epsilon rejects inadmissible values") {
  auto systems = compile_all(std::string(trcl_source()), cycle_facts());
  Equation eq = systems[1].equations[0];
  CHECK_NOTHROW(set_epsilon(eq, 0.25));
  CHECK(eq.epsilon == 0.25);
  CHECK_THROWS_AS(set_epsilon(eq, 0.9), EpsilonError);
  CHECK_THROWS_AS(set_epsilon(eq, 0.0), EpsilonError);
  try {
    set_epsilon(eq, 0.9);
  } catch (const EpsilonError& e) {
    CHECK(std::string(e.what()).find("bound 0.5") != std::string::npos);
  }
  SolveOptions options;
  options.epsilon = 0.9;
  CHECK_THROWS_AS(compile_all(std::string(trcl_source()), cycle_facts(), false, options), EpsilonError);
}

TEST_CASE("compiled equations do not depend on clause or body order") {
  const std::vector<std::string> clauses{
      "r2(X,Y) :- r1(X,Y).", "r2(X,Z) :- r1(X,Y), r2(Y,Z).", "r2(X,Z) :- r2(X,Y), r1(Y,Z).",
      "r2(X,W) :- s(X,Y), r1(Y,Z), s(Z,W)."};
  const BitMatrix r1 = random_bits(7, 0.3, 5), s = random_bits(7, 0.3, 6);
  FactSet::NamedPairs named;
  const auto names = padded_names(7);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) {
      if (r1.get(i, j)) named["r1"].insert({names[i], names[j]});
      if (s.get(i, j)) named["s"].insert({names[i], names[j]});
    }
  const FactSet facts = FactSet::from_named(named, names);

  auto compile = [&](std::vector<std::string> order) {
    std::string src;
    for (const auto& c : order) src += c + "\n";
    return compile_all(src, facts).back().equations[0];
  };
  const Equation base = compile(clauses);
  std::mt19937_64 rng(1);
  auto shuffled = clauses;
  for (int k = 0; k < 8; ++k) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const Equation eq = compile(shuffled);
    CHECK(eq.constant == base.constant);
    CHECK(eq.epsilon == base.epsilon);
    CHECK(eq.terms.size() == base.terms.size());
    // The linear map agrees on a random argument.
    const RealMatrix x = random_bits(7, 0.5, 40 + k).to_real();
    auto apply = [&](const Equation& e) {
      RealMatrix acc(7);
      for (const auto& t : e.terms) {
        RealMatrix m = x;
        if (t.left) m = matmul(*t.left, m);
        if (t.right) m = matmul(m, *t.right);
        acc += m;
      }
      return acc;
    };
    CHECK(apply(eq) == apply(base));
  }
  // Reversing the body atoms of a chain rule leaves the fold unchanged.
  const Equation reversed = compile({"r2(X,Y) :- r1(X,Y).", "r2(X,W) :- s(Z,W), r1(Y,Z), s(X,Y)."});
  const Equation forward = compile({"r2(X,Y) :- r1(X,Y).", "r2(X,W) :- s(X,Y), r1(Y,Z), s(Z,W)."});
  CHECK(reversed.constant == forward.constant);
}

TEST_CASE("one step of the compiled system agrees with the clause semantics") {
  const std::vector<std::string> sources{
      std::string(trcl_source()), std::string(sgen_source()), kTransposedSource, kMutualSource,
      "r2(X,Y) :- r1(X,Y).\nr2(Z,X) :- r2(Y,X), r1(Z,Y).\n",
      "r2(X,Y) :- r1(Y,X).\nr2(X,W) :- r1(Y,X), r2(Z,Y), r1(Z,A), r1(A,B), r1(C,B), r1(C,D), r1(D,W).\n",
      "r2(X,Y) :- r1(X,Y).\nr2(Y,X) :- r1(X,Z), r1(Z,Y).\nr2(W,X) :- r1(X,Y), r2(Y,Z), r1(Z,W).\n"};
  for (std::size_t si = 0; si < sources.size(); ++si) {
    for (std::size_t n : {1, 3, 5, 6}) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        if (si == 5 && n > 3) continue;  // enumeration over many chain variables
        const Program program = parse_program(sources[si]);
        const FactSet facts = facts_from_matrix(random_bits(n, 0.4, seed + 10 * n), "r1");
        std::vector<EquationSystem> systems;
        evaluate_program(program, facts, {}, true, &systems);
        const EquationSystem& top = systems.back();

        RelationMap rel;
        rel[pid(program, "r1")] = facts.matrix("r1");
        if (auto d = program.predicates.find("diag")) rel[*d] = BitMatrix::identity(n);
        std::vector<RealMatrix> guess;
        for (std::size_t k = 0; k < top.equations.size(); ++k) {
          const BitMatrix g = random_bits(n, 0.5, 100 + seed + k);
          rel[*top.equations[k].predicate] = g;
          guess.push_back(g.to_real());
        }
        const auto next = scaled_step(top, guess);
        for (std::size_t k = 0; k < top.equations.size(); ++k) {
          const PredicateId head = *top.equations[k].predicate;
          for (ConstantId i = 0; i < n; ++i)
            for (ConstantId j = 0; j < n; ++j) {
              int expect = 0;
              for (const auto& c : program.clauses) {
                if (c.is_fact() || c.head.predicate != head) continue;
                const std::map<std::string, ConstantId> binding{{variable_name(c.head.arg1), i},
                                                                {variable_name(c.head.arg2), j}};
                expect = std::max(expect, denote_formula(c.body, rel, binding, n));
              }
              CHECK_MESSAGE((next[k](i, j) > 0.0) == (expect == 1), sources[si] << " n=" << n << " (" << i << "," << j << ")");
              CHECK(next[k](i, j) <= 1.0 + 1e-15);
            }
        }
      }
    }
  }
}
