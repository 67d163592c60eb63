#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "matlog/analysis.hpp"
#include "matlog/front.hpp"
#include "matlog/matrix.hpp"

namespace matlog {

using RelationMap = std::map<PredicateId, BitMatrix>;

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference to an unknown of the same system, possibly transposed.
struct OrientedRef {
  std::size_t unknown = 0;
  bool transposed = false;
  friend bool operator==(const OrientedRef&, const OrientedRef&) = default;
};

/// left * core * right. An empty left/right context stands for the identity.
struct EquationTerm {
  std::optional<RealMatrix> left;
  OrientedRef core;
  std::optional<RealMatrix> right;
  std::string left_text;
  std::string right_text;
};

/// R_h = eps * (constant + sum_t left_t R_t right_t), solved for its least solution.
struct Equation {
  std::string head;
  std::optional<PredicateId> predicate;  // empty for synthetic unknowns
  bool synthetic = false;
  RealMatrix constant;
  std::vector<std::string> constant_sources;
  std::vector<EquationTerm> terms;
  double epsilon = 1.0;
  /// max_ij F[1,...,1]_ij
  double ones_max = 0.0;
  /// sum_t ||left_t||_inf * ||right_t||_1; eps * this < 1 makes the linear part a contraction.
  double contraction = 0.0;

  bool epsilon_admissible(double eps) const;
  bool is_contractive() const { return epsilon * contraction < 1.0; }
};

struct EquationSystem {
  std::size_t layer = 0;
  std::size_t n = 0;
  LayerClass cls = LayerClass::nonrecursive;
  std::vector<Equation> equations;

  std::optional<std::size_t> find(const std::string& head) const;
};

struct EpsilonChoice {
  double epsilon = 1.0;
  double ones_max = 0.0;
  double contraction = 0.0;
};

class EpsilonError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest eps with eps * F[1] <= 1 that also keeps the linear part strictly contractive:
/// eps = 1 / max(1, max F[1], contraction + 1).
EpsilonChoice compute_epsilon(const Equation& equation);

/// Sets eps after checking eps * F[1] <= 1; throws EpsilonError otherwise.
void set_epsilon(Equation& equation, double epsilon);

/// Product S1° S2° ... of a variable chain clipped by min1; identity for an empty chain.
/// The walk starts at the first atom's argument not shared with the second atom
/// (arg1 for a single atom); an atom traversed against its argument order is transposed.
RealMatrix fold_chain(std::span<const Atom> atoms, const RelationMap& relations, std::size_t n);

/// Builds the equation system of one layer. `lower` must hold every predicate of lower
/// layers; `facts` supplies ground unit clauses of the layer's own predicates.
EquationSystem compile_layer(const Program& program, const LayeredProgram& layered, std::size_t layer_index,
                             const RelationMap& lower, const FactSet& facts);

/// Truth value of the existential closure of `body` under `binding`, by enumeration over
/// the unbound variables with product for conjunction and min1(sum) for the quantifier.
int denote_formula(std::span<const Atom> body, const RelationMap& relations,
                   const std::map<std::string, ConstantId>& binding, std::size_t n);

/// F_h[1,...,1] materialized (test/diagnostic helper).
RealMatrix evaluate_on_ones(const Equation& equation, std::size_t n);

std::string format_system(const EquationSystem& system);

}  // namespace matlog
