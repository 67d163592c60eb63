#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matlog/front.hpp"

namespace matlog {

/// Edge (r, r') iff some rule has r in its head and r' in its body.
struct DependencyGraph {
  std::size_t node_count = 0;
  std::vector<std::vector<PredicateId>> successors;  // sorted, deduplicated

  bool has_edge(PredicateId from, PredicateId to) const;
  std::size_t edge_count() const;
};

struct SccPartition {
  std::vector<std::vector<PredicateId>> components;  // each sorted
  std::vector<std::size_t> component_of;
};

/// Ordered so that a solver for a higher class also handles every lower one.
enum class LayerClass { nonrecursive = 0, tail_recursive = 1, transposed = 2, two_sided = 3 };

std::string_view to_string(LayerClass c);

struct Layer {
  std::vector<PredicateId> scc;
  std::vector<std::size_t> clauses;  // indices into Program::clauses whose head is in scc
  LayerClass cls = LayerClass::nonrecursive;
  std::vector<std::string> notes;
};

struct LayeredProgram {
  std::vector<Layer> layers;
  SccPartition sccs;

  /// Layer index holding predicate `p`.
  std::size_t layer_of(PredicateId p) const;
};

struct Violation {
  std::size_t clause;
  std::string reason;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

/// How a rule body chains x0 -> x1 -> ... -> xn.
struct ChainShape {
  /// Head is r(xn, x0) rather than r(x0, xn).
  bool head_reversed = false;
  /// Body atom k is s(xk, xk-1) rather than s(xk-1, xk).
  std::vector<bool> atom_reversed;
};

/// Chain shape of a rule, or nullopt when the body is not a variable chain with distinct
/// variables whose endpoints are the head arguments.
std::optional<ChainShape> chain_shape(const Clause& clause);

/// A rule viewed from its head: contribution = left-context * core * right-context, where
/// each context is a list of (body atom index, transposed) factors in multiplication order.
struct ClauseForm {
  struct Factor {
    std::size_t atom;
    bool transposed;
  };
  std::vector<Factor> left;
  std::optional<Factor> core;  // the body atom whose predicate is in the head's layer
  std::vector<Factor> right;
};

/// Head-oriented factorization of a validated rule relative to `recursive` predicates.
ClauseForm clause_form(const Clause& clause, const std::vector<bool>& recursive);

DependencyGraph build_dependency_graph(const Program& program);
SccPartition tarjan_scc(const DependencyGraph& graph);
LayeredProgram layer_program(const Program& program, const SccPartition& sccs);
ValidationReport validate_clin(const Program& program);
LayerClass classify_layer(const Program& program, const Layer& layer);

/// Convenience: graph + SCCs + layers in one call.
LayeredProgram analyze(const Program& program);

std::string format_validation(const Program& program, const ValidationReport& report);
/// One line per layer: index, SCC members, class, clause count.
std::string format_layers(const Program& program, const LayeredProgram& layered);

}  // namespace matlog
