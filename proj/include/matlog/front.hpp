#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "matlog/matrix.hpp"

namespace matlog {

/// Syntax or well-formedness error with a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

using ConstantId = std::size_t;
using PredicateId = std::size_t;

/// Upper bound on the constant domain accepted by the fact loaders.
inline constexpr std::size_t kMaxConstants = 50000;

/// Dense, lexicographically ordered constant symbols.
class ConstantTable {
 public:
  ConstantTable() = default;
  /// Sorts and deduplicates `names`.
  explicit ConstantTable(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(ConstantId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<ConstantId> find(std::string_view name) const;
  ConstantId at(std::string_view name) const;

  /// Union of both tables; indices are reassigned lexicographically.
  ConstantTable merged(const ConstantTable& other) const;
  /// For each local index, its index in `target` (which must contain every name here).
  std::vector<ConstantId> remap_into(const ConstantTable& target) const;

  friend bool operator==(const ConstantTable& a, const ConstantTable& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ConstantId> index_;
};

enum class PredicateKind { extensional, intensional };

struct PredicateInfo {
  std::string name;
  int arity = 2;
  PredicateKind kind = PredicateKind::extensional;
};

/// Predicates ordered by name; ids are positions.
class PredicateTable {
 public:
  PredicateTable() = default;
  explicit PredicateTable(std::vector<PredicateInfo> predicates);

  std::size_t size() const noexcept { return predicates_.size(); }
  const PredicateInfo& operator[](PredicateId id) const { return predicates_.at(id); }
  const std::string& name(PredicateId id) const { return predicates_.at(id).name; }
  std::optional<PredicateId> find(std::string_view name) const;
  const std::vector<PredicateInfo>& all() const noexcept { return predicates_; }

 private:
  std::vector<PredicateInfo> predicates_;
};

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Constant {
  ConstantId id;
  friend bool operator==(const Constant&, const Constant&) = default;
};

using Term = std::variant<Variable, Constant>;

inline bool is_variable(const Term& t) { return std::holds_alternative<Variable>(t); }
inline const std::string& variable_name(const Term& t) { return std::get<Variable>(t).name; }

struct Atom {
  PredicateId predicate = 0;
  Term arg1;
  Term arg2;

  bool is_ground() const { return !is_variable(arg1) && !is_variable(arg2); }
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Clause {
  Atom head;
  std::vector<Atom> body;
  std::size_t line = 0;

  bool is_fact() const { return body.empty(); }
};

struct Program {
  std::vector<Clause> clauses;
  ConstantTable constants;
  PredicateTable predicates;

  std::vector<std::size_t> rule_indices() const;
};

enum class FactFormat { atoms, tsv, konect };

FactFormat parse_fact_format(std::string_view name);
std::string_view to_string(FactFormat format);

/// Ground binary facts keyed by predicate name, indexed against `constants()`.
class FactSet {
 public:
  using Pair = std::pair<ConstantId, ConstantId>;
  using NamedPairs = std::map<std::string, std::set<std::pair<std::string, std::string>>>;

  FactSet() = default;
  /// `extra_constants` are added to the domain even when no fact mentions them.
  static FactSet from_named(const NamedPairs& facts, const std::vector<std::string>& extra_constants = {});

  const ConstantTable& constants() const noexcept { return constants_; }
  const std::map<std::string, std::set<Pair>>& relations() const noexcept { return pairs_; }
  /// Pairs of one predicate (empty when absent).
  const std::set<Pair>& pairs(const std::string& predicate) const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Facts of both sets over the union domain.
  FactSet merged(const FactSet& other) const;
  /// Same facts over a larger domain.
  FactSet reindexed(const ConstantTable& target) const;
  /// Adjacency matrix of one predicate over this set's domain.
  BitMatrix matrix(const std::string& predicate) const;
  NamedPairs named() const;

  friend bool operator==(const FactSet& a, const FactSet& b) {
    return a.constants_ == b.constants_ && a.pairs_ == b.pairs_;
  }

 private:
  ConstantTable constants_;
  std::map<std::string, std::set<Pair>> pairs_;
};

/// Parses Datalog source. Facts stay in the clause list as ground unit clauses.
Program parse_program(std::string_view text);

/// Parses fact text. `predicate` names the relation for tsv/konect input.
FactSet parse_facts(std::string_view text, FactFormat format, std::string_view predicate = "r1");

/// Ground unit clauses of a program as a FactSet over the program's constants.
FactSet program_facts(const Program& program);

/// One atom per line, sorted by (predicate, arg1, arg2).
std::string render_model(const std::map<std::string, BitMatrix>& relations, const ConstantTable& constants);
std::string render_facts(const FactSet& facts);

/// Identifier as it must appear in source (quoted when not a plain constant).
std::string quote_constant(std::string_view name);

std::string format_term(const Term& t, const ConstantTable& constants);
std::string format_atom(const Atom& a, const Program& program);
std::string format_clause(const Clause& c, const Program& program);

}  // namespace matlog
