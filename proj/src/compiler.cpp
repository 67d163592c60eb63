#include "matlog/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace matlog {

bool Equation::epsilon_admissible(double eps) const {
  // A relative slack of a few ulps so that eps = 1/ones_max itself is accepted.
  return eps > 0.0 && eps * ones_max <= 1.0 + 4 * std::numeric_limits<double>::epsilon();
}

std::optional<std::size_t> EquationSystem::find(const std::string& head) const {
  for (std::size_t i = 0; i < equations.size(); ++i) {
    if (equations[i].head == head) return i;
  }
  return std::nullopt;
}

namespace {

RealVector row_sums(const std::optional<RealMatrix>& m, std::size_t n) {
  if (!m) return RealVector::Ones(static_cast<Eigen::Index>(n));
  return m->storage().rowwise().sum();
}

RealVector col_sums(const std::optional<RealMatrix>& m, std::size_t n) {
  if (!m) return RealVector::Ones(static_cast<Eigen::Index>(n));
  return m->storage().colwise().sum().transpose();
}

DenseStorage ones_image(const Equation& eq, std::size_t n) {
  const auto N = static_cast<Eigen::Index>(n);
  const auto T = static_cast<Eigen::Index>(eq.terms.size());
  // F[1] = A + sum_t (B_t 1)(1^T C_t): each term is the outer product of B_t's row sums
  // with C_t's column sums.
  DenseStorage rows(N, T), cols(N, T);
  for (Eigen::Index t = 0; t < T; ++t) {
    rows.col(t) = row_sums(eq.terms[t].left, n);
    cols.col(t) = col_sums(eq.terms[t].right, n);
  }
  DenseStorage f = eq.constant.storage();
  if (T > 0) f.noalias() += rows * cols.transpose();
  return f;
}

}  // namespace

RealMatrix evaluate_on_ones(const Equation& equation, std::size_t n) {
  return RealMatrix(ones_image(equation, n));
}

EpsilonChoice compute_epsilon(const Equation& equation) {
  const std::size_t n = equation.constant.size();
  EpsilonChoice out;
  out.ones_max = n == 0 ? 0.0 : ones_image(equation, n).maxCoeff();
  for (const auto& t : equation.terms) {
    const double l = t.left ? inf_norm(*t.left) : 1.0;
    const double r = t.right ? one_norm(*t.right) : 1.0;
    out.contraction += l * r;
  }
  out.epsilon = 1.0 / std::max({1.0, out.ones_max, out.contraction + 1.0});
  return out;
}

void set_epsilon(Equation& equation, double epsilon) {
  if (!equation.epsilon_admissible(epsilon)) {
    std::ostringstream os;
    os << "epsilon " << epsilon << " for " << equation.head << " violates eps * F[1] <= 1 (bound "
       << (equation.ones_max > 0 ? 1.0 / equation.ones_max : 1.0) << ")";
    throw EpsilonError(os.str());
  }
  equation.epsilon = epsilon;
}

// ---------------------------------------------------------------- folding

namespace {

struct FactorKey {
  PredicateId predicate;
  bool transposed;
  auto operator<=>(const FactorKey&) const = default;
};

const BitMatrix& lookup(const RelationMap& relations, PredicateId p) {
  auto it = relations.find(p);
  if (it == relations.end()) {
    throw CompileError("unresolved predicate id " + std::to_string(p) + " in chain fold");
  }
  return it->second;
}

BitMatrix fold_bits(const std::vector<FactorKey>& factors, const RelationMap& relations, std::size_t n) {
  if (factors.empty()) return BitMatrix::identity(n);
  auto oriented = [&](const FactorKey& f) {
    const BitMatrix& m = lookup(relations, f.predicate);
    return f.transposed ? m.transposed() : m;
  };
  BitMatrix acc = oriented(factors.front());
  for (std::size_t k = 1; k < factors.size(); ++k) acc = bool_product(acc, oriented(factors[k]));
  return acc;
}

class FoldCache {
 public:
  FoldCache(const RelationMap& relations, std::size_t n) : relations_(relations), n_(n) {}

  const RealMatrix& get(const std::vector<FactorKey>& key) {
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, fold_bits(key, relations_, n_).to_real()).first;
    return it->second;
  }

 private:
  const RelationMap& relations_;
  std::size_t n_;
  std::map<std::vector<FactorKey>, RealMatrix> cache_;
};

std::string describe(const std::vector<FactorKey>& factors, const Program& program) {
  if (factors.empty()) return "I";
  std::string out;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (k) out += "*";
    out += program.predicates.name(factors[k].predicate);
    if (factors[k].transposed) out += "^T";
  }
  return out;
}

std::vector<FactorKey> keys(const std::vector<ClauseForm::Factor>& fs, const Clause& c) {
  std::vector<FactorKey> out;
  for (const auto& f : fs) out.push_back({c.body[f.atom].predicate, f.transposed});
  return out;
}

}  // namespace

RealMatrix fold_chain(std::span<const Atom> atoms, const RelationMap& relations, std::size_t n) {
  std::vector<FactorKey> factors;
  if (!atoms.empty()) {
    auto var = [](const Term& t) -> const std::string& {
      if (!is_variable(t)) throw CompileError("fold_chain: chain atoms must have variable arguments");
      return variable_name(t);
    };
    std::string cur = var(atoms[0].arg1);
    if (atoms.size() > 1) {
      const auto& a = var(atoms[0].arg1);
      const auto& b = var(atoms[0].arg2);
      const auto& c = var(atoms[1].arg1);
      const auto& d = var(atoms[1].arg2);
      const bool a_shared = a == c || a == d;
      const bool b_shared = b == c || b == d;
      if (a_shared == b_shared) throw CompileError("fold_chain: atoms do not form a chain");
      cur = a_shared ? b : a;
    }
    for (const auto& atom : atoms) {
      const auto& a = var(atom.arg1);
      const auto& b = var(atom.arg2);
      if (a == cur) {
        factors.push_back({atom.predicate, false});
        cur = b;
      } else if (b == cur) {
        factors.push_back({atom.predicate, true});
        cur = a;
      } else {
        throw CompileError("fold_chain: atoms do not form a chain");
      }
    }
  }
  return fold_bits(factors, relations, n).to_real();
}

// -------------------------------------------------------------- compilation

EquationSystem compile_layer(const Program& program, const LayeredProgram& layered, std::size_t layer_index,
                             const RelationMap& lower, const FactSet& facts) {
  const Layer& layer = layered.layers.at(layer_index);
  const std::size_t n = facts.constants().size();

  EquationSystem system;
  system.layer = layer_index;
  system.n = n;
  system.cls = layer.cls;

  std::vector<bool> recursive(program.predicates.size(), false);
  if (layer.cls != LayerClass::nonrecursive) {
    for (PredicateId p : layer.scc) recursive[p] = true;
  }
  auto unknown_of = [&](PredicateId p) {
    return static_cast<std::size_t>(std::find(layer.scc.begin(), layer.scc.end(), p) - layer.scc.begin());
  };

  FoldCache cache(lower, n);
  for (PredicateId head : layer.scc) {
    Equation eq;
    eq.head = program.predicates.name(head);
    eq.predicate = head;
    eq.constant = facts.matrix(eq.head).to_real();
    if (const auto k = facts.pairs(eq.head).size(); k > 0) {
      eq.constant_sources.push_back("facts(" + std::to_string(k) + ")");
    }

    for (std::size_t ci : layer.clauses) {
      const Clause& c = program.clauses[ci];
      if (c.is_fact() || c.head.predicate != head) continue;
      const ClauseForm form = clause_form(c, recursive);
      const auto left = keys(form.left, c);
      if (!form.core) {
        eq.constant += cache.get(left);
        eq.constant_sources.push_back(describe(left, program));
        continue;
      }
      const auto right = keys(form.right, c);
      EquationTerm term;
      if (!left.empty()) term.left = cache.get(left);
      if (!right.empty()) term.right = cache.get(right);
      term.core = {unknown_of(c.body[form.core->atom].predicate), form.core->transposed};
      term.left_text = describe(left, program);
      term.right_text = describe(right, program);
      eq.terms.push_back(std::move(term));
    }

    const auto choice = compute_epsilon(eq);
    eq.ones_max = choice.ones_max;
    eq.contraction = choice.contraction;
    set_epsilon(eq, choice.epsilon);
    system.equations.push_back(std::move(eq));
  }
  return system;
}

// --------------------------------------------------------------- semantics

int denote_formula(std::span<const Atom> body, const RelationMap& relations,
                   const std::map<std::string, ConstantId>& binding, std::size_t n) {
  std::vector<std::string> free;
  for (const auto& a : body) {
    for (const Term* t : {&a.arg1, &a.arg2}) {
      if (!is_variable(*t)) continue;
      const auto& v = variable_name(*t);
      if (!binding.contains(v) && std::find(free.begin(), free.end(), v) == free.end()) free.push_back(v);
    }
  }

  std::map<std::string, ConstantId> env = binding;
  auto value_of = [&](const Term& t) {
    return is_variable(t) ? env.at(variable_name(t)) : std::get<Constant>(t).id;
  };

  // [[exists v. F]] = min1(sum_k [[F[v := e_k]]]), [[F1 and F2]] = [[F1]] * [[F2]].
  auto eval = [&](auto&& self, std::size_t depth) -> double {
    if (depth == free.size()) {
      double product = 1.0;
      for (const auto& a : body) product *= lookup(relations, a.predicate).get(value_of(a.arg1), value_of(a.arg2)) ? 1.0 : 0.0;
      return product;
    }
    double sum = 0.0;
    for (ConstantId k = 0; k < n; ++k) {
      env[free[depth]] = k;
      sum += self(self, depth + 1);
    }
    return std::min(sum, 1.0);
  };
  return static_cast<int>(eval(eval, 0));
}

std::string format_system(const EquationSystem& system) {
  std::ostringstream os;
  os << "layer " << (system.layer + 1) << " (" << to_string(system.cls) << "), " << system.equations.size()
     << " equation(s)\n";
  auto name_of = [&](const OrientedRef& r) {
    std::string s = "R(" + system.equations.at(r.unknown).head + ")";
    if (r.transposed) s += "^T";
    return s;
  };
  for (const auto& eq : system.equations) {
    os << "  " << eq.head << (eq.synthetic ? " [synthetic]" : "") << ": eps=" << eq.epsilon
       << " max F[1]=" << eq.ones_max << " contraction=" << eq.contraction << "\n";
    os << "    constant: ";
    if (eq.constant_sources.empty()) os << "0";
    for (std::size_t k = 0; k < eq.constant_sources.size(); ++k) {
      os << (k ? " + " : "") << "fold(" << eq.constant_sources[k] << ")";
    }
    os << "\n";
    for (const auto& t : eq.terms) {
      os << "    term: fold(" << t.left_text << ") . " << name_of(t.core) << " . fold(" << t.right_text << ")\n";
    }
  }
  return os.str();
}

}  // namespace matlog
