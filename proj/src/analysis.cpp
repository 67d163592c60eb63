#include "matlog/analysis.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

namespace matlog {

std::string_view to_string(LayerClass c) {
  switch (c) {
    case LayerClass::nonrecursive: return "nonrecursive";
    case LayerClass::tail_recursive: return "tail_recursive";
    case LayerClass::transposed: return "transposed";
    case LayerClass::two_sided: return "two_sided";
  }
  return "?";
}

bool DependencyGraph::has_edge(PredicateId from, PredicateId to) const {
  const auto& s = successors.at(from);
  return std::binary_search(s.begin(), s.end(), to);
}

std::size_t DependencyGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& s : successors) n += s.size();
  return n;
}

std::size_t LayeredProgram::layer_of(PredicateId p) const {
  const std::size_t comp = sccs.component_of.at(p);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (std::find(layers[i].scc.begin(), layers[i].scc.end(), p) != layers[i].scc.end()) return i;
  }
  throw std::out_of_range("predicate not layered (component " + std::to_string(comp) + ")");
}

DependencyGraph build_dependency_graph(const Program& program) {
  DependencyGraph g;
  g.node_count = program.predicates.size();
  g.successors.resize(g.node_count);
  for (const auto& c : program.clauses) {
    for (const auto& b : c.body) g.successors[c.head.predicate].push_back(b.predicate);
  }
  for (auto& s : g.successors) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return g;
}

SccPartition tarjan_scc(const DependencyGraph& graph) {
  const std::size_t n = graph.node_count;
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> number(n, kUnvisited);
  std::vector<std::size_t> lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<PredicateId> stack;
  std::size_t counter = 0;

  SccPartition out;
  out.component_of.assign(n, 0);

  std::function<void(PredicateId)> visit = [&](PredicateId v) {
    number[v] = lowlink[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (PredicateId w : graph.successors[v]) {
      if (number[w] == kUnvisited) {
        visit(w);
        lowlink[v] = std::min(lowlink[v], lowlink[w]);
      } else if (on_stack[w]) {
        lowlink[v] = std::min(lowlink[v], number[w]);
      }
    }
    if (lowlink[v] == number[v]) {
      std::vector<PredicateId> comp;
      PredicateId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      for (PredicateId p : comp) out.component_of[p] = out.components.size();
      out.components.push_back(std::move(comp));
    }
  };

  for (PredicateId v = 0; v < n; ++v) {
    if (number[v] == kUnvisited) visit(v);
  }
  return out;
}

// ------------------------------------------------------------------ chains

std::optional<ChainShape> chain_shape(const Clause& clause) {
  if (clause.body.empty()) return std::nullopt;
  const Atom& head = clause.head;
  if (!is_variable(head.arg1) || !is_variable(head.arg2)) return std::nullopt;
  const std::string& h1 = variable_name(head.arg1);
  const std::string& h2 = variable_name(head.arg2);
  if (h1 == h2) return std::nullopt;

  auto walk = [&](const std::string& start, const std::string& end) -> std::optional<std::vector<bool>> {
    std::set<std::string> seen{start};
    std::string cur = start;
    std::vector<bool> reversed;
    for (const auto& atom : clause.body) {
      if (!is_variable(atom.arg1) || !is_variable(atom.arg2)) return std::nullopt;
      const std::string& a = variable_name(atom.arg1);
      const std::string& b = variable_name(atom.arg2);
      std::string next;
      if (a == cur) {
        next = b;
        reversed.push_back(false);
      } else if (b == cur) {
        next = a;
        reversed.push_back(true);
      } else {
        return std::nullopt;
      }
      if (!seen.insert(next).second) return std::nullopt;
      cur = next;
    }
    if (cur != end) return std::nullopt;
    return reversed;
  };

  if (auto fwd = walk(h1, h2)) return ChainShape{false, std::move(*fwd)};
  if (auto rev = walk(h2, h1)) return ChainShape{true, std::move(*rev)};
  return std::nullopt;
}

ClauseForm clause_form(const Clause& clause, const std::vector<bool>& recursive) {
  const auto shape = chain_shape(clause);
  if (!shape) throw std::invalid_argument("clause_form: rule body is not a chain");

  std::vector<ClauseForm::Factor> factors;
  std::optional<std::size_t> core;
  for (std::size_t k = 0; k < clause.body.size(); ++k) {
    factors.push_back({k, shape->atom_reversed[k]});
    if (!core && recursive.at(clause.body[k].predicate)) core = k;
  }

  ClauseForm form;
  if (!core) {
    form.left = factors;
  } else {
    form.left.assign(factors.begin(), factors.begin() + static_cast<std::ptrdiff_t>(*core));
    form.core = factors[*core];
    form.right.assign(factors.begin() + static_cast<std::ptrdiff_t>(*core) + 1, factors.end());
  }
  if (shape->head_reversed) {
    // r(xn,x0) holds iff the chain relation holds transposed: (L X R)^T = R^T X^T L^T.
    auto flip = [](std::vector<ClauseForm::Factor> fs) {
      std::reverse(fs.begin(), fs.end());
      for (auto& f : fs) f.transposed = !f.transposed;
      return fs;
    };
    if (!form.core) {
      form.left = flip(std::move(form.left));
    } else {
      auto new_left = flip(form.right);
      auto new_right = flip(form.left);
      form.left = std::move(new_left);
      form.right = std::move(new_right);
      form.core->transposed = !form.core->transposed;
    }
  }
  return form;
}

// -------------------------------------------------------------- validation

ValidationReport validate_clin(const Program& program) {
  ValidationReport report;
  const auto sccs = tarjan_scc(build_dependency_graph(program));

  for (PredicateId p = 0; p < program.predicates.size(); ++p) {
    if (program.predicates[p].arity != 2) {
      report.violations.push_back({static_cast<std::size_t>(-1), "predicate " + program.predicates.name(p) +
                                                                     " is not binary"});
    }
  }

  for (std::size_t i = 0; i < program.clauses.size(); ++i) {
    const Clause& c = program.clauses[i];
    if (c.is_fact()) continue;

    bool has_constant = !is_variable(c.head.arg1) || !is_variable(c.head.arg2);
    for (const auto& b : c.body) has_constant = has_constant || !is_variable(b.arg1) || !is_variable(b.arg2);
    if (has_constant) {
      report.violations.push_back({i, "constant in non-unit clause"});
    } else if (!chain_shape(c)) {
      report.violations.push_back(
          {i, "rule body is not a chain r1({x0,x1}),...,rn({xn-1,xn}) of distinct variables ending in the head "
              "arguments"});
    }

    const std::size_t head_comp = sccs.component_of[c.head.predicate];
    std::size_t same = 0;
    for (const auto& b : c.body) same += sccs.component_of[b.predicate] == head_comp ? 1 : 0;
    if (same > 1) {
      report.violations.push_back({i, "non-linear: " + std::to_string(same) +
                                          " body atoms from the head's SCC (at most one allowed)"});
    }
  }
  report.ok = report.violations.empty();
  return report;
}

// ------------------------------------------------------------------ layers

namespace {

std::vector<bool> recursive_mask(const Program& program, const std::vector<PredicateId>& scc) {
  std::vector<bool> mask(program.predicates.size(), false);
  for (PredicateId p : scc) mask[p] = true;
  return mask;
}

bool scc_is_recursive(const Program& program, const std::vector<PredicateId>& scc) {
  if (scc.size() > 1) return true;
  for (const auto& c : program.clauses) {
    if (c.head.predicate != scc.front()) continue;
    for (const auto& b : c.body) {
      if (b.predicate == scc.front()) return true;
    }
  }
  return false;
}

LayerClass clause_class(const ClauseForm& form) {
  if (!form.core) return LayerClass::nonrecursive;
  if (form.right.empty()) return form.core->transposed ? LayerClass::transposed : LayerClass::tail_recursive;
  return LayerClass::two_sided;
}

}  // namespace

LayerClass classify_layer(const Program& program, const Layer& layer) {
  if (!scc_is_recursive(program, layer.scc)) return LayerClass::nonrecursive;
  const auto mask = recursive_mask(program, layer.scc);
  LayerClass cls = LayerClass::nonrecursive;
  for (std::size_t ci : layer.clauses) {
    const Clause& c = program.clauses[ci];
    if (c.is_fact()) continue;
    cls = std::max(cls, clause_class(clause_form(c, mask)));
  }
  return cls;
}

LayeredProgram layer_program(const Program& program, const SccPartition& sccs) {
  const auto graph = build_dependency_graph(program);
  const std::size_t ncomp = sccs.components.size();

  std::vector<std::set<std::size_t>> deps(ncomp);
  std::vector<std::vector<std::size_t>> dependents(ncomp);
  for (PredicateId p = 0; p < graph.node_count; ++p) {
    for (PredicateId q : graph.successors[p]) {
      const auto a = sccs.component_of[p];
      const auto b = sccs.component_of[q];
      if (a != b && deps[a].insert(b).second) dependents[b].push_back(a);
    }
  }

  // Kahn's algorithm; among ready components pick the one with the smallest predicate name.
  using Entry = std::pair<PredicateId, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  std::vector<std::size_t> remaining(ncomp);
  for (std::size_t k = 0; k < ncomp; ++k) {
    remaining[k] = deps[k].size();
    if (remaining[k] == 0) ready.emplace(sccs.components[k].front(), k);
  }

  LayeredProgram out;
  out.sccs = sccs;
  while (!ready.empty()) {
    const auto [_, k] = ready.top();
    ready.pop();
    Layer layer;
    layer.scc = sccs.components[k];
    for (std::size_t ci = 0; ci < program.clauses.size(); ++ci) {
      if (sccs.component_of[program.clauses[ci].head.predicate] == k) layer.clauses.push_back(ci);
    }
    layer.cls = classify_layer(program, layer);

    if (layer.cls != LayerClass::nonrecursive) {
      for (std::size_t ci : layer.clauses) {
        const Clause& c = program.clauses[ci];
        if (c.body.size() == 1 && sccs.component_of[c.body.front().predicate] == k) {
          layer.notes.push_back("clause at line " + std::to_string(c.line) +
                                " is a single recursive atom; solved with an identity context");
        }
      }
    }
    out.layers.push_back(std::move(layer));
    for (std::size_t d : dependents[k]) {
      if (--remaining[d] == 0) ready.emplace(sccs.components[d].front(), d);
    }
  }
  return out;
}

LayeredProgram analyze(const Program& program) {
  return layer_program(program, tarjan_scc(build_dependency_graph(program)));
}

std::string format_validation(const Program& program, const ValidationReport& report) {
  std::ostringstream os;
  if (report.ok) {
    os << "ok: program is a linear binary chain program\n";
    return os.str();
  }
  os << report.violations.size() << " violation(s):\n";
  for (const auto& v : report.violations) {
    if (v.clause < program.clauses.size()) {
      const auto& c = program.clauses[v.clause];
      os << "  line " << c.line << ": " << format_clause(c, program) << "\n    " << v.reason << "\n";
    } else {
      os << "  " << v.reason << "\n";
    }
  }
  return os.str();
}

std::string format_layers(const Program& program, const LayeredProgram& layered) {
  std::ostringstream os;
  os << layered.layers.size() << " layers\n";
  for (std::size_t i = 0; i < layered.layers.size(); ++i) {
    const auto& layer = layered.layers[i];
    os << "layer " << (i + 1) << ": {";
    for (std::size_t k = 0; k < layer.scc.size(); ++k) {
      os << (k ? "," : "") << program.predicates.name(layer.scc[k]);
    }
    os << "} class=" << to_string(layer.cls) << " clauses=" << layer.clauses.size() << "\n";
    for (const auto& note : layer.notes) os << "  note: " << note << "\n";
  }
  return os.str();
}

}  // namespace matlog
