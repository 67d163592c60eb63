#include "matlog/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace matlog {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::auto_select: return "auto";
    case Method::boolean: return "boolean";
    case Method::scaled: return "scaled";
    case Method::direct: return "direct";
    case Method::sylvester: return "sylvester";
    case Method::kron_oracle: return "kron_oracle";
    case Method::warshall: return "warshall";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "auto") return Method::auto_select;
  if (name == "kron" || name == "kron_oracle") return Method::kron_oracle;
  for (Method m : concrete_methods()) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

const std::vector<Method>& concrete_methods() {
  static const std::vector<Method> all{Method::boolean,   Method::scaled,      Method::direct,
                                       Method::sylvester, Method::kron_oracle, Method::warshall};
  return all;
}

std::size_t Model::count(const std::string& predicate) const {
  auto it = relations.find(predicate);
  return it == relations.end() ? 0 : it->second.count();
}

namespace {

using Eigen::Index;

double effective_tau(const SolveOptions& o, Method m) {
  const double tau = o.tau.value_or(m == Method::kron_oracle ? kDefaultOracleTau : 0.0);
  if (tau < 0) throw std::invalid_argument("tau must be >= 0");
  return tau;
}

void check_deadline(const SolveOptions& o, std::size_t iterations) {
  if (o.deadline && Clock::now() > *o.deadline) {
    throw TimeoutError("deadline exceeded after " + std::to_string(iterations) + " iterations");
  }
}

// acc += left * X° * right
void add_term(DenseStorage& acc, const EquationTerm& t, const DenseStorage& x) {
  const bool tr = t.core.transposed;
  if (t.left && t.right) {
    DenseStorage tmp(x.rows(), x.cols());
    if (tr) tmp.noalias() = t.left->storage() * x.transpose();
    else tmp.noalias() = t.left->storage() * x;
    acc.noalias() += tmp * t.right->storage();
  } else if (t.left) {
    if (tr) acc.noalias() += t.left->storage() * x.transpose();
    else acc.noalias() += t.left->storage() * x;
  } else if (t.right) {
    if (tr) acc.noalias() += x.transpose() * t.right->storage();
    else acc.noalias() += x * t.right->storage();
  } else {
    if (tr) acc += x.transpose();
    else acc += x;
  }
}

DenseStorage apply_rhs(const Equation& eq, const std::vector<RealMatrix>& current) {
  DenseStorage acc = eq.constant.storage();
  for (const auto& t : eq.terms) add_term(acc, t, current.at(t.core.unknown).storage());
  return acc;
}

bool same_support(const DenseStorage& a, const DenseStorage& b) {
  return ((a.array() > 0.0) == (b.array() > 0.0)).all();
}

std::size_t state_size(const EquationSystem& s) { return s.equations.size() * s.n * s.n; }

LayerSolution finish(std::vector<RealMatrix> state, Method m, const SolveOptions& o) {
  LayerSolution out;
  out.method = m;
  const double tau = effective_tau(o, m);
  for (const auto& x : state) out.support.push_back(threshold_positive(x, tau));
  out.scaled = std::move(state);
  return out;
}

bool has_recursion(const EquationSystem& s) {
  for (const auto& eq : s.equations) {
    if (!eq.terms.empty()) return true;
  }
  return false;
}

bool is_tail(const EquationSystem& s) {
  for (const auto& eq : s.equations) {
    for (const auto& t : eq.terms) {
      if (t.right || t.core.transposed) return false;
    }
  }
  return true;
}

bool is_warshall_shape(const EquationSystem& s) {
  return s.equations.size() == 1 && s.equations[0].terms.size() == 1 && !s.equations[0].terms[0].right &&
         !s.equations[0].terms[0].core.transposed;
}

}  // namespace

// ------------------------------------------------------------------ steps

std::vector<RealMatrix> zero_state(const EquationSystem& system) {
  return std::vector<RealMatrix>(system.equations.size(), RealMatrix(system.n));
}

std::vector<RealMatrix> boolean_step(const EquationSystem& system, const std::vector<RealMatrix>& current) {
  std::vector<RealMatrix> next;
  next.reserve(system.equations.size());
  for (const auto& eq : system.equations) {
    DenseStorage acc = apply_rhs(eq, current);
    next.emplace_back(DenseStorage(acc.cwiseMin(1.0)));
  }
  return next;
}

std::vector<RealMatrix> scaled_step(const EquationSystem& system, const std::vector<RealMatrix>& current) {
  std::vector<RealMatrix> next;
  next.reserve(system.equations.size());
  for (const auto& eq : system.equations) {
    DenseStorage acc = apply_rhs(eq, current);
    acc *= eq.epsilon;
    next.emplace_back(std::move(acc));
  }
  return next;
}

// ---------------------------------------------------------------- iterative

LayerSolution solve_boolean_iteration(const EquationSystem& system, const SolveOptions& options) {
  // Each non-final sweep adds at least one entry, so M * N^2 + 1 sweeps always suffice.
  const std::size_t cap = options.max_iters ? options.max_iters : state_size(system) + 1;
  auto state = zero_state(system);
  for (std::size_t it = 1;; ++it) {
    check_deadline(options, it - 1);
    auto next = boolean_step(system, state);
    const bool fixed = next == state;
    state = std::move(next);
    if (fixed) {
      auto out = finish(std::move(state), Method::boolean, options);
      out.iterations = it;
      return out;
    }
    if (it >= cap) throw SolveError("boolean iteration exceeded " + std::to_string(cap) + " sweeps");
  }
}

namespace {

// Largest eps * sum ||B||_inf ||C||_1 over the system: the Lipschitz constant of the linear
// part in the max-entry norm.
double contraction_factor(const EquationSystem& system) {
  double q = 0.0;
  for (const auto& eq : system.equations) q = std::max(q, eq.epsilon * eq.contraction);
  return q;
}

// Jacobi sweeps of R <- eps F[R] until the support is stable for one sweep and the error bound
// q/(1-q) * (largest change) is below residual_tol relative to the largest entry.
LayerSolution jacobi(const EquationSystem& system, const SolveOptions& options, Method tag) {
  const double q = contraction_factor(system);
  const double factor = q < 1.0 ? q / (1.0 - q) : 1.0;
  std::size_t cap = options.max_iters;
  if (!cap) {
    cap = state_size(system) + 1 + 10 * system.n;
    if (q > 0.0 && q < 1.0) {
      const double needed = std::ceil(std::log(options.residual_tol * (1.0 - q)) / std::log(q)) + 1.0;
      cap += static_cast<std::size_t>(std::min(needed, 1e7));
    }
  }
  auto state = zero_state(system);
  double residual = 0.0;
  bool stable = false;
  std::size_t it = 0;
  while (true) {
    check_deadline(options, it);
    auto next = scaled_step(system, state);
    ++it;
    stable = true;
    double change = 0.0, top = 0.0;
    for (std::size_t h = 0; h < next.size(); ++h) {
      stable = stable && same_support(next[h].storage(), state[h].storage());
      change = std::max(change, max_abs_diff(next[h], state[h]));
      top = std::max(top, max_entry(next[h]));
    }
    residual = top > 0 ? factor * change / top : 0.0;
    state = std::move(next);
    if (stable && residual <= options.residual_tol) break;
    if (it >= cap) {
      if (!stable) throw SolveError("scaled iteration exceeded " + std::to_string(cap) + " sweeps");
      break;
    }
  }
  auto out = finish(std::move(state), tag, options);
  out.iterations = it;
  out.residual = residual;
  out.residual_reached = residual <= options.residual_tol;
  return out;
}

}  // namespace

LayerSolution solve_scaled_iteration(const EquationSystem& system, const SolveOptions& options) {
  return jacobi(system, options, Method::scaled);
}

// ------------------------------------------------------------------ direct

LayerSolution solve_tail_recursive_direct(const EquationSystem& system, const SolveOptions& options) {
  if (!is_tail(system)) throw NotApplicableError("direct solve needs a tail-recursive system");
  const Index n = static_cast<Index>(system.n);
  const Index m = static_cast<Index>(system.equations.size());

  // Stacked unknown [R_1; ...; R_M]: (I - E B) R = E A with B's block (h, j) summing the
  // left contexts of h's terms on unknown j.
  RealMatrix k = RealMatrix::identity(static_cast<std::size_t>(m * n));
  DenseStorage rhs(m * n, n);
  for (Index h = 0; h < m; ++h) {
    const Equation& eq = system.equations[static_cast<std::size_t>(h)];
    rhs.middleRows(h * n, n) = eq.epsilon * eq.constant.storage();
    for (const auto& t : eq.terms) {
      auto block = k.storage().block(h * n, static_cast<Index>(t.core.unknown) * n, n, n);
      if (t.left) block -= eq.epsilon * t.left->storage();
      else block.diagonal().array() -= eq.epsilon;
    }
  }
  check_deadline(options, 0);
  MMatrixLu(k).solve_in_place(rhs);

  std::vector<RealMatrix> state;
  for (Index h = 0; h < m; ++h) state.emplace_back(DenseStorage(rhs.middleRows(h * n, n)));
  auto out = finish(std::move(state), Method::direct, options);
  out.iterations = 1;
  return out;
}

// -------------------------------------------------------------- transposed

EquationSystem rewrite_transposed(const EquationSystem& system) {
  const std::size_t m = system.equations.size();
  std::vector<bool> needed(m, false);
  for (const auto& eq : system.equations) {
    for (const auto& t : eq.terms) {
      if (t.core.transposed) needed[t.core.unknown] = true;
    }
  }
  if (std::none_of(needed.begin(), needed.end(), [](bool b) { return b; })) return system;

  // The companion of u mentions the transposes of u's cores, so it needs the companions of
  // u's non-transposed cores as well.
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t u = 0; u < m; ++u) {
      if (!needed[u]) continue;
      for (const auto& t : system.equations[u].terms) {
        if (!t.core.transposed && !needed[t.core.unknown]) needed[t.core.unknown] = grew = true;
      }
    }
  }
  std::vector<std::size_t> companion(m, 0);
  std::size_t next = m;
  for (std::size_t u = 0; u < m; ++u) {
    if (needed[u]) companion[u] = next++;
  }

  auto transposed_text = [](const std::string& s) { return s == "I" ? s : "(" + s + ")^T"; };

  EquationSystem out = system;
  for (auto& eq : out.equations) {
    for (auto& t : eq.terms) {
      if (t.core.transposed) t.core = {companion[t.core.unknown], false};
    }
  }
  for (std::size_t u = 0; u < m; ++u) {
    if (!needed[u]) continue;
    const Equation& src = system.equations[u];
    Equation eq;
    eq.head = src.head + "^T";
    eq.synthetic = true;
    eq.constant = src.constant.transposed();
    for (const auto& s : src.constant_sources) eq.constant_sources.push_back(transposed_text(s));
    eq.epsilon = src.epsilon;
    eq.ones_max = src.ones_max;
    eq.contraction = src.contraction;
    // (B X° C)^T = C^T (X°)^T B^T
    for (const auto& t : src.terms) {
      EquationTerm c;
      if (t.right) c.left = t.right->transposed();
      if (t.left) c.right = t.left->transposed();
      c.left_text = transposed_text(t.right_text);
      c.right_text = transposed_text(t.left_text);
      c.core = t.core.transposed ? OrientedRef{t.core.unknown, false} : OrientedRef{companion[t.core.unknown], false};
      eq.terms.push_back(std::move(c));
    }
    out.equations.push_back(std::move(eq));
  }
  if (out.cls == LayerClass::transposed) out.cls = LayerClass::two_sided;
  return out;
}

// --------------------------------------------------------------- sylvester

namespace {

// X = eps (A + B X C) as X = sum_k P^k (eps A) Q^k with P = eps s B, Q = C / s, where s
// balances ||P||_inf = ||Q||_1. Squaring doubles the number of summed terms per step.
LayerSolution smith_doubling(const EquationSystem& system, const SolveOptions& options) {
  const Equation& eq = system.equations[0];
  const EquationTerm& t = eq.terms[0];
  const Index n = static_cast<Index>(system.n);
  DenseStorage x = eq.epsilon * eq.constant.storage();

  const double lnorm = t.left ? inf_norm(*t.left) : 1.0;
  const double rnorm = t.right ? one_norm(*t.right) : 1.0;
  std::size_t steps = 0;
  double residual = 0.0;
  bool stable = true;
  if (lnorm > 0 && rnorm > 0) {
    const double s = std::sqrt(rnorm / (eq.epsilon * lnorm));
    DenseStorage p = t.left ? DenseStorage(eq.epsilon * s * t.left->storage())
                            : DenseStorage(eq.epsilon * s * DenseStorage::Identity(n, n));
    DenseStorage q = t.right ? DenseStorage(t.right->storage() / s) : DenseStorage(DenseStorage::Identity(n, n) / s);
    // Terms k < 2^steps are summed; the support is final once a doubling adds no entry,
    // and 2^steps > M N^2 always suffices.
    const std::size_t support_cap = static_cast<std::size_t>(std::ceil(std::log2(double(state_size(system)) + 2))) + 1;
    const std::size_t cap = options.max_iters ? options.max_iters : support_cap + 64;
    // After k steps the unsummed tail is bounded by rate^(2^k) / (1 - rate) * max(eps A).
    const double rate = eq.epsilon * lnorm * rnorm;
    const double head = x.maxCoeff();
    double rate_power = rate;
    DenseStorage tmp(n, n), inc(n, n);
    while (true) {
      check_deadline(options, steps);
      tmp.noalias() = p * x;
      inc.noalias() = tmp * q;
      ++steps;
      rate_power *= rate_power;
      const DenseStorage updated = x + inc;
      stable = same_support(updated, x);
      const double top = updated.maxCoeff();
      residual = top > 0 ? rate_power / (1.0 - rate) * head / top : 0.0;
      x = updated;
      if (stable && residual <= options.residual_tol) break;
      if (steps >= cap) {
        if (!stable) throw SolveError("Smith doubling exceeded " + std::to_string(cap) + " steps");
        break;
      }
      tmp.noalias() = p * p;
      p.swap(tmp);
      tmp.noalias() = q * q;
      q.swap(tmp);
    }
  }
  std::vector<RealMatrix> state;
  state.emplace_back(std::move(x));
  auto out = finish(std::move(state), Method::sylvester, options);
  out.iterations = steps;
  out.residual = residual;
  out.residual_reached = residual <= options.residual_tol;
  return out;
}

}  // namespace

LayerSolution solve_sylvester(const EquationSystem& system, const SolveOptions& options) {
  for (const auto& eq : system.equations) {
    if (!eq.is_contractive()) {
      throw SolveError("sylvester: eps * sum ||B||_inf ||C||_1 = " + std::to_string(eq.epsilon * eq.contraction) +
                       " >= 1 for " + eq.head);
    }
  }
  const EquationSystem rewritten = rewrite_transposed(system);
  const bool single = rewritten.equations.size() == 1 && rewritten.equations[0].terms.size() == 1;
  LayerSolution out = single ? smith_doubling(rewritten, options) : jacobi(rewritten, options, Method::sylvester);
  out.scaled.resize(system.equations.size());
  out.support.resize(system.equations.size());
  return out;
}

// ---------------------------------------------------------------- kronecker

namespace {

RealMatrix context_or_identity(const std::optional<RealMatrix>& m, std::size_t n) {
  return m ? *m : RealMatrix::identity(n);
}

}  // namespace

RealMatrix solve_sylvester_kron_oracle(const RealMatrix& a, const RealMatrix& b, const RealMatrix& c, double epsilon,
                                       std::size_t cap) {
  const std::size_t n = a.size();
  if (b.size() != n || c.size() != n) throw DimensionError("kron oracle: size mismatch");
  if (n > cap) throw SolveError("kron oracle: n = " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  RealMatrix k = kron(c.transposed(), b);
  k *= -epsilon;
  k.storage().diagonal().array() += 1.0;
  RealVector rhs = epsilon * vec(a);
  return unvec(solve_linear(k, rhs), n);
}

LayerSolution solve_kron_system(const EquationSystem& system, const SolveOptions& options) {
  const std::size_t n = system.n;
  if (n > options.kron_cap) {
    throw NotApplicableError("kron oracle: n = " + std::to_string(n) + " exceeds cap " +
                             std::to_string(options.kron_cap));
  }
  const Index nn = static_cast<Index>(n * n);
  const Index m = static_cast<Index>(system.equations.size());

  RealMatrix big = RealMatrix::identity(static_cast<std::size_t>(m * nn));
  RealVector rhs(m * nn);
  for (Index h = 0; h < m; ++h) {
    const Equation& eq = system.equations[static_cast<std::size_t>(h)];
    rhs.segment(h * nn, nn) = eq.epsilon * vec(eq.constant);
    for (const auto& t : eq.terms) {
      // vec(B X C) = (C^T kron B) vec X; vec(X^T) permutes vec X.
      const RealMatrix op = kron(context_or_identity(t.right, n).transposed(), context_or_identity(t.left, n));
      auto block = big.storage().block(h * nn, static_cast<Index>(t.core.unknown) * nn, nn, nn);
      for (Index col = 0; col < nn; ++col) {
        Index src = col;
        if (t.core.transposed) src = (col % static_cast<Index>(n)) * static_cast<Index>(n) + col / static_cast<Index>(n);
        block.col(col) -= eq.epsilon * op.storage().col(src);
      }
    }
  }
  check_deadline(options, 0);
  const RealVector z = solve_linear(big, rhs);

  std::vector<RealMatrix> state;
  for (Index h = 0; h < m; ++h) state.push_back(unvec(z.segment(h * nn, nn), n));
  auto out = finish(std::move(state), Method::kron_oracle, options);
  out.iterations = 1;
  return out;
}

// ---------------------------------------------------------------- warshall

BitMatrix warshall_transitive_closure(const BitMatrix& r) {
  BitMatrix c = r;
  const std::size_t n = c.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!c.get(i, k)) continue;
      auto dst = c.row(i);
      auto src = c.row(k);
      for (std::size_t w = 0; w < dst.size(); ++w) dst[w] |= src[w];
    }
  }
  return c;
}

LayerSolution solve_warshall(const EquationSystem& system, const SolveOptions& options) {
  if (!is_warshall_shape(system)) throw NotApplicableError("warshall needs a single equation R = A + B R");
  const Equation& eq = system.equations[0];
  const auto& left = eq.terms[0].left;
  const BitMatrix a = threshold_positive(eq.constant, 0.0);
  BitMatrix r = a;
  if (left) r |= bool_product(warshall_transitive_closure(threshold_positive(*left, 0.0)), a);
  LayerSolution out;
  out.method = Method::warshall;
  out.iterations = 1;
  out.scaled.push_back(r.to_real());
  out.support.push_back(std::move(r));
  (void)options;
  return out;
}

// ------------------------------------------------------------ orchestration

bool applicable(Method method, const EquationSystem& system, const SolveOptions& options) {
  switch (method) {
    case Method::direct: return is_tail(system);
    case Method::kron_oracle: return system.n <= options.kron_cap;
    case Method::warshall: return is_warshall_shape(system);
    default: return true;
  }
}

namespace {

LayerSolution run(Method m, const EquationSystem& system, const SolveOptions& options) {
  switch (m) {
    case Method::boolean: return solve_boolean_iteration(system, options);
    case Method::scaled: return solve_scaled_iteration(system, options);
    case Method::direct: return solve_tail_recursive_direct(system, options);
    case Method::sylvester: return solve_sylvester(system, options);
    case Method::kron_oracle: return solve_kron_system(system, options);
    case Method::warshall: return solve_warshall(system, options);
    case Method::auto_select: break;
  }
  throw std::logic_error("run: auto is not a concrete method");
}

std::vector<Method> ladder(Method first) {
  switch (first) {
    case Method::direct: return {Method::direct, Method::sylvester, Method::scaled, Method::boolean};
    case Method::kron_oracle: return {Method::kron_oracle, Method::sylvester, Method::scaled, Method::boolean};
    case Method::sylvester: return {Method::sylvester, Method::scaled, Method::boolean};
    case Method::scaled: return {Method::scaled, Method::boolean};
    default: return {first};
  }
}

}  // namespace

LayerSolution solve_layer(const EquationSystem& system, const SolveOptions& options, LayerReport& report) {
  report.requested = options.method;
  report.epsilons.clear();
  for (const auto& eq : system.equations) report.epsilons.push_back(eq.epsilon);

  if (!has_recursion(system)) {
    LayerSolution sol = solve_boolean_iteration(system, options);
    report.used = sol.method;
    report.iterations = sol.iterations;
    return sol;
  }

  Method first = options.method;
  if (first == Method::auto_select) {
    first = system.cls == LayerClass::tail_recursive && is_tail(system) ? Method::direct : Method::sylvester;
  } else if (!applicable(first, system, options)) {
    throw NotApplicableError("method " + std::string(to_string(first)) + " does not apply to layer " +
                             std::to_string(system.layer + 1) + " (class " + std::string(to_string(system.cls)) +
                             ")");
  }

  std::optional<LayerSolution> sol;
  const auto steps = ladder(first);
  for (std::size_t i = 0; i < steps.size() && !sol; ++i) {
    try {
      sol = run(steps[i], system, options);
    } catch (const TimeoutError&) {
      throw;
    } catch (const std::exception& e) {
      if (i + 1 == steps.size()) throw SolveError("layer " + std::to_string(system.layer + 1) + ": " + e.what());
      report.fallbacks.push_back(std::string(to_string(steps[i])) + " failed (" + e.what() + "), trying " +
                                 std::string(to_string(steps[i + 1])));
    }
  }

  if (options.method == Method::auto_select && options.cross_check && sol->method == Method::direct) {
    std::vector<RealMatrix> current;
    for (const auto& s : sol->support) current.push_back(s.to_real());
    const bool fixed = boolean_step(system, current) == current;
    report.cross_check = fixed ? "passed" : "failed";
    if (!fixed) {
      report.fallbacks.push_back("direct support is not a fixpoint of one boolean sweep, using boolean");
      sol = solve_boolean_iteration(system, options);
    }
  }

  if (options.inject_fault && *options.inject_fault == sol->method && system.n > 0) {
    BitMatrix& s = sol->support.at(0);
    s.set(0, 0, !s.get(0, 0));
  }

  report.used = sol->method;
  report.iterations = sol->iterations;
  report.residual = sol->residual;
  report.residual_reached = sol->residual_reached;
  return std::move(*sol);
}

Model evaluate_program(const Program& program, const FactSet& facts, const SolveOptions& options, bool builtin_diag,
                       std::vector<EquationSystem>* systems) {
  const auto validation = validate_clin(program);
  if (!validation.ok) throw SolveError(format_validation(program, validation));

  FactSet all = program_facts(program).merged(facts);
  if (builtin_diag) {
    auto named = all.named();
    auto& diag = named["diag"];
    for (const auto& c : all.constants().names()) diag.insert({c, c});
    all = FactSet::from_named(named, all.constants().names());
  }

  Model model;
  model.constants = all.constants();
  const LayeredProgram layered = analyze(program);
  RelationMap solved;

  for (std::size_t li = 0; li < layered.layers.size(); ++li) {
    const Layer& layer = layered.layers[li];
    LayerReport report;
    report.layer = li;
    report.cls = layer.cls;
    for (PredicateId p : layer.scc) report.predicates.push_back(program.predicates.name(p));

    const auto t0 = Clock::now();
    EquationSystem system = compile_layer(program, layered, li, solved, all);
    for (auto& eq : system.equations) {
      if (options.epsilon) set_epsilon(eq, *options.epsilon);
      else if (options.epsilon_scale != 1.0) set_epsilon(eq, eq.epsilon * options.epsilon_scale);
    }
    const auto t1 = Clock::now();
    LayerSolution sol = solve_layer(system, options, report);
    const auto t2 = Clock::now();

    report.compile_seconds = std::chrono::duration<double>(t1 - t0).count();
    report.solve_seconds = std::chrono::duration<double>(t2 - t1).count();
    model.compile_seconds += report.compile_seconds;
    model.solve_seconds += report.solve_seconds;
    for (std::size_t k = 0; k < layer.scc.size(); ++k) {
      solved[layer.scc[k]] = sol.support[k];
      model.relations[program.predicates.name(layer.scc[k])] = sol.support[k];
    }
    model.layers.push_back(std::move(report));
    if (systems) systems->push_back(std::move(system));
  }

  for (const auto& [name, pairs] : all.relations()) {
    if (!model.relations.contains(name)) model.relations[name] = all.matrix(name);
  }
  return model;
}

std::string format_provenance(const Model& model) {
  std::ostringstream os;
  for (const auto& r : model.layers) {
    os << "layer " << (r.layer + 1) << " {";
    for (std::size_t k = 0; k < r.predicates.size(); ++k) os << (k ? "," : "") << r.predicates[k];
    os << "} class=" << to_string(r.cls) << " method=" << to_string(r.used) << " requested=" << to_string(r.requested)
       << " iterations=" << r.iterations << " eps=";
    for (std::size_t k = 0; k < r.epsilons.size(); ++k) os << (k ? "," : "") << r.epsilons[k];
    os << " residual=" << r.residual << (r.residual_reached ? "" : " (tolerance not reached)")
       << " cross_check=" << r.cross_check << " compile=" << r.compile_seconds << "s solve=" << r.solve_seconds
       << "s\n";
    for (const auto& f : r.fallbacks) os << "  fallback: " << f << "\n";
  }
  return os.str();
}

}  // namespace matlog
