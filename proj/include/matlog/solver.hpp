#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matlog/analysis.hpp"
#include "matlog/compiler.hpp"
#include "matlog/front.hpp"
#include "matlog/matrix.hpp"

namespace matlog {

enum class Method { auto_select, boolean, scaled, direct, sylvester, kron_oracle, warshall };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
/// Every method except auto_select.
const std::vector<Method>& concrete_methods();

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Method cannot handle the layer's shape (explicit method requests only).
class NotApplicableError : public SolveError {
 public:
  using SolveError::SolveError;
};

class TimeoutError : public SolveError {
 public:
  using SolveError::SolveError;
};

using Clock = std::chrono::steady_clock;

struct SolveOptions {
  Method method = Method::auto_select;
  /// Support threshold. Unset: 0 for the subtraction-free solvers (boolean, scaled, direct,
  /// sylvester, warshall), kDefaultOracleTau for the pivoted Kronecker oracle.
  std::optional<double> tau;
  /// 0 selects the default cap of each iterative method.
  std::size_t max_iters = 0;
  double residual_tol = 1e-12;
  /// Overrides the computed eps of every equation; must satisfy eps * F[1] <= 1.
  std::optional<double> epsilon;
  /// Multiplies every computed eps (e.g. 0.5 to halve it).
  double epsilon_scale = 1.0;
  std::size_t kron_cap = 16;
  /// auto only: check the direct support against one boolean sweep.
  bool cross_check = true;
  std::optional<Clock::time_point> deadline;
  /// Test hook: flip entry (0,0) of every recursive layer solved by this method.
  std::optional<Method> inject_fault;
};

inline constexpr double kDefaultOracleTau = 1e-12;

struct LayerSolution {
  std::vector<RealMatrix> scaled;   // one per equation (0/1 for boolean methods)
  std::vector<BitMatrix> support;   // threshold_positive(scaled, tau)
  std::size_t iterations = 0;
  Method method = Method::boolean;
  double residual = 0.0;
  /// The iteration cap was hit after the support had settled but before the residual did.
  bool residual_reached = true;
};

struct LayerReport {
  std::size_t layer = 0;
  std::vector<std::string> predicates;
  LayerClass cls = LayerClass::nonrecursive;
  Method requested = Method::auto_select;
  Method used = Method::boolean;
  std::size_t iterations = 0;
  std::vector<double> epsilons;
  double residual = 0.0;
  bool residual_reached = true;
  std::vector<std::string> fallbacks;
  std::string cross_check = "skipped";
  double compile_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct Model {
  ConstantTable constants;
  std::map<std::string, BitMatrix> relations;
  std::vector<LayerReport> layers;
  double compile_seconds = 0.0;
  double solve_seconds = 0.0;

  std::size_t count(const std::string& predicate) const;
};

// ---------------------------------------------------------------- single steps

/// One Jacobi sweep of R <- min1(F[R]) on 0/1-valued matrices.
std::vector<RealMatrix> boolean_step(const EquationSystem& system, const std::vector<RealMatrix>& current);
/// One Jacobi sweep of R <- eps * F[R].
std::vector<RealMatrix> scaled_step(const EquationSystem& system, const std::vector<RealMatrix>& current);
std::vector<RealMatrix> zero_state(const EquationSystem& system);

// ---------------------------------------------------------------- layer solvers

LayerSolution solve_boolean_iteration(const EquationSystem& system, const SolveOptions& options = {});
LayerSolution solve_scaled_iteration(const EquationSystem& system, const SolveOptions& options = {});
/// Tail-recursive systems: one factorization of the stacked (I - E B) system.
LayerSolution solve_tail_recursive_direct(const EquationSystem& system, const SolveOptions& options = {});
/// Adds a synthetic companion equation for every unknown needed transposed and rewrites
/// every transposed reference to point at its companion.
EquationSystem rewrite_transposed(const EquationSystem& system);
LayerSolution solve_sylvester(const EquationSystem& system, const SolveOptions& options = {});
/// Whole-system Kronecker/vec solve; needs n <= options.kron_cap.
LayerSolution solve_kron_system(const EquationSystem& system, const SolveOptions& options = {});
/// Single tail-recursive equation R = min1(A + B R): R = A or trcl(B) A.
LayerSolution solve_warshall(const EquationSystem& system, const SolveOptions& options = {});

/// X = eps (A + B X C) through (I - eps (C^T kron B)) vec X = eps vec A.
RealMatrix solve_sylvester_kron_oracle(const RealMatrix& a, const RealMatrix& b, const RealMatrix& c,
                                       double epsilon, std::size_t cap = 16);

/// Reachability by non-empty paths.
BitMatrix warshall_transitive_closure(const BitMatrix& r);

bool applicable(Method method, const EquationSystem& system, const SolveOptions& options = {});

/// Solves one compiled layer with the requested method (auto picks per class) and the
/// fallback ladder direct -> sylvester -> scaled -> boolean on numerical failure.
LayerSolution solve_layer(const EquationSystem& system, const SolveOptions& options, LayerReport& report);

/// Domain: program constants, fact constants; `builtin_diag` adds diag(c,c) for each of them.
/// `systems`, when given, receives each layer's compiled system.
Model evaluate_program(const Program& program, const FactSet& facts, const SolveOptions& options = {},
                       bool builtin_diag = false, std::vector<EquationSystem>* systems = nullptr);

std::string format_provenance(const Model& model);

}  // namespace matlog
