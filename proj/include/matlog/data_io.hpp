#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matlog/front.hpp"
#include "matlog/matrix.hpp"
#include "matlog/solver.hpp"

namespace matlog {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphSpec {
  std::size_t n = 1;
  double p_e = 0.0;
  std::uint64_t seed = 0;
};

/// Entry (i,j) is 1 iff the (i*n+j)-th draw u of std::mt19937_64 seeded with `seed`
/// satisfies (u >> 11) * 2^-53 < p_e.
BitMatrix random_adjacency(const GraphSpec& spec);

/// Constant names c0, c1, ... zero-padded so that lexicographic order is index order.
std::vector<std::string> padded_names(std::size_t n);
/// FactSet holding `m` as relation `predicate` over padded_names(m.size()).
FactSet facts_from_matrix(const BitMatrix& m, const std::string& predicate);

struct EdgeList {
  BitMatrix matrix;
  ConstantTable constants;
  std::size_t edges = 0;  // distinct pairs
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

EdgeList edge_list_from_text(std::string_view text, FactFormat format, const std::string& predicate = "r1");
EdgeList load_edge_list(const std::filesystem::path& path, FactFormat format, const std::string& predicate = "r1");

struct PredicateStats {
  std::string predicate;
  std::size_t count = 0;
};

struct Stats {
  std::size_t constants = 0;
  std::vector<PredicateStats> predicates;
  double compile_seconds = 0.0;
  double solve_seconds = 0.0;
  std::vector<LayerReport> layers;
};

Stats write_stats(const Model& model);
/// Aligned text table.
std::string format_stats_table(const Stats& stats);
/// One `key=value` record per line.
std::string format_stats_records(const Stats& stats);

/// Writes <dir>/<predicate>.mlgm for every relation of the model.
void dump_model_matrices(const Model& model, const std::filesystem::path& dir);

}  // namespace matlog
