#include "matlog/data_io.hpp"

#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace matlog {

BitMatrix random_adjacency(const GraphSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("random_adjacency: n must be >= 1");
  if (!(spec.p_e >= 0.0 && spec.p_e <= 1.0)) throw std::invalid_argument("random_adjacency: p_e must be in [0,1]");
  std::mt19937_64 rng(spec.seed);
  BitMatrix m(spec.n);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.n; ++j) {
      if (static_cast<double>(rng() >> 11) * kScale < spec.p_e) m.set(i, j);
    }
  }
  return m;
}

std::vector<std::string> padded_names(std::size_t n) {
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string digits = std::to_string(i);
    names.push_back("c" + std::string(width - digits.size(), '0') + digits);
  }
  return names;
}

FactSet facts_from_matrix(const BitMatrix& m, const std::string& predicate) {
  const auto names = padded_names(m.size());
  FactSet::NamedPairs named;
  auto& pairs = named[predicate];
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m.get(i, j)) pairs.insert({names[i], names[j]});
    }
  }
  return FactSet::from_named(named, names);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("error writing " + path.string());
}

EdgeList edge_list_from_text(std::string_view text, FactFormat format, const std::string& predicate) {
  const FactSet facts = parse_facts(text, format, predicate);
  if (facts.empty()) throw IoError("edge list is empty");
  EdgeList out;
  out.constants = facts.constants();
  out.matrix = facts.matrix(predicate);
  out.edges = facts.pairs(predicate).size();
  return out;
}

EdgeList load_edge_list(const std::filesystem::path& path, FactFormat format, const std::string& predicate) {
  try {
    return edge_list_from_text(read_text_file(path), format, predicate);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Stats write_stats(const Model& model) {
  Stats s;
  s.constants = model.constants.size();
  for (const auto& [name, m] : model.relations) s.predicates.push_back({name, m.count()});
  s.compile_seconds = model.compile_seconds;
  s.solve_seconds = model.solve_seconds;
  s.layers = model.layers;
  return s;
}

std::string format_stats_table(const Stats& stats) {
  std::size_t width = 9;
  for (const auto& p : stats.predicates) width = std::max(width, p.predicate.size());
  std::ostringstream os;
  os << "constants: " << stats.constants << "\n";
  os << std::left << std::setw(static_cast<int>(width)) << "predicate" << "  " << std::right << std::setw(12)
     << "atoms" << "\n";
  for (const auto& p : stats.predicates) {
    os << std::left << std::setw(static_cast<int>(width)) << p.predicate << "  " << std::right << std::setw(12)
       << p.count << "\n";
  }
  os << std::fixed << std::setprecision(6) << "compile: " << stats.compile_seconds << " s\nsolve:   "
     << stats.solve_seconds << " s\n";
  return os.str();
}

std::string format_stats_records(const Stats& stats) {
  std::ostringstream os;
  os << "constants=" << stats.constants << "\n";
  for (const auto& p : stats.predicates) os << "count." << p.predicate << "=" << p.count << "\n";
  os << "compile_seconds=" << stats.compile_seconds << "\n";
  os << "solve_seconds=" << stats.solve_seconds << "\n";
  for (const auto& l : stats.layers) {
    const std::string key = "layer." + std::to_string(l.layer + 1) + ".";
    os << key << "class=" << to_string(l.cls) << "\n";
    os << key << "method=" << to_string(l.used) << "\n";
    os << key << "iterations=" << l.iterations << "\n";
    os << key << "solve_seconds=" << l.solve_seconds << "\n";
  }
  return os.str();
}

void dump_model_matrices(const Model& model, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [name, m] : model.relations) {
    const auto path = dir / (name + ".mlgm");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_matrix_dump(out, m);
  }
}

}  // namespace matlog
