#include "matlog/front.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace matlog {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column) {}

// ------------------------------------------------------------- symbol tables

ConstantTable::ConstantTable(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  index_.reserve(names_.size());
  for (ConstantId i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
}

std::optional<ConstantId> ConstantTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ConstantId ConstantTable::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw std::out_of_range("unknown constant '" + std::string(name) + "'");
}

ConstantTable ConstantTable::merged(const ConstantTable& other) const {
  std::vector<std::string> all = names_;
  all.insert(all.end(), other.names_.begin(), other.names_.end());
  return ConstantTable(std::move(all));
}

std::vector<ConstantId> ConstantTable::remap_into(const ConstantTable& target) const {
  std::vector<ConstantId> out(names_.size());
  for (ConstantId i = 0; i < names_.size(); ++i) out[i] = target.at(names_[i]);
  return out;
}

PredicateTable::PredicateTable(std::vector<PredicateInfo> predicates) : predicates_(std::move(predicates)) {
  std::sort(predicates_.begin(), predicates_.end(),
            [](const PredicateInfo& a, const PredicateInfo& b) { return a.name < b.name; });
}

std::optional<PredicateId> PredicateTable::find(std::string_view name) const {
  auto it = std::lower_bound(predicates_.begin(), predicates_.end(), name,
                             [](const PredicateInfo& p, std::string_view n) { return p.name < n; });
  if (it == predicates_.end() || it->name != name) return std::nullopt;
  return static_cast<PredicateId>(it - predicates_.begin());
}

std::vector<std::size_t> Program::rule_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (!clauses[i].is_fact()) out.push_back(i);
  }
  return out;
}

FactFormat parse_fact_format(std::string_view name) {
  if (name == "atoms") return FactFormat::atoms;
  if (name == "tsv") return FactFormat::tsv;
  if (name == "konect") return FactFormat::konect;
  throw std::invalid_argument("unknown fact format '" + std::string(name) + "'");
}

std::string_view to_string(FactFormat format) {
  switch (format) {
    case FactFormat::atoms: return "atoms";
    case FactFormat::tsv: return "tsv";
    case FactFormat::konect: return "konect";
  }
  return "?";
}

// ------------------------------------------------------------------ FactSet

FactSet FactSet::from_named(const NamedPairs& facts, const std::vector<std::string>& extra_constants) {
  std::vector<std::string> names = extra_constants;
  for (const auto& [pred, pairs] : facts) {
    for (const auto& [a, b] : pairs) {
      names.push_back(a);
      names.push_back(b);
    }
  }
  FactSet out;
  out.constants_ = ConstantTable(std::move(names));
  for (const auto& [pred, pairs] : facts) {
    auto& dst = out.pairs_[pred];
    for (const auto& [a, b] : pairs) dst.emplace(out.constants_.at(a), out.constants_.at(b));
  }
  return out;
}

const std::set<FactSet::Pair>& FactSet::pairs(const std::string& predicate) const {
  static const std::set<Pair> kEmpty;
  auto it = pairs_.find(predicate);
  return it == pairs_.end() ? kEmpty : it->second;
}

std::size_t FactSet::size() const {
  std::size_t n = 0;
  for (const auto& [_, p] : pairs_) n += p.size();
  return n;
}

FactSet FactSet::reindexed(const ConstantTable& target) const {
  const auto map = constants_.remap_into(target);
  FactSet out;
  out.constants_ = target;
  for (const auto& [pred, pairs] : pairs_) {
    auto& dst = out.pairs_[pred];
    for (const auto& [a, b] : pairs) dst.emplace(map[a], map[b]);
  }
  return out;
}

FactSet FactSet::merged(const FactSet& other) const {
  const ConstantTable all = constants_.merged(other.constants_);
  FactSet out = reindexed(all);
  const FactSet rhs = other.reindexed(all);
  for (const auto& [pred, pairs] : rhs.pairs_) out.pairs_[pred].insert(pairs.begin(), pairs.end());
  return out;
}

BitMatrix FactSet::matrix(const std::string& predicate) const {
  BitMatrix m(constants_.size());
  for (const auto& [a, b] : pairs(predicate)) m.set(a, b);
  return m;
}

FactSet::NamedPairs FactSet::named() const {
  NamedPairs out;
  for (const auto& [pred, pairs] : pairs_) {
    auto& dst = out[pred];
    for (const auto& [a, b] : pairs) dst.emplace(constants_.name(a), constants_.name(b));
  }
  return out;
}

// ------------------------------------------------------------------- lexing

namespace {

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct RawTerm {
  bool variable = false;
  std::string text;
};

struct RawAtom {
  std::string predicate;
  std::vector<RawTerm> args;
  std::size_t line = 0;
  std::size_t column = 0;
};

struct RawClause {
  RawAtom head;
  std::vector<RawAtom> body;
  std::size_t line = 0;
};

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      for (std::size_t k = 0; k < token.size(); ++k) advance();
      return true;
    }
    return false;
  }

  void expect(std::string_view token, const char* context) {
    if (!accept(token)) fail(std::string("expected '") + std::string(token) + "' " + context);
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted() {
    // Opening quote already current.
    advance();
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated quoted constant");
      const char c = text_[pos_];
      advance();
      if (c == '\'') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated quoted constant");
        out.push_back(text_[pos_]);
        advance();
      } else {
        out.push_back(c);
      }
    }
    if (out.empty()) fail("empty quoted constant");
    return out;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, column_, message); }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

RawTerm parse_term(Scanner& s) {
  const char c = s.peek();
  if (c == '\'') return {false, s.quoted()};
  if (is_upper(c)) return {true, s.identifier()};
  if (is_lower(c) || is_digit(c)) return {false, s.identifier()};
  s.fail(c == '\0' ? "unexpected end of input in term" : std::string("unexpected character '") + c + "' in term");
}

RawAtom parse_atom(Scanner& s) {
  RawAtom atom;
  const char c = s.peek();
  atom.line = s.line();
  atom.column = s.column();
  if (!is_lower(c)) {
    s.fail(c == '\0' ? "unexpected end of input, expected predicate"
                     : std::string("expected predicate name, found '") + c + "'");
  }
  atom.predicate = s.identifier();
  s.expect("(", "after predicate name");
  atom.args.push_back(parse_term(s));
  while (s.accept(",")) atom.args.push_back(parse_term(s));
  s.expect(")", "to close argument list");
  if (atom.args.size() != 2) {
    throw ParseError(atom.line, atom.column,
                     "predicate " + atom.predicate + " used with arity " + std::to_string(atom.args.size()) +
                         " (only binary predicates are supported)");
  }
  return atom;
}

std::vector<RawClause> parse_raw(std::string_view text) {
  Scanner s(text);
  std::vector<RawClause> clauses;
  while (!s.at_end()) {
    RawClause clause;
    clause.head = parse_atom(s);
    clause.line = clause.head.line;
    if (s.accept(":-")) {
      clause.body.push_back(parse_atom(s));
      while (s.accept(",")) clause.body.push_back(parse_atom(s));
    }
    s.expect(".", "at end of clause");

    if (clause.body.empty()) {
      for (const auto& t : clause.head.args) {
        if (t.variable) {
          throw ParseError(clause.head.line, clause.head.column,
                           "fact " + clause.head.predicate + " is not ground (variable " + t.text + ")");
        }
      }
    } else {
      for (const auto& t : clause.head.args) {
        if (!t.variable) continue;
        bool found = false;
        for (const auto& b : clause.body) {
          for (const auto& bt : b.args) found = found || (bt.variable && bt.text == t.text);
        }
        if (!found) {
          throw ParseError(clause.head.line, clause.head.column,
                           "head variable " + t.text + " does not occur in the rule body");
        }
      }
    }
    clauses.push_back(std::move(clause));
  }
  return clauses;
}

Term resolve_term(const RawTerm& t, const ConstantTable& constants) {
  if (t.variable) return Variable{t.text};
  return Constant{constants.at(t.text)};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line = 1;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto cur = text.substr(0, nl);
    fn(line, cur);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
    ++line;
  }
}

void check_constant_limit(const FactSet::NamedPairs& facts, std::size_t line) {
  std::set<std::string_view> names;
  for (const auto& [_, pairs] : facts) {
    for (const auto& [a, b] : pairs) {
      names.insert(a);
      names.insert(b);
    }
  }
  if (names.size() > kMaxConstants) {
    throw ParseError(line, 1, "constant limit exceeded (" + std::to_string(kMaxConstants) + ")");
  }
}

}  // namespace

// ------------------------------------------------------------------ parsing

Program parse_program(std::string_view text) {
  const auto raw = parse_raw(text);

  std::vector<std::string> constant_names;
  std::map<std::string, PredicateKind> kinds;
  for (const auto& c : raw) {
    const bool rule = !c.body.empty();
    auto [it, inserted] = kinds.emplace(c.head.predicate, PredicateKind::extensional);
    if (rule) it->second = PredicateKind::intensional;
    for (const auto& t : c.head.args) {
      if (!t.variable) constant_names.push_back(t.text);
    }
    for (const auto& b : c.body) {
      kinds.emplace(b.predicate, PredicateKind::extensional);
      for (const auto& t : b.args) {
        if (!t.variable) constant_names.push_back(t.text);
      }
    }
  }

  Program program;
  program.constants = ConstantTable(std::move(constant_names));
  std::vector<PredicateInfo> infos;
  for (const auto& [name, kind] : kinds) infos.push_back({name, 2, kind});
  program.predicates = PredicateTable(std::move(infos));

  auto resolve_atom = [&](const RawAtom& a) {
    return Atom{*program.predicates.find(a.predicate), resolve_term(a.args[0], program.constants),
                resolve_term(a.args[1], program.constants)};
  };
  for (const auto& c : raw) {
    Clause clause;
    clause.head = resolve_atom(c.head);
    for (const auto& b : c.body) clause.body.push_back(resolve_atom(b));
    clause.line = c.line;
    program.clauses.push_back(std::move(clause));
  }
  return program;
}

FactSet parse_facts(std::string_view text, FactFormat format, std::string_view predicate) {
  FactSet::NamedPairs facts;
  std::size_t last_line = 1;
  switch (format) {
    case FactFormat::atoms: {
      for (const auto& c : parse_raw(text)) {
        if (!c.body.empty()) throw ParseError(c.line, 1, "rules are not allowed in a fact file");
        facts[c.head.predicate].emplace(c.head.args[0].text, c.head.args[1].text);
        last_line = c.line;
      }
      break;
    }
    case FactFormat::tsv: {
      auto& dst = facts[std::string(predicate)];
      for_each_line(text, [&](std::size_t line, std::string_view raw_line) {
        if (!raw_line.empty() && raw_line.back() == '\r') raw_line.remove_suffix(1);
        if (trim(raw_line).empty() || trim(raw_line).front() == '%') return;
        const auto tab = raw_line.find('\t');
        if (tab == std::string_view::npos || raw_line.find('\t', tab + 1) != std::string_view::npos) {
          throw ParseError(line, 1, "malformed tsv line: expected exactly two tab-separated fields");
        }
        const auto a = raw_line.substr(0, tab);
        const auto b = raw_line.substr(tab + 1);
        if (a.empty() || b.empty()) throw ParseError(line, 1, "malformed tsv line: empty field");
        dst.emplace(std::string(a), std::string(b));
        last_line = line;
      });
      break;
    }
    case FactFormat::konect: {
      auto& dst = facts[std::string(predicate)];
      for_each_line(text, [&](std::size_t line, std::string_view raw_line) {
        const auto body = trim(raw_line);
        if (body.empty() || body.front() == '%') return;
        std::istringstream fields{std::string(body)};
        std::string a, b;
        fields >> a >> b;
        const auto numeric = [](const std::string& s) {
          return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return is_digit(c); });
        };
        if (!numeric(a) || !numeric(b)) {
          throw ParseError(line, 1, "malformed konect line: expected two integer node ids");
        }
        dst.emplace(std::move(a), std::move(b));
        last_line = line;
      });
      break;
    }
  }
  check_constant_limit(facts, last_line);
  return FactSet::from_named(facts);
}

FactSet program_facts(const Program& program) {
  FactSet::NamedPairs named;
  for (const auto& c : program.clauses) {
    if (!c.is_fact()) continue;
    named[program.predicates.name(c.head.predicate)].emplace(
        program.constants.name(std::get<Constant>(c.head.arg1).id),
        program.constants.name(std::get<Constant>(c.head.arg2).id));
  }
  return FactSet::from_named(named, program.constants.names());
}

// ---------------------------------------------------------------- rendering

std::string quote_constant(std::string_view name) {
  const bool plain = !name.empty() && (is_lower(name.front()) || is_digit(name.front())) &&
                     std::all_of(name.begin(), name.end(), is_ident_char);
  if (plain) return std::string(name);
  std::string out = "'";
  for (char c : name) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string render_model(const std::map<std::string, BitMatrix>& relations, const ConstantTable& constants) {
  std::vector<std::string> quoted;
  quoted.reserve(constants.size());
  for (const auto& n : constants.names()) quoted.push_back(quote_constant(n));

  std::string out;
  for (const auto& [pred, m] : relations) {
    if (m.size() != constants.size()) {
      throw DimensionError("render_model: matrix for " + pred + " does not match the constant table");
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (!m.get(i, j)) continue;
        out += pred;
        out += '(';
        out += quoted[i];
        out += ',';
        out += quoted[j];
        out += ").\n";
      }
    }
  }
  return out;
}

std::string render_facts(const FactSet& facts) {
  std::map<std::string, BitMatrix> relations;
  for (const auto& [pred, _] : facts.relations()) relations.emplace(pred, facts.matrix(pred));
  return render_model(relations, facts.constants());
}

std::string format_term(const Term& t, const ConstantTable& constants) {
  if (is_variable(t)) return variable_name(t);
  return quote_constant(constants.name(std::get<Constant>(t).id));
}

std::string format_atom(const Atom& a, const Program& program) {
  return program.predicates.name(a.predicate) + "(" + format_term(a.arg1, program.constants) + "," +
         format_term(a.arg2, program.constants) + ")";
}

std::string format_clause(const Clause& c, const Program& program) {
  std::string out = format_atom(c.head, program);
  if (!c.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (i) out += ", ";
      out += format_atom(c.body[i], program);
    }
  }
  out += ".";
  return out;
}

}  // namespace matlog
