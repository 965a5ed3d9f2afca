#include "orbitlin/dsl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace ofl {

namespace {

struct Scanner {
  const std::string& text;
  int line;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size() || text[pos] == '#';
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(line, static_cast<int>(pos) + 1, msg);
  }
  bool try_consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void consume(char c) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '_'))
      ++pos;
    if (start == pos) fail("expected an identifier");
    return text.substr(start, pos - start);
  }
  std::int64_t integer() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && text[pos] == '-') ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos || (text[start] == '-' && pos == start + 1)) fail("expected an integer");
    return std::stoll(text.substr(start, pos - start));
  }
  // Integer or fraction, returned as the literal text.
  std::string coefficient() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && text[pos] == '-') ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == '/') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (start == pos) fail("expected a coefficient");
    return text.substr(start, pos - start);
  }
};

struct RawItem {
  bool is_atom = false;
  std::int64_t atom = 0;
  std::string var;
};

std::vector<RawItem> parse_raw_pattern(Scanner& sc) {
  std::vector<RawItem> items;
  sc.consume('(');
  if (sc.try_consume(')')) return items;
  for (;;) {
    sc.skip_ws();
    RawItem item;
    if (sc.pos < sc.text.size() && (std::isdigit(static_cast<unsigned char>(sc.text[sc.pos])))) {
      item.is_atom = true;
      item.atom = sc.integer();
    } else {
      item.var = sc.ident();
    }
    items.push_back(std::move(item));
    if (sc.try_consume(')')) break;
    sc.consume(',');
  }
  return items;
}

// Generators like [(1 2)(3 4), (1 2 3)]; [] is the trivial group.
std::vector<PosPerm> parse_generators(Scanner& sc, int degree) {
  std::vector<PosPerm> gens;
  sc.consume('[');
  if (sc.try_consume(']')) return gens;
  for (;;) {
    PosPerm g = pos_identity(degree);
    bool any_cycle = false;
    while (sc.try_consume('(')) {
      any_cycle = true;
      std::vector<int> cycle;
      for (;;) {
        std::int64_t v = sc.integer();
        if (v < 1 || v > degree) sc.fail("cycle entry outside 1..k");
        cycle.push_back(static_cast<int>(v) - 1);
        sc.skip_ws();
        if (sc.try_consume(')')) break;
      }
      // Apply the cycle on the right of whatever is already parsed.
      PosPerm c = pos_identity(degree);
      for (std::size_t i = 0; i < cycle.size(); ++i)
        c[cycle[i]] = cycle[(i + 1) % cycle.size()];
      g = pos_compose(c, g);
    }
    if (!any_cycle) sc.fail("expected a cycle");
    gens.push_back(std::move(g));
    if (sc.try_consume(']')) break;
    sc.consume(',');
  }
  return gens;
}

struct RawEntryRule {
  int line;
  std::vector<RawItem> row, col;
  std::string coef;
};
struct RawTargetRule {
  int line;
  std::vector<RawItem> row;
  std::string coef;
};

std::vector<PatEntry> build_entries(const std::vector<RawItem>& items,
                                    std::map<std::string, std::int32_t>& vars, int line) {
  std::vector<PatEntry> out;
  for (const RawItem& it : items) {
    if (it.is_atom) {
      if (it.atom < 1) throw ParseError(line, 1, "atoms are positive integers");
      out.push_back(PatEntry::concrete(Atom(it.atom)));
    } else {
      auto [fit, fresh] = vars.emplace(it.var, static_cast<std::int32_t>(vars.size()));
      out.push_back(PatEntry::variable(fit->second));
    }
  }
  return out;
}

}  // namespace

SystemFile parse_system(const std::string& text) {
  SystemFile file;
  std::vector<OrbitDecl> decls;
  std::vector<RawEntryRule> entry_rules;
  std::vector<RawTargetRule> target_rules;
  AtomSet literals;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    Scanner sc{raw, lineno};
    if (sc.done()) continue;
    std::string head = sc.ident();
    if (head == "ring") {
      if (file.ring_declared) sc.fail("duplicate ring directive");
      std::string kind = sc.ident();
      if (kind == "Q")
        file.ring = Ring::rationals();
      else if (kind == "Z")
        file.ring = Ring::integers();
      else if (kind == "Zmod")
        file.ring = Ring::integers_mod(BigInt(sc.integer()));
      else
        sc.fail("unknown ring: " + kind);
      file.ring_declared = true;
    } else if (head == "set") {
      std::string id = sc.ident();
      sc.consume('=');
      if (sc.ident() != "orbit") sc.fail("expected orbit(...)");
      sc.consume('(');
      if (sc.ident() != "k") sc.fail("expected k=<int>");
      sc.consume('=');
      std::int64_t k = sc.integer();
      if (k < 0) sc.fail("arity must be nonnegative");
      sc.consume(',');
      if (sc.ident() != "group") sc.fail("expected group=[...]");
      sc.consume('=');
      std::vector<PosPerm> gens = parse_generators(sc, static_cast<int>(k));
      sc.consume(')');
      for (const OrbitDecl& d : decls)
        if (d.id == id) sc.fail("duplicate set: " + id);
      try {
        decls.push_back(OrbitDecl{id, static_cast<int>(k),
                                  PermGroup::closure(static_cast<int>(k), gens)});
      } catch (const Error& e) {
        sc.fail(e.what());
      }
      file.set_order.push_back(id);
    } else if (head == "rows") {
      if (!file.rows_id.empty()) sc.fail("duplicate rows directive");
      file.rows_id = sc.ident();
    } else if (head == "cols") {
      if (!file.cols_id.empty()) sc.fail("duplicate cols directive");
      file.cols_id = sc.ident();
    } else if (head == "entry") {
      RawEntryRule rule;
      rule.line = lineno;
      if (sc.ident() != "row") sc.fail("expected 'row'");
      rule.row = parse_raw_pattern(sc);
      if (sc.ident() != "col") sc.fail("expected 'col'");
      rule.col = parse_raw_pattern(sc);
      sc.consume('=');
      rule.coef = sc.coefficient();
      if (!sc.done()) sc.fail("trailing input");
      entry_rules.push_back(std::move(rule));
    } else if (head == "target") {
      RawTargetRule rule;
      rule.line = lineno;
      if (sc.ident() != "row") sc.fail("expected 'row'");
      rule.row = parse_raw_pattern(sc);
      sc.consume('=');
      rule.coef = sc.coefficient();
      if (!sc.done()) sc.fail("trailing input");
      target_rules.push_back(std::move(rule));
    } else {
      sc.fail("unknown directive: " + head);
    }
    if (head != "entry" && head != "target" && !sc.done()) sc.fail("trailing input");
  }

  file.sets = OrbitSet(decls);
  if (file.rows_id.empty()) throw ParseError(lineno, 1, "missing rows directive");
  if (file.cols_id.empty()) throw ParseError(lineno, 1, "missing cols directive");
  if (!file.sets.has(file.rows_id)) throw ParseError(lineno, 1, "unknown set: " + file.rows_id);
  if (!file.sets.has(file.cols_id)) throw ParseError(lineno, 1, "unknown set: " + file.cols_id);
  const OrbitDecl row_decl = file.sets.find(file.rows_id);
  const OrbitDecl col_decl = file.sets.find(file.cols_id);
  OrbitSet rows({row_decl});
  OrbitSet cols({col_decl});

  // The declared support: every atom literal in any pattern.
  for (const RawEntryRule& r : entry_rules) {
    for (const RawItem& it : r.row)
      if (it.is_atom && it.atom >= 1) literals.insert(Atom(it.atom));
    for (const RawItem& it : r.col)
      if (it.is_atom && it.atom >= 1) literals.insert(Atom(it.atom));
  }
  for (const RawTargetRule& r : target_rules)
    for (const RawItem& it : r.row)
      if (it.is_atom && it.atom >= 1) literals.insert(Atom(it.atom));

  file.matrix = SymMatrix(rows, cols, literals);
  file.target = SymVector(rows, literals);

  for (const RawEntryRule& r : entry_rules) {
    try {
      std::map<std::string, std::int32_t> vars;  // shared across row and col
      std::vector<PatEntry> row = build_entries(r.row, vars, r.line);
      std::vector<PatEntry> col = build_entries(r.col, vars, r.line);
      ProductPattern pp = canonicalize_product(row_decl, col_decl, row, col);
      file.matrix.set_checked(file.ring, pp, file.ring.from_string(r.coef));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(r.line, 1, e.what());
    }
  }
  for (const RawTargetRule& r : target_rules) {
    try {
      std::map<std::string, std::int32_t> vars;
      Pattern p = canonicalize(row_decl, build_entries(r.row, vars, r.line));
      RingElem val = file.ring.from_string(r.coef);
      RingElem existing = file.target.value_of(p);
      if (!existing.is_zero() && !file.ring.eq(existing, val))
        throw Error("conflicting coefficient for target pattern " + to_string(p));
      file.target.set(p, val);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(r.line, 1, e.what());
    }
  }
  return file;
}

namespace {

std::string var_name(std::int32_t v) {
  static const char* names[] = {"x", "y", "z"};
  if (v < 3) return names[v];
  return "v" + std::to_string(v);
}

std::string print_items(const std::vector<PatEntry>& entries) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) os << ',';
    if (entries[i].is_var())
      os << var_name(entries[i].var);
    else
      os << entries[i].atom.id;
  }
  os << ')';
  return os.str();
}

std::string cycles_of(const PosPerm& g) {
  std::ostringstream os;
  std::vector<bool> seen(g.size(), false);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (seen[i] || g[i] == static_cast<int>(i)) continue;
    os << '(';
    std::size_t j = i;
    bool first = true;
    do {
      seen[j] = true;
      if (!first) os << ' ';
      os << (j + 1);
      first = false;
      j = static_cast<std::size_t>(g[j]);
    } while (j != i);
    os << ')';
  }
  return os.str();
}

}  // namespace

std::string print_system(const SystemFile& f) {
  std::ostringstream os;
  os << "ring " << f.ring.name() << "\n";
  for (const std::string& id : f.set_order) {
    const OrbitDecl& d = f.sets.find(id);
    os << "set " << id << " = orbit(k=" << d.arity << ", group=[";
    bool first = true;
    for (const PosPerm& g : d.group.elements()) {
      if (g == pos_identity(d.arity)) continue;
      if (!first) os << ", ";
      os << cycles_of(g);
      first = false;
    }
    os << "])\n";
  }
  os << "rows " << f.rows_id << "\n";
  os << "cols " << f.cols_id << "\n";
  for (const auto& [pp, coef] : f.matrix.entries())
    os << "entry row " << print_items(pp.row) << " col " << print_items(pp.col) << " = "
       << f.ring.to_string(coef) << "\n";
  for (const auto& [p, coef] : f.target.entries())
    os << "target row " << print_items(p.entries) << " = " << f.ring.to_string(coef) << "\n";
  return os.str();
}

Pattern parse_pattern_literal(const std::string& text, const OrbitDecl& decl) {
  Scanner sc{text, 1};
  std::vector<RawItem> items = parse_raw_pattern(sc);
  std::map<std::string, std::int32_t> vars;
  return canonicalize(decl, build_entries(items, vars, 1));
}

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Ring ring_from_flag(const std::string& flag) {
  if (flag == "Q") return Ring::rationals();
  if (flag == "Z") return Ring::integers();
  if (flag.rfind("Zmod", 0) == 0) {
    std::string m = flag.substr(4);
    if (!m.empty() && m[0] == ':') m = m.substr(1);
    if (m.empty()) throw Error("Zmod ring needs a modulus, e.g. Zmod6");
    return Ring::integers_mod(BigInt(m));
  }
  throw Error("unknown ring: " + flag);
}

json trace_json(const std::vector<StepTrace>& trace) {
  json out = json::array();
  for (const StepTrace& s : trace) {
    json comps = json::array();
    for (const Component& c : s.components) comps.push_back({c.arity, c.width});
    json step{{"arity", s.arity},
              {"components", comps},
              {"reps", s.rep_count},
              {"locally_solvable", s.locally_solvable}};
    if (!s.s.empty()) {
      json sa = json::array();
      for (Atom a : s.s) sa.push_back(a.id);
      step["chosen_S"] = sa;
      step["order_count"] = s.order_count;
    }
    out.push_back(std::move(step));
  }
  return out;
}

json witness_json(const Ring& ring, const std::vector<std::pair<Pattern, RingElem>>& combo) {
  json out = json::array();
  for (const auto& [p, coef] : combo)
    out.push_back({{"tight_orbit", print_items(p.entries)}, {"coef", ring.to_string(coef)}});
  return out;
}

SymVector witness_from_json(const Ring& ring, const SymMatrix& a, const json& arr) {
  const OrbitDecl& decl = a.cols().orbits().front();
  std::vector<std::pair<Pattern, RingElem>> parts;
  AtomSet sx = a.support();
  for (const json& item : arr) {
    Pattern p = parse_pattern_literal(item.at("tight_orbit").get<std::string>(), decl);
    RingElem coef = ring.from_string(item.at("coef").get<std::string>());
    AtomSet conc = pattern_concretes(p);
    sx.insert(conc.begin(), conc.end());
    parts.emplace_back(std::move(p), std::move(coef));
  }
  SymVector x(a.cols(), sx);
  for (const auto& [p, coef] : parts) {
    AtomSet own = a.support();
    AtomSet conc = pattern_concretes(p);
    own.insert(conc.begin(), conc.end());
    for (const Pattern& q : refine_pattern(decl, p, own, sx)) x.accumulate(ring, q, coef);
  }
  return x;
}

json sandwich_json(const Sandwich& s, bool main_answer) {
  json out{{"main", main_answer},
           {"sufficient_yes", s.sufficient_yes},
           {"necessary_yes", s.necessary_yes}};
  if (s.forced) out["forced"] = *s.forced;
  bool consistent = !(main_answer && !s.necessary_yes) && !(!main_answer && s.sufficient_yes);
  if (s.forced) consistent = consistent && *s.forced == main_answer;
  out["consistent"] = consistent;
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"orbitlin: exact solver for orbit-finite systems of linear equations"};
  app.require_subcommand(1);

  std::string system_path, ring_flag, witness_path, set_id, vector_path;
  bool emit_witness = false, emit_trace = false;
  int oracle_pool = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("file", system_path, "system description file")->required();
    cmd->add_option("--ring", ring_flag, "override the ring (Q, Z, Zmod<m>)");
    cmd->add_flag("--witness", emit_witness, "include the witness in the output");
    cmd->add_flag("--trace", emit_trace, "emit the reduction chain");
    cmd->add_option("--oracle-pool", oracle_pool, "atom pool size for oracle checks");
  };

  CLI::App* cmd_solve = app.add_subcommand("solve", "decide general solvability");
  add_common(cmd_solve);
  CLI::App* cmd_fin = app.add_subcommand("finsolve", "decide finitary solvability");
  add_common(cmd_fin);
  CLI::App* cmd_verify = app.add_subcommand("verify", "check a witness against the system");
  add_common(cmd_verify);
  cmd_verify->add_option("witness-file", witness_path, "witness JSON file")->required();
  CLI::App* cmd_basis = app.add_subcommand("basis", "list tight-orbit families of a set");
  add_common(cmd_basis);
  cmd_basis->add_option("set", set_id, "set identifier")->required();
  cmd_basis->add_option("--vector", vector_path, "vector file to decompose");
  CLI::App* cmd_check = app.add_subcommand("check", "compare the solver with the oracle sandwich");
  add_common(cmd_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    SystemFile file = parse_system(read_file(system_path));
    Ring ring = ring_flag.empty() ? file.ring : ring_from_flag(ring_flag);
    json out;

    if (app.got_subcommand(cmd_solve)) {
      SolveResult r = solve(ring, file.matrix, file.target);
      out = {{"mode", "solve"}, {"solvable", r.solvable}};
      if (r.solvable && emit_witness) out["witness"] = witness_json(ring, r.combo);
      if (emit_trace) out["trace"] = trace_json(r.trace);
    } else if (app.got_subcommand(cmd_fin)) {
      FinSolveResult r = finsolve(ring, file.matrix, file.target);
      out = {{"mode", "finsolve"}, {"solvable", r.solvable}};
      if (r.solvable && emit_witness && r.witness) {
        std::vector<std::pair<Pattern, RingElem>> combo;
        for (const auto& [e, coef] : r.witness->entries())
          combo.emplace_back(element_as_pattern(e), coef);
        out["witness"] = witness_json(ring, combo);
      }
      if (emit_trace) out["trace"] = trace_json(r.trace);
    } else if (app.got_subcommand(cmd_verify)) {
      json warr = json::parse(read_file(witness_path));
      if (warr.contains("witness")) warr = warr.at("witness");
      SymVector x = witness_from_json(ring, file.matrix, warr);
      bool ok = verify(ring, file.matrix, x, file.target);
      out = {{"mode", "verify"}, {"verified", ok}};
    } else if (app.got_subcommand(cmd_basis)) {
      if (!file.sets.has(set_id)) throw Error("unknown set: " + set_id);
      const OrbitDecl& decl = file.sets.find(set_id);
      TightFamilySet fams = tight_families(decl);
      json farr = json::array();
      for (std::size_t i = 0; i < fams.info.size(); ++i) {
        const TightFamily& f = fams.info[i];
        std::vector<PatEntry> marked = f.base.entries;  // show the family shape
        farr.push_back({{"id", f.decl.id},
                        {"arity", f.decl.arity},
                        {"group_size", f.decl.group.size()},
                        {"pattern", print_items(marked)},
                        {"concrete_vars", f.var_subset}});
      }
      out = {{"mode", "basis"}, {"set", set_id}, {"families", farr}};
      if (!vector_path.empty()) {
        // Vector file: lines "row <pat> = <coef>", over the chosen set.
        OrbitSet dom({decl});
        AtomSet lits;
        std::vector<std::pair<Pattern, RingElem>> vals;
        std::istringstream in(read_file(vector_path));
        std::string lineText;
        int lineno = 0;
        std::vector<std::pair<std::vector<RawItem>, std::string>> rows;
        while (std::getline(in, lineText)) {
          ++lineno;
          Scanner sc{lineText, lineno};
          if (sc.done()) continue;
          if (sc.ident() != "row") sc.fail("expected 'row'");
          std::vector<RawItem> items = parse_raw_pattern(sc);
          sc.consume('=');
          std::string coef = sc.coefficient();
          for (const RawItem& it : items)
            if (it.is_atom) lits.insert(Atom(it.atom));
          rows.emplace_back(std::move(items), std::move(coef));
        }
        SymVector v(dom, lits);
        for (auto& [items, coef] : rows) {
          std::map<std::string, std::int32_t> vars;
          v.accumulate(ring, canonicalize(decl, build_entries(items, vars, 0)),
                       ring.from_string(coef));
        }
        BasisCoords bc = decompose(ring, v);
        json darr = json::array();
        for (const auto& [e, coef] : bc.coords.entries()) {
          const TightFamily& fam = bc.basis.family(e.orbit_id);
          TightOrbit t = tight_orbit_of(decl, fam, e);
          darr.push_back({{"tight_orbit", print_items(t.pattern.entries)},
                          {"coef", ring.to_string(coef)}});
        }
        out["decomposition"] = darr;
      }
    } else if (app.got_subcommand(cmd_check)) {
      int pool = oracle_pool > 0 ? oracle_pool : default_pool_size(file.matrix, file.target);
      out = {{"mode", "check"}, {"oracle_pool", pool}};
      {
        SolveResult r = solve(ring, file.matrix, file.target);
        Sandwich s = run_sandwich(ring, file.matrix, file.target, SolveMode::General, pool);
        out["solve"] = sandwich_json(s, r.solvable);
      }
      {
        FinSolveResult r = finsolve(ring, file.matrix, file.target);
        Sandwich s = run_sandwich(ring, file.matrix, file.target, SolveMode::Finitary, pool);
        out["finsolve"] = sandwich_json(s, r.solvable);
      }
      bool consistent = out["solve"]["consistent"].get<bool>() &&
                        out["finsolve"]["consistent"].get<bool>();
      out["consistent"] = consistent;
      if (!consistent) {
        std::cout << out.dump(2) << std::endl;
        return 2;
      }
    }

    std::cout << out.dump(2) << std::endl;
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << std::endl;
    return 1;
  } catch (const InternalError& e) {
    std::cerr << "internal verification failure: " << e.what() << std::endl;
    return 2;
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << std::endl;
    return 1;
  }
}

}  // namespace ofl
