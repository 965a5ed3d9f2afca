#pragma once

#include "orbitlin/oracle.hpp"

namespace ofl {

struct ParseError : std::runtime_error {
  int line = 0;
  int column = 0;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " +
                           msg),
        line(l),
        column(c) {}
};

/// A parsed system description: ring directive, orbit declarations, row and
/// column sets, matrix entry rules, and target rules.
struct SystemFile {
  Ring ring = Ring::rationals();
  bool ring_declared = false;
  std::vector<std::string> set_order;  // declaration order, for printing
  OrbitSet sets;
  std::string rows_id, cols_id;
  SymMatrix matrix;
  SymVector target;
};

SystemFile parse_system(const std::string& text);
std::string print_system(const SystemFile& f);

/// Pattern literal such as "(1,x)": integers are atoms, identifiers are
/// variables numbered by first occurrence.
Pattern parse_pattern_literal(const std::string& text, const OrbitDecl& decl);

/// Command dispatch; returns the process exit code (0 answered, 1 input
/// error, 2 internal verification failure).
int run_cli(int argc, const char* const* argv);

}  // namespace ofl
