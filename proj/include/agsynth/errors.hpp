#pragma once

#include <stdexcept>
#include <string>

namespace agsynth {

// Syntax errors carry a 1-based position into the offending text.
class parse_error : public std::runtime_error {
public:
  parse_error(std::string msg, int line, int col)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg),
        line(line), col(col) {}
  int line;
  int col;
};

// Well-formedness violations after parsing (duplicate names, bad observation
// lists, missing initial values, ...).
class semantic_error : public std::runtime_error {
public:
  explicit semantic_error(const std::string& msg)
      : std::runtime_error("semantic error: " + msg) {}
};

// A configured resource budget (automaton states, grounding bits,
// enumeration bits) was exceeded.
class budget_error : public std::runtime_error {
public:
  explicit budget_error(const std::string& msg)
      : std::runtime_error("budget exceeded: " + msg) {}
};

class solver_error : public std::runtime_error {
public:
  explicit solver_error(const std::string& msg)
      : std::runtime_error("solver error: " + msg) {}
};

class extraction_error : public std::runtime_error {
public:
  explicit extraction_error(const std::string& msg)
      : std::runtime_error("model extraction error: " + msg) {}
};

// Raised when a solver model fails post-hoc verification; indicates a bug in
// the encoder or checker rather than in the input problem.
class internal_error : public std::logic_error {
public:
  explicit internal_error(const std::string& msg)
      : std::logic_error("internal error: " + msg) {}
};

}  // namespace agsynth
