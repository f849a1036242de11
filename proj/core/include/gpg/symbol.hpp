#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpg {

enum class SymbolKind : std::uint8_t { Function, Feature, Constant };

// Built-in operator ids. Add/Sub/Mul/Aq is the default regression set;
// Aq is the analytic quotient x1 / sqrt(1 + x2^2), continuous at zero
// denominator. Exp is available for configurations with unary functions.
enum Op : std::uint16_t { OpAdd = 0, OpSub = 1, OpMul = 2, OpAq = 3, OpExp = 4 };

struct Symbol {
  SymbolKind kind = SymbolKind::Feature;
  std::uint16_t id = 0;  // operator id (Function) or feature index (Feature)
  double value = 0.0;    // constant payload (Constant)

  static Symbol function(std::uint16_t op) { return {SymbolKind::Function, op, 0.0}; }
  static Symbol feature(std::uint16_t index) { return {SymbolKind::Feature, index, 0.0}; }
  static Symbol constant(double v) { return {SymbolKind::Constant, 0, v}; }

  // Representation equality; constants compare by bit pattern.
  friend bool operator==(const Symbol& a, const Symbol& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == SymbolKind::Constant)
      return std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(b.value);
    return a.id == b.id;
  }
};

struct FunctionDef {
  std::uint16_t op;
  int arity;
  std::string name;
};

struct ErcDescriptor {
  double lo = 0.0;
  double hi = 0.0;
};

// The instruction set a run draws from: function symbols, one terminal per
// dataset feature, and optionally an ephemeral random constant. The template
// arity r is the maximum function arity.
struct SymbolSet {
  std::vector<FunctionDef> functions;
  int num_features = 0;
  std::optional<ErcDescriptor> erc;

  int arity() const {
    int r = 1;
    for (const auto& f : functions) r = std::max(r, f.arity);
    return r;
  }

  int function_arity(std::uint16_t op) const {
    for (const auto& f : functions)
      if (f.op == op) return f.arity;
    throw std::invalid_argument("unknown operator id " + std::to_string(op));
  }

  const std::string& function_name(std::uint16_t op) const {
    for (const auto& f : functions)
      if (f.op == op) return f.name;
    throw std::invalid_argument("unknown operator id " + std::to_string(op));
  }
};

// {+, -, *, aq} over the given number of features.
inline SymbolSet default_symbol_set(int num_features, std::optional<ErcDescriptor> erc = {}) {
  SymbolSet s;
  s.functions = {{OpAdd, 2, "+"}, {OpSub, 2, "-"}, {OpMul, 2, "*"}, {OpAq, 2, "aq"}};
  s.num_features = num_features;
  s.erc = erc;
  return s;
}

}  // namespace gpg
