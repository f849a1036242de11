#include "gpg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace gpg {

namespace {

void apply_binary(std::uint16_t op, const double* a, const double* b, double* out, int n) {
  switch (op) {
    case OpAdd:
      for (int i = 0; i < n; ++i) out[i] = a[i] + b[i];
      break;
    case OpSub:
      for (int i = 0; i < n; ++i) out[i] = a[i] - b[i];
      break;
    case OpMul:
      for (int i = 0; i < n; ++i) out[i] = a[i] * b[i];
      break;
    case OpAq:
      for (int i = 0; i < n; ++i) out[i] = a[i] / std::sqrt(1.0 + b[i] * b[i]);
      break;
    default:
      throw std::invalid_argument("not a binary operator: " + std::to_string(op));
  }
}

void apply_unary(std::uint16_t op, const double* a, double* out, int n) {
  switch (op) {
    case OpExp:
      for (int i = 0; i < n; ++i) out[i] = std::exp(a[i]);
      break;
    default:
      throw std::invalid_argument("not a unary operator: " + std::to_string(op));
  }
}

}  // namespace

int expr_node_count(const ExprNode& node) {
  int n = 1;
  for (const auto& c : node.children) n += expr_node_count(c);
  return n;
}

int expr_height(const ExprNode& node) {
  int h = 0;
  for (const auto& c : node.children) h = std::max(h, 1 + expr_height(c));
  return h;
}

bool expr_equal(const ExprNode& a, const ExprNode& b) {
  if (!(a.sym == b.sym) || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!expr_equal(a.children[i], b.children[i])) return false;
  return true;
}

namespace {

ExprNode extract_rec(const TreeTemplate& tpl, const GenotypeTree& tree, const SymbolSet& sets,
                     int pos) {
  ExprNode node{tree.symbols[pos], {}};
  if (node.sym.kind == SymbolKind::Function) {
    int arity = sets.function_arity(node.sym.id);
    node.children.reserve(arity);
    for (int k = 0; k < arity; ++k)
      node.children.push_back(extract_rec(tpl, tree, sets, tpl.child(pos, k)));
  }
  return node;
}

}  // namespace

ExprNode extract_expr(const TreeTemplate& tpl, const GenotypeTree& tree, const SymbolSet& sets) {
  return extract_rec(tpl, tree, sets, 0);
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string to_infix(const ExprNode& node, const SymbolSet& sets) {
  switch (node.sym.kind) {
    case SymbolKind::Feature:
      return "x" + std::to_string(node.sym.id);
    case SymbolKind::Constant:
      return format_double(node.sym.value);
    case SymbolKind::Function:
      break;
  }
  const std::string& name = sets.function_name(node.sym.id);
  if (node.children.size() == 2)
    return "(" + to_infix(node.children[0], sets) + " " + name + " " +
           to_infix(node.children[1], sets) + ")";
  std::string s = name + "(";
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (i > 0) s += ", ";
    s += to_infix(node.children[i], sets);
  }
  return s + ")";
}

std::string to_infix(const TreeTemplate& tpl, const GenotypeTree& tree, const SymbolSet& sets) {
  return to_infix(extract_expr(tpl, tree, sets), sets);
}

double* Evaluator::scratch(int level, int slot, int rows) {
  std::size_t idx = static_cast<std::size_t>(level) * tpl_->arity() + slot;
  if (buffers_.size() <= idx) buffers_.resize(idx + 1);
  if (static_cast<int>(buffers_[idx].size()) < rows) buffers_[idx].resize(rows);
  return buffers_[idx].data();
}

void Evaluator::evaluate(const GenotypeTree& tree, const SymbolSet& sets, const Matrix& features,
                         std::span<double> out) {
  // Feature leaves hand their column straight to the parent operator; only
  // function results and constants land in scratch rows.
  struct Walker {
    Evaluator& ev;
    const GenotypeTree& tree;
    const SymbolSet& sets;
    const Matrix& x;

    const double* eval(int pos, int level, int slot, double* dest) {
      const Symbol& sym = tree.symbols[pos];
      if (sym.kind == SymbolKind::Feature) return x.col(sym.id);
      double* target = dest ? dest : ev.scratch(level, slot, x.rows);
      if (sym.kind == SymbolKind::Constant) {
        for (int i = 0; i < x.rows; ++i) target[i] = sym.value;
        return target;
      }
      int arity = sets.function_arity(sym.id);
      if (arity == 1) {
        const double* a = eval(ev.tpl_->child(pos, 0), level + 1, 0, nullptr);
        apply_unary(sym.id, a, target, x.rows);
      } else if (arity == 2) {
        const double* a = eval(ev.tpl_->child(pos, 0), level + 1, 0, nullptr);
        const double* b = eval(ev.tpl_->child(pos, 1), level + 1, 1, nullptr);
        apply_binary(sym.id, a, b, target, x.rows);
      } else {
        throw std::invalid_argument("unsupported arity");
      }
      return target;
    }
  };
  const double* result = Walker{*this, tree, sets, features}.eval(0, 0, 0, out.data());
  if (result != out.data())
    std::memcpy(out.data(), result, static_cast<std::size_t>(features.rows) * sizeof(double));
}

std::vector<double> evaluate(const TreeTemplate& tpl, const GenotypeTree& tree,
                             const SymbolSet& sets, const Matrix& features) {
  Evaluator ev(tpl);
  std::vector<double> out(features.rows);
  ev.evaluate(tree, sets, features, out);
  return out;
}

const double* ExprEvaluator::eval_node(const ExprNode& node, const Matrix& x, int level, int slot,
                                       double* dest) {
  if (node.sym.kind == SymbolKind::Feature) return x.col(node.sym.id);

  // Two scratch slots per recursion level cover any binary/unary operator.
  std::size_t idx = static_cast<std::size_t>(level) * 2 + slot;
  double* target = dest;
  if (!target) {
    if (buffers_.size() <= idx) buffers_.resize(idx + 1);
    if (static_cast<int>(buffers_[idx].size()) < x.rows) buffers_[idx].resize(x.rows);
    target = buffers_[idx].data();
  }

  if (node.sym.kind == SymbolKind::Constant) {
    for (int i = 0; i < x.rows; ++i) target[i] = node.sym.value;
    return target;
  }
  if (node.children.size() == 1) {
    const double* a = eval_node(node.children[0], x, level + 1, 0, nullptr);
    apply_unary(node.sym.id, a, target, x.rows);
  } else if (node.children.size() == 2) {
    const double* a = eval_node(node.children[0], x, level + 1, 0, nullptr);
    const double* b = eval_node(node.children[1], x, level + 1, 1, nullptr);
    apply_binary(node.sym.id, a, b, target, x.rows);
  } else {
    throw std::invalid_argument("unsupported arity");
  }
  return target;
}

void ExprEvaluator::evaluate(const ExprNode& node, const Matrix& features, std::span<double> out) {
  const double* result = eval_node(node, features, 0, 0, out.data());
  if (result != out.data())
    std::memcpy(out.data(), result, static_cast<std::size_t>(features.rows) * sizeof(double));
}

std::vector<double> evaluate(const ExprNode& node, const Matrix& features) {
  ExprEvaluator ev;
  std::vector<double> out(features.rows);
  ev.evaluate(node, features, out);
  return out;
}

}  // namespace gpg
