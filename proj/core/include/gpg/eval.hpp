#pragma once

#include <span>
#include <string>
#include <vector>

#include "gpg/genotype.hpp"
#include "gpg/symbol.hpp"
#include "gpg/tree_template.hpp"

namespace gpg {

// Column-major feature matrix; column j is contiguous.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double* col(int j) { return data.data() + static_cast<std::size_t>(j) * rows; }
  const double* col(int j) const { return data.data() + static_cast<std::size_t>(j) * rows; }
  double& at(int i, int j) { return data[static_cast<std::size_t>(j) * rows + i]; }
  double at(int i, int j) const { return data[static_cast<std::size_t>(j) * rows + i]; }
};

inline double apply_aq(double x1, double x2) { return x1 / std::sqrt(1.0 + x2 * x2); }

// Variable-shape expression tree: functions own exactly arity children.
// This is both the GP-Trad genotype and the exported form of a template
// tree's active part.
struct ExprNode {
  Symbol sym;
  std::vector<ExprNode> children;

  static ExprNode terminal(Symbol s) { return {s, {}}; }
};

int expr_node_count(const ExprNode& node);
int expr_height(const ExprNode& node);
bool expr_equal(const ExprNode& a, const ExprNode& b);

// Active subtree of a template genotype as an expression tree.
ExprNode extract_expr(const TreeTemplate& tpl, const GenotypeTree& tree, const SymbolSet& sets);

// Parenthesized infix form of the active part. Binary operators print
// infix ("(x0 + x1)", "(x0 aq x1)"); other arities print name(arg, ...).
// Constants print with round-trip precision.
std::string to_infix(const ExprNode& node, const SymbolSet& sets);
std::string to_infix(const TreeTemplate& tpl, const GenotypeTree& tree, const SymbolSet& sets);

std::string format_double(double v);  // shortest round-trip decimal form

// Evaluates template genotypes over all rows of a feature matrix.
// Holds scratch buffers, so one instance per thread; reentrant otherwise.
class Evaluator {
 public:
  explicit Evaluator(const TreeTemplate& tpl) : tpl_(&tpl) {}

  // out must have matrix.rows entries. Non-finite values propagate into
  // the output; the fitness layer maps them to the worst-fitness sentinel.
  void evaluate(const GenotypeTree& tree, const SymbolSet& sets, const Matrix& features,
                std::span<double> out);

 private:
  double* scratch(int level, int slot, int rows);

  const TreeTemplate* tpl_;
  std::vector<std::vector<double>> buffers_;
};

// Convenience single-shot evaluation.
std::vector<double> evaluate(const TreeTemplate& tpl, const GenotypeTree& tree,
                             const SymbolSet& sets, const Matrix& features);

// Expression-tree evaluation (arbitrary shape, recursion with per-depth
// scratch rows managed internally).
class ExprEvaluator {
 public:
  void evaluate(const ExprNode& node, const Matrix& features, std::span<double> out);

 private:
  const double* eval_node(const ExprNode& node, const Matrix& features, int level, int slot,
                          double* dest);

  std::vector<std::vector<double>> buffers_;
};

std::vector<double> evaluate(const ExprNode& node, const Matrix& features);

}  // namespace gpg
