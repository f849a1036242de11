#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gpg {

// Number of nodes in a perfect r-ary tree of height h: sum_{i=0}^{h} r^i.
inline int template_size(int height, int arity) {
  if (height < 0 || arity < 1) throw std::invalid_argument("template_size: h >= 0 and r >= 1 required");
  long long total = 0;
  long long level = 1;
  for (int i = 0; i <= height; ++i) {
    total += level;
    level *= arity;
    if (total > (1LL << 30)) throw std::invalid_argument("template_size: tree too large");
  }
  return static_cast<int>(total);
}

// Pre-order index arithmetic for a perfect r-ary tree. All genotypes of a
// run share one template; positions are 0-based pre-order indices.
class TreeTemplate {
 public:
  TreeTemplate(int height, int arity) : height_(height), arity_(arity) {
    size_ = template_size(height, arity);
    // span_by_depth[d] = node count of a subtree rooted at depth d
    span_by_depth_.resize(height + 1);
    for (int d = 0; d <= height; ++d) span_by_depth_[d] = template_size(height - d, arity);
    depth_.assign(size_, 0);
    parent_.assign(size_, -1);
    fill_depths(0, 0);
  }

  int height() const { return height_; }
  int arity() const { return arity_; }
  int size() const { return size_; }
  int depth(int pos) const { return depth_[pos]; }
  int parent(int pos) const { return parent_[pos]; }

  // k-th child (0-based) of the node at pre-order position pos.
  int child(int pos, int k) const {
    int child_span = span_by_depth_[depth_[pos] + 1];
    return pos + 1 + k * child_span;
  }

  bool is_max_depth(int pos) const { return depth_[pos] == height_; }

 private:
  void fill_depths(int pos, int d) {
    depth_[pos] = d;
    if (d == height_) return;
    for (int k = 0; k < arity_; ++k) {
      int c = child(pos, k);
      parent_[c] = pos;
      fill_depths(c, d + 1);
    }
  }

  int height_;
  int arity_;
  int size_;
  std::vector<int> span_by_depth_;
  std::vector<int> depth_;
  std::vector<int> parent_;
};

}  // namespace gpg
