#pragma once

#include <map>
#include <optional>
#include <vector>

#include "fixedprice/core_model.hpp"

namespace fixedprice {

struct TreeNode {
  Prefix prefix;
  Rational prob;      // probability the list starts with prefix
  Rational q;         // prob / prob(parent); 1 at the root
  Rational end_prob;  // probability the list equals prefix exactly
  int parent = -1;
  std::vector<int> children;
};

// Prefix tree of a list distribution. Node 0 is the empty prefix.
class TreeDiagram {
 public:
  explicit TreeDiagram(const ListDistribution& dist);

  int item_count() const { return item_count_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  std::optional<int> find(const Prefix& prefix) const;

  // Zero for prefixes that are not realizable.
  Rational prob(const Prefix& prefix) const;
  // Throws InvalidInput for unrealizable prefixes.
  const Rational& q(const Prefix& prefix) const;

  // Ids of all nodes except the root, parents before children.
  std::vector<int> realizable_prefixes() const;

 private:
  int item_count_ = 0;
  std::vector<TreeNode> nodes_;
  std::map<Prefix, int> index_;
};

TreeDiagram build_tree_diagram(const ListDistribution& dist);

}  // namespace fixedprice
