#include "fixedprice/tree_diagram.hpp"

#include "fixedprice/errors.hpp"

namespace fixedprice {

TreeDiagram::TreeDiagram(const ListDistribution& dist) : item_count_(dist.item_count) {
  nodes_.push_back(TreeNode{{}, Rational(0), Rational(1), Rational(0), -1, {}});
  index_[Prefix{}] = 0;
  for (const auto& e : dist.entries) {
    int cur = 0;
    nodes_[0].prob += e.prob;
    Prefix prefix;
    for (Item j : e.list) {
      prefix.push_back(j);
      auto it = index_.find(prefix);
      int next;
      if (it == index_.end()) {
        next = static_cast<int>(nodes_.size());
        nodes_.push_back(TreeNode{prefix, Rational(0), Rational(0), Rational(0), cur, {}});
        nodes_[static_cast<std::size_t>(cur)].children.push_back(next);
        index_.emplace(prefix, next);
      } else {
        next = it->second;
      }
      nodes_[static_cast<std::size_t>(next)].prob += e.prob;
      cur = next;
    }
    nodes_[static_cast<std::size_t>(cur)].end_prob += e.prob;
  }
  for (auto& node : nodes_) {
    if (node.parent < 0) continue;
    node.q = node.prob / nodes_[static_cast<std::size_t>(node.parent)].prob;
  }
}

std::optional<int> TreeDiagram::find(const Prefix& prefix) const {
  auto it = index_.find(prefix);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Rational TreeDiagram::prob(const Prefix& prefix) const {
  auto id = find(prefix);
  return id ? node(*id).prob : Rational(0);
}

const Rational& TreeDiagram::q(const Prefix& prefix) const {
  auto id = find(prefix);
  if (!id) throw InvalidInput("prefix is not realizable");
  return node(*id).q;
}

std::vector<int> TreeDiagram::realizable_prefixes() const {
  std::vector<int> out;
  for (std::size_t i = 1; i < nodes_.size(); ++i) out.push_back(static_cast<int>(i));
  return out;
}

TreeDiagram build_tree_diagram(const ListDistribution& dist) { return TreeDiagram(dist); }

}  // namespace fixedprice
