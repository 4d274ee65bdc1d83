#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "superfractal/rng.hpp"

namespace superfractal {

// Code trees, groves, function trees and dependence trees.
//
// Every tree is a complete M-ary tree truncated at a finite depth k, stored
// in level order: node 0 is the root and the children of node i are
// i*M + 1, ..., i*M + M. All labels are 0-based in memory (IFS indices in
// {0..N-1}, screen indices in {0..V-1}); the text formats write them 1-based.

using Label = std::uint32_t;

/// Number of nodes on levels 0..depth of a complete `arity`-ary tree.
std::size_t tree_size(std::size_t arity, std::size_t depth);
/// Index of the first node on `level`.
std::size_t level_offset(std::size_t arity, std::size_t level);
/// arity^level.
std::size_t level_width(std::size_t arity, std::size_t level);

/// A code tree truncated at depth k: one IFS label per node on levels 0..k.
class CodeTree {
 public:
  CodeTree(std::size_t arity, std::size_t depth, std::vector<Label> labels);
  static CodeTree constant(std::size_t arity, std::size_t depth, Label label);

  std::size_t arity() const { return arity_; }
  std::size_t depth() const { return depth_; }
  std::size_t size() const { return labels_.size(); }
  Label label(std::size_t node) const { return labels_[node]; }
  Label root() const { return labels_.front(); }
  std::span<const Label> labels() const { return labels_; }
  /// Labels of one level, left to right.
  std::span<const Label> level(std::size_t level) const;
  /// Label at the node reached by a path of 0-based branch digits.
  Label at(std::span<const std::uint32_t> path) const;

  std::size_t child(std::size_t node, std::size_t m) const { return node * arity_ + 1 + m; }
  /// Subtree rooted at a node, keeping all levels below it.
  CodeTree subtree(std::size_t node) const;
  /// Keeps levels 0..depth.
  CodeTree truncated(std::size_t depth) const;
  /// Largest label plus one.
  Label label_bound() const;

  friend bool operator==(const CodeTree&, const CodeTree&) = default;

 private:
  std::size_t arity_;
  std::size_t depth_;
  std::vector<Label> labels_;
};

/// A V-tuple of code trees with a common shape.
class Grove {
 public:
  explicit Grove(std::vector<CodeTree> trees);
  static Grove constant(std::size_t screens, std::size_t arity, std::size_t depth, Label label);

  std::size_t screens() const { return trees_.size(); }
  std::size_t arity() const { return trees_.front().arity(); }
  std::size_t depth() const { return trees_.front().depth(); }
  const CodeTree& operator[](std::size_t v) const { return trees_[v]; }
  std::span<const CodeTree> trees() const { return trees_; }
  Grove truncated(std::size_t depth) const;

  friend bool operator==(const Grove&, const Grove&) = default;

 private:
  std::vector<CodeTree> trees_;
};

/// One index a = (a_1, ..., a_V) with a_v = (n_v; v_{v,1}, ..., v_{v,M}):
/// screen v is built by IFS n_v from input screens v_{v,1}..v_{v,M}.
class IndexA {
 public:
  IndexA(std::size_t screens, std::size_t arity, std::vector<Label> ifs, std::vector<Label> links);

  struct Row {
    Label ifs;
    std::vector<Label> links;
  };
  /// Builds an index from 1-based rows, as written in the literature.
  static IndexA from_one_based(const std::vector<Row>& rows);

  std::size_t screens() const { return ifs_.size(); }
  std::size_t arity() const { return arity_; }
  Label ifs(std::size_t v) const { return ifs_[v]; }
  Label link(std::size_t v, std::size_t m) const { return links_[v * arity_ + m]; }
  std::span<const Label> links(std::size_t v) const { return {links_.data() + v * arity_, arity_}; }

  friend bool operator==(const IndexA&, const IndexA&) = default;

 private:
  std::size_t arity_;
  std::vector<Label> ifs_;
  std::vector<Label> links_;
};

/// A level-k function tree: IFS labels on the nodes of levels 0..k-1 and
/// screen labels on the limbs of levels 0..k. Limb 0 is the trunk and
/// carries the component index; limb i (i > 0) is the edge into node i.
class FunctionTree {
 public:
  FunctionTree(std::size_t arity, std::size_t level, std::vector<Label> nodes, std::vector<Label> limbs);

  std::size_t arity() const { return arity_; }
  std::size_t level() const { return level_; }
  Label node(std::size_t i) const { return nodes_[i]; }
  Label limb(std::size_t i) const { return limbs_[i]; }
  Label trunk() const { return limbs_.front(); }
  std::span<const Label> nodes() const { return nodes_; }
  std::span<const Label> limbs() const { return limbs_; }

  friend bool operator==(const FunctionTree&, const FunctionTree&) = default;

 private:
  std::size_t arity_;
  std::size_t level_;
  std::vector<Label> nodes_;
  std::vector<Label> limbs_;
};

/// A V-tuple of level-k function trees whose trunks are labelled 0..V-1.
class FunctionGrove {
 public:
  explicit FunctionGrove(std::vector<FunctionTree> trees);
  /// The level-1 grove representing eta^a.
  static FunctionGrove from_index(const IndexA& a);

  std::size_t screens() const { return trees_.size(); }
  std::size_t arity() const { return trees_.front().arity(); }
  std::size_t level() const { return trees_.front().level(); }
  const FunctionTree& operator[](std::size_t v) const { return trees_[v]; }

  friend bool operator==(const FunctionGrove&, const FunctionGrove&) = default;

 private:
  std::vector<FunctionTree> trees_;
};

/// Dependence tree: a screen label K(i) on every node, K(root) = 0.
class DependenceTree {
 public:
  explicit DependenceTree(CodeTree labels);

  std::size_t arity() const { return labels_.arity(); }
  std::size_t depth() const { return labels_.depth(); }
  Label label(std::size_t node) const { return labels_.label(node); }
  std::span<const Label> level(std::size_t level) const { return labels_.level(level); }
  const CodeTree& tree() const { return labels_; }

 private:
  CodeTree labels_;
};

/// xi_n(children): root labelled n, m-th principal subtree = children[m].
CodeTree xi(Label n, std::span<const CodeTree> children);

/// eta^a(g)_v = xi_{n_v}(g[v_{v,1}], ..., g[v_{v,M}]).
Grove eta(const IndexA& a, const Grove& g);

/// Composition of function groves (level |g| + |h|).
FunctionGrove compose(const FunctionGrove& g, const FunctionGrove& h);

/// eta^g(grove): nodes above level |g| from g, then the grove components
/// selected by the limbs on level |g|.
Grove eta_of_function_tree(const FunctionGrove& g, const Grove& grove);

/// Samples a with n_v ~ P and v_{v,m} uniform on the screens, all independent.
/// Draw order: for each v, n_v then v_{v,1..M}.
IndexA sample_index(std::span<const double> ifs_probs, std::size_t screens, std::size_t arity, Rng& rng);
IndexA sample_index(const Categorical& ifs_sampler, std::size_t screens, std::size_t arity, Rng& rng);

/// Depth-k dependence tree: K(root) = 0 and K(i m) = indices[|i|].link(K(i), m).
DependenceTree dependence_tree(std::span<const IndexA> indices, std::size_t depth);

/// Node labels read through a dependence tree: I_i = indices[|i|].ifs(K(i)).
/// Requires one more index than the dependence tree depth.
CodeTree read_nodes(const DependenceTree& d, std::span<const IndexA> indices);

/// True when the labels on every level are pairwise distinct.
bool is_free(const DependenceTree& d);

/// rho([tau]): product of P over every node label, root included.
double rho_cylinder(const CodeTree& tau, std::span<const double> ifs_probs);

/// One draw of the random tree {I_i} of depth k under the V-screen construction.
CodeTree sample_v_tree(const Categorical& ifs_sampler, std::size_t screens, std::size_t arity,
                       std::size_t depth, Rng& rng);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Frequency with which sample_v_tree matches tau; binomial standard error.
MonteCarloEstimate rho_v_cylinder_mc(const CodeTree& tau, std::size_t screens, std::span<const double> ifs_probs,
                                     std::size_t samples, std::uint64_t seed);

/// Empirical law of the depth-k random tree over all N^{tree_size} cylinders;
/// entry c counts trees whose labels, read as base-N digits in level order
/// (root most significant), equal c.
std::vector<std::uint64_t> v_tree_histogram(std::size_t screens, std::size_t arity, std::size_t depth,
                                            std::span<const double> ifs_probs, std::size_t samples,
                                            std::uint64_t seed);
/// Code tree for cylinder number c (inverse of the histogram encoding).
CodeTree cylinder_tree(std::size_t arity, std::size_t depth, std::size_t n_labels, std::uint64_t c);

/// Empirical probability that a random dependence tree is free up to depth k.
MonteCarloEstimate free_probability_mc(std::size_t screens, std::size_t arity, std::size_t depth,
                                       std::size_t samples, std::uint64_t seed);

/// Upper bound 2 M^{2k} / (3V) on |rho_V([tau]) - rho([tau])| and on Pr(not free).
double cylinder_bound(std::size_t arity, std::size_t depth, std::size_t screens);

/// Distinct labelled subtrees rooted at `level` across all components.
std::size_t count_distinct_subtrees(const Grove& g, std::size_t level);
std::size_t count_distinct_subtrees(const CodeTree& t, std::size_t level);

/// Level-order text form "M k : l0 ; l1,1 ... l1,M ; ...", labels 1-based.
std::string to_text(const CodeTree& t);
CodeTree code_tree_from_text(const std::string& text);

}  // namespace superfractal
