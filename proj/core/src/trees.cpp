#include "superfractal/trees.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "superfractal/parallel.hpp"

namespace superfractal {

namespace {

constexpr std::size_t kMonteCarloShard = std::size_t{1} << 16;

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::size_t(-1) / a) throw std::overflow_error("tree too large");
  return a * b;
}

struct SubtreeHash {
  std::size_t operator()(const std::vector<Label>& v) const noexcept {
    // FNV-1a over the label words.
    std::uint64_t h = 1469598103934665603ULL;
    for (Label x : v) {
      h ^= x;
      h *= 1099511628211ULL;
    }
    return std::size_t(h ^ (h >> 32));
  }
};

// Appends the labels of the subtree of `t` rooted at `node` (on `level`) to `out`.
void append_subtree(const CodeTree& t, std::size_t level, std::size_t node, std::vector<Label>& out) {
  const std::size_t m = t.arity();
  const std::size_t pos = node - level_offset(m, level);
  std::size_t width = 1;
  for (std::size_t l = level; l <= t.depth(); ++l) {
    const auto row = t.level(l);
    const auto first = row.begin() + std::ptrdiff_t(pos * width);
    out.insert(out.end(), first, first + std::ptrdiff_t(width));
    width *= m;
  }
}

std::vector<std::size_t> shard_sizes(std::size_t samples) {
  std::vector<std::size_t> out;
  for (std::size_t begin = 0; begin < samples; begin += kMonteCarloShard) {
    out.push_back(std::min(kMonteCarloShard, samples - begin));
  }
  return out;
}

MonteCarloEstimate binomial(std::uint64_t hits, std::size_t samples) {
  MonteCarloEstimate e;
  e.samples = samples;
  e.estimate = double(hits) / double(samples);
  e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / double(samples));
  return e;
}

// Lazily drawn index rows for one level of the V-screen construction: only
// screens reached by the dependence tree consume random numbers.
class LazyLevel {
 public:
  LazyLevel(std::size_t screens, std::size_t arity)
      : arity_(arity), stamp_(screens, 0), ifs_(screens, 0), links_(screens * arity, 0) {}

  void next_level() { ++generation_; }

  void touch(Label v, const Categorical* sampler, Rng& rng) {
    if (stamp_[v] == generation_) return;
    stamp_[v] = generation_;
    if (sampler) ifs_[v] = Label((*sampler)(rng));
    for (std::size_t m = 0; m < arity_; ++m) links_[v * arity_ + m] = Label(rng.index(stamp_.size()));
  }

  Label ifs(Label v) const { return ifs_[v]; }
  Label link(Label v, std::size_t m) const { return links_[v * arity_ + m]; }

 private:
  std::size_t arity_;
  std::uint64_t generation_ = 1;
  std::vector<std::uint64_t> stamp_;
  std::vector<Label> ifs_;
  std::vector<Label> links_;
};

// Screen labels K(i), one level at a time.
std::vector<Label> next_screens(const std::vector<Label>& current, const LazyLevel& lvl, std::size_t arity) {
  std::vector<Label> out;
  out.reserve(current.size() * arity);
  for (Label k : current) {
    for (std::size_t m = 0; m < arity; ++m) out.push_back(lvl.link(k, m));
  }
  return out;
}

}  // namespace

std::size_t tree_size(std::size_t arity, std::size_t depth) {
  if (arity == 0) throw std::invalid_argument("tree arity must be positive");
  std::size_t total = 0;
  std::size_t width = 1;
  for (std::size_t l = 0; l <= depth; ++l) {
    total += width;
    if (l < depth) width = checked_mul(width, arity);
  }
  return total;
}

std::size_t level_offset(std::size_t arity, std::size_t level) {
  return level == 0 ? 0 : tree_size(arity, level - 1);
}

std::size_t level_width(std::size_t arity, std::size_t level) {
  std::size_t w = 1;
  for (std::size_t l = 0; l < level; ++l) w = checked_mul(w, arity);
  return w;
}

// ---------------------------------------------------------------- CodeTree

CodeTree::CodeTree(std::size_t arity, std::size_t depth, std::vector<Label> labels)
    : arity_(arity), depth_(depth), labels_(std::move(labels)) {
  if (labels_.size() != tree_size(arity, depth)) {
    throw std::invalid_argument("code tree needs " + std::to_string(tree_size(arity, depth)) + " labels, got " +
                                std::to_string(labels_.size()));
  }
}

CodeTree CodeTree::constant(std::size_t arity, std::size_t depth, Label label) {
  return CodeTree(arity, depth, std::vector<Label>(tree_size(arity, depth), label));
}

std::span<const Label> CodeTree::level(std::size_t l) const {
  if (l > depth_) throw std::out_of_range("code tree level out of range");
  return {labels_.data() + level_offset(arity_, l), level_width(arity_, l)};
}

Label CodeTree::at(std::span<const std::uint32_t> path) const {
  if (path.size() > depth_) throw std::out_of_range("path longer than tree depth");
  std::size_t node = 0;
  for (auto m : path) {
    if (m >= arity_) throw std::out_of_range("path digit out of range");
    node = child(node, m);
  }
  return labels_[node];
}

CodeTree CodeTree::subtree(std::size_t node) const {
  if (node >= labels_.size()) throw std::out_of_range("subtree node out of range");
  std::size_t lvl = 0;
  while (level_offset(arity_, lvl + 1) <= node) ++lvl;
  std::vector<Label> out;
  out.reserve(tree_size(arity_, depth_ - lvl));
  append_subtree(*this, lvl, node, out);
  return CodeTree(arity_, depth_ - lvl, std::move(out));
}

CodeTree CodeTree::truncated(std::size_t depth) const {
  if (depth > depth_) throw std::invalid_argument("cannot truncate a tree to a larger depth");
  return CodeTree(arity_, depth,
                  std::vector<Label>(labels_.begin(), labels_.begin() + std::ptrdiff_t(tree_size(arity_, depth))));
}

Label CodeTree::label_bound() const { return *std::max_element(labels_.begin(), labels_.end()) + 1; }

// ------------------------------------------------------------------- Grove

Grove::Grove(std::vector<CodeTree> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) throw std::invalid_argument("grove needs at least one tree");
  for (const auto& t : trees_) {
    if (t.arity() != trees_.front().arity() || t.depth() != trees_.front().depth()) {
      throw std::invalid_argument("grove components must share arity and depth");
    }
  }
}

Grove Grove::constant(std::size_t screens, std::size_t arity, std::size_t depth, Label label) {
  return Grove(std::vector<CodeTree>(screens, CodeTree::constant(arity, depth, label)));
}

Grove Grove::truncated(std::size_t depth) const {
  std::vector<CodeTree> out;
  out.reserve(trees_.size());
  for (const auto& t : trees_) out.push_back(t.truncated(depth));
  return Grove(std::move(out));
}

// ------------------------------------------------------------------ IndexA

IndexA::IndexA(std::size_t screens, std::size_t arity, std::vector<Label> ifs, std::vector<Label> links)
    : arity_(arity), ifs_(std::move(ifs)), links_(std::move(links)) {
  if (screens == 0 || arity == 0) throw std::invalid_argument("index needs V >= 1 and M >= 1");
  if (ifs_.size() != screens || links_.size() != screens * arity) {
    throw std::invalid_argument("index shape does not match V and M");
  }
  for (Label l : links_) {
    if (l >= screens) throw std::out_of_range("index screen label out of range");
  }
}

IndexA IndexA::from_one_based(const std::vector<Row>& rows) {
  if (rows.empty()) throw std::invalid_argument("index needs at least one row");
  const std::size_t arity = rows.front().links.size();
  std::vector<Label> ifs;
  std::vector<Label> links;
  for (const auto& r : rows) {
    if (r.links.size() != arity) throw std::invalid_argument("index rows must share M");
    if (r.ifs == 0) throw std::out_of_range("1-based IFS label is 0");
    ifs.push_back(r.ifs - 1);
    for (Label l : r.links) {
      if (l == 0) throw std::out_of_range("1-based screen label is 0");
      links.push_back(l - 1);
    }
  }
  return IndexA(rows.size(), arity, std::move(ifs), std::move(links));
}

// ------------------------------------------------------------ FunctionTree

FunctionTree::FunctionTree(std::size_t arity, std::size_t level, std::vector<Label> nodes, std::vector<Label> limbs)
    : arity_(arity), level_(level), nodes_(std::move(nodes)), limbs_(std::move(limbs)) {
  if (level == 0) throw std::invalid_argument("function trees start at level 1");
  if (nodes_.size() != tree_size(arity, level - 1) || limbs_.size() != tree_size(arity, level)) {
    throw std::invalid_argument("function tree label counts do not match its level");
  }
}

FunctionGrove::FunctionGrove(std::vector<FunctionTree> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) throw std::invalid_argument("function grove needs at least one tree");
  for (std::size_t v = 0; v < trees_.size(); ++v) {
    const auto& t = trees_[v];
    if (t.arity() != trees_.front().arity() || t.level() != trees_.front().level()) {
      throw std::invalid_argument("function grove components must share arity and level");
    }
    if (t.trunk() != v) throw std::invalid_argument("function tree trunk must carry its component index");
    for (Label l : t.limbs()) {
      if (l >= trees_.size()) throw std::out_of_range("function tree limb label out of range");
    }
  }
}

FunctionGrove FunctionGrove::from_index(const IndexA& a) {
  std::vector<FunctionTree> trees;
  trees.reserve(a.screens());
  for (std::size_t v = 0; v < a.screens(); ++v) {
    std::vector<Label> limbs{Label(v)};
    const auto l = a.links(v);
    limbs.insert(limbs.end(), l.begin(), l.end());
    trees.emplace_back(a.arity(), 1, std::vector<Label>{a.ifs(v)}, std::move(limbs));
  }
  return FunctionGrove(std::move(trees));
}

DependenceTree::DependenceTree(CodeTree labels) : labels_(std::move(labels)) {
  if (labels_.root() != 0) throw std::invalid_argument("dependence tree root must be screen 0");
}

// -------------------------------------------------------------- operations

CodeTree xi(Label n, std::span<const CodeTree> children) {
  if (children.empty()) throw std::invalid_argument("xi needs M >= 1 children");
  const std::size_t m = children.size();
  const std::size_t d = children.front().depth();
  for (const auto& c : children) {
    if (c.arity() != m || c.depth() != d) throw std::invalid_argument("xi: children must share arity M and depth");
  }
  std::vector<Label> labels;
  labels.reserve(tree_size(m, d + 1));
  labels.push_back(n);
  for (std::size_t l = 0; l <= d; ++l) {
    for (const auto& c : children) {
      const auto row = c.level(l);
      labels.insert(labels.end(), row.begin(), row.end());
    }
  }
  return CodeTree(m, d + 1, std::move(labels));
}

Grove eta(const IndexA& a, const Grove& g) {
  if (a.screens() != g.screens() || a.arity() != g.arity()) {
    throw std::invalid_argument("eta: index and grove disagree on V or M");
  }
  std::vector<CodeTree> out;
  out.reserve(g.screens());
  std::vector<CodeTree> children;
  for (std::size_t v = 0; v < a.screens(); ++v) {
    children.clear();
    for (Label w : a.links(v)) children.push_back(g[w]);
    out.push_back(xi(a.ifs(v), children));
  }
  return Grove(std::move(out));
}

FunctionGrove compose(const FunctionGrove& g, const FunctionGrove& h) {
  if (g.screens() != h.screens() || g.arity() != h.arity()) {
    throw std::invalid_argument("compose: function groves disagree on V or M");
  }
  const std::size_t m = g.arity();
  const std::size_t kg = g.level();
  const std::size_t kh = h.level();
  const std::size_t k = kg + kh;
  std::vector<FunctionTree> out;
  out.reserve(g.screens());
  for (std::size_t v = 0; v < g.screens(); ++v) {
    const FunctionTree& gv = g[v];
    std::vector<Label> nodes(tree_size(m, k - 1));
    std::vector<Label> limbs(tree_size(m, k));
    std::copy(gv.nodes().begin(), gv.nodes().end(), nodes.begin());
    std::copy(gv.limbs().begin(), gv.limbs().end(), limbs.begin());
    const std::size_t base = level_offset(m, kg);
    for (std::size_t p = 0; p < level_width(m, kg); ++p) {
      const FunctionTree& hw = h[gv.limb(base + p)];
      for (std::size_t l = 0; l <= kh; ++l) {
        const std::size_t width = level_width(m, l);
        const std::size_t src = level_offset(m, l);
        const std::size_t dst = level_offset(m, kg + l) + p * width;
        for (std::size_t q = 0; q < width; ++q) {
          limbs[dst + q] = hw.limb(src + q);
          if (l < kh) nodes[dst + q] = hw.node(src + q);
        }
      }
    }
    out.emplace_back(m, k, std::move(nodes), std::move(limbs));
  }
  return FunctionGrove(std::move(out));
}

Grove eta_of_function_tree(const FunctionGrove& g, const Grove& grove) {
  if (g.screens() != grove.screens() || g.arity() != grove.arity()) {
    throw std::invalid_argument("eta_of_function_tree: shapes disagree");
  }
  const std::size_t m = g.arity();
  const std::size_t kg = g.level();
  const std::size_t d = grove.depth();
  std::vector<CodeTree> out;
  out.reserve(g.screens());
  for (std::size_t v = 0; v < g.screens(); ++v) {
    const FunctionTree& gv = g[v];
    std::vector<Label> labels(tree_size(m, kg + d));
    std::copy(gv.nodes().begin(), gv.nodes().end(), labels.begin());
    const std::size_t base = level_offset(m, kg);
    for (std::size_t p = 0; p < level_width(m, kg); ++p) {
      const CodeTree& w = grove[gv.limb(base + p)];
      for (std::size_t l = 0; l <= d; ++l) {
        const auto row = w.level(l);
        std::copy(row.begin(), row.end(),
                  labels.begin() + std::ptrdiff_t(level_offset(m, kg + l) + p * row.size()));
      }
    }
    out.emplace_back(m, kg + d, std::move(labels));
  }
  return Grove(std::move(out));
}

IndexA sample_index(const Categorical& ifs_sampler, std::size_t screens, std::size_t arity, Rng& rng) {
  std::vector<Label> ifs(screens);
  std::vector<Label> links(screens * arity);
  for (std::size_t v = 0; v < screens; ++v) {
    ifs[v] = Label(ifs_sampler(rng));
    for (std::size_t m = 0; m < arity; ++m) links[v * arity + m] = Label(rng.index(screens));
  }
  return IndexA(screens, arity, std::move(ifs), std::move(links));
}

IndexA sample_index(std::span<const double> ifs_probs, std::size_t screens, std::size_t arity, Rng& rng) {
  return sample_index(Categorical(ifs_probs), screens, arity, rng);
}

DependenceTree dependence_tree(std::span<const IndexA> indices, std::size_t depth) {
  if (indices.size() < depth) throw std::invalid_argument("dependence_tree: need at least k indices");
  if (indices.empty()) return DependenceTree(CodeTree(1, 0, {0}));
  const std::size_t m = indices.front().arity();
  std::vector<Label> labels(tree_size(m, depth), 0);
  for (std::size_t n = 0; n < depth; ++n) {
    const std::size_t off = level_offset(m, n);
    const std::size_t next = level_offset(m, n + 1);
    for (std::size_t p = 0; p < level_width(m, n); ++p) {
      const Label k = labels[off + p];
      for (std::size_t c = 0; c < m; ++c) labels[next + p * m + c] = indices[n].link(k, c);
    }
  }
  return DependenceTree(CodeTree(m, depth, std::move(labels)));
}

CodeTree read_nodes(const DependenceTree& d, std::span<const IndexA> indices) {
  if (indices.size() < d.depth() + 1) throw std::invalid_argument("read_nodes: need k+1 indices");
  std::vector<Label> labels(tree_size(d.arity(), d.depth()));
  for (std::size_t n = 0; n <= d.depth(); ++n) {
    const std::size_t off = level_offset(d.arity(), n);
    const auto row = d.level(n);
    for (std::size_t p = 0; p < row.size(); ++p) labels[off + p] = indices[n].ifs(row[p]);
  }
  return CodeTree(d.arity(), d.depth(), std::move(labels));
}

bool is_free(const DependenceTree& d) {
  std::vector<Label> row;
  for (std::size_t l = 1; l <= d.depth(); ++l) {
    const auto r = d.level(l);
    row.assign(r.begin(), r.end());
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) return false;
  }
  return true;
}

double rho_cylinder(const CodeTree& tau, std::span<const double> ifs_probs) {
  double p = 1.0;
  for (Label l : tau.labels()) {
    if (l >= ifs_probs.size()) throw std::out_of_range("rho_cylinder: label out of range");
    p *= ifs_probs[l];
  }
  return p;
}

CodeTree sample_v_tree(const Categorical& ifs_sampler, std::size_t screens, std::size_t arity, std::size_t depth,
                       Rng& rng) {
  LazyLevel lvl(screens, arity);
  std::vector<Label> labels;
  labels.reserve(tree_size(arity, depth));
  std::vector<Label> current{0};
  for (std::size_t n = 0; n <= depth; ++n) {
    for (Label k : current) lvl.touch(k, &ifs_sampler, rng);
    for (Label k : current) labels.push_back(lvl.ifs(k));
    if (n == depth) break;
    current = next_screens(current, lvl, arity);
    lvl.next_level();
  }
  return CodeTree(arity, depth, std::move(labels));
}

MonteCarloEstimate rho_v_cylinder_mc(const CodeTree& tau, std::size_t screens, std::span<const double> ifs_probs,
                                     std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("rho_v_cylinder_mc: need at least one sample");
  const Categorical sampler(ifs_probs);
  const auto shards = shard_sizes(samples);
  std::vector<std::uint64_t> hits(shards.size(), 0);
  const Rng master(seed);
  parallel_for(shards.size(), [&](std::size_t s) {
    Rng rng = master.substream(s);
    for (std::size_t i = 0; i < shards[s]; ++i) {
      if (sample_v_tree(sampler, screens, tau.arity(), tau.depth(), rng) == tau) ++hits[s];
    }
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return binomial(total, samples);
}

std::vector<std::uint64_t> v_tree_histogram(std::size_t screens, std::size_t arity, std::size_t depth,
                                            std::span<const double> ifs_probs, std::size_t samples,
                                            std::uint64_t seed) {
  const std::size_t n_labels = ifs_probs.size();
  const std::size_t nodes = tree_size(arity, depth);
  std::size_t cylinders = 1;
  for (std::size_t i = 0; i < nodes; ++i) {
    cylinders = checked_mul(cylinders, n_labels);
    if (cylinders > (std::size_t{1} << 24)) throw std::invalid_argument("v_tree_histogram: too many cylinders");
  }
  const Categorical sampler(ifs_probs);
  const auto shards = shard_sizes(samples);
  std::vector<std::vector<std::uint64_t>> partial(shards.size());
  const Rng master(seed);
  parallel_for(shards.size(), [&](std::size_t s) {
    std::vector<std::uint64_t> counts(cylinders, 0);
    Rng rng = master.substream(s);
    for (std::size_t i = 0; i < shards[s]; ++i) {
      const CodeTree t = sample_v_tree(sampler, screens, arity, depth, rng);
      std::uint64_t c = 0;
      for (Label l : t.labels()) c = c * n_labels + l;
      ++counts[c];
    }
    partial[s] = std::move(counts);
  });
  std::vector<std::uint64_t> total(cylinders, 0);
  for (const auto& p : partial) {
    for (std::size_t c = 0; c < cylinders; ++c) total[c] += p[c];
  }
  return total;
}

CodeTree cylinder_tree(std::size_t arity, std::size_t depth, std::size_t n_labels, std::uint64_t c) {
  std::vector<Label> labels(tree_size(arity, depth));
  for (std::size_t i = labels.size(); i-- > 0;) {
    labels[i] = Label(c % n_labels);
    c /= n_labels;
  }
  return CodeTree(arity, depth, std::move(labels));
}

MonteCarloEstimate free_probability_mc(std::size_t screens, std::size_t arity, std::size_t depth,
                                       std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("free_probability_mc: need at least one sample");
  const auto shards = shard_sizes(samples);
  std::vector<std::uint64_t> hits(shards.size(), 0);
  const Rng master(seed);
  parallel_for(shards.size(), [&](std::size_t s) {
    Rng rng = master.substream(s);
    LazyLevel lvl(screens, arity);
    for (std::size_t i = 0; i < shards[s]; ++i) {
      std::vector<Label> labels{0};
      std::vector<Label> current{0};
      for (std::size_t n = 0; n < depth; ++n) {
        for (Label k : current) lvl.touch(k, nullptr, rng);
        current = next_screens(current, lvl, arity);
        labels.insert(labels.end(), current.begin(), current.end());
        lvl.next_level();
      }
      if (is_free(DependenceTree(CodeTree(arity, depth, std::move(labels))))) ++hits[s];
    }
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return binomial(total, samples);
}

double cylinder_bound(std::size_t arity, std::size_t depth, std::size_t screens) {
  return 2.0 * std::pow(double(arity), 2.0 * double(depth)) / (3.0 * double(screens));
}

std::size_t count_distinct_subtrees(const Grove& g, std::size_t level) {
  if (level > g.depth()) throw std::out_of_range("count_distinct_subtrees: level exceeds depth");
  std::unordered_set<std::vector<Label>, SubtreeHash> seen;
  const std::size_t m = g.arity();
  const std::size_t off = level_offset(m, level);
  for (const CodeTree& t : g.trees()) {
    for (std::size_t p = 0; p < level_width(m, level); ++p) {
      std::vector<Label> key;
      key.reserve(tree_size(m, g.depth() - level));
      append_subtree(t, level, off + p, key);
      seen.insert(std::move(key));
    }
  }
  return seen.size();
}

std::size_t count_distinct_subtrees(const CodeTree& t, std::size_t level) {
  return count_distinct_subtrees(Grove({t}), level);
}

std::string to_text(const CodeTree& t) {
  std::ostringstream out;
  out << t.arity() << ' ' << t.depth() << " :";
  for (std::size_t l = 0; l <= t.depth(); ++l) {
    if (l > 0) out << " ;";
    for (Label x : t.level(l)) out << ' ' << (x + 1);
  }
  return out.str();
}

CodeTree code_tree_from_text(const std::string& text) {
  std::istringstream in(text);
  std::size_t arity = 0;
  std::size_t depth = 0;
  std::string colon;
  if (!(in >> arity >> depth >> colon) || colon != ":" || arity == 0) {
    throw std::invalid_argument("code tree text: expected 'M k :' header");
  }
  std::vector<Label> labels;
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t level = 0;
  std::istringstream levels(rest);
  std::string chunk;
  while (std::getline(levels, chunk, ';')) {
    std::istringstream row(chunk);
    std::size_t count = 0;
    long x = 0;
    while (row >> x) {
      if (x < 1) throw std::invalid_argument("code tree text: labels are 1-based");
      labels.push_back(Label(x - 1));
      ++count;
    }
    if (!row.eof()) throw std::invalid_argument("code tree text: malformed label on level " + std::to_string(level));
    if (count != level_width(arity, level)) {
      throw std::invalid_argument("code tree text: level " + std::to_string(level) + " has " + std::to_string(count) +
                                  " labels, expected " + std::to_string(level_width(arity, level)));
    }
    ++level;
  }
  if (level != depth + 1) throw std::invalid_argument("code tree text: level count does not match depth");
  return CodeTree(arity, depth, std::move(labels));
}

}  // namespace superfractal
