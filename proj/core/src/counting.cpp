#include "mcmc/counting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <thread>

#include "mcmc/errors.hpp"
#include "mcmc/mixing.hpp"

namespace mcmc {
namespace {

class IndependentSetInstance final : public SelfReducibleInstance {
 public:
  IndependentSetInstance(std::shared_ptr<const Graph> graph, std::size_t next, std::vector<bool> blocked)
      : graph_(std::move(graph)), next_(next), blocked_(std::move(blocked)) {}

  std::size_t length() const override { return graph_->vertices - next_; }

  std::vector<Branch> branch() const override {
    std::vector<Branch> out;
    out.push_back({0, std::make_shared<IndependentSetInstance>(graph_, next_ + 1, blocked_)});
    if (!blocked_[next_] && !graph_->self_loop[next_]) {
      auto blocked = blocked_;
      for (auto v : graph_->adjacency[next_]) blocked[v] = true;
      out.push_back({1, std::make_shared<IndependentSetInstance>(graph_, next_ + 1, std::move(blocked))});
    }
    return out;
  }

  bool atom_test() const override { return true; }
  std::size_t alphabet_size() const override { return 2; }
  std::string label() const override {
    return "independent-set(n=" + std::to_string(graph_->vertices) + ", next=" + std::to_string(next_) + ")";
  }

 private:
  std::shared_ptr<const Graph> graph_;
  std::size_t next_;
  std::vector<bool> blocked_;
};

class PerfectMatchingInstance final : public SelfReducibleInstance {
 public:
  PerfectMatchingInstance(std::shared_ptr<const std::vector<std::vector<bool>>> adj, std::size_t row,
                          std::vector<bool> used)
      : adj_(std::move(adj)), row_(row), used_(std::move(used)) {}

  std::size_t length() const override { return adj_->size() - row_; }

  std::vector<Branch> branch() const override {
    std::vector<Branch> out;
    const auto& row = (*adj_)[row_];
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c] || used_[c]) continue;
      auto used = used_;
      used[c] = true;
      out.push_back({static_cast<Symbol>(c), std::make_shared<PerfectMatchingInstance>(adj_, row_ + 1, std::move(used))});
    }
    return out;
  }

  bool atom_test() const override { return true; }
  std::size_t alphabet_size() const override { return adj_->size(); }
  std::string label() const override {
    return "perfect-matching(n=" + std::to_string(adj_->size()) + ", row=" + std::to_string(row_) + ")";
  }

 private:
  std::shared_ptr<const std::vector<std::vector<bool>>> adj_;
  std::size_t row_;
  std::vector<bool> used_;
};

void check_reduction(const SelfReducibleInstance& parent, const SelfReducibleInstance& child) {
  if (child.length() + 1 != parent.length())
    throw Error(ErrorCode::InvalidArgument, "sub-instance of " + parent.label() +
                                                " does not reduce the solution length by one");
}

class TreeBuilder {
 public:
  TreeBuilder(std::vector<DerivationTree::Node>& nodes, std::size_t cap) : nodes_(nodes), cap_(cap) {}

  std::optional<std::size_t> grow(std::size_t parent, Symbol symbol, std::size_t depth, InstancePtr instance) {
    if (++visited_ > cap_)
      throw Error(ErrorCode::NodeCapExceeded, "derivation tree exceeds " + std::to_string(cap_) + " nodes");
    const std::size_t idx = nodes_.size();
    nodes_.push_back({parent, symbol, depth, {}, instance});
    bool solvable = false;
    if (instance->length() == 0) {
      solvable = instance->atom_test();
    } else {
      for (auto& br : instance->branch()) {
        check_reduction(*instance, *br.sub);
        if (auto child = grow(idx, br.symbol, depth + 1, std::move(br.sub))) {
          nodes_[idx].children.push_back(*child);
          solvable = true;
        }
      }
    }
    if (!solvable) {
      nodes_.resize(idx);
      return std::nullopt;
    }
    return idx;
  }

 private:
  std::vector<DerivationTree::Node>& nodes_;
  std::size_t cap_;
  std::size_t visited_ = 0;
};

std::uint64_t count_below(const SelfReducibleInstance& instance, std::size_t& visited, std::size_t cap) {
  if (++visited > cap)
    throw Error(ErrorCode::NodeCapExceeded, "enumeration exceeds " + std::to_string(cap) + " nodes");
  if (instance.length() == 0) return instance.atom_test() ? 1 : 0;
  std::uint64_t total = 0;
  for (const auto& br : instance.branch()) {
    check_reduction(instance, *br.sub);
    total += count_below(*br.sub, visited, cap);
  }
  return total;
}

// Stationary mass of the acceptance-corrected leaves: sum over leaves of
// deg/(2|E|) * min_deg/deg.
double accepted_leaf_mass(const DerivationTree& tree, std::size_t root, const std::vector<std::size_t>& nodes) {
  std::size_t degree_sum = 0;
  std::size_t leaves = 0;
  std::size_t min_degree = std::numeric_limits<std::size_t>::max();
  for (auto v : nodes) {
    const auto d = tree.degree_within(root, v);
    degree_sum += d;
    if (tree.is_leaf(v)) {
      ++leaves;
      min_degree = std::min(min_degree, d);
    }
  }
  return static_cast<double>(leaves * min_degree) / static_cast<double>(degree_sum);
}

std::size_t subtree_height(const DerivationTree& tree, std::size_t root) {
  return tree.solution_length() - tree.node(root).depth;
}

}  // namespace

Graph Graph::from_edges(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  Graph g;
  g.vertices = vertices;
  g.adjacency.assign(vertices, {});
  g.self_loop.assign(vertices, false);
  for (const auto& [u, v] : edges) {
    if (u >= vertices || v >= vertices)
      throw Error(ErrorCode::InvalidArgument, "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                                  ") outside " + std::to_string(vertices) + " vertices");
    if (u == v) {
      g.self_loop[u] = true;
      continue;
    }
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  for (auto& nbrs : g.adjacency) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return g;
}

Graph Graph::path(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return from_edges(n, edges);
}

Graph Graph::cycle(std::size_t n) {
  if (n < 3) return path(n);
  auto edges = std::vector<std::pair<std::size_t, std::size_t>>{{n - 1, 0}};
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return from_edges(n, edges);
}

Graph Graph::empty(std::size_t n) { return from_edges(n, {}); }

InstancePtr independent_set_instance(Graph graph) {
  const auto n = graph.vertices;
  return std::make_shared<IndependentSetInstance>(std::make_shared<const Graph>(std::move(graph)), 0,
                                                  std::vector<bool>(n, false));
}

InstancePtr perfect_matching_instance(std::vector<std::vector<bool>> biadjacency) {
  const auto n = biadjacency.size();
  for (const auto& row : biadjacency)
    if (row.size() != n) throw Error(ErrorCode::NonSquare, "biadjacency matrix must be square");
  return std::make_shared<PerfectMatchingInstance>(
      std::make_shared<const std::vector<std::vector<bool>>>(std::move(biadjacency)), 0, std::vector<bool>(n, false));
}

std::vector<std::size_t> DerivationTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (is_leaf(i)) out.push_back(i);
  return out;
}

std::size_t DerivationTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [this](const Node& n) { return n.depth == solution_length_; }));
}

Word DerivationTree::word(std::size_t i) const {
  Word w(nodes_.at(i).depth);
  for (std::size_t v = i; nodes_[v].parent != npos; v = nodes_[v].parent) w[nodes_[v].depth - 1] = nodes_[v].symbol;
  return w;
}

std::vector<std::size_t> DerivationTree::subtree(std::size_t root) const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{root};
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    out.push_back(v);
    const auto& kids = nodes_.at(v).children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::size_t DerivationTree::degree_within(std::size_t root, std::size_t i) const {
  const auto& n = nodes_.at(i);
  return n.children.size() + (i != root && n.parent != npos ? 1 : 0);
}

DerivationTree build_tree(const InstancePtr& problem, std::size_t node_cap) {
  DerivationTree tree;
  tree.solution_length_ = problem->length();
  TreeBuilder(tree.nodes_, node_cap).grow(DerivationTree::npos, 0, 0, problem);
  return tree;
}

std::uint64_t brute_force_count(const InstancePtr& problem, std::size_t node_cap) {
  std::size_t visited = 0;
  return count_below(*problem, visited, node_cap);
}

TreeWalkChain lazy_walk_chain(const DerivationTree& tree, std::size_t root) {
  if (tree.empty()) throw Error(ErrorCode::EmptySolutionSet, "derivation tree is empty");
  auto nodes = tree.subtree(root);
  const std::size_t n = nodes.size();
  std::vector<std::size_t> position(tree.size(), DerivationTree::npos);
  for (std::size_t i = 0; i < n; ++i) position[nodes[i]] = i;

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = nodes[i];
    labels[i] = std::to_string(v);
    const auto deg = tree.degree_within(root, v);
    const auto row = static_cast<Eigen::Index>(i);
    if (deg == 0) {
      p(row, row) = 1.0;
      continue;
    }
    p(row, row) = 0.5;
    const double move = 0.5 / static_cast<double>(deg);
    for (auto c : tree.node(v).children) p(row, static_cast<Eigen::Index>(position[c])) += move;
    if (v != root) p(row, static_cast<Eigen::Index>(position[tree.node(v).parent])) += move;
  }
  return {validate_chain(p, std::move(labels)), std::move(nodes)};
}

double leaf_acceptance(const DerivationTree& tree, std::size_t root, std::size_t leaf) {
  if (!tree.is_leaf(leaf)) throw Error(ErrorCode::InvalidArgument, "node " + std::to_string(leaf) + " is not a leaf");
  std::size_t min_degree = std::numeric_limits<std::size_t>::max();
  for (auto v : tree.subtree(root))
    if (tree.is_leaf(v)) min_degree = std::min(min_degree, tree.degree_within(root, v));
  const auto deg = tree.degree_within(root, leaf);
  return deg == 0 ? 1.0 : static_cast<double>(min_degree) / static_cast<double>(deg);
}

std::size_t checkpoint_interval(const DerivationTree& tree, std::size_t root, double precision,
                                std::size_t exact_limit) {
  if (!(precision > 0.0 && precision < 1.0))
    throw Error(ErrorCode::InvalidArgument, "sampler precision must lie in (0, 1)");
  const auto nodes = tree.subtree(root);
  if (nodes.size() == 1) return 0;

  if (nodes.size() <= exact_limit) {
    // Smallest T such that, from every start, the law of the emitted leaf
    // (P^T(x, leaf) times its acceptance, renormalized) is within
    // `precision` of uniform in total variation.
    const auto walk = lazy_walk_chain(tree, root);
    const std::size_t n = nodes.size();
    std::vector<std::size_t> leaf_pos;
    std::vector<double> accept;
    for (std::size_t i = 0; i < n; ++i)
      if (tree.is_leaf(nodes[i])) {
        leaf_pos.push_back(i);
        accept.push_back(leaf_acceptance(tree, root, nodes[i]));
      }
    struct Entry {
      std::size_t from;
      std::size_t to;
      double p;
    };
    std::vector<Entry> sparse;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (walk.chain(x, y) > 0.0) sparse.push_back({x, y, walk.chain(x, y)});

    std::vector<double> rows(n * n, 0.0);
    std::vector<double> next(n * n);
    for (std::size_t x = 0; x < n; ++x) rows[x * n + x] = 1.0;
    const double uniform = 1.0 / static_cast<double>(leaf_pos.size());
    for (std::size_t t = 1; t <= kMixingScanCap; ++t) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t x = 0; x < n; ++x)
        for (const auto& e : sparse) next[x * n + e.to] += rows[x * n + e.from] * e.p;
      rows.swap(next);

      double worst = 0.0;
      for (std::size_t x = 0; x < n && worst <= precision; ++x) {
        double z = 0.0;
        for (std::size_t k = 0; k < leaf_pos.size(); ++k) z += rows[x * n + leaf_pos[k]] * accept[k];
        if (z <= 0.0) {
          worst = 1.0;
          break;
        }
        double l1 = 0.0;
        for (std::size_t k = 0; k < leaf_pos.size(); ++k)
          l1 += std::abs(rows[x * n + leaf_pos[k]] * accept[k] / z - uniform);
        worst = std::max(worst, 0.5 * l1);
      }
      if (worst <= precision) return t;
    }
    throw Error(ErrorCode::CapExceeded, "leaf law never reaches the requested precision");
  }

  // Hitting-time bound for large subtrees: commute times on a tree are
  // 2|E| * distance, doubled by laziness, so t_mix(1/4) <= 16 |E| * diameter
  // and each halving of the distance costs another t_mix(1/4). Reaching
  // d = precision * mass / 2 bounds the emitted leaf law by
  // 1.5 d / (mass - d) <= precision, mass being the stationary probability
  // of stopping on an accepted leaf.
  const double target = precision * accepted_leaf_mass(tree, root, nodes) / 2.0;
  const double edges = static_cast<double>(nodes.size() - 1);
  const double diameter = 2.0 * static_cast<double>(subtree_height(tree, root));
  const double halvings = std::ceil(std::log2(0.25 / target)) + 1.0;
  return static_cast<std::size_t>(16.0 * edges * diameter * halvings);
}

AlmostUniformSampler::AlmostUniformSampler(const DerivationTree& tree, std::size_t root, double epsilon,
                                           std::uint64_t seed)
    : AlmostUniformSampler(tree, root,
                           FixedInterval{tree.empty() ? 0 : checkpoint_interval(tree, root, epsilon)}, seed) {}

AlmostUniformSampler::AlmostUniformSampler(const DerivationTree& tree, std::size_t root, FixedInterval interval,
                                           std::uint64_t seed)
    : tree_(&tree), root_(root), interval_(interval.steps), rng_(seed) {
  if (tree.empty()) throw Error(ErrorCode::EmptySolutionSet, "instance has no solutions");
  global_ = tree.subtree(root);
  std::vector<std::uint32_t> local(tree.size(), 0);
  for (std::size_t i = 0; i < global_.size(); ++i) local[global_[i]] = static_cast<std::uint32_t>(i);

  offsets_.reserve(global_.size() + 1);
  offsets_.push_back(0);
  leaf_.resize(global_.size());
  min_leaf_degree_ = std::numeric_limits<std::uint32_t>::max();
  for (std::size_t i = 0; i < global_.size(); ++i) {
    const auto v = global_[i];
    const auto& node = tree.node(v);
    for (auto c : node.children) neighbours_.push_back(local[c]);
    if (v != root) neighbours_.push_back(local[node.parent]);
    offsets_.push_back(static_cast<std::uint32_t>(neighbours_.size()));
    leaf_[i] = tree.is_leaf(v);
    if (leaf_[i]) min_leaf_degree_ = std::min(min_leaf_degree_, offsets_[i + 1] - offsets_[i]);
  }
}

std::uint32_t AlmostUniformSampler::take_bits(unsigned count) {
  if (bits_left_ < count) {
    bits_ = rng_.next();
    bits_left_ = 64;
  }
  const auto out = static_cast<std::uint32_t>(bits_ & ((std::uint64_t{1} << count) - 1));
  bits_ >>= count;
  bits_left_ -= count;
  return out;
}

void AlmostUniformSampler::advance(std::size_t steps) {
  // The number of non-hold steps among `steps` lazy steps is the popcount of
  // `steps` fair bits; simulating only those moves gives the same law.
  std::size_t moves = 0;
  for (std::size_t done = 0; done < steps; done += 64) {
    auto word = rng_.next();
    if (steps - done < 64) word &= (std::uint64_t{1} << (steps - done)) - 1;
    moves += static_cast<std::size_t>(std::popcount(word));
  }
  steps_ += steps;
  for (std::size_t m = 0; m < moves; ++m) {
    const auto begin = offsets_[current_];
    const auto deg = offsets_[current_ + 1] - begin;
    std::uint32_t pick = 0;
    if (deg > 1) {
      const auto width = static_cast<unsigned>(std::bit_width(deg - 1));
      do pick = take_bits(width);
      while (pick >= deg);
    }
    current_ = neighbours_[begin + pick];
  }
}

std::size_t AlmostUniformSampler::next_leaf() {
  if (interval_ == 0) return root_;
  for (;;) {
    advance(interval_);
    if (!leaf_[current_]) continue;
    const auto deg = offsets_[current_ + 1] - offsets_[current_];
    if (deg == min_leaf_degree_ ||
        rng_.uniform() * static_cast<double>(deg) < static_cast<double>(min_leaf_degree_))
      return global_[current_];
  }
}

Word almost_uniform_sample(const InstancePtr& problem, double epsilon, std::uint64_t seed, std::size_t node_cap) {
  const auto tree = build_tree(problem, node_cap);
  AlmostUniformSampler sampler(tree, 0, epsilon, seed);
  return sampler.next();
}

std::size_t samples_per_level(std::size_t length, double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  if (length == 0) return 0;
  const double l = static_cast<double>(length);
  return static_cast<std::size_t>(std::ceil(27.0 * l / (epsilon * epsilon) * std::log(2.0 * l / delta)));
}

CountEstimate approximate_count(const InstancePtr& problem, double epsilon, double delta, std::uint64_t seed,
                                const CountOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");

  CountEstimate result;
  result.epsilon = epsilon;
  result.delta = delta;
  result.seed = seed;
  result.exact = true;

  const auto tree = build_tree(problem, options.node_cap);
  if (tree.empty()) return result;  // no solutions: estimate 0, exact

  const std::size_t length = tree.solution_length();
  result.samples_per_level = samples_per_level(length, epsilon, delta);
  // A per-level sampler bias of eta moves a branch fraction p >= 1/k by at
  // most a factor (1 + k eta); eta = epsilon / (2 k l) keeps the product of
  // l such factors near exp(epsilon / 2).
  const double alphabet = static_cast<double>(std::max<std::size_t>(2, problem->alphabet_size()));
  const double precision = epsilon / (2.0 * alphabet * static_cast<double>(std::max<std::size_t>(1, length)));

  // Fixed chunking keeps results independent of the thread count.
  constexpr std::size_t kChunks = 8;
  double estimate = 1.0;
  std::size_t node = 0;
  for (std::size_t level = 0; !tree.is_leaf(node); ++level) {
    const auto& children = tree.node(node).children;
    if (children.size() == 1) {
      node = children.front();
      continue;
    }
    result.exact = false;
    ++result.sampled_levels;
    const AlmostUniformSampler::FixedInterval interval{checkpoint_interval(tree, node, precision)};

    std::vector<std::vector<std::size_t>> tallies(kChunks, std::vector<std::size_t>(children.size(), 0));
    auto run_chunk = [&](std::size_t chunk) {
      const std::size_t quota = result.samples_per_level / kChunks + (chunk < result.samples_per_level % kChunks ? 1 : 0);
      AlmostUniformSampler sampler(tree, node, interval, derive_seed(seed, level * kChunks + chunk));
      for (std::size_t s = 0; s < quota; ++s) {
        auto v = sampler.next_leaf();
        while (tree.node(v).parent != node) v = tree.node(v).parent;
        const auto which = static_cast<std::size_t>(std::find(children.begin(), children.end(), v) - children.begin());
        ++tallies[chunk][which];
      }
    };
    const unsigned threads = std::max(1U, options.threads);
    if (threads == 1) {
      for (std::size_t c = 0; c < kChunks; ++c) run_chunk(c);
    } else {
      for (std::size_t begin = 0; begin < kChunks; begin += threads) {
        std::vector<std::jthread> pool;
        for (std::size_t c = begin; c < std::min(kChunks, begin + threads); ++c) pool.emplace_back(run_chunk, c);
      }
    }

    std::vector<std::size_t> counts(children.size(), 0);
    for (const auto& t : tallies)
      for (std::size_t i = 0; i < t.size(); ++i) counts[i] += t[i];
    const auto best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const double fraction = static_cast<double>(counts[best]) / static_cast<double>(result.samples_per_level);
    estimate /= fraction;
    node = children[best];
  }
  result.estimate = estimate;
  return result;
}

}  // namespace mcmc
