#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mcmc/chain.hpp"
#include "mcmc/rng.hpp"

namespace mcmc {

using Symbol = int;
using Word = std::vector<Symbol>;

inline constexpr std::size_t kDefaultNodeCap = 1'000'000;

/// A problem instance whose solutions are words of a fixed length, built one
/// symbol at a time. Fixing the first symbol w yields a sub-instance whose
/// solution length is one less.
class SelfReducibleInstance {
 public:
  struct Branch {
    Symbol symbol;
    std::shared_ptr<const SelfReducibleInstance> sub;
  };

  virtual ~SelfReducibleInstance() = default;

  /// Common length of every solution word.
  virtual std::size_t length() const = 0;
  /// Admissible first symbols with their reduced sub-instances. Only called
  /// when length() > 0.
  virtual std::vector<Branch> branch() const = 0;
  /// Whether the empty word solves a length-0 instance.
  virtual bool atom_test() const = 0;
  virtual std::size_t alphabet_size() const = 0;
  virtual std::string label() const = 0;
};

using InstancePtr = std::shared_ptr<const SelfReducibleInstance>;

struct Graph {
  std::size_t vertices = 0;
  std::vector<std::vector<std::size_t>> adjacency;
  std::vector<bool> self_loop;

  static Graph from_edges(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges);
  static Graph path(std::size_t n);
  static Graph cycle(std::size_t n);
  static Graph empty(std::size_t n);
};

/// Independent sets of a graph. Symbol i of a solution says whether vertex i
/// is in the set; choosing 1 forbids the vertex's later neighbours.
InstancePtr independent_set_instance(Graph graph);

/// Perfect matchings of a bipartite graph given as an n x n biadjacency
/// matrix. Symbol i is the column matched to row i.
InstancePtr perfect_matching_instance(std::vector<std::vector<bool>> biadjacency);

/// Rooted tree of partial solutions. Node 0 is the root; leaves sit at depth
/// length() of the root instance and are exactly the solutions. Branches with
/// no completion are pruned, so an unsolvable instance gives an empty tree.
class DerivationTree {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct Node {
    std::size_t parent = npos;
    Symbol symbol = 0;  // symbol on the edge from the parent
    std::size_t depth = 0;
    std::vector<std::size_t> children;
    InstancePtr instance;
  };

  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t solution_length() const noexcept { return solution_length_; }
  bool is_leaf(std::size_t i) const { return nodes_.at(i).depth == solution_length_; }

  std::vector<std::size_t> leaves() const;
  std::size_t leaf_count() const;
  /// Partial-solution label: the symbols on the path from the root.
  Word word(std::size_t i) const;
  /// Nodes of the subtree rooted at `root`, in depth-first order.
  std::vector<std::size_t> subtree(std::size_t root) const;
  /// Degree of `i` in the subtree rooted at `root` (the parent edge of the
  /// subtree root does not count).
  std::size_t degree_within(std::size_t root, std::size_t i) const;

 private:
  friend DerivationTree build_tree(const InstancePtr& problem, std::size_t node_cap);
  std::vector<Node> nodes_;
  std::size_t solution_length_ = 0;
};

/// Throws NodeCapExceeded once more than node_cap vertices have been visited.
DerivationTree build_tree(const InstancePtr& problem, std::size_t node_cap = kDefaultNodeCap);

/// Exact solution count by depth-first enumeration; same cap semantics.
std::uint64_t brute_force_count(const InstancePtr& problem, std::size_t node_cap = kDefaultNodeCap);

/// Lazy walk on a subtree as an explicit chain: hold with probability 1/2,
/// otherwise move to a uniformly chosen neighbour. States are the subtree
/// nodes in depth-first order, labelled by node index.
struct TreeWalkChain {
  FiniteChain chain;
  std::vector<std::size_t> nodes;
};
TreeWalkChain lazy_walk_chain(const DerivationTree& tree, std::size_t root = 0);

/// Probability of keeping leaf `leaf` when the walk stops on it:
/// min leaf degree / degree. Stationary mass is proportional to degree, so
/// this makes accepted leaves exactly uniform.
double leaf_acceptance(const DerivationTree& tree, std::size_t root, std::size_t leaf);

/// Walk steps between sampling checkpoints that bound the TV distance of
/// each emitted leaf from uniform by `precision`, from any starting node.
/// Found by propagating the lazy walk exactly for subtrees up to
/// `exact_limit` nodes; a hitting-time bound above that.
std::size_t checkpoint_interval(const DerivationTree& tree, std::size_t root, double precision,
                                std::size_t exact_limit = 512);

/// Lazy random walk on the derivation tree that emits solutions. The walk
/// advances in segments of checkpoint_interval() steps; a segment ending on
/// a leaf emits it (after the acceptance correction), otherwise the walk
/// just continues. The tree must outlive the sampler.
///
/// A segment of T lazy steps is simulated as Binomial(T, 1/2) moves (the
/// popcount of T generator bits) followed by that many uniform-neighbour
/// moves; each pick takes ceil(log2 deg) bits per attempt and rejects
/// out-of-range values, so the choice is exactly uniform.
class AlmostUniformSampler {
 public:
  AlmostUniformSampler(const DerivationTree& tree, std::size_t root, double epsilon, std::uint64_t seed);

  /// Skips the interval computation when the caller already has it.
  struct FixedInterval {
    std::size_t steps;
  };
  AlmostUniformSampler(const DerivationTree& tree, std::size_t root, FixedInterval interval, std::uint64_t seed);

  /// Node index of the next emitted leaf.
  std::size_t next_leaf();
  /// Full solution word of the next emitted leaf.
  Word next() { return tree_->word(next_leaf()); }

  std::size_t interval() const noexcept { return interval_; }
  std::uint64_t steps_taken() const noexcept { return steps_; }

 private:
  void advance(std::size_t steps);
  std::uint32_t take_bits(unsigned count);

  const DerivationTree* tree_;
  std::size_t root_;
  std::size_t interval_;
  std::uint32_t min_leaf_degree_ = 0;
  // Subtree in local indices: neighbours of local node v are
  // neighbours_[offsets_[v] .. offsets_[v + 1]).
  std::vector<std::size_t> global_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> neighbours_;
  std::vector<bool> leaf_;
  std::uint32_t current_ = 0;
  std::uint64_t steps_ = 0;
  Rng rng_;
  std::uint64_t bits_ = 0;
  unsigned bits_left_ = 0;
};

/// One almost-uniform solution. Throws EmptySolutionSet when there is none.
Word almost_uniform_sample(const InstancePtr& problem, double epsilon, std::uint64_t seed,
                           std::size_t node_cap = kDefaultNodeCap);

struct CountEstimate {
  double estimate = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t samples_per_level = 0;
  std::size_t sampled_levels = 0;
  /// True when no ratio had to be estimated (every branch fraction was 0 or 1).
  bool exact = false;
};

struct CountOptions {
  std::size_t node_cap = kDefaultNodeCap;
  /// Worker threads for a level's sample chunks; never changes the result.
  unsigned threads = 1;
};

/// Samples per level: ceil(27 * l / epsilon^2 * ln(2 l / delta)).
std::size_t samples_per_level(std::size_t length, double epsilon, double delta);

/// Level-ratio estimator: at each vertex of the derivation tree with more
/// than one child, estimates the fraction of solutions below the most
/// frequently sampled child, descends into it, and multiplies the inverse
/// fractions together.
CountEstimate approximate_count(const InstancePtr& problem, double epsilon, double delta,
                                std::uint64_t seed, const CountOptions& options = {});

}  // namespace mcmc
