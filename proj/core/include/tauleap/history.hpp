#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tauleap/rng.hpp"

namespace tauleap {

/// Sampled values of the unit-rate Poisson processes Y_j driving each
/// channel, stored as sorted (internal time, count) nodes. Each channel has
/// a cursor at the node of its current internal time.
class ChannelHistory {
 public:
  struct Node {
    double lambda = 0.0;
    std::int64_t count = 0;
  };

  ChannelHistory() = default;
  explicit ChannelHistory(std::size_t channels);

  std::size_t channels() const { return nodes_.size(); }
  const std::vector<Node>& nodes(std::size_t j) const { return nodes_[j]; }

  double lambda(std::size_t j) const { return nodes_[j][cursor_[j]].lambda; }
  std::int64_t count(std::size_t j) const { return nodes_[j][cursor_[j]].count; }
  std::size_t cursor(std::size_t j) const { return cursor_[j]; }

  /// Stored node strictly to the right of the cursor, if any.
  std::optional<Node> next_stored(std::size_t j) const;
  bool at_frontier(std::size_t j) const { return cursor_[j] + 1 == nodes_[j].size(); }

  /// Appends (lambda + delta, Y + Poisson(delta)) at the frontier. The cursor
  /// must sit on the last node. Returns the new count.
  std::int64_t extend(std::size_t j, double delta, RngStream& rng);

  /// Y_j(target) for target >= cursor lambda. Interior targets are bridged
  /// with Binomial(Y_{k+1} - Y_k, (target - l_k)/(l_{k+1} - l_k)); targets
  /// past the frontier extend with a Poisson increment. Targets within a
  /// relative 1e-12 of an existing node snap to it. The new node is stored;
  /// the cursor does not move.
  std::int64_t sample_at(std::size_t j, double target, RngStream& rng);

  /// Moves the cursor onto the node at `target` (which must exist, up to the
  /// snapping tolerance).
  void advance(std::size_t j, double target);

  /// Copy of the full history with every cursor back at the origin node.
  ChannelHistory rewound() const;

  /// Strictly increasing lambda and nondecreasing counts on every channel.
  bool consistent() const;

  static bool same_time(double a, double b);

 private:
  std::vector<std::vector<Node>> nodes_;
  std::vector<std::size_t> cursor_;
};

}  // namespace tauleap
