#include "tauleap/history.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tauleap/error.hpp"

namespace tauleap {

ChannelHistory::ChannelHistory(std::size_t channels)
    : nodes_(channels, std::vector<Node>{Node{0.0, 0}}), cursor_(channels, 0) {}

bool ChannelHistory::same_time(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1e-300});
}

std::optional<ChannelHistory::Node> ChannelHistory::next_stored(std::size_t j) const {
  if (at_frontier(j)) return std::nullopt;
  return nodes_[j][cursor_[j] + 1];
}

std::int64_t ChannelHistory::extend(std::size_t j, double delta, RngStream& rng) {
  if (!at_frontier(j)) throw NumericalError("extend called with stored history to the right");
  if (delta <= 0.0) return count(j);
  const Node& last = nodes_[j].back();
  Node next{last.lambda + delta, last.count + sample_poisson(delta, rng)};
  nodes_[j].push_back(next);
  return next.count;
}

std::int64_t ChannelHistory::sample_at(std::size_t j, double target, RngStream& rng) {
  auto& list = nodes_[j];
  const std::size_t c = cursor_[j];
  if (same_time(target, list[c].lambda)) return list[c].count;
  if (target < list[c].lambda) {
    std::ostringstream os;
    os << "history query at lambda=" << target << " left of the cursor " << list[c].lambda;
    throw NumericalError(os.str());
  }
  // First node with lambda > target, searching right of the cursor.
  auto it = std::upper_bound(list.begin() + static_cast<std::ptrdiff_t>(c), list.end(), target,
                             [](double t, const Node& n) { return t < n.lambda; });
  const auto hi = static_cast<std::size_t>(it - list.begin());
  const std::size_t lo = hi - 1;
  if (same_time(target, list[lo].lambda)) return list[lo].count;
  if (hi < list.size() && same_time(target, list[hi].lambda)) return list[hi].count;

  if (hi == list.size()) {
    Node next{target, list[lo].count + sample_poisson(target - list[lo].lambda, rng)};
    list.push_back(next);
    return next.count;
  }
  const Node left = list[lo];
  const Node right = list[hi];
  const double width = right.lambda - left.lambda;
  if (!(width > 0.0)) throw NumericalError("zero-length internal-time interval in bridge sampling");
  const double p = std::clamp((target - left.lambda) / width, 0.0, 1.0);
  Node mid{target, left.count + sample_binomial(right.count - left.count, p, rng)};
  list.insert(it, mid);
  return mid.count;
}

void ChannelHistory::advance(std::size_t j, double target) {
  const auto& list = nodes_[j];
  for (std::size_t k = cursor_[j]; k < list.size(); ++k) {
    if (same_time(list[k].lambda, target)) {
      cursor_[j] = k;
      return;
    }
    if (list[k].lambda > target) break;
  }
  std::ostringstream os;
  os << "advance: no stored node at lambda=" << target << " on channel " << j;
  throw NumericalError(os.str());
}

ChannelHistory ChannelHistory::rewound() const {
  ChannelHistory copy = *this;
  std::fill(copy.cursor_.begin(), copy.cursor_.end(), 0);
  return copy;
}

bool ChannelHistory::consistent() const {
  for (const auto& list : nodes_) {
    if (list.empty() || list.front().lambda != 0.0 || list.front().count != 0) return false;
    for (std::size_t k = 1; k < list.size(); ++k)
      if (!(list[k].lambda > list[k - 1].lambda) || list[k].count < list[k - 1].count) return false;
  }
  return true;
}

}  // namespace tauleap
