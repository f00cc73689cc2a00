#pragma once

// Strict preferences of children over indivisible toys, a brute-force search
// for exchange sets that satisfy the no-bullying conditions, and the
// top-trading-cycles procedure for comparison.
//
// Ids are dense and 0-based throughout the library; the I/O layer presents
// them 1-based.

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace nobully {

using EntityId = int;

// A total strict ranking over toys 0..m-1, most preferred first. An inverse
// index is built once so pairwise comparisons are O(1).
class StrictOrder {
 public:
  StrictOrder() = default;

  explicit StrictOrder(std::vector<EntityId> ranking)
      : ranking_(std::move(ranking)) {
    rank_of_.assign(ranking_.size(), -1);
    for (std::size_t pos = 0; pos < ranking_.size(); ++pos) {
      const EntityId t = ranking_[pos];
      if (t < 0 || static_cast<std::size_t>(t) >= ranking_.size())
        throw input_error("ranking mentions toy " + std::to_string(t) +
                          " outside 0.." + std::to_string(ranking_.size() - 1));
      if (rank_of_[static_cast<std::size_t>(t)] != -1)
        throw input_error("ranking lists toy " + std::to_string(t) + " twice");
      rank_of_[static_cast<std::size_t>(t)] = static_cast<int>(pos);
    }
  }

  const std::vector<EntityId>& ranking() const { return ranking_; }
  std::size_t size() const { return ranking_.size(); }

  int rank_of(EntityId toy) const {
    if (toy < 0 || static_cast<std::size_t>(toy) >= ranking_.size())
      throw input_error("toy " + std::to_string(toy) +
                        " is not ranked by this order");
    return rank_of_[static_cast<std::size_t>(toy)];
  }

  // a strictly preferred to b
  bool prefers(EntityId a, EntityId b) const {
    return rank_of(a) < rank_of(b);
  }

 private:
  std::vector<EntityId> ranking_;
  std::vector<int> rank_of_;
};

// Most preferred element of a nonempty subset.
inline EntityId best(const StrictOrder& order, std::span<const EntityId> subset) {
  if (subset.empty()) throw input_error("best() of an empty subset");
  EntityId pick = subset[0];
  int pick_rank = order.rank_of(pick);
  for (std::size_t k = 1; k < subset.size(); ++k) {
    const int r = order.rank_of(subset[k]);
    if (r < pick_rank) {
      pick = subset[k];
      pick_rank = r;
    }
  }
  return pick;
}

// Least preferred element overall.
inline EntityId worst(const StrictOrder& order) {
  if (order.size() == 0) throw input_error("worst() of an empty order");
  return order.ranking().back();
}

// Children 0..children-1, toys 0..toys-1, one full ranking per child.
struct Profile {
  int children = 0;
  int toys = 0;
  std::vector<StrictOrder> orders;

  void validate() const {
    if (children <= 0) throw input_error("profile needs at least one child");
    if (toys <= 0) throw input_error("profile needs at least one toy");
    if (orders.size() != static_cast<std::size_t>(children))
      throw input_error("profile needs exactly one order per child");
    for (const auto& o : orders)
      if (o.size() != static_cast<std::size_t>(toys))
        throw input_error("every order must rank exactly the toy set");
  }
};

// All nonempty Y subseteq I that satisfy, with everyone's favorite toy drawn
// from Y itself:
//   optimality:  { best_i(Y) : i in Y } = Y
//   no bullying: no toy x such that best_i(Y) >_i x for every i in Y
// Exhaustive over the 2^n - 1 subsets; existence of at least one such Y is
// guaranteed, which the path-following solver exploits and the tests check.
inline std::vector<std::vector<EntityId>> brute_force_no_bullying(
    const Profile& profile, int exhaustive_bound = 12) {
  profile.validate();
  if (profile.toys != profile.children)
    throw input_error("no-bullying search requires toys == children");
  const int n = profile.children;
  if (n > exhaustive_bound)
    throw size_error("profile has " + std::to_string(n) +
                     " children, above the exhaustive bound of " +
                     std::to_string(exhaustive_bound));

  std::vector<std::vector<EntityId>> found;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<EntityId> members;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) members.push_back(i);

    std::uint32_t image = 0;
    std::vector<EntityId> best_of(static_cast<std::size_t>(n), -1);
    for (EntityId i : members) {
      const EntityId b = best(profile.orders[static_cast<std::size_t>(i)],
                              std::span<const EntityId>(members));
      best_of[static_cast<std::size_t>(i)] = b;
      image |= 1u << b;
    }
    if (image != mask) continue;  // optimality

    bool bullied = false;
    for (EntityId x = 0; x < n && !bullied; ++x) {
      bool all_prefer = true;
      for (EntityId i : members) {
        if (!profile.orders[static_cast<std::size_t>(i)].prefers(
                best_of[static_cast<std::size_t>(i)], x)) {
          all_prefer = false;
          break;
        }
      }
      bullied = all_prefer;
    }
    if (!bullied) found.push_back(std::move(members));
  }
  return found;
}

// child -> toy, injective where assigned
struct Allocation {
  std::vector<EntityId> toy_of_child;
};

// Top-trading-cycles: every remaining child points at the owner of her
// favorite remaining toy; all cycles present clear simultaneously (walked in
// ascending child id, which does not affect the outcome); repeat.
inline Allocation ttc(const Profile& profile,
                      std::span<const EntityId> owner_of_toy) {
  profile.validate();
  if (profile.toys != profile.children)
    throw input_error("ttc requires as many toys as children");
  const int n = profile.children;
  if (owner_of_toy.size() != static_cast<std::size_t>(n))
    throw input_error("endowment must assign every toy");
  std::vector<char> owns(static_cast<std::size_t>(n), 0);
  for (EntityId c : owner_of_toy) {
    if (c < 0 || c >= n || owns[static_cast<std::size_t>(c)])
      throw input_error("endowment must be a toy -> child bijection");
    owns[static_cast<std::size_t>(c)] = 1;
  }

  std::vector<EntityId> toy_of_owner(static_cast<std::size_t>(n));
  for (EntityId t = 0; t < n; ++t)
    toy_of_owner[static_cast<std::size_t>(owner_of_toy[static_cast<std::size_t>(t)])] = t;

  Allocation out;
  out.toy_of_child.assign(static_cast<std::size_t>(n), -1);
  std::vector<char> child_alive(static_cast<std::size_t>(n), 1);
  std::vector<char> toy_alive(static_cast<std::size_t>(n), 1);
  int remaining = n;

  while (remaining > 0) {
    // favorite remaining toy, and through it the child pointed at
    std::vector<EntityId> fav(static_cast<std::size_t>(n), -1);
    std::vector<EntityId> points_at(static_cast<std::size_t>(n), -1);
    for (EntityId i = 0; i < n; ++i) {
      if (!child_alive[static_cast<std::size_t>(i)]) continue;
      for (EntityId t : profile.orders[static_cast<std::size_t>(i)].ranking()) {
        if (toy_alive[static_cast<std::size_t>(t)]) {
          fav[static_cast<std::size_t>(i)] = t;
          points_at[static_cast<std::size_t>(i)] =
              owner_of_toy[static_cast<std::size_t>(t)];
          break;
        }
      }
    }

    // clear every cycle of the pointing graph
    std::vector<int> state(static_cast<std::size_t>(n), 0);  // 0 new, 1 on walk, 2 done
    for (EntityId i = 0; i < n; ++i) {
      if (!child_alive[static_cast<std::size_t>(i)] ||
          state[static_cast<std::size_t>(i)] != 0)
        continue;
      std::vector<EntityId> walk;
      EntityId v = i;
      while (state[static_cast<std::size_t>(v)] == 0) {
        state[static_cast<std::size_t>(v)] = 1;
        walk.push_back(v);
        v = points_at[static_cast<std::size_t>(v)];
      }
      if (state[static_cast<std::size_t>(v)] == 1) {
        // v starts a fresh cycle: everyone from v onward trades
        auto it = std::find(walk.begin(), walk.end(), v);
        for (; it != walk.end(); ++it) {
          const EntityId c = *it;
          out.toy_of_child[static_cast<std::size_t>(c)] =
              fav[static_cast<std::size_t>(c)];
          child_alive[static_cast<std::size_t>(c)] = 0;
          toy_alive[static_cast<std::size_t>(
              toy_of_owner[static_cast<std::size_t>(c)])] = 0;
          --remaining;
        }
      }
      for (EntityId c : walk) state[static_cast<std::size_t>(c)] = 2;
    }
  }
  return out;
}

// Identity endowment: child i starts out with toy i.
inline Allocation ttc(const Profile& profile) {
  std::vector<EntityId> identity(static_cast<std::size_t>(profile.toys));
  for (EntityId t = 0; t < profile.toys; ++t)
    identity[static_cast<std::size_t>(t)] = t;
  return ttc(profile, identity);
}

// Seeded random profile with toys == children. Fisher-Yates is hand-rolled
// so the output depends only on the mt19937_64 stream, not on the standard
// library's distribution internals.
inline Profile random_profile(int n, std::mt19937_64& rng) {
  if (n <= 0) throw input_error("profile needs at least one child");
  Profile p;
  p.children = n;
  p.toys = n;
  p.orders.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<EntityId> perm(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) perm[static_cast<std::size_t>(t)] = t;
    for (int k = n - 1; k > 0; --k) {
      const auto j = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(k + 1));
      std::swap(perm[static_cast<std::size_t>(k)], perm[j]);
    }
    p.orders.emplace_back(std::move(perm));
  }
  return p;
}

inline Profile random_profile(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_profile(n, rng);
}

}  // namespace nobully
