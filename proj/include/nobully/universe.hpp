#pragma once

// The toy universe abstraction the path-following solver runs on. A universe
// is a finite ground set of toys, each owned by a child, with one strict
// preference order per child over all toys. Children enter the walk only as
// replicas (owner, toy) keyed by the toy they own, so the same engine serves
// explicit toy lists and implicit simplex grids.

#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "prefs.hpp"

namespace nobully {

template <class U>
concept ToyUniverse = requires(const U& u, const typename U::toy_type& t, int c) {
  typename U::toy_type;
  { u.owner(t) } -> std::convertible_to<int>;
  { u.prefers(c, t, t) } -> std::convertible_to<bool>;   // first toy strictly preferred by child c
  { u.worst_of(c) } -> std::convertible_to<typename U::toy_type>;
  { u.contains(t) } -> std::convertible_to<bool>;
  { u.toy_count() } -> std::convertible_to<std::uint64_t>;
  { u.child_count() } -> std::convertible_to<int>;
};

// One (child, toy) bound per constraining child: the toy is that child's
// current favorite, and a victim must be strictly below it.
template <class Toy>
using VictimBound = std::pair<int, Toy>;

// Scan the whole universe for victims: toys x with bound >_c x for every
// constraint (c, bound). Returns the scanned child j's least preferred
// victim, or nothing when the victim set is empty. This is the baseline all
// accelerated implementations must agree with.
template <class U>
std::optional<typename U::toy_type> scan_victim_worst(
    const U& u, int j,
    std::span<const VictimBound<typename U::toy_type>> bounds) {
  std::optional<typename U::toy_type> hit;
  u.for_each_toy([&](const typename U::toy_type& x) {
    for (const auto& [c, bound] : bounds)
      if (!u.prefers(c, bound, x)) return;
    if (!hit || u.prefers(j, *hit, x)) hit = x;  // keep the j-worst victim
  });
  return hit;
}

// Any victim at all (used by the no-bullying re-checks).
template <class U>
std::optional<typename U::toy_type> scan_any_victim(
    const U& u, std::span<const VictimBound<typename U::toy_type>> bounds) {
  std::optional<typename U::toy_type> hit;
  u.for_each_toy([&](const typename U::toy_type& x) {
    if (hit) return;
    for (const auto& [c, bound] : bounds)
      if (!u.prefers(c, bound, x)) return;
    hit = x;
  });
  return hit;
}

// Child c's favorite among an explicit toy list.
template <class U>
typename U::toy_type best_in(const U& u, int c,
                             std::span<const typename U::toy_type> toys) {
  if (toys.empty()) throw input_error("best_in() of an empty toy list");
  typename U::toy_type pick = toys[0];
  for (std::size_t k = 1; k < toys.size(); ++k)
    if (u.prefers(c, toys[k], pick)) pick = toys[k];
  return pick;
}

// A universe over dense toy ids 0..m-1 with an explicit owner table. Covers
// both the self-owned case (toys == children, owner is the identity) and
// arbitrary endowments, where each toy acts as a replica of its owner and
// inherits the owner's preferences.
class ExplicitUniverse {
 public:
  using toy_type = EntityId;

  ExplicitUniverse(const Profile& profile, std::vector<EntityId> owner_of_toy)
      : children_(profile.children), toys_(profile.toys),
        owner_(std::move(owner_of_toy)) {
    profile.validate();
    if (owner_.size() != static_cast<std::size_t>(toys_))
      throw input_error("endowment must assign an owner to every toy");
    for (EntityId c : owner_)
      if (c < 0 || c >= children_)
        throw input_error("endowment names child " + std::to_string(c) +
                          " outside the profile");
    rank_.resize(static_cast<std::size_t>(children_));
    worst_.resize(static_cast<std::size_t>(children_));
    for (int c = 0; c < children_; ++c) {
      const auto& order = profile.orders[static_cast<std::size_t>(c)];
      auto& r = rank_[static_cast<std::size_t>(c)];
      r.assign(static_cast<std::size_t>(toys_), 0);
      for (EntityId t = 0; t < toys_; ++t)
        r[static_cast<std::size_t>(t)] = order.rank_of(t);
      worst_[static_cast<std::size_t>(c)] = worst(order);
    }
  }

  // toys == children, child i owns toy i
  static ExplicitUniverse self_owned(const Profile& profile) {
    profile.validate();
    if (profile.toys != profile.children)
      throw input_error("self-owned universe requires toys == children");
    std::vector<EntityId> identity(static_cast<std::size_t>(profile.toys));
    for (EntityId t = 0; t < profile.toys; ++t)
      identity[static_cast<std::size_t>(t)] = t;
    return ExplicitUniverse(profile, std::move(identity));
  }

  int owner(EntityId t) const {
    check(t);
    return owner_[static_cast<std::size_t>(t)];
  }

  bool prefers(int c, EntityId a, EntityId b) const {
    check_child(c);
    check(a);
    check(b);
    const auto& r = rank_[static_cast<std::size_t>(c)];
    return r[static_cast<std::size_t>(a)] < r[static_cast<std::size_t>(b)];
  }

  EntityId worst_of(int c) const {
    check_child(c);
    return worst_[static_cast<std::size_t>(c)];
  }

  bool contains(EntityId t) const { return t >= 0 && t < toys_; }
  std::uint64_t toy_count() const { return static_cast<std::uint64_t>(toys_); }
  int child_count() const { return children_; }

  template <class F>
  void for_each_toy(F&& f) const {
    for (EntityId t = 0; t < toys_; ++t) f(t);
  }

  std::optional<EntityId> victim_worst(
      int j, std::span<const VictimBound<EntityId>> bounds) const {
    return scan_victim_worst(*this, j, bounds);
  }

 private:
  void check(EntityId t) const {
    if (!contains(t))
      throw input_error("toy " + std::to_string(t) + " is not in the universe");
  }
  void check_child(int c) const {
    if (c < 0 || c >= children_)
      throw input_error("child " + std::to_string(c) + " is not in the universe");
  }

  int children_ = 0;
  int toys_ = 0;
  std::vector<EntityId> owner_;
  std::vector<std::vector<int>> rank_;  // child -> toy -> rank, 0 best
  std::vector<EntityId> worst_;
};

static_assert(ToyUniverse<ExplicitUniverse>);

}  // namespace nobully
