#pragma once

// Candidates and their neighbor structure.
//
// A candidate is a pair (Y, Z) of nonempty toy sets: Y names the children
// currently in play (as replicas keyed by the toy each owns) and Z the toys
// they contend for. A candidate satisfies
//   almost:      |Y \ Z| <= 1
//   no bullying: no toy x in the universe with best_i(Z) >_i x for all i in Y
// and optimality ({best_i(Z) : i in Y} = Z) follows from those two. Every
// non-terminal candidate (Y != Z) has one neighbor when |Y| = 1 and exactly
// two otherwise, which is what makes the walk in solver.hpp well defined.

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "universe.hpp"

namespace nobully {

template <class Toy>
struct Candidate {
  std::vector<Toy> members;  // Y, sorted by toy id
  std::vector<Toy> toys;     // Z, sorted by toy id

  bool terminal() const { return members == toys; }
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

namespace detail {

template <class Toy>
std::vector<Toy> sorted_unique(std::vector<Toy> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <class Toy>
std::vector<Toy> set_minus(const std::vector<Toy>& a, const std::vector<Toy>& b) {
  std::vector<Toy> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

template <class Toy>
std::vector<Toy> with_element(std::vector<Toy> v, const Toy& x) {
  v.insert(std::upper_bound(v.begin(), v.end(), x), x);
  return v;
}

template <class Toy>
std::vector<Toy> without_element(std::vector<Toy> v, const Toy& x) {
  v.erase(std::remove(v.begin(), v.end(), x), v.end());
  return v;
}

// Favorite-of-Z bounds for every child owning a member of Y, deduplicated by
// owner (same-owner replicas share preferences, hence share the bound).
template <ToyUniverse U>
std::vector<VictimBound<typename U::toy_type>> member_bounds(
    const U& u, const std::vector<typename U::toy_type>& members,
    const std::vector<typename U::toy_type>& toys,
    const typename U::toy_type* skip = nullptr) {
  std::vector<VictimBound<typename U::toy_type>> bounds;
  for (const auto& m : members) {
    if (skip && m == *skip) continue;
    const int c = u.owner(m);
    bool seen = false;
    for (const auto& [c2, b] : bounds)
      if (c2 == c) { seen = true; break; }
    if (!seen)
      bounds.emplace_back(c, best_in(u, c, std::span<const typename U::toy_type>(toys)));
  }
  return bounds;
}

}  // namespace detail

template <class Toy>
Candidate<Toy> make_candidate(std::vector<Toy> members, std::vector<Toy> toys) {
  if (members.empty() || toys.empty())
    throw input_error("candidate sets must be nonempty");
  return Candidate<Toy>{detail::sorted_unique(std::move(members)),
                        detail::sorted_unique(std::move(toys))};
}

// almost && no-bullying, the latter checked against the full universe.
template <ToyUniverse U>
bool is_candidate(const Candidate<typename U::toy_type>& cand, const U& u) {
  if (cand.members.empty() || cand.toys.empty())
    throw input_error("candidate sets must be nonempty");
  if (detail::set_minus(cand.members, cand.toys).size() > 1) return false;
  const auto bounds = detail::member_bounds(u, cand.members, cand.toys);
  return !scan_any_victim(
      u, std::span<const VictimBound<typename U::toy_type>>(bounds));
}

template <ToyUniverse U>
bool is_candidate(std::vector<typename U::toy_type> members,
                  std::vector<typename U::toy_type> toys, const U& u) {
  return is_candidate(make_candidate(std::move(members), std::move(toys)), u);
}

// Worst victim available to the bounded children, by child j's preferences.
// Thin wrapper so callers can stay on the universe's accelerated search.
template <ToyUniverse U>
std::optional<typename U::toy_type> victim_worst(
    const U& u, int j,
    std::span<const VictimBound<typename U::toy_type>> bounds) {
  if (bounds.empty())
    throw input_error("victim_worst needs at least one bound");
  return u.victim_worst(j, bounds);
}

enum class NeighborCase { start, singleton, equal_size, larger_y };
enum class Move { start, added_child, removed_child, added_toy, removed_toy };

template <class Toy>
struct NeighborStep {
  Candidate<Toy> to;
  NeighborCase via = NeighborCase::start;
  Move move = Move::start;
  std::optional<Toy> element;  // what was added or removed
  std::optional<Toy> pivot;    // larger_y only: the replica j that was resolved
};

// The annotated neighbor list of a non-terminal candidate. Deterministic
// order: in the equal-size case the right neighbor (toy removed) comes
// first; in the larger-Y case the smaller replica id (owner, toy) is
// resolved first.
template <ToyUniverse U>
std::vector<NeighborStep<typename U::toy_type>> neighbor_steps(
    const Candidate<typename U::toy_type>& cand, const U& u) {
  using Toy = typename U::toy_type;
  const auto& Y = cand.members;
  const auto& Z = cand.toys;
  if (Y.empty() || Z.empty())
    throw input_error("candidate sets must be nonempty");
  if (cand.terminal())
    throw contract_error("terminal candidate (Y == Z) has no neighbors to walk");
  if (Y.size() != Z.size() && Y.size() != Z.size() + 1)
    throw internal_error("malformed candidate: |Y| must be |Z| or |Z|+1");
  if (detail::set_minus(Y, Z).size() > 1)
    throw internal_error("malformed candidate: |Y \\ Z| > 1");

  std::vector<NeighborStep<Toy>> out;

  if (Y.size() == 1) {
    // The only candidate with first component {i} is ({i}, {worst_i}); its
    // unique neighbor adds the worst toy's replica to Y.
    const Toy& i = Y[0];
    const Toy w = u.worst_of(u.owner(i));
    if (!(Z.size() == 1 && Z[0] == w))
      throw internal_error("malformed candidate: singleton Y must pair with "
                           "the owner's worst toy");
    out.push_back(NeighborStep<Toy>{
        Candidate<Toy>{detail::sorted_unique(std::vector<Toy>{i, w}), Z},
        NeighborCase::singleton, Move::added_child, w, std::nullopt});
    return out;
  }

  if (Y.size() == Z.size()) {
    // Z \ Y is a single toy k; drop it from Z or add its replica to Y.
    const auto extra = detail::set_minus(Z, Y);
    if (extra.size() != 1)
      throw internal_error("malformed candidate: |Y| == |Z| with Y != Z "
                           "requires |Z \\ Y| == 1");
    const Toy& k = extra[0];
    out.push_back(NeighborStep<Toy>{
        Candidate<Toy>{Y, detail::without_element(Z, k)},
        NeighborCase::equal_size, Move::removed_toy, k, std::nullopt});
    out.push_back(NeighborStep<Toy>{
        Candidate<Toy>{detail::with_element(Y, k), Z},
        NeighborCase::equal_size, Move::added_child, k, std::nullopt});
    return out;
  }

  // |Y| = |Z| + 1: exactly one pair of replicas shares a favorite in Z.
  std::vector<std::pair<Toy, Toy>> favorite;  // (member, best_of_Z)
  favorite.reserve(Y.size());
  for (const Toy& m : Y)
    favorite.emplace_back(
        m, best_in(u, u.owner(m), std::span<const Toy>(Z)));
  std::vector<Toy> tied;
  for (std::size_t a = 0; a < favorite.size(); ++a)
    for (std::size_t b = a + 1; b < favorite.size(); ++b)
      if (favorite[a].second == favorite[b].second) {
        if (tied.empty()) {
          tied.push_back(favorite[a].first);
          tied.push_back(favorite[b].first);
        } else if (!(tied[0] == favorite[a].first && tied[1] == favorite[b].first)) {
          throw internal_error("malformed candidate: favorite collision is not unique");
        }
      }
  if (tied.size() != 2)
    throw internal_error("malformed candidate: |Y| == |Z|+1 requires exactly "
                         "one favorite collision");
  // smaller replica id (owner, toy) resolves first
  if (std::pair(u.owner(tied[1]), tied[1]) < std::pair(u.owner(tied[0]), tied[0]))
    std::swap(tied[0], tied[1]);

  for (const Toy& j : tied) {
    const auto bounds = detail::member_bounds(u, Y, Z, &j);
    const auto victim = u.victim_worst(
        u.owner(j), std::span<const VictimBound<Toy>>(bounds));
    if (!victim) {
      out.push_back(NeighborStep<Toy>{
          Candidate<Toy>{detail::without_element(Y, j), Z},
          NeighborCase::larger_y, Move::removed_child, j, j});
    } else {
      out.push_back(NeighborStep<Toy>{
          Candidate<Toy>{Y, detail::with_element(Z, *victim)},
          NeighborCase::larger_y, Move::added_toy, *victim, j});
    }
  }
  return out;
}

template <ToyUniverse U>
std::vector<Candidate<typename U::toy_type>> neighbors(
    const Candidate<typename U::toy_type>& cand, const U& u) {
  std::vector<Candidate<typename U::toy_type>> out;
  for (auto& step : neighbor_steps(cand, u)) out.push_back(std::move(step.to));
  return out;
}

}  // namespace nobully
