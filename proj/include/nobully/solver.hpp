#pragma once

// The constructive walk that proves a no-bullying exchange set exists.
//
// Starting from ({s}, {worst toy of s's owner}) the walk repeatedly moves to
// the unique neighbor it did not just come from. Terminal candidates have
// Y == Z; interior ones have exactly two neighbors, singleton-Y ones exactly
// one, and the walk cannot revisit a candidate, so it must end at a terminal
// candidate. Termination is certain for well-formed universes; the step
// budget turns implementation bugs into errors instead of hangs.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "candidate.hpp"
#include "errors.hpp"
#include "universe.hpp"

namespace nobully {

struct SolveOptions {
  std::optional<std::uint64_t> max_steps;  // default 10 * (toys + children)
  bool record_trace = true;    // keep the full candidate sequence
  bool check_each_step = false;  // re-verify no-bullying per step (full scans)
};

template <class Toy>
struct TraceStep {
  Candidate<Toy> candidate;
  NeighborCase via = NeighborCase::start;
  Move move = Move::start;
  std::optional<Toy> element;
  std::optional<Toy> pivot;
};

template <class Toy>
using PathTrace = std::vector<TraceStep<Toy>>;

template <class Toy>
struct PathResult {
  std::vector<Toy> exchange;  // E: the toys finally exchanged (Y == Z)
  std::vector<int> owners;    // C: sorted distinct owners of E
  std::uint64_t steps = 0;    // candidates visited, including the start
  PathTrace<Toy> trace;       // empty when record_trace is off
};

namespace detail {

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  return s < a ? UINT64_MAX : s;
}

inline std::uint64_t saturating_mul10(std::uint64_t a) {
  return a > UINT64_MAX / 10 ? UINT64_MAX : a * 10;
}

}  // namespace detail

template <ToyUniverse U>
PathResult<typename U::toy_type> path_solve(const U& u,
                                            const typename U::toy_type& start,
                                            const SolveOptions& opt = {}) {
  using Toy = typename U::toy_type;
  if (!u.contains(start))
    throw input_error("start toy is not in the universe");

  const std::uint64_t max_steps = opt.max_steps.value_or(detail::saturating_mul10(
      detail::saturating_add(u.toy_count(),
                             static_cast<std::uint64_t>(u.child_count()))));

  const Toy w = u.worst_of(u.owner(start));
  Candidate<Toy> cur = make_candidate(std::vector<Toy>{start}, std::vector<Toy>{w});

  PathResult<Toy> result;
  result.steps = 1;
  if (opt.record_trace)
    result.trace.push_back(TraceStep<Toy>{cur, NeighborCase::start, Move::start,
                                          std::nullopt, std::nullopt});

  std::optional<Candidate<Toy>> prev;
  while (!cur.terminal()) {
    auto steps = neighbor_steps(cur, u);
    const NeighborStep<Toy>* next = nullptr;
    std::size_t back_edges = 0;
    for (const auto& s : steps) {
      if (prev && s.to == *prev) {
        ++back_edges;
        continue;
      }
      if (!next) next = &s;
    }
    if (prev && back_edges != 1)
      throw internal_error("neighbor relation is not symmetric along the path");
    if (!next)
      throw internal_error("walk dead-ended at a singleton candidate away "
                           "from its start");
    if (result.steps >= max_steps)
      throw step_limit_error("walk exceeded " + std::to_string(max_steps) +
                                 " steps; raise max_steps or report a bug",
                             result.steps);
    if (opt.check_each_step && !is_candidate(next->to, u))
      throw internal_error("walk reached a pair violating the candidate "
                           "conditions");
    ++result.steps;
    if (opt.record_trace)
      result.trace.push_back(TraceStep<Toy>{next->to, next->via, next->move,
                                            next->element, next->pivot});
    Candidate<Toy> taken = next->to;  // copy before `steps` dies
    prev = std::move(cur);
    cur = std::move(taken);
  }

  result.exchange = cur.toys;
  for (const Toy& t : result.exchange) result.owners.push_back(u.owner(t));
  std::sort(result.owners.begin(), result.owners.end());
  result.owners.erase(std::unique(result.owners.begin(), result.owners.end()),
                      result.owners.end());
  return result;
}

// Self-owned case: toys == children and child i owns toy i. Returns the
// exchange set Y with everyone's favorite inside Y and nobody left to bully.
struct SolveResult {
  std::vector<EntityId> exchange;  // Y = the returned group of children/toys
  std::uint64_t steps = 0;
  PathTrace<EntityId> trace;
};

inline SolveResult solve(const Profile& profile, EntityId start_child = 0,
                         const SolveOptions& opt = {}) {
  const auto u = ExplicitUniverse::self_owned(profile);
  if (start_child < 0 || start_child >= profile.children)
    throw input_error("start child " + std::to_string(start_child) +
                      " is not in the profile");
  auto r = path_solve(u, start_child, opt);
  return SolveResult{std::move(r.exchange), r.steps, std::move(r.trace)};
}

// Endowed case: arbitrary toy set with owner map. The walk runs on replicas
// (owner(t), t); the result maps back to the exchanged toys E and their
// owners C.
struct EndowedSolveResult {
  std::vector<EntityId> owners;    // C
  std::vector<EntityId> exchange;  // E
  std::uint64_t steps = 0;
  PathTrace<EntityId> trace;
};

inline EndowedSolveResult solve_with_endowment(const Profile& profile,
                                               std::vector<EntityId> owner_of_toy,
                                               EntityId start_toy = 0,
                                               const SolveOptions& opt = {}) {
  const ExplicitUniverse u(profile, std::move(owner_of_toy));
  auto r = path_solve(u, start_toy, opt);
  return EndowedSolveResult{std::move(r.owners), std::move(r.exchange), r.steps,
                            std::move(r.trace)};
}

}  // namespace nobully
