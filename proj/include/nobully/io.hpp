#pragma once

// JSON profile schema and machine-readable outputs. Ids are 1-based on the
// wire and 0-based in memory.
//
// Profile schema:
//   {"children":[1..n], "toys":[1..m], "prefs":{"<child>":[toy,...]},
//    "endowment":{"<toy>":child}}
// `toys` defaults to `children`; `endowment` defaults to the identity and
// may be omitted only when toys == children.

#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "grid.hpp"
#include "prefs.hpp"
#include "solver.hpp"

namespace nobully::io {

using nlohmann::json;

struct ProfileInput {
  Profile profile;
  std::vector<EntityId> owner_of_toy;  // always filled (identity by default)
  bool endowment_given = false;
  bool toys_distinct = false;  // toys differ from children in the input
};

namespace detail {

inline std::vector<int> id_list(const json& arr, const char* what) {
  if (!arr.is_array())
    throw input_error(std::string(what) + " must be an array of ids");
  std::vector<int> ids;
  for (const auto& v : arr) {
    if (!v.is_number_integer())
      throw input_error(std::string(what) + " must contain integer ids");
    ids.push_back(v.get<int>());
  }
  return ids;
}

// require exactly the ids 1..k, any order
inline int dense_count(std::vector<int> ids, const char* what) {
  const int k = static_cast<int>(ids.size());
  std::sort(ids.begin(), ids.end());
  for (int i = 0; i < k; ++i)
    if (ids[static_cast<std::size_t>(i)] != i + 1)
      throw input_error(std::string(what) + " must be exactly the ids 1.." +
                        std::to_string(k));
  if (k == 0) throw input_error(std::string(what) + " must be nonempty");
  return k;
}

}  // namespace detail

inline ProfileInput parse_profile_json(const json& j) {
  if (!j.is_object()) throw input_error("profile must be a JSON object");
  if (!j.contains("children")) throw input_error("profile needs \"children\"");
  if (!j.contains("prefs")) throw input_error("profile needs \"prefs\"");

  ProfileInput in;
  const int n = detail::dense_count(detail::id_list(j["children"], "children"),
                                    "children");
  int m = n;
  if (j.contains("toys")) {
    m = detail::dense_count(detail::id_list(j["toys"], "toys"), "toys");
    in.toys_distinct = m != n;
  }

  in.profile.children = n;
  in.profile.toys = m;
  const json& prefs = j["prefs"];
  if (!prefs.is_object())
    throw input_error("\"prefs\" must map child ids to rankings");
  in.profile.orders.reserve(static_cast<std::size_t>(n));
  for (int c = 1; c <= n; ++c) {
    const std::string key = std::to_string(c);
    if (!prefs.contains(key))
      throw input_error("missing preference ranking for child " + key);
    auto ranking = detail::id_list(prefs[key], "ranking");
    for (int& t : ranking) {
      if (t < 1 || t > m)
        throw input_error("child " + key + " ranks unknown toy " +
                          std::to_string(t));
      t -= 1;
    }
    try {
      in.profile.orders.emplace_back(std::move(ranking));
    } catch (const input_error& e) {
      throw input_error("child " + key + ": " + e.what());
    }
  }
  if (prefs.size() != static_cast<std::size_t>(n))
    throw input_error("\"prefs\" must have exactly one entry per child");
  in.profile.validate();

  if (j.contains("endowment")) {
    in.endowment_given = true;
    const json& endow = j["endowment"];
    if (!endow.is_object())
      throw input_error("\"endowment\" must map toy ids to child ids");
    in.owner_of_toy.assign(static_cast<std::size_t>(m), -1);
    for (int t = 1; t <= m; ++t) {
      const std::string key = std::to_string(t);
      if (!endow.contains(key))
        throw input_error("endowment is missing toy " + key);
      if (!endow[key].is_number_integer())
        throw input_error("endowment of toy " + key + " must be a child id");
      const int c = endow[key].get<int>();
      if (c < 1 || c > n)
        throw input_error("endowment of toy " + key + " names unknown child " +
                          std::to_string(c));
      in.owner_of_toy[static_cast<std::size_t>(t - 1)] = c - 1;
    }
    if (endow.size() != static_cast<std::size_t>(m))
      throw input_error("endowment must cover exactly the toys");
  } else {
    if (m != n)
      throw input_error("an endowment is required when toys differ from children");
    in.owner_of_toy.resize(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t)
      in.owner_of_toy[static_cast<std::size_t>(t)] = t;
  }
  return in;
}

inline ProfileInput load_profile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw input_error("cannot open profile file '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw input_error("profile '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_profile_json(j);
}

inline json profile_to_json(const Profile& p) {
  json j;
  for (int c = 1; c <= p.children; ++c) j["children"].push_back(c);
  for (int t = 1; t <= p.toys; ++t) j["toys"].push_back(t);
  json prefs = json::object();
  for (int c = 0; c < p.children; ++c) {
    json ranking = json::array();
    for (EntityId t : p.orders[static_cast<std::size_t>(c)].ranking())
      ranking.push_back(t + 1);
    prefs[std::to_string(c + 1)] = std::move(ranking);
  }
  j["prefs"] = std::move(prefs);
  return j;
}

// ---- trace serialization (one JSON object per line) ----

inline const char* case_name(NeighborCase c) {
  switch (c) {
    case NeighborCase::start: return "start";
    case NeighborCase::singleton: return "singleton";
    case NeighborCase::equal_size: return "equal";
    case NeighborCase::larger_y: return "larger";
  }
  return "?";
}

inline const char* move_name(Move m) {
  switch (m) {
    case Move::start: return "start";
    case Move::added_child: return "added_child";
    case Move::removed_child: return "removed_child";
    case Move::added_toy: return "added_toy";
    case Move::removed_toy: return "removed_toy";
  }
  return "?";
}

inline json toy_json(EntityId t) { return t + 1; }

inline json toy_json(const GridPoint& p) {
  json a = json::array();
  for (std::int64_t c : p.coords) a.push_back(c);
  return a;
}

template <class Toy>
void write_trace_jsonl(std::ostream& os, const PathTrace<Toy>& trace) {
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& step = trace[k];
    json line;
    line["step"] = k;
    json y = json::array();
    for (const auto& t : step.candidate.members) y.push_back(toy_json(t));
    json z = json::array();
    for (const auto& t : step.candidate.toys) z.push_back(toy_json(t));
    line["Y"] = std::move(y);
    line["Z"] = std::move(z);
    line["case"] = case_name(step.via);
    line["moved"] = move_name(step.move);
    json detail = json::object();
    if (step.element) detail["element"] = toy_json(*step.element);
    if (step.pivot) detail["j"] = toy_json(*step.pivot);
    line["detail"] = std::move(detail);
    os << line.dump() << "\n";
  }
}

}  // namespace nobully::io
