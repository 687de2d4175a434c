#pragma once

#include <optional>
#include <vector>

#include "pommer/state.hpp"

namespace pommer {

// Brute-force check of the filter's world model, built as a plain step-by-step
// simulation plus exhaustive enumeration of move sequences. It shares no
// machinery with the filter (which forecasts flames by chain relaxation and
// searches with a memoized longest-survival recursion); both implement the
// same documented model — static bombs, frozen other agents, blast rays over
// observed terrain, horizon bomb_timer + flame_life — so each checks the
// other.
class EscapeOracle {
 public:
  // searcher: the escaping agent's cell; defaults to the observer. When the
  // searcher is someone else, the observer becomes a frozen blocker too.
  // extra: hypothetical bomb added before simulating (life counts from now).
  explicit EscapeOracle(const Observation& obs,
                        const std::optional<ObservedBomb>& extra = std::nullopt,
                        const std::optional<Position>& searcher = std::nullopt);

  // Whether a move sequence starting with `first` keeps the observer
  // flame-free through the horizon. Stop and Bomb keep it in place; a move
  // whose target is blocked also keeps it in place (the engine bounces); the
  // bomb a Bomb action would drop is not modeled, matching the crude filter.
  bool survivable(Action first) const;
  bool any_survivable() const;

  // Whether an agent standing on the searcher cell now can reach the horizon
  // flame-free (it may stay or move each step).
  bool escapes() const;

 private:
  int n_ = 0;
  int horizon_ = 0;
  std::vector<Grid> flames_;  // flames_[k]: 1 where burning at time k
  std::vector<Grid> bombs_;   // bombs_[k]: 1 where a bomb still sits at time k
  Grid walkable_;
  Grid blockers_;
  Position searcher_;
  mutable std::vector<uint8_t> failed_;  // (cell, k) proven non-survivable

  bool entry_blocked(Position p) const;
  bool dfs(Position p, int k) const;
};

}  // namespace pommer
