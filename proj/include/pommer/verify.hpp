#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pommer/filter.hpp"

namespace pommer {

// Hook so the checker itself can be exercised against deliberately broken
// filters; the default is filter_actions.
using FilterFn = std::function<FilterResult(const Observation&, const FilterConfig&)>;

struct VerifyOptions {
  FilterConfig filter;
  uint64_t seed = 0;
  int random_boards = 25;            // seeded scatter boards per size
  std::string counterexample_dir;    // when set, violations dump JSON here
  int max_counterexamples = 25;
  bool progress = false;             // one stderr line per board family
};

struct VerifyStats {
  long long states = 0;           // observations checked
  long long action_checks = 0;    // allowed (state, action) pairs verified
  long long fallback_states = 0;  // states where everything was rejected
  long long bomb_allowed = 0;     // states where Bomb stayed allowed
  long long reject_counts[5] = {0, 0, 0, 0, 0};  // by RejectReason
  long long violations = 0;
  std::vector<std::string> examples;  // first few violation descriptions

  bool ok() const { return violations == 0; }
};

// Exhaustive soundness sweep of the filter against the escape-search oracle.
//
// Board family (deterministic given options): sizes 4, 5 and 6; per size a
// fixed set of hand templates (open board, walled funnel, width-1 corridor,
// dead-end pocket, crossing corridors, wood sprinkle) plus `random_boards`
// seeded scatter boards. Per board, the agent is placed on every passage
// cell and combined with: the bare board, every single-cell flame overlay
// (life 1 and 2), every single bomb placement (lives 1, 2, 3 and the full
// timer, strengths 2 and 3, kicking on and off, plus an adjacent frozen
// enemy variant), and aligned two-bomb chains. Full view; no hidden cells.
//
// Checked per state: every allowed action must be survivable under the
// oracle's model (kick-moves and Bomb keep the agent on its own cell; with
// lookahead enabled, Bomb is checked with the hypothetical bomb added), and
// when the filter falls back, no action may be survivable at all.
VerifyStats verify_filter(const VerifyOptions& options, const FilterFn& filter = {});

}  // namespace pommer
