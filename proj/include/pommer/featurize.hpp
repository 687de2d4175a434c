#pragma once

#include <vector>

#include "pommer/state.hpp"

namespace pommer {

// Per-agent memory of the most recently observed value of every cell. Cells
// never seen stay unknown; visible cells always equal ground truth at age 0.
struct RetrospectiveBoard {
  int board_size = 0;
  Grid terrain;       // last-seen Cell, kUnknownCell when never seen
  Grid powerups;      // last-seen powerup code, kUnknownCell when never seen
  Grid enemy_seen;    // 1 when an enemy stood here at last sight, kUnknownCell never seen
  std::vector<int> age;  // steps since last seen, -1 when never seen

  static RetrospectiveBoard initial(int board_size);
  int age_at(int r, int c) const { return age[r * board_size + c]; }
};

// Visible window overwrites (age 0), everything else ages by one step.
// Throws UsageError on board-size mismatch.
[[nodiscard]] RetrospectiveBoard update_retrospective(const RetrospectiveBoard& prev,
                                                      const Observation& obs);

constexpr int kFeaturePlanes = 14;

// The policy input: kFeaturePlanes x B x B floats in [0,1], flat in
// plane-major row-major order. Plane layout (fixed):
//    0 self position            7 bomb life / bomb_timer
//    1 teammate position        8 bomb blast strength / board_size (capped)
//    2 enemies (visible)        9 items (visible, union of kinds)
//    3 passage                 10 remembered passage
//    4 rigid                   11 remembered wood
//    5 wood                    12 remembered items
//    6 flames                  13 remembered enemy positions
// Planes 0-9 come from the current observation alone; 10-13 from the
// retrospective board. Unknown cells are 0 in every plane.
struct FeatureStack {
  int board_size = 0;
  std::vector<float> data;  // kFeaturePlanes * board_size * board_size

  float at(int plane, int r, int c) const {
    return data[(plane * board_size + r) * board_size + c];
  }
  float& at(int plane, int r, int c) {
    return data[(plane * board_size + r) * board_size + c];
  }
};

FeatureStack encode(const Observation& obs, const RetrospectiveBoard& retro);

}  // namespace pommer
