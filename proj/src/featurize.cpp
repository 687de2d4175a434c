#include "pommer/featurize.hpp"

#include <algorithm>

namespace pommer {

RetrospectiveBoard RetrospectiveBoard::initial(int board_size) {
  RetrospectiveBoard r;
  r.board_size = board_size;
  r.terrain = Grid(board_size, kUnknownCell);
  r.powerups = Grid(board_size, kUnknownCell);
  r.enemy_seen = Grid(board_size, kUnknownCell);
  r.age.assign(board_size * board_size, -1);
  return r;
}

RetrospectiveBoard update_retrospective(const RetrospectiveBoard& prev, const Observation& obs) {
  if (prev.board_size != obs.board_size)
    throw UsageError("update_retrospective: board size mismatch");
  RetrospectiveBoard next = prev;
  const int n = obs.board_size;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      int idx = r * n + c;
      if (obs.terrain.at(r, c) == kUnknownCell) {
        if (next.age[idx] >= 0) next.age[idx] += 1;
        continue;
      }
      next.terrain.set(r, c, obs.terrain.at(r, c));
      next.powerups.set(r, c, obs.powerups.at(r, c));
      next.enemy_seen.set(r, c, 0);
      next.age[idx] = 0;
    }
  for (const ObservedAgent& a : obs.agents)
    if (team_of(a.id) != team_of(obs.self_id)) next.enemy_seen.set(a.position, 1);
  return next;
}

FeatureStack encode(const Observation& obs, const RetrospectiveBoard& retro) {
  if (retro.board_size != obs.board_size)
    throw UsageError("encode: board size mismatch");
  const int n = obs.board_size;
  FeatureStack f;
  f.board_size = n;
  f.data.assign(kFeaturePlanes * n * n, 0.0f);

  f.at(0, obs.self_position.row, obs.self_position.col) = 1.0f;
  for (const ObservedAgent& a : obs.agents) {
    if (a.id == teammate_of(obs.self_id))
      f.at(1, a.position.row, a.position.col) = 1.0f;
    else
      f.at(2, a.position.row, a.position.col) = 1.0f;
  }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      uint8_t t = obs.terrain.at(r, c);
      if (t != kUnknownCell) {
        if (t == static_cast<uint8_t>(Cell::Passage)) f.at(3, r, c) = 1.0f;
        if (t == static_cast<uint8_t>(Cell::Rigid)) f.at(4, r, c) = 1.0f;
        if (t == static_cast<uint8_t>(Cell::Wood)) f.at(5, r, c) = 1.0f;
      }
      uint8_t fl = obs.flame_lives.at(r, c);
      if (fl != kUnknownCell && fl > 0) f.at(6, r, c) = 1.0f;
      uint8_t p = obs.powerups.at(r, c);
      if (p != kUnknownCell && p != kNoPowerup) f.at(9, r, c) = 1.0f;

      uint8_t rt = retro.terrain.at(r, c);
      if (rt != kUnknownCell) {
        if (rt == static_cast<uint8_t>(Cell::Passage)) f.at(10, r, c) = 1.0f;
        if (rt == static_cast<uint8_t>(Cell::Wood)) f.at(11, r, c) = 1.0f;
      }
      uint8_t rp = retro.powerups.at(r, c);
      if (rp != kUnknownCell && rp != kNoPowerup) f.at(12, r, c) = 1.0f;
      uint8_t re = retro.enemy_seen.at(r, c);
      if (re != kUnknownCell && re == 1) f.at(13, r, c) = 1.0f;
    }
  for (const ObservedBomb& b : obs.bombs) {
    f.at(7, b.position.row, b.position.col) =
        static_cast<float>(b.life) / static_cast<float>(obs.bomb_timer);
    f.at(8, b.position.row, b.position.col) =
        std::min(1.0f, static_cast<float>(b.blast_strength) / static_cast<float>(n));
  }
  return f;
}

}  // namespace pommer
