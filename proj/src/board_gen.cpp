#include <algorithm>
#include <vector>

#include "pommer/engine.hpp"

namespace pommer {

namespace {

std::array<Position, kNumAgents> corner_positions(int n) {
  return {Position{0, 0}, Position{0, n - 1}, Position{n - 1, n - 1}, Position{n - 1, 0}};
}

// Corner cells plus their two orthogonal neighbors stay Passage so every
// agent starts with room to move.
std::vector<Position> spawn_pocket_cells(int n) {
  std::vector<Position> cells;
  for (Position c : corner_positions(n)) {
    cells.push_back(c);
    int dr = c.row == 0 ? 1 : -1;
    int dc = c.col == 0 ? 1 : -1;
    cells.push_back({c.row + dr, c.col});
    cells.push_back({c.row, c.col + dc});
  }
  return cells;
}

// One symmetry unit: a cell and its 180-degree mirror (one entry when the
// cell is its own mirror, i.e. the center of an odd board).
struct PairEntry {
  Position a;
  Position b;
  int size;
};

bool all_corners_connected(const Grid& terrain) {
  const int n = terrain.size();
  std::vector<uint8_t> seen(n * n, 0);
  std::vector<Position> stack = {{0, 0}};
  seen[0] = 1;
  while (!stack.empty()) {
    Position p = stack.back();
    stack.pop_back();
    const Position deltas[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (Position d : deltas) {
      Position q{p.row + d.row, p.col + d.col};
      if (!terrain.in_bounds(q) || seen[q.row * n + q.col]) continue;
      if (static_cast<Cell>(terrain.at(q)) == Cell::Rigid) continue;
      seen[q.row * n + q.col] = 1;
      stack.push_back(q);
    }
  }
  for (Position c : corner_positions(n))
    if (!seen[c.row * n + c.col]) return false;
  return true;
}

// Places exactly `count` cells of `value`, consuming shuffled pair entries.
// The final cell of an odd count may break symmetry when no single-cell entry
// is left; exact counts take precedence.
bool place_cells(Grid& terrain, std::vector<PairEntry>& entries, int count, Cell value) {
  int remaining = count;
  std::vector<PairEntry> unused;
  for (const PairEntry& e : entries) {
    if (remaining == 0) {
      unused.push_back(e);
    } else if (e.size <= remaining) {
      terrain.set(e.a, static_cast<uint8_t>(value));
      if (e.size == 2) terrain.set(e.b, static_cast<uint8_t>(value));
      remaining -= e.size;
    } else {  // remaining == 1, pair of 2
      terrain.set(e.a, static_cast<uint8_t>(value));
      remaining = 0;
    }
  }
  entries.swap(unused);
  return remaining == 0;
}

}  // namespace

GameState generate_board(const GameConfig& config) {
  config.validate();
  const int n = config.board_size;
  const auto pocket = spawn_pocket_cells(n);
  const int free_cells = n * n - static_cast<int>(pocket.size());
  if (config.rigid_count + config.wood_count > free_cells)
    throw GenerationError("generate_board: rigid_count + wood_count exceed available cells");

  GameState state;
  state.config = config;
  state.rng = Rng(config.rng_seed);

  Grid reserved(n, 0);
  for (Position p : pocket) reserved.set(p, 1);

  // Unique symmetry units over non-reserved cells: a cell is listed with its
  // mirror; reserved cells are excluded pairwise (pockets are themselves
  // symmetric, so exclusion keeps units intact).
  std::vector<PairEntry> base_entries;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      Position p{r, c};
      Position m{n - 1 - r, n - 1 - c};
      if (reserved.at(p)) continue;
      if (m.row * n + m.col < r * n + c) continue;  // mirror already visited
      base_entries.push_back({p, m, p == m ? 1 : 2});
    }

  const int max_attempts = 1000;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    state.terrain = Grid(n, static_cast<uint8_t>(Cell::Passage));
    state.powerups = Grid(n, kNoPowerup);
    state.hidden_powerups = Grid(n, kNoPowerup);

    std::vector<PairEntry> entries = base_entries;
    for (size_t i = entries.size(); i > 1; --i)
      std::swap(entries[i - 1], entries[state.rng.next_below(i)]);

    if (!place_cells(state.terrain, entries, config.rigid_count, Cell::Rigid) ||
        !place_cells(state.terrain, entries, config.wood_count, Cell::Wood))
      continue;  // odd-count placement ran out of units; reshuffle

    if (!all_corners_connected(state.terrain)) continue;

    // Hidden items, drawn per wood cell in row-major order.
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (static_cast<Cell>(state.terrain.at(r, c)) == Cell::Wood &&
            state.rng.next_double() < config.powerup_probability)
          state.hidden_powerups.set(r, c,
                                    powerup_code(static_cast<Powerup>(state.rng.next_below(3))));

    const auto corners = corner_positions(n);
    for (int i = 0; i < kNumAgents; ++i) {
      AgentState& a = state.agents[i];
      a.id = i;
      a.position = corners[i];
      a.alive = true;
      a.ammo = config.initial_ammo;
      a.max_ammo = config.initial_ammo;
      a.blast_strength = config.initial_blast;
      a.can_kick = false;
    }
    state.step = 0;
    return state;
  }
  throw GenerationError("generate_board: no connected board found (counts too dense)");
}

}  // namespace pommer
