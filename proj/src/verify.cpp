#include "pommer/verify.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pommer/filter_oracle.hpp"
#include "pommer/rng.hpp"

#include "json.hpp"

namespace pommer {

namespace {

constexpr uint8_t kPassage = static_cast<uint8_t>(Cell::Passage);
constexpr uint8_t kRigid = static_cast<uint8_t>(Cell::Rigid);
constexpr uint8_t kWood = static_cast<uint8_t>(Cell::Wood);

std::vector<Grid> template_boards(int n) {
  std::vector<Grid> boards;
  boards.push_back(Grid(n, kPassage));  // open

  {  // funnel: a wall across the middle with a single gap
    Grid g(n, kPassage);
    const int wall = n / 2;
    for (int c = 0; c < n; ++c) g.set(wall, c, kRigid);
    g.set(wall, n / 2, kPassage);
    boards.push_back(g);
  }
  {  // width-1 corridor
    Grid g(n, kRigid);
    const int row = n / 2;
    for (int c = 0; c < n; ++c) g.set(row, c, kPassage);
    boards.push_back(g);
  }
  {  // dead-end pocket: the corridor is closed at its far end
    Grid g(n, kRigid);
    const int row = n / 2;
    for (int c = 0; c < n - 1; ++c) g.set(row, c, kPassage);
    boards.push_back(g);
  }
  {  // crossing corridors
    Grid g(n, kRigid);
    for (int c = 0; c < n; ++c) g.set(n / 2, c, kPassage);
    for (int r = 0; r < n; ++r) g.set(r, n / 2, kPassage);
    boards.push_back(g);
  }
  {  // wood sprinkle
    Grid g(n, kPassage);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if ((r * 3 + c * 5) % 7 == 0) g.set(r, c, kWood);
    boards.push_back(g);
  }
  return boards;
}

std::vector<Grid> scatter_boards(int n, int count, uint64_t seed) {
  std::vector<Grid> boards;
  for (int i = 0; i < count; ++i) {
    Rng rng(Rng::derive(seed, static_cast<uint64_t>(n) * 100003 + i));
    Grid g(n, kPassage);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const double u = rng.next_double();
        if (u < 0.25) g.set(r, c, kRigid);
        else if (u < 0.40) g.set(r, c, kWood);
      }
    boards.push_back(g);
  }
  return boards;
}

std::vector<Position> passage_cells(const Grid& g) {
  std::vector<Position> out;
  for (int r = 0; r < g.size(); ++r)
    for (int c = 0; c < g.size(); ++c)
      if (g.at(r, c) == kPassage) out.push_back({r, c});
  return out;
}

Observation base_observation(const Grid& board, Position agent) {
  Observation obs;
  const int n = board.size();
  obs.self_id = 0;
  obs.self_position = agent;
  obs.ammo = 1;
  obs.blast_strength = 2;
  obs.can_kick = false;
  obs.step = 0;
  obs.teammate_alive = true;
  obs.board_size = n;
  obs.view_radius = n;  // full view: windowing is not under test here
  obs.bomb_timer = 10;
  obs.flame_life = 2;
  obs.max_steps = 800;
  obs.terrain = board;
  obs.powerups = Grid(n, kNoPowerup);
  obs.flame_lives = Grid(n, 0);
  return obs;
}

nlohmann::json observation_json(const Observation& obs) {
  nlohmann::json j;
  j["board_size"] = obs.board_size;
  j["self"] = {obs.self_position.row, obs.self_position.col};
  j["ammo"] = obs.ammo;
  j["blast_strength"] = obs.blast_strength;
  j["can_kick"] = obs.can_kick;
  std::vector<std::string> rows;
  for (int r = 0; r < obs.board_size; ++r) {
    std::string row;
    for (int c = 0; c < obs.board_size; ++c) {
      uint8_t t = obs.terrain.at(r, c);
      row += (t == kRigid) ? '#' : (t == kWood) ? '+' : '.';
    }
    rows.push_back(row);
  }
  j["terrain"] = rows;
  nlohmann::json bombs = nlohmann::json::array();
  for (const ObservedBomb& b : obs.bombs) {
    bombs.push_back({{"pos", {b.position.row, b.position.col}},
                     {"life", b.life},
                     {"blast_strength", b.blast_strength}});
  }
  j["bombs"] = bombs;
  nlohmann::json flames = nlohmann::json::array();
  for (int r = 0; r < obs.board_size; ++r)
    for (int c = 0; c < obs.board_size; ++c)
      if (obs.flame_lives.at(r, c) > 0)
        flames.push_back({{"pos", {r, c}}, {"life", obs.flame_lives.at(r, c)}});
  j["flames"] = flames;
  nlohmann::json others = nlohmann::json::array();
  for (const ObservedAgent& a : obs.agents)
    others.push_back({{"id", a.id}, {"pos", {a.position.row, a.position.col}}});
  j["agents"] = others;
  return j;
}

class Checker {
 public:
  Checker(const VerifyOptions& opt, FilterFn filter)
      : opt_(opt), filter_(std::move(filter)) {}

  VerifyStats take_stats() { return std::move(stats_); }

  void check(const Observation& obs) {
    FilterResult f = filter_(obs, opt_.filter);
    ++stats_.states;
    for (int a = 0; a < kNumActions; ++a) {
      if (f.rejected[a]) ++stats_.reject_counts[static_cast<int>(*f.rejected[a])];
    }

    bool any = false;
    for (bool b : f.allowed) any = any || b;
    if (!any) {
      record(obs, "filter returned an empty action set");
      return;
    }

    EscapeOracle oracle(obs);
    if (f.used_fallback) {
      ++stats_.fallback_states;
      if (oracle.any_survivable()) {
        record(obs, "fallback used although a survivable action exists");
      }
      return;
    }
    for (int ai = 0; ai < kNumActions; ++ai) {
      if (!f.allowed[ai]) continue;
      const Action a = static_cast<Action>(ai);
      ++stats_.action_checks;
      bool ok;
      if (a == Action::Bomb) {
        ++stats_.bomb_allowed;
        if (opt_.filter.lookahead_bomb_check) {
          ObservedBomb extra{obs.self_position, obs.bomb_timer, obs.blast_strength,
                             Direction::None};
          ok = EscapeOracle(obs, extra).survivable(Action::Bomb);
        } else {
          ok = oracle.survivable(Action::Bomb);
        }
      } else {
        ok = oracle.survivable(a);
      }
      if (!ok) {
        record(obs, std::string("allowed action is fatal: ") + action_name(a));
      }
    }
  }

 private:
  void record(const Observation& obs, const std::string& what) {
    ++stats_.violations;
    if (static_cast<int>(stats_.examples.size()) < opt_.max_counterexamples) {
      char head[64];
      std::snprintf(head, sizeof(head), "[n=%d agent=(%d,%d)] ", obs.board_size,
                    obs.self_position.row, obs.self_position.col);
      stats_.examples.push_back(head + what);
      if (!opt_.counterexample_dir.empty()) {
        std::filesystem::create_directories(opt_.counterexample_dir);
        nlohmann::json j = observation_json(obs);
        j["violation"] = what;
        char name[48];
        std::snprintf(name, sizeof(name), "violation_%04d.json",
                      static_cast<int>(stats_.examples.size()));
        std::ofstream out(std::filesystem::path(opt_.counterexample_dir) / name);
        out << j.dump(2) << "\n";
      }
    }
  }

  VerifyOptions opt_;
  FilterFn filter_;
  VerifyStats stats_;
};

Position first_free_neighbor(const Grid& board, Position p, Position avoid) {
  const Position deltas[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (Position d : deltas) {
    Position q = p + d;
    if (!board.in_bounds(q) || board.at(q) != kPassage) continue;
    if (q == avoid) continue;
    return q;
  }
  return kDeadPosition;
}

void sweep_board(const Grid& board, Checker& checker) {
  const std::vector<Position> cells = passage_cells(board);
  const int lives[4] = {1, 2, 3, 10};
  const int strengths[2] = {2, 3};

  for (Position agent : cells) {
    // Bare board.
    checker.check(base_observation(board, agent));

    // Single-cell flame overlays.
    for (Position fc : cells) {
      if (fc == agent) continue;  // a live agent never stands on a flame
      for (int life = 1; life <= 2; ++life) {
        Observation obs = base_observation(board, agent);
        obs.flame_lives.set(fc, static_cast<uint8_t>(life));
        checker.check(obs);
      }
    }

    // Single bombs.
    for (Position bp : cells) {
      for (int life : lives) {
        for (int strength : strengths) {
          for (int kick = 0; kick < 2; ++kick) {
            Observation obs = base_observation(board, agent);
            obs.can_kick = kick != 0;
            obs.bombs.push_back({bp, life, strength, Direction::None});
            checker.check(obs);
          }
          if (life <= 2) {
            // Frozen enemy hugging the agent.
            Position ep = first_free_neighbor(board, agent, bp);
            if (!(ep == kDeadPosition)) {
              Observation obs = base_observation(board, agent);
              obs.bombs.push_back({bp, life, strength, Direction::None});
              obs.agents.push_back({1, ep});
              checker.check(obs);
            }
          }
        }
      }
    }

    // Aligned two-bomb chains.
    struct ChainConfig {
      int life1, life2, strength;
    };
    const ChainConfig chains[3] = {{1, 5, 3}, {2, 10, 2}, {3, 4, 3}};
    for (Position b1 : cells) {
      for (Position b2 : cells) {
        if (b1 == b2) continue;
        const bool aligned = (b1.row == b2.row && std::abs(b1.col - b2.col) <= 3) ||
                             (b1.col == b2.col && std::abs(b1.row - b2.row) <= 3);
        if (!aligned) continue;
        for (const ChainConfig& cc : chains) {
          Observation obs = base_observation(board, agent);
          obs.bombs.push_back({b1, cc.life1, cc.strength, Direction::None});
          obs.bombs.push_back({b2, cc.life2, cc.strength, Direction::None});
          checker.check(obs);
        }
      }
    }
  }
}

}  // namespace

VerifyStats verify_filter(const VerifyOptions& options, const FilterFn& filter) {
  FilterFn fn = filter ? filter : FilterFn([](const Observation& obs, const FilterConfig& cfg) {
    return filter_actions(obs, cfg);
  });
  Checker checker(options, fn);
  for (int n : {4, 5, 6}) {
    std::vector<Grid> boards = template_boards(n);
    std::vector<Grid> scatters = scatter_boards(n, options.random_boards, options.seed);
    boards.insert(boards.end(), scatters.begin(), scatters.end());
    int index = 0;
    for (const Grid& board : boards) {
      sweep_board(board, checker);
      ++index;
      if (options.progress) {
        std::fprintf(stderr, "verify: size %d board %d/%d\n", n, index,
                     static_cast<int>(boards.size()));
      }
    }
  }
  return checker.take_stats();
}

}  // namespace pommer
