#include "pommer/agents.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "pommer/net.hpp"

namespace pommer {

namespace {

bool is_enemy(const Observation& obs, const ObservedAgent& a) {
  return team_of(a.id) != team_of(obs.self_id);
}

bool walkable_now(const Observation& obs, Position p) {
  if (!obs.terrain.in_bounds(p)) return false;
  if (obs.terrain.at(p) != static_cast<uint8_t>(Cell::Passage)) return false;
  uint8_t fl = obs.flame_lives.at(p);
  if (fl != 0) return false;  // burning or unknown, either way not a path cell
  if (obs.bomb_at(p)) return false;
  if (obs.agent_at(p)) return false;
  return true;
}

// First move of a shortest path to the nearest goal cell over currently
// walkable visible cells. Expansion in Up, Down, Left, Right order makes the
// result deterministic; equal-distance goals resolve to the first reached.
// nullopt when no goal is reachable or the agent already stands on one.
template <typename GoalPred>
std::optional<Action> bfs_toward(const Observation& obs, GoalPred&& is_goal) {
  const int n = obs.board_size;
  if (is_goal(obs.self_position)) return std::nullopt;
  std::vector<int8_t> seen(n * n, 0);
  std::vector<Action> first(n * n, Action::Stop);
  std::deque<Position> queue;
  seen[obs.self_position.row * n + obs.self_position.col] = 1;
  for (Action a : kMoveActions) {
    Position q = obs.self_position + direction_delta(action_direction(a));
    if (!walkable_now(obs, q) || seen[q.row * n + q.col]) continue;
    seen[q.row * n + q.col] = 1;
    first[q.row * n + q.col] = a;
    queue.push_back(q);
  }
  while (!queue.empty()) {
    Position p = queue.front();
    queue.pop_front();
    if (is_goal(p)) return first[p.row * n + p.col];
    for (Action a : kMoveActions) {
      Position q = p + direction_delta(action_direction(a));
      if (!walkable_now(obs, q) || seen[q.row * n + q.col]) continue;
      seen[q.row * n + q.col] = 1;
      first[q.row * n + q.col] = first[p.row * n + p.col];
      queue.push_back(q);
    }
  }
  return std::nullopt;
}

Action first_allowed(const FilterResult& f) {
  for (Action a : kMoveActions) {
    if (f.is_allowed(a)) return a;
  }
  for (Action a : kAllActions) {
    if (f.is_allowed(a)) return a;
  }
  return Action::Stop;
}

bool enemy_within_blast(const Observation& obs) {
  std::vector<Position> blast =
      observed_blast_cells(obs, obs.self_position, obs.blast_strength);
  for (const ObservedAgent& a : obs.agents) {
    if (!is_enemy(obs, a)) continue;
    if (std::find(blast.begin(), blast.end(), a.position) != blast.end()) return true;
  }
  return false;
}

bool adjacent_wood(const Observation& obs) {
  for (Action a : kMoveActions) {
    Position q = obs.self_position + direction_delta(action_direction(a));
    if (obs.terrain.in_bounds(q) && obs.terrain.at(q) == static_cast<uint8_t>(Cell::Wood)) {
      return true;
    }
  }
  return false;
}

std::optional<Action> path_to_powerup(const Observation& obs) {
  return bfs_toward(obs, [&](Position p) {
    uint8_t v = obs.powerups.at(p);
    return v != kUnknownCell && v != kNoPowerup;
  });
}

std::optional<Action> path_to_enemy(const Observation& obs) {
  bool any_enemy = false;
  for (const ObservedAgent& a : obs.agents) any_enemy = any_enemy || is_enemy(obs, a);
  if (!any_enemy) return std::nullopt;
  return bfs_toward(obs, [&](Position p) {
    for (const ObservedAgent& a : obs.agents) {
      if (is_enemy(obs, a) && manhattan(p, a.position) == 1) return true;
    }
    return false;
  });
}

}  // namespace

Action static_act(const Observation&) { return Action::Stop; }

Action smart_random_act(const Observation& obs, bool allow_bomb, Rng& rng,
                        const FilterConfig& cfg) {
  FilterResult f = filter_actions(obs, cfg);
  std::vector<Action> pool = f.allowed_list();
  if (!allow_bomb) {
    std::erase(pool, Action::Bomb);
    if (pool.empty()) return Action::Stop;
  }
  if (pool.size() == 1) return pool[0];
  return pool[rng.next_below(static_cast<uint64_t>(pool.size()))];
}

Action simple_act(const Observation& obs, const FilterConfig& cfg) {
  FilterResult f = filter_actions(obs, cfg);
  if (!f.is_allowed(Action::Stop)) return first_allowed(f);
  if (auto a = path_to_powerup(obs); a && f.is_allowed(*a)) return *a;
  if (f.is_allowed(Action::Bomb) && enemy_within_blast(obs) && lookahead_bomb_check(obs)) {
    return Action::Bomb;
  }
  if (auto a = path_to_enemy(obs); a && f.is_allowed(*a)) return *a;
  if (f.is_allowed(Action::Bomb) && adjacent_wood(obs)) return Action::Bomb;
  return Action::Stop;
}

Action cautious_act(const Observation& obs, const FilterConfig& cfg) {
  FilterResult f = filter_actions(obs, cfg);
  if (!f.is_allowed(Action::Stop)) return first_allowed(f);
  if (auto a = path_to_powerup(obs); a && f.is_allowed(*a)) return *a;
  if (f.is_allowed(Action::Bomb) && guaranteed_kill(obs)) return Action::Bomb;
  if (auto a = path_to_enemy(obs); a && f.is_allowed(*a)) return *a;
  return Action::Stop;
}

bool guaranteed_kill(const Observation& obs) {
  if (obs.ammo <= 0 || obs.bomb_at(obs.self_position)) return false;
  ObservedBomb extra;
  extra.position = obs.self_position;
  extra.life = obs.bomb_timer;
  extra.blast_strength = obs.blast_strength;
  for (const ObservedAgent& a : obs.agents) {
    if (!is_enemy(obs, a)) continue;
    BombTimeline timeline(obs, extra, a.position);
    if (position_doomed(timeline, a.position)) return true;
  }
  return false;
}

namespace {

class StaticAgent final : public Agent {
 public:
  StaticAgent() : Agent("static") {}
  Action act(const Observation& obs) override { return static_act(obs); }
};

class RandomAgent final : public Agent {
 public:
  RandomAgent() : Agent("random"), rng_(0) {}
  void reset(uint64_t seed) override { rng_.reseed(seed); }
  Action act(const Observation&) override {
    return static_cast<Action>(rng_.next_below(kNumActions));
  }

 private:
  Rng rng_;
};

class SmartRandomAgent final : public Agent {
 public:
  explicit SmartRandomAgent(bool allow_bomb)
      : Agent(allow_bomb ? "smart_random" : "smart_random_nobomb"),
        allow_bomb_(allow_bomb),
        rng_(0) {}
  void reset(uint64_t seed) override { rng_.reseed(seed); }
  Action act(const Observation& obs) override {
    return smart_random_act(obs, allow_bomb_, rng_);
  }

 private:
  bool allow_bomb_;
  Rng rng_;
};

class SimpleAgent final : public Agent {
 public:
  SimpleAgent() : Agent("simple") {}
  Action act(const Observation& obs) override { return simple_act(obs); }
};

class CautiousAgent final : public Agent {
 public:
  CautiousAgent() : Agent("cautious") {}
  Action act(const Observation& obs) override { return cautious_act(obs); }
};

}  // namespace

struct NeuralAgent::Scratch {
  ConvNet<float>::Workspace ws;
};

NeuralAgent::NeuralAgent(std::shared_ptr<const ConvNet<float>> net, FilterConfig filter_cfg,
                         bool greedy, std::string kind)
    : Agent(std::move(kind)),
      net_(std::move(net)),
      filter_cfg_(filter_cfg),
      greedy_(greedy),
      rng_(0),
      memory_(RetrospectiveBoard::initial(net_->config().board_size)),
      scratch_(std::make_unique<Scratch>()) {}

NeuralAgent::~NeuralAgent() = default;

void NeuralAgent::reset(uint64_t seed) {
  rng_.reseed(seed);
  memory_ = RetrospectiveBoard::initial(net_->config().board_size);
}

NeuralDecision NeuralAgent::act_full(const Observation& obs) {
  if (obs.board_size != net_->config().board_size)
    throw UsageError("checkpoint expects board size " +
                     std::to_string(net_->config().board_size) + ", game uses " +
                     std::to_string(obs.board_size));
  memory_ = update_retrospective(memory_, obs);
  NeuralDecision d;
  d.features = encode(obs, memory_);
  ConvNet<float>::Output out = net_->forward(d.features, scratch_->ws);
  FilterResult f = filter_actions(obs, filter_cfg_);

  double mass = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    if (f.allowed[a]) mass += out.probs[a];
  }
  int choice = -1;
  if (mass < 1e-12) {
    // The policy puts no mass on any allowed action: uniform over allowed.
    std::vector<Action> pool = f.allowed_list();
    choice = static_cast<int>(
        greedy_ ? pool[0] : pool[rng_.next_below(static_cast<uint64_t>(pool.size()))]);
  } else if (greedy_) {
    double best = -1.0;
    for (int a = 0; a < kNumActions; ++a) {
      if (f.allowed[a] && out.probs[a] > best) {
        best = out.probs[a];
        choice = a;
      }
    }
  } else {
    double u = rng_.next_double() * mass;
    double acc = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      if (!f.allowed[a]) continue;
      acc += out.probs[a];
      choice = a;
      if (u < acc) break;
    }
  }

  // Raw log-softmax of the chosen action; the mask never enters the stored
  // probability.
  float mx = out.logits[0];
  for (int a = 1; a < kNumActions; ++a) mx = std::max(mx, out.logits[a]);
  double lse = 0.0;
  for (int a = 0; a < kNumActions; ++a) lse += std::exp(static_cast<double>(out.logits[a] - mx));
  d.action = static_cast<Action>(choice);
  d.logprob = static_cast<float>(out.logits[choice] - mx - std::log(lse));
  d.value = out.value;
  return d;
}

Action NeuralAgent::act(const Observation& obs) { return act_full(obs).action; }

std::unique_ptr<Agent> make_agent(const std::string& kind) {
  if (kind == "static") return std::make_unique<StaticAgent>();
  if (kind == "random") return std::make_unique<RandomAgent>();
  if (kind == "smart_random") return std::make_unique<SmartRandomAgent>(true);
  if (kind == "smart_random_nobomb") return std::make_unique<SmartRandomAgent>(false);
  if (kind == "simple") return std::make_unique<SimpleAgent>();
  if (kind == "cautious") return std::make_unique<CautiousAgent>();
  if (kind.rfind("neural:", 0) == 0) {
    LoadedCheckpoint ck = load_checkpoint(kind.substr(7));
    auto net = std::make_shared<ConvNet<float>>(ck.config);
    net->params() = ck.params;
    return std::make_unique<NeuralAgent>(std::move(net), FilterConfig{}, false, kind);
  }
  throw UsageError("unknown agent kind: " + kind);
}

}  // namespace pommer
