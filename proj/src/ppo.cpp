#include "pommer/ppo.hpp"

#include <algorithm>
#include <cmath>

namespace pommer {

size_t RolloutBatch::transition_count() const {
  size_t n = 0;
  for (const EpisodeRollout& e : episodes) n += e.transitions.size();
  return n;
}

void compute_returns_advantages(RolloutBatch& batch, const PPOConfig& cfg) {
  const size_t total = batch.transition_count();
  if (total == 0) throw UsageError("empty rollout batch");
  batch.returns.assign(total, 0.0);
  batch.advantages.assign(total, 0.0);

  size_t at = 0;
  for (const EpisodeRollout& e : batch.episodes) {
    const std::vector<Transition>& tr = e.transitions;
    const size_t n = tr.size();
    if (!cfg.use_gae) {
      double run = 0.0;
      for (size_t i = n; i-- > 0;) {
        run = tr[i].reward + cfg.discount * run;
        batch.returns[at + i] = run;
        batch.advantages[at + i] = run - tr[i].value_old;
      }
    } else {
      double adv = 0.0;
      double next_value = 0.0;  // terminal
      for (size_t i = n; i-- > 0;) {
        const double v = tr[i].value_old;
        const double delta = tr[i].reward + cfg.discount * next_value - v;
        adv = delta + cfg.discount * cfg.gae_lambda * adv;
        batch.advantages[at + i] = adv;
        batch.returns[at + i] = adv + v;
        next_value = v;
      }
    }
    at += n;
  }

  if (cfg.normalize_advantages) {
    double mean = 0.0;
    for (double a : batch.advantages) mean += a;
    mean /= static_cast<double>(total);
    double var = 0.0;
    for (double a : batch.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(total);
    const double std = std::sqrt(var);
    if (std >= 1e-8) {
      for (double& a : batch.advantages) a = (a - mean) / std;
    }
  }
}

FlatBatch flatten(const RolloutBatch& batch) {
  const size_t total = batch.transition_count();
  if (batch.returns.size() != total || batch.advantages.size() != total) {
    throw UsageError("flatten before compute_returns_advantages");
  }
  FlatBatch flat;
  flat.features.reserve(total);
  flat.actions.reserve(total);
  flat.logprob_old.reserve(total);
  flat.value_old.reserve(total);
  for (const EpisodeRollout& e : batch.episodes) {
    for (const Transition& t : e.transitions) {
      flat.features.push_back(&t.features);
      flat.actions.push_back(t.action);
      flat.logprob_old.push_back(t.logprob_old);
      flat.value_old.push_back(t.value_old);
    }
  }
  flat.returns = batch.returns;
  flat.advantages = batch.advantages;
  return flat;
}

namespace {

constexpr size_t kForwardChunk = 64;  // bounds im2col scratch memory

// Shared loss loop; grad == nullptr skips the backward pass. The mean is
// taken over indices.size() regardless of chunking.
template <typename Scalar>
double eval_objective(const ConvNet<Scalar>& net, const FlatBatch& flat,
                      const std::vector<size_t>& indices, const PPOConfig& cfg,
                      std::vector<Scalar>* grad) {
  using Mat = typename ConvNet<Scalar>::Mat;
  using Vec = typename ConvNet<Scalar>::Vec;
  const size_t n = indices.size();
  if (n == 0) throw UsageError("empty minibatch");
  if (grad) grad->assign(net.param_count(), Scalar(0));

  const double eps = cfg.clip_epsilon;
  const double alpha = cfg.value_coef;
  const double beta = cfg.entropy_coef;
  double total = 0.0;

  typename ConvNet<Scalar>::BatchCache cache;
  std::vector<const FeatureStack*> chunk;
  for (size_t at = 0; at < n; at += kForwardChunk) {
    const size_t m = std::min(kForwardChunk, n - at);
    chunk.clear();
    for (size_t i = 0; i < m; ++i) chunk.push_back(flat.features[indices[at + i]]);
    net.forward_batch(chunk, cache);

    Mat dlogits;
    Vec dvalues;
    if (grad) {
      dlogits = Mat::Zero(kNumActions, m);
      dvalues = Vec::Zero(m);
    }
    for (size_t i = 0; i < m; ++i) {
      const size_t t = indices[at + i];
      double logits[kNumActions];
      double mx = -1e300;
      for (int a = 0; a < kNumActions; ++a) {
        logits[a] = static_cast<double>(cache.logits(a, static_cast<Eigen::Index>(i)));
        mx = std::max(mx, logits[a]);
      }
      double lse = 0.0;
      for (int a = 0; a < kNumActions; ++a) lse += std::exp(logits[a] - mx);
      lse = mx + std::log(lse);
      double probs[kNumActions];
      for (int a = 0; a < kNumActions; ++a) probs[a] = std::exp(logits[a] - lse);

      const int act = flat.actions[t];
      const double logp = logits[act] - lse;
      const double ratio = std::exp(logp - flat.logprob_old[t]);
      const double adv = flat.advantages[t];
      total += -std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv;
      if (grad && ratio > 1.0 - eps && ratio < 1.0 + eps) {
        const double coef = -adv * ratio / static_cast<double>(n);
        for (int a = 0; a < kNumActions; ++a) {
          const double ind = (a == act) ? 1.0 : 0.0;
          dlogits(a, static_cast<Eigen::Index>(i)) += static_cast<Scalar>(coef * (ind - probs[a]));
        }
      }

      const double v = static_cast<double>(cache.values(static_cast<Eigen::Index>(i)));
      const double vo = flat.value_old[t];
      const double ret = flat.returns[t];
      const double vclip = vo + std::clamp(v - vo, -eps, eps);
      const double b1 = (v - ret) * (v - ret);
      const double b2 = (vclip - ret) * (vclip - ret);
      total += 0.5 * alpha * std::max(b1, b2);
      if (grad) {
        if (b1 >= b2) {
          dvalues(static_cast<Eigen::Index>(i)) +=
              static_cast<Scalar>(alpha * (v - ret) / static_cast<double>(n));
        } else if (std::abs(v - vo) < eps) {
          dvalues(static_cast<Eigen::Index>(i)) +=
              static_cast<Scalar>(alpha * (vclip - ret) / static_cast<double>(n));
        }
      }

      if (beta != 0.0) {
        double entropy = 0.0;
        for (int a = 0; a < kNumActions; ++a) {
          if (probs[a] > 0.0) entropy -= probs[a] * (logits[a] - lse);
        }
        total += -beta * entropy;
        if (grad) {
          for (int a = 0; a < kNumActions; ++a) {
            dlogits(a, static_cast<Eigen::Index>(i)) += static_cast<Scalar>(
                beta * probs[a] * ((logits[a] - lse) + entropy) / static_cast<double>(n));
          }
        }
      }
    }
    if (grad) net.backward_batch(cache, dlogits, dvalues, *grad);
  }
  return total / static_cast<double>(n);
}

}  // namespace

template <typename Scalar>
double ppo_loss(const ConvNet<Scalar>& net, const ConvNet<Scalar>& net_old,
                const RolloutBatch& batch, const PPOConfig& cfg) {
  FlatBatch flat = flatten(batch);
  // Old log-probabilities and values come from net_old, not the stored
  // transitions (identical during training, where net_old did the collecting).
  typename ConvNet<Scalar>::BatchCache cache;
  std::vector<const FeatureStack*> chunk;
  const size_t total = flat.size();
  for (size_t at = 0; at < total; at += kForwardChunk) {
    const size_t m = std::min(kForwardChunk, total - at);
    chunk.clear();
    for (size_t i = 0; i < m; ++i) chunk.push_back(flat.features[at + i]);
    net_old.forward_batch(chunk, cache);
    for (size_t i = 0; i < m; ++i) {
      double mx = -1e300;
      double logits[kNumActions];
      for (int a = 0; a < kNumActions; ++a) {
        logits[a] = static_cast<double>(cache.logits(a, static_cast<Eigen::Index>(i)));
        mx = std::max(mx, logits[a]);
      }
      double lse = 0.0;
      for (int a = 0; a < kNumActions; ++a) lse += std::exp(logits[a] - mx);
      lse = mx + std::log(lse);
      flat.logprob_old[at + i] = logits[flat.actions[at + i]] - lse;
      flat.value_old[at + i] = static_cast<double>(cache.values(static_cast<Eigen::Index>(i)));
    }
  }
  std::vector<size_t> all(total);
  for (size_t i = 0; i < total; ++i) all[i] = i;
  return eval_objective(net, flat, all, cfg, static_cast<std::vector<Scalar>*>(nullptr));
}

template <typename Scalar>
double ppo_loss_grad(const ConvNet<Scalar>& net, const FlatBatch& flat,
                     const std::vector<size_t>& indices, const PPOConfig& cfg,
                     std::vector<Scalar>& grad) {
  return eval_objective(net, flat, indices, cfg, &grad);
}

template double ppo_loss<float>(const ConvNet<float>&, const ConvNet<float>&,
                                const RolloutBatch&, const PPOConfig&);
template double ppo_loss<double>(const ConvNet<double>&, const ConvNet<double>&,
                                 const RolloutBatch&, const PPOConfig&);
template double ppo_loss_grad<float>(const ConvNet<float>&, const FlatBatch&,
                                     const std::vector<size_t>&, const PPOConfig&,
                                     std::vector<float>&);
template double ppo_loss_grad<double>(const ConvNet<double>&, const FlatBatch&,
                                      const std::vector<size_t>&, const PPOConfig&,
                                      std::vector<double>&);

template <typename Scalar>
AdamOptimizer<Scalar>::AdamOptimizer(size_t param_count, double learning_rate)
    : lr_(learning_rate), m_(param_count, 0.0), v_(param_count, 0.0) {}

template <typename Scalar>
void AdamOptimizer<Scalar>::step(std::vector<Scalar>& params, const std::vector<Scalar>& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw UsageError("optimizer size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = static_cast<double>(grad[i]);
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= static_cast<Scalar>(lr_ * mhat / (std::sqrt(vhat) + eps_));
  }
}

template class AdamOptimizer<float>;
template class AdamOptimizer<double>;

}  // namespace pommer
