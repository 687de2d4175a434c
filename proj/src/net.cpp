#include "pommer/net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pommer {

uint64_t architecture_hash(const NetConfig& cfg) {
  Fnv1a h;
  h.add_u32(0x706e6574u);  // tag
  h.add_i32(cfg.input_planes);
  h.add_i32(cfg.channels);
  h.add_i32(cfg.board_size);
  h.add_i32(4);  // trunk depth
  h.add_i32(2);  // head channels
  h.add_i32(kNumActions);
  return h.value();
}

template <typename Scalar>
ConvNet<Scalar>::ConvNet(const NetConfig& cfg) : cfg_(cfg) {
  if (cfg.channels < 1 || cfg.input_planes < 1 || cfg.board_size < 2) {
    throw UsageError("invalid network configuration");
  }
  pcells_ = cfg.board_size * cfg.board_size;
  build_layout();
  params_.assign(layout_.total, Scalar(0));
}

template <typename Scalar>
void ConvNet<Scalar>::build_layout() {
  const size_t c = static_cast<size_t>(cfg_.channels);
  const size_t p = static_cast<size_t>(pcells_);
  size_t off = 0;
  auto take = [&off](size_t n) {
    size_t at = off;
    off += n;
    return at;
  };
  layout_.conv_w[0] = take(c * static_cast<size_t>(cfg_.input_planes) * 9);
  layout_.conv_b[0] = take(c);
  for (int l = 1; l < 4; ++l) {
    layout_.conv_w[l] = take(c * c * 9);
    layout_.conv_b[l] = take(c);
  }
  layout_.pconv_w = take(2 * c);
  layout_.pconv_b = take(2);
  layout_.paff_w = take(static_cast<size_t>(kNumActions) * 2 * p);
  layout_.paff_b = take(kNumActions);
  layout_.vconv_w = take(2 * c);
  layout_.vconv_b = take(2);
  layout_.vaff_w = take(2 * p);
  layout_.vaff_b = take(1);
  layout_.total = off;
}

template <typename Scalar>
void ConvNet<Scalar>::init_he(Rng& rng) {
  // Box-Muller; biases stay zero.
  auto gaussian = [&rng]() {
    double u1 = rng.next_double();
    while (u1 <= 0.0) u1 = rng.next_double();
    double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  };
  auto fill = [&](size_t at, size_t count, size_t fan_in) {
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (size_t i = 0; i < count; ++i) params_[at + i] = static_cast<Scalar>(gaussian() * scale);
  };
  const size_t c = static_cast<size_t>(cfg_.channels);
  const size_t p = static_cast<size_t>(pcells_);
  fill(layout_.conv_w[0], c * cfg_.input_planes * 9, static_cast<size_t>(cfg_.input_planes) * 9);
  for (int l = 1; l < 4; ++l) fill(layout_.conv_w[l], c * c * 9, c * 9);
  fill(layout_.pconv_w, 2 * c, c);
  fill(layout_.paff_w, static_cast<size_t>(kNumActions) * 2 * p, 2 * p);
  fill(layout_.vconv_w, 2 * c, c);
  fill(layout_.vaff_w, 2 * p, 2 * p);
}

// Gathers 3x3 neighborhoods into cols [channels*9 x samples*P]; zero padding,
// sample blocks independent. Row index = cin*9 + (dr+1)*3 + (dc+1).
template <typename Scalar>
void ConvNet<Scalar>::im2col(const Mat& src, int channels, int samples, Mat& cols) const {
  const int b = cfg_.board_size;
  const int p = pcells_;
  cols.setZero(channels * 9, static_cast<Eigen::Index>(samples) * p);
  for (int n = 0; n < samples; ++n) {
    const Eigen::Index base = static_cast<Eigen::Index>(n) * p;
    for (int r = 0; r < b; ++r) {
      for (int c = 0; c < b; ++c) {
        const Eigen::Index col = base + r * b + c;
        for (int dr = -1; dr <= 1; ++dr) {
          const int rr = r + dr;
          if (rr < 0 || rr >= b) continue;
          for (int dc = -1; dc <= 1; ++dc) {
            const int cc = c + dc;
            if (cc < 0 || cc >= b) continue;
            const Eigen::Index scol = base + rr * b + cc;
            const int k = (dr + 1) * 3 + (dc + 1);
            for (int ch = 0; ch < channels; ++ch) {
              cols(ch * 9 + k, col) = src(ch, scol);
            }
          }
        }
      }
    }
  }
}

template <typename Scalar>
void ConvNet<Scalar>::col2im(const Mat& dcols, int channels, int samples, Mat& dsrc) const {
  const int b = cfg_.board_size;
  const int p = pcells_;
  dsrc.setZero(channels, static_cast<Eigen::Index>(samples) * p);
  for (int n = 0; n < samples; ++n) {
    const Eigen::Index base = static_cast<Eigen::Index>(n) * p;
    for (int r = 0; r < b; ++r) {
      for (int c = 0; c < b; ++c) {
        const Eigen::Index col = base + r * b + c;
        for (int dr = -1; dr <= 1; ++dr) {
          const int rr = r + dr;
          if (rr < 0 || rr >= b) continue;
          for (int dc = -1; dc <= 1; ++dc) {
            const int cc = c + dc;
            if (cc < 0 || cc >= b) continue;
            const Eigen::Index scol = base + rr * b + cc;
            const int k = (dr + 1) * 3 + (dc + 1);
            for (int ch = 0; ch < channels; ++ch) {
              dsrc(ch, scol) += dcols(ch * 9 + k, col);
            }
          }
        }
      }
    }
  }
}

namespace {

template <typename Scalar>
using MapRowMat =
    Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename Scalar>
using MutRowMat =
    Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename Scalar>
using MapVec = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;
template <typename Scalar>
using MutVec = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;

}  // namespace

template <typename Scalar>
void ConvNet<Scalar>::forward_batch(const std::vector<const FeatureStack*>& batch,
                                    BatchCache& cache) const {
  const int n = static_cast<int>(batch.size());
  if (n == 0) throw UsageError("empty forward batch");
  const int c = cfg_.channels;
  const int p = pcells_;
  const Eigen::Index np = static_cast<Eigen::Index>(n) * p;
  cache.batch = n;

  cache.a0.resize(cfg_.input_planes, np);
  for (int i = 0; i < n; ++i) {
    const FeatureStack& f = *batch[i];
    if (f.board_size != cfg_.board_size ||
        static_cast<int>(f.data.size()) != cfg_.input_planes * p) {
      throw UsageError("feature stack shape does not match network input");
    }
    for (int pl = 0; pl < cfg_.input_planes; ++pl) {
      for (int cell = 0; cell < p; ++cell) {
        cache.a0(pl, static_cast<Eigen::Index>(i) * p + cell) =
            static_cast<Scalar>(f.data[static_cast<size_t>(pl) * p + cell]);
      }
    }
  }

  const Scalar* pp = params_.data();
  const Mat* prev = &cache.a0;
  int prev_c = cfg_.input_planes;
  for (int l = 0; l < 4; ++l) {
    im2col(*prev, prev_c, n, cache.cols[l]);
    MapRowMat<Scalar> w(pp + layout_.conv_w[l], c, prev_c * 9);
    MapVec<Scalar> bias(pp + layout_.conv_b[l], c);
    cache.act[l].noalias() = w * cache.cols[l];
    cache.act[l].colwise() += bias;
    cache.act[l] = cache.act[l].cwiseMax(Scalar(0));
    prev = &cache.act[l];
    prev_c = c;
  }

  MapRowMat<Scalar> pw(pp + layout_.pconv_w, 2, c);
  MapVec<Scalar> pb(pp + layout_.pconv_b, 2);
  cache.hp.noalias() = pw * cache.act[3];
  cache.hp.colwise() += pb;
  cache.hp = cache.hp.cwiseMax(Scalar(0));

  MapRowMat<Scalar> vw(pp + layout_.vconv_w, 2, c);
  MapVec<Scalar> vb(pp + layout_.vconv_b, 2);
  cache.hv.noalias() = vw * cache.act[3];
  cache.hv.colwise() += vb;
  cache.hv = cache.hv.cwiseMax(Scalar(0));

  // Head affines: a sample's [2 x P] block flattens column-major so the
  // feature index is cell*2 + head_channel, matching the weight layout.
  MapRowMat<Scalar> paw(pp + layout_.paff_w, kNumActions, 2 * p);
  MapVec<Scalar> pab(pp + layout_.paff_b, kNumActions);
  MapRowMat<Scalar> vaw(pp + layout_.vaff_w, 1, 2 * p);
  const Scalar vab = pp[layout_.vaff_b];
  cache.logits.resize(kNumActions, n);
  cache.values.resize(n);
  for (int i = 0; i < n; ++i) {
    MapVec<Scalar> hpv(cache.hp.data() + static_cast<size_t>(i) * 2 * p, 2 * p);
    MapVec<Scalar> hvv(cache.hv.data() + static_cast<size_t>(i) * 2 * p, 2 * p);
    cache.logits.col(i).noalias() = paw * hpv + pab;
    cache.values(i) = (vaw * hvv)(0) + vab;
  }
  if (!cache.logits.allFinite() || !cache.values.allFinite()) {
    throw NumericError("non-finite network output");
  }
}

template <typename Scalar>
void ConvNet<Scalar>::backward_batch(const BatchCache& cache, const Mat& dlogits,
                                     const Vec& dvalues, std::vector<Scalar>& grad) const {
  const int n = cache.batch;
  const int c = cfg_.channels;
  const int p = pcells_;
  if (grad.size() != params_.size()) throw UsageError("gradient buffer size mismatch");
  if (dlogits.cols() != n || dvalues.size() != n) throw UsageError("output gradient shape mismatch");

  const Scalar* pp = params_.data();
  Scalar* gp = grad.data();

  // Head affines.
  Mat dhp = Mat::Zero(2, static_cast<Eigen::Index>(n) * p);
  Mat dhv = Mat::Zero(2, static_cast<Eigen::Index>(n) * p);
  {
    MapRowMat<Scalar> paw(pp + layout_.paff_w, kNumActions, 2 * p);
    MutRowMat<Scalar> dpaw(gp + layout_.paff_w, kNumActions, 2 * p);
    MutVec<Scalar> dpab(gp + layout_.paff_b, kNumActions);
    MapRowMat<Scalar> vaw(pp + layout_.vaff_w, 1, 2 * p);
    MutRowMat<Scalar> dvaw(gp + layout_.vaff_w, 1, 2 * p);
    for (int i = 0; i < n; ++i) {
      MapVec<Scalar> hpv(cache.hp.data() + static_cast<size_t>(i) * 2 * p, 2 * p);
      MapVec<Scalar> hvv(cache.hv.data() + static_cast<size_t>(i) * 2 * p, 2 * p);
      MutVec<Scalar> dhpv(dhp.data() + static_cast<size_t>(i) * 2 * p, 2 * p);
      MutVec<Scalar> dhvv(dhv.data() + static_cast<size_t>(i) * 2 * p, 2 * p);
      dpaw.noalias() += dlogits.col(i) * hpv.transpose();
      dpab.noalias() += dlogits.col(i);
      dhpv.noalias() = paw.transpose() * dlogits.col(i);
      dvaw.noalias() += dvalues(i) * hvv.transpose();
      gp[layout_.vaff_b] += dvalues(i);
      dhvv.noalias() = vaw.transpose() * dvalues(i);
    }
  }

  // Head 1x1 convs (relu masked by the cached post-relu activations).
  dhp = ((cache.hp.array() > Scalar(0)).template cast<Scalar>() * dhp.array()).matrix();
  dhv = ((cache.hv.array() > Scalar(0)).template cast<Scalar>() * dhv.array()).matrix();
  Mat da = Mat::Zero(c, static_cast<Eigen::Index>(n) * p);
  {
    MapRowMat<Scalar> pw(pp + layout_.pconv_w, 2, c);
    MutRowMat<Scalar> dpw(gp + layout_.pconv_w, 2, c);
    MutVec<Scalar> dpb(gp + layout_.pconv_b, 2);
    dpw.noalias() += dhp * cache.act[3].transpose();
    dpb.noalias() += dhp.rowwise().sum();
    da.noalias() += pw.transpose() * dhp;

    MapRowMat<Scalar> vw(pp + layout_.vconv_w, 2, c);
    MutRowMat<Scalar> dvw(gp + layout_.vconv_w, 2, c);
    MutVec<Scalar> dvb(gp + layout_.vconv_b, 2);
    dvw.noalias() += dhv * cache.act[3].transpose();
    dvb.noalias() += dhv.rowwise().sum();
    da.noalias() += vw.transpose() * dhv;
  }

  // Trunk, last layer first.
  Mat dz, dcols;
  for (int l = 3; l >= 0; --l) {
    const int in_c = (l == 0) ? cfg_.input_planes : c;
    dz = ((cache.act[l].array() > Scalar(0)).template cast<Scalar>() * da.array()).matrix();
    MapRowMat<Scalar> w(pp + layout_.conv_w[l], c, in_c * 9);
    MutRowMat<Scalar> dw(gp + layout_.conv_w[l], c, in_c * 9);
    MutVec<Scalar> db(gp + layout_.conv_b[l], c);
    dw.noalias() += dz * cache.cols[l].transpose();
    db.noalias() += dz.rowwise().sum();
    if (l > 0) {
      dcols.noalias() = w.transpose() * dz;
      col2im(dcols, in_c, n, da);
    }
  }
}

template <typename Scalar>
typename ConvNet<Scalar>::Output ConvNet<Scalar>::forward(const FeatureStack& features,
                                                          Workspace& ws) const {
  const int c = cfg_.channels;
  const int p = pcells_;
  if (features.board_size != cfg_.board_size ||
      static_cast<int>(features.data.size()) != cfg_.input_planes * p) {
    throw UsageError("feature stack shape does not match network input");
  }
  ws.a0.resize(cfg_.input_planes, p);
  for (int pl = 0; pl < cfg_.input_planes; ++pl) {
    for (int cell = 0; cell < p; ++cell) {
      ws.a0(pl, cell) = static_cast<Scalar>(features.data[static_cast<size_t>(pl) * p + cell]);
    }
  }

  const Scalar* pp = params_.data();
  Mat* prev = &ws.a0;
  int prev_c = cfg_.input_planes;
  Mat* zs[4] = {&ws.z1, &ws.z2, &ws.z3, &ws.z4};
  for (int l = 0; l < 4; ++l) {
    im2col(*prev, prev_c, 1, ws.cols);
    MapRowMat<Scalar> w(pp + layout_.conv_w[l], c, prev_c * 9);
    MapVec<Scalar> bias(pp + layout_.conv_b[l], c);
    zs[l]->noalias() = w * ws.cols;
    zs[l]->colwise() += bias;
    *zs[l] = zs[l]->cwiseMax(Scalar(0));
    prev = zs[l];
    prev_c = c;
  }

  MapRowMat<Scalar> pw(pp + layout_.pconv_w, 2, c);
  MapVec<Scalar> pb(pp + layout_.pconv_b, 2);
  ws.hp.noalias() = pw * (*prev);
  ws.hp.colwise() += pb;
  ws.hp = ws.hp.cwiseMax(Scalar(0));
  MapRowMat<Scalar> vw(pp + layout_.vconv_w, 2, c);
  MapVec<Scalar> vb(pp + layout_.vconv_b, 2);
  ws.hv.noalias() = vw * (*prev);
  ws.hv.colwise() += vb;
  ws.hv = ws.hv.cwiseMax(Scalar(0));

  MapRowMat<Scalar> paw(pp + layout_.paff_w, kNumActions, 2 * p);
  MapVec<Scalar> pab(pp + layout_.paff_b, kNumActions);
  MapRowMat<Scalar> vaw(pp + layout_.vaff_w, 1, 2 * p);
  MapVec<Scalar> hpv(ws.hp.data(), 2 * p);
  MapVec<Scalar> hvv(ws.hv.data(), 2 * p);

  Output out;
  Eigen::Matrix<Scalar, kNumActions, 1> logits = paw * hpv + pab;
  out.value = (vaw * hvv)(0) + pp[layout_.vaff_b];

  const Scalar mx = logits.maxCoeff();
  Scalar sum = Scalar(0);
  for (int a = 0; a < kNumActions; ++a) {
    out.logits[a] = logits(a);
    out.probs[a] = std::exp(logits(a) - mx);
    sum += out.probs[a];
  }
  for (int a = 0; a < kNumActions; ++a) out.probs[a] /= sum;
  for (int a = 0; a < kNumActions; ++a) {
    if (!std::isfinite(out.probs[a]) || !std::isfinite(out.logits[a])) {
      throw NumericError("non-finite network output");
    }
  }
  if (!std::isfinite(out.value)) throw NumericError("non-finite network output");
  return out;
}

template class ConvNet<float>;
template class ConvNet<double>;

namespace {
constexpr const char* kCheckpointMagic = "pommer-net v1";
}

void save_checkpoint(const std::string& path, const ConvNet<float>& net,
                     const CheckpointMeta& meta) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write checkpoint: " + path);
  const NetConfig& cfg = net.config();
  f << kCheckpointMagic << "\n"
    << "arch " << net.arch_hash() << "\n"
    << "board_size " << cfg.board_size << "\n"
    << "channels " << cfg.channels << "\n"
    << "input_planes " << cfg.input_planes << "\n"
    << "params " << net.param_count() << "\n"
    << "iteration " << meta.iteration << "\n"
    << "stage " << meta.stage << "\n"
    << "config_hash " << meta.config_hash << "\n"
    << "data\n";
  static_assert(sizeof(float) == 4);
  f.write(reinterpret_cast<const char*>(net.params().data()),
          static_cast<std::streamsize>(net.param_count() * sizeof(float)));
  if (!f) throw UsageError("short write on checkpoint: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read checkpoint: " + path);
  std::string line;
  if (!std::getline(f, line) || line != kCheckpointMagic) {
    throw UsageError("not a checkpoint file: " + path);
  }
  LoadedCheckpoint out;
  uint64_t arch = 0;
  size_t declared = 0;
  while (std::getline(f, line)) {
    if (line == "data") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "arch") ls >> arch;
    else if (key == "board_size") ls >> out.config.board_size;
    else if (key == "channels") ls >> out.config.channels;
    else if (key == "input_planes") ls >> out.config.input_planes;
    else if (key == "params") ls >> declared;
    else if (key == "iteration") ls >> out.meta.iteration;
    else if (key == "stage") ls >> out.meta.stage;
    else if (key == "config_hash") ls >> out.meta.config_hash;
    else throw UsageError("unknown checkpoint header field: " + key);
    if (!ls) throw UsageError("malformed checkpoint header line: " + line);
  }
  if (line != "data") throw UsageError("checkpoint missing data section: " + path);
  if (architecture_hash(out.config) != arch) {
    throw UsageError("checkpoint architecture hash mismatch: " + path);
  }
  ConvNet<float> probe(out.config);
  if (declared != probe.param_count()) {
    throw UsageError("checkpoint parameter count mismatch: " + path);
  }
  out.params.resize(declared);
  f.read(reinterpret_cast<char*>(out.params.data()),
         static_cast<std::streamsize>(declared * sizeof(float)));
  if (static_cast<size_t>(f.gcount()) != declared * sizeof(float)) {
    throw UsageError("checkpoint data truncated: " + path);
  }
  return out;
}

}  // namespace pommer
