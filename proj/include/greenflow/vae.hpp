#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "greenflow/errors.hpp"
#include "greenflow/preprocess.hpp"
#include "greenflow/rng.hpp"

namespace greenflow {

// Physics-informed VAE on a small in-repo dense-layer engine with manual
// backpropagation. Encoder: tanh trunk plus linear mu/logvar heads.
// Decoder: tanh hidden layers, sigmoid output so reconstructions stay in the
// scaled [0,1] feature space.

struct VaeHyper {
  std::size_t latent_dim = 8;
  std::vector<std::size_t> encoder_widths = {64, 32, 16};
  std::vector<std::size_t> decoder_widths = {16, 32, 64};
  double beta = 1.0;    // KL weight
  double gamma = 0.1;   // physics-consistency penalty weight
  double learning_rate = 0.2;
  std::size_t batch_size = 32;
  std::size_t epochs = 150;
  std::uint64_t seed = 1;
};

struct DenseLayer {
  std::size_t in = 0, out = 0;
  std::vector<double> w;  // out x in, row-major
  std::vector<double> b;  // out

  void init(std::size_t n_in, std::size_t n_out, Rng& rng) {
    in = n_in;
    out = n_out;
    w.resize(in * out);
    b.assign(out, 0.0);
    double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (auto& v : w) v = rng.uniform(-bound, bound);
  }

  // y = W x + b
  void forward(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
      y[o] = acc;
    }
  }

  // accumulates gradients; returns dL/dx
  void backward(const std::vector<double>& x, const std::vector<double>& dy,
                std::vector<double>& dw, std::vector<double>& db,
                std::vector<double>& dx) const {
    dx.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      db[o] += dy[o];
      double* dwr = dw.data() + o * in;
      const double* row = w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        dwr[i] += dy[o] * x[i];
        dx[i] += row[i] * dy[o];
      }
    }
  }
};

struct VaeParams {
  std::size_t input_dim = 0;
  std::size_t latent_dim = 0;
  std::vector<DenseLayer> encoder_trunk;  // tanh after each
  DenseLayer mu_head;                     // linear
  DenseLayer logvar_head;                 // linear
  std::vector<DenseLayer> decoder;        // tanh hidden, sigmoid output

  static VaeParams init(std::size_t input_dim, const VaeHyper& hyper) {
    VaeParams p;
    p.input_dim = input_dim;
    p.latent_dim = hyper.latent_dim;
    Rng rng = Rng::substream(hyper.seed, "init");
    std::size_t d = input_dim;
    for (std::size_t w : hyper.encoder_widths) {
      DenseLayer l;
      l.init(d, w, rng);
      p.encoder_trunk.push_back(std::move(l));
      d = w;
    }
    p.mu_head.init(d, hyper.latent_dim, rng);
    p.logvar_head.init(d, hyper.latent_dim, rng);
    d = hyper.latent_dim;
    for (std::size_t w : hyper.decoder_widths) {
      DenseLayer l;
      l.init(d, w, rng);
      p.decoder.push_back(std::move(l));
      d = w;
    }
    DenseLayer out;
    out.init(d, input_dim, rng);
    p.decoder.push_back(std::move(out));
    return p;
  }

  std::vector<DenseLayer*> all_layers() {
    std::vector<DenseLayer*> ls;
    for (auto& l : encoder_trunk) ls.push_back(&l);
    ls.push_back(&mu_head);
    ls.push_back(&logvar_head);
    for (auto& l : decoder) ls.push_back(&l);
    return ls;
  }
  std::vector<const DenseLayer*> all_layers() const {
    std::vector<const DenseLayer*> ls;
    for (const auto& l : encoder_trunk) ls.push_back(&l);
    ls.push_back(&mu_head);
    ls.push_back(&logvar_head);
    for (const auto& l : decoder) ls.push_back(&l);
    return ls;
  }

  std::vector<double> flatten() const {
    std::vector<double> flat;
    for (const auto* l : all_layers()) {
      flat.insert(flat.end(), l->w.begin(), l->w.end());
      flat.insert(flat.end(), l->b.begin(), l->b.end());
    }
    return flat;
  }

  void unflatten(const std::vector<double>& flat) {
    std::size_t pos = 0;
    for (auto* l : all_layers()) {
      std::copy(flat.begin() + pos, flat.begin() + pos + l->w.size(), l->w.begin());
      pos += l->w.size();
      std::copy(flat.begin() + pos, flat.begin() + pos + l->b.size(), l->b.begin());
      pos += l->b.size();
    }
    if (pos != flat.size()) throw shape_error("unflatten: size mismatch");
  }
};

struct LossBreakdown {
  double recon = 0.0;
  double kl = 0.0;
  double cfd = 0.0;
  double total = 0.0;
};

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct EncoderCache {
  std::vector<std::vector<double>> trunk_in;   // input to each trunk layer
  std::vector<std::vector<double>> trunk_act;  // tanh outputs
  std::vector<double> mu, logvar;
};

inline void encode_cached(const std::vector<double>& x, const VaeParams& p, EncoderCache& c) {
  c.trunk_in.clear();
  c.trunk_act.clear();
  std::vector<double> h = x;
  for (const auto& l : p.encoder_trunk) {
    c.trunk_in.push_back(h);
    std::vector<double> z;
    l.forward(h, z);
    for (auto& v : z) v = std::tanh(v);
    c.trunk_act.push_back(z);
    h = std::move(z);
  }
  p.mu_head.forward(h, c.mu);
  p.logvar_head.forward(h, c.logvar);
}

struct DecoderCache {
  std::vector<std::vector<double>> layer_in;
  std::vector<std::vector<double>> act;  // tanh (hidden) / sigmoid (last)
};

inline void decode_cached(const std::vector<double>& z, const VaeParams& p, DecoderCache& c) {
  c.layer_in.clear();
  c.act.clear();
  std::vector<double> h = z;
  for (std::size_t li = 0; li < p.decoder.size(); ++li) {
    c.layer_in.push_back(h);
    std::vector<double> y;
    p.decoder[li].forward(h, y);
    bool last = li + 1 == p.decoder.size();
    for (auto& v : y) v = last ? sigmoid(v) : std::tanh(v);
    c.act.push_back(y);
    h = std::move(y);
  }
}

}  // namespace detail

inline std::pair<std::vector<double>, std::vector<double>> encode(const std::vector<double>& x,
                                                                  const VaeParams& p) {
  if (x.size() != p.input_dim) throw shape_error("encode: input length mismatch");
  detail::EncoderCache c;
  detail::encode_cached(x, p, c);
  return {c.mu, c.logvar};
}

inline std::vector<double> reparameterize(const std::vector<double>& mu,
                                          const std::vector<double>& logvar,
                                          const std::vector<double>& eps) {
  if (mu.size() != logvar.size() || mu.size() != eps.size())
    throw shape_error("reparameterize: length mismatch");
  std::vector<double> z(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    z[i] = mu[i] + std::exp(0.5 * logvar[i]) * eps[i];
  return z;
}

inline std::vector<double> decode(const std::vector<double>& z, const VaeParams& p) {
  if (z.size() != p.latent_dim) throw shape_error("decode: latent length mismatch");
  detail::DecoderCache c;
  detail::decode_cached(z, p, c);
  return c.act.back();
}

// Closed-form KL for a diagonal Gaussian against the standard normal.
inline double kl_divergence(const std::vector<double>& mu, const std::vector<double>& logvar) {
  double kl = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    kl += 0.5 * (mu[i] * mu[i] + std::exp(logvar[i]) - 1.0 - logvar[i]);
  return kl;
}

inline LossBreakdown loss(const std::vector<double>& x, const std::vector<double>& xhat,
                          const std::vector<double>& mu, const std::vector<double>& logvar,
                          double cfd_term, double beta, double gamma) {
  if (x.size() != xhat.size()) throw shape_error("loss: shape mismatch");
  LossBreakdown lb;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - xhat[i];
    lb.recon += d * d;
  }
  lb.kl = kl_divergence(mu, logvar);
  lb.cfd = cfd_term;
  lb.total = lb.recon + beta * lb.kl + gamma * lb.cfd;
  return lb;
}

// Physics-consistency context: the penalty compares the decoded energy field
// against the energy recomputed from the decoded power and TAT fields with
// the calibrated W*ms -> kWh coefficient. Power/TAT enter as constants; the
// gradient flows through the decoded energy field only.
struct CfdContext {
  bool enabled = false;
  FeatureSchema schema;
  double energy_coeff = 0.0;  // kWh per (W * ms)

  // returns the target energy in scaled units for one decoded row
  double scaled_target(const std::vector<double>& xhat) const {
    std::size_t num_base = schema.width() - schema.numerics.size();
    auto phys = [&](const std::string& name) {
      std::size_t j = numeric_index(name);
      return min_max_invert(xhat[num_base + j], schema.numerics[j].min, schema.numerics[j].max);
    };
    double e_phys = phys("power_w") * phys("tat_ms") * energy_coeff;
    std::size_t je = numeric_index("energy_kwh");
    return min_max_scale(std::clamp(e_phys, schema.numerics[je].min, schema.numerics[je].max),
                         schema.numerics[je].min, schema.numerics[je].max);
  }

  std::size_t energy_column() const {
    return schema.width() - schema.numerics.size() + numeric_index("energy_kwh");
  }
};

struct Gradients {
  std::vector<std::vector<double>> dw;
  std::vector<std::vector<double>> db;

  static Gradients zeros(const VaeParams& p) {
    Gradients g;
    for (const auto* l : p.all_layers()) {
      g.dw.emplace_back(l->w.size(), 0.0);
      g.db.emplace_back(l->b.size(), 0.0);
    }
    return g;
  }
};

// Mean loss over the batch plus parameter gradients. eps holds one standard
// normal draw per (sample, latent dim); cfd_targets, when given, pins the
// physics target per sample (used by the finite-difference oracle).
inline LossBreakdown vae_batch_grads(const std::vector<std::vector<double>>& batch,
                                     const VaeParams& p, const VaeHyper& hyper,
                                     const std::vector<std::vector<double>>& eps,
                                     const CfdContext& cfd, Gradients* grads_out,
                                     const std::vector<double>* cfd_targets = nullptr) {
  if (batch.empty()) throw invalid_input("vae_batch_grads: empty batch");
  double inv_b = 1.0 / static_cast<double>(batch.size());
  LossBreakdown total{};
  Gradients grads = Gradients::zeros(p);
  std::size_t n_enc = p.encoder_trunk.size();

  for (std::size_t bi = 0; bi < batch.size(); ++bi) {
    const auto& x = batch[bi];
    if (x.size() != p.input_dim) throw shape_error("vae_batch_grads: input length mismatch");
    detail::EncoderCache ec;
    detail::encode_cached(x, p, ec);
    std::vector<double> z = reparameterize(ec.mu, ec.logvar, eps[bi]);
    detail::DecoderCache dc;
    detail::decode_cached(z, p, dc);
    const auto& xhat = dc.act.back();

    double cfd_term = 0.0;
    double cfd_target = 0.0;
    if (cfd.enabled) {
      cfd_target = cfd_targets ? (*cfd_targets)[bi] : cfd.scaled_target(xhat);
      cfd_term = std::abs(cfd_target - xhat[cfd.energy_column()]);
    }
    LossBreakdown lb = loss(x, xhat, ec.mu, ec.logvar, cfd_term, hyper.beta, hyper.gamma);
    total.recon += lb.recon * inv_b;
    total.kl += lb.kl * inv_b;
    total.cfd += lb.cfd * inv_b;

    if (!grads_out) continue;

    // output gradient: reconstruction plus the physics term on the energy column
    std::vector<double> dxhat(p.input_dim);
    for (std::size_t i = 0; i < p.input_dim; ++i) dxhat[i] = 2.0 * (xhat[i] - x[i]) * inv_b;
    if (cfd.enabled) {
      double diff = xhat[cfd.energy_column()] - cfd_target;
      double sg = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      dxhat[cfd.energy_column()] += hyper.gamma * sg * inv_b;
    }

    // decoder backward
    std::vector<double> dy = dxhat;
    std::vector<double> dz;
    for (std::size_t li = p.decoder.size(); li-- > 0;) {
      const auto& act = dc.act[li];
      bool last = li + 1 == p.decoder.size();
      std::vector<double> dpre(act.size());
      for (std::size_t i = 0; i < act.size(); ++i)
        dpre[i] = dy[i] * (last ? act[i] * (1.0 - act[i]) : 1.0 - act[i] * act[i]);
      std::size_t gi = n_enc + 2 + li;
      p.decoder[li].backward(dc.layer_in[li], dpre, grads.dw[gi], grads.db[gi], dz);
      dy = dz;
    }

    // reparameterization + KL
    std::vector<double> dmu(p.latent_dim), dlogvar(p.latent_dim);
    for (std::size_t i = 0; i < p.latent_dim; ++i) {
      double sigma = std::exp(0.5 * ec.logvar[i]);
      dmu[i] = dy[i] + hyper.beta * ec.mu[i] * inv_b;
      dlogvar[i] = dy[i] * eps[bi][i] * 0.5 * sigma +
                   hyper.beta * 0.5 * (std::exp(ec.logvar[i]) - 1.0) * inv_b;
    }

    // heads into trunk
    const std::vector<double>& trunk_out = n_enc ? ec.trunk_act.back() : x;
    std::vector<double> dtrunk(trunk_out.size(), 0.0), tmp;
    p.mu_head.backward(trunk_out, dmu, grads.dw[n_enc], grads.db[n_enc], tmp);
    for (std::size_t i = 0; i < dtrunk.size(); ++i) dtrunk[i] += tmp[i];
    p.logvar_head.backward(trunk_out, dlogvar, grads.dw[n_enc + 1], grads.db[n_enc + 1], tmp);
    for (std::size_t i = 0; i < dtrunk.size(); ++i) dtrunk[i] += tmp[i];

    // encoder trunk backward
    for (std::size_t li = n_enc; li-- > 0;) {
      const auto& act = ec.trunk_act[li];
      std::vector<double> dpre(act.size());
      for (std::size_t i = 0; i < act.size(); ++i)
        dpre[i] = dtrunk[i] * (1.0 - act[i] * act[i]);
      std::vector<double> dx;
      p.encoder_trunk[li].backward(ec.trunk_in[li], dpre, grads.dw[li], grads.db[li], dx);
      dtrunk = dx;
    }
  }
  total.total = total.recon + hyper.beta * total.kl + hyper.gamma * total.cfd;
  if (grads_out) *grads_out = std::move(grads);
  return total;
}

inline LossBreakdown backprop_step(const std::vector<std::vector<double>>& batch, VaeParams& p,
                                   const VaeHyper& hyper, const CfdContext& cfd, Rng& rng) {
  std::vector<std::vector<double>> eps(batch.size(), std::vector<double>(p.latent_dim));
  for (auto& row : eps)
    for (auto& v : row) v = rng.normal();
  Gradients grads;
  LossBreakdown lb = vae_batch_grads(batch, p, hyper, eps, cfd, &grads);
  if (!std::isfinite(lb.total))
    throw training_divergence("backprop_step: non-finite loss", lb.total);
  auto layers = p.all_layers();
  for (std::size_t li = 0; li < layers.size(); ++li) {
    for (std::size_t i = 0; i < layers[li]->w.size(); ++i)
      layers[li]->w[i] -= hyper.learning_rate * grads.dw[li][i];
    for (std::size_t i = 0; i < layers[li]->b.size(); ++i)
      layers[li]->b[i] -= hyper.learning_rate * grads.db[li][i];
  }
  return lb;
}

struct EpochLoss {
  std::size_t epoch = 0;
  LossBreakdown train;
  double val_total = 0.0;
};

struct TrainResult {
  VaeParams params;
  std::vector<EpochLoss> history;
};

inline TrainResult train(const Dataset& ds, const VaeHyper& hyper, const CfdContext& cfd) {
  if (ds.matrix.empty() || ds.train_idx.empty())
    throw empty_dataset_error("train: empty dataset");
  TrainResult result;
  result.params = VaeParams::init(ds.schema.width(), hyper);
  Rng shuffle_rng = Rng::substream(hyper.seed, "train/shuffle");
  Rng eps_rng = Rng::substream(hyper.seed, "train/eps");
  Rng val_rng = Rng::substream(hyper.seed, "train/val-eps");

  std::vector<std::size_t> order = ds.train_idx;
  double last_finite = 0.0;
  for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.index(i)]);
    LossBreakdown epoch_loss{};
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      std::size_t end = std::min(order.size(), start + hyper.batch_size);
      std::vector<std::vector<double>> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(ds.matrix[order[i]]);
      LossBreakdown lb;
      try {
        lb = backprop_step(batch, result.params, hyper, cfd, eps_rng);
      } catch (training_divergence&) {
        throw training_divergence("train: diverged at epoch " + std::to_string(epoch),
                                  last_finite);
      }
      last_finite = lb.total;
      epoch_loss.recon += lb.recon;
      epoch_loss.kl += lb.kl;
      epoch_loss.cfd += lb.cfd;
      epoch_loss.total += lb.total;
      ++n_batches;
    }
    double inv = 1.0 / static_cast<double>(n_batches);
    epoch_loss.recon *= inv;
    epoch_loss.kl *= inv;
    epoch_loss.cfd *= inv;
    epoch_loss.total *= inv;

    double val_total = 0.0;
    if (!ds.val_idx.empty()) {
      std::vector<std::vector<double>> vb;
      for (auto i : ds.val_idx) vb.push_back(ds.matrix[i]);
      std::vector<std::vector<double>> eps(vb.size(), std::vector<double>(hyper.latent_dim));
      for (auto& row : eps)
        for (auto& v : row) v = val_rng.normal();
      val_total = vae_batch_grads(vb, result.params, hyper, eps, cfd, nullptr).total;
    }
    result.history.push_back({epoch, epoch_loss, val_total});
  }
  return result;
}

}  // namespace greenflow
