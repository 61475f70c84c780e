#include "gazeaffect/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "gazeaffect/data_io.hpp"
#include "gazeaffect/error.hpp"

namespace gazeaffect::model {

namespace {

Tensor make(std::string name, std::size_t rows, std::size_t cols) {
    return Tensor{std::move(name), rows, cols, std::vector<double>(rows * cols, 0.0)};
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// out = W x + b for W rows x cols.
void affine(const Tensor& w, const Tensor& b, const double* x, double* out) {
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double* row = &w.data[r * w.cols];
        double s = b.data[r];
        for (std::size_t c = 0; c < w.cols; ++c) s += row[c] * x[c];
        out[r] = s;
    }
}

// grad_w += d x^T, grad_b += d
void accumulate_outer(Tensor& gw, Tensor* gb, const double* d, const double* x) {
    for (std::size_t r = 0; r < gw.rows; ++r) {
        const double dr = d[r];
        if (gb) gb->data[r] += dr;
        if (dr == 0.0) continue;
        double* row = &gw.data[r * gw.cols];
        for (std::size_t c = 0; c < gw.cols; ++c) row[c] += dr * x[c];
    }
}

// out += W^T d
void transpose_times(const Tensor& w, const double* d, double* out) {
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double dr = d[r];
        if (dr == 0.0) continue;
        const double* row = &w.data[r * w.cols];
        for (std::size_t c = 0; c < w.cols; ++c) out[c] += dr * row[c];
    }
}

void check_shapes(const NetworkParams& p) {
    const std::size_t h = p.lstm_u.cols;
    const std::size_t fused = h + p.pers_w.rows + p.stim_w.rows + p.env_w.rows;
    const bool ok = p.lstm_w.rows == 4 * h && p.lstm_w.cols == kSequenceChannels && p.lstm_u.rows == 4 * h &&
                    p.lstm_b.rows == 4 * h && p.pers_w.cols == kPersonalityDim && p.pers_b.rows == p.pers_w.rows &&
                    p.stim_w.cols == kStimulusDim && p.stim_b.rows == p.stim_w.rows && p.env_w.cols == kEnvDim &&
                    p.env_b.rows == p.env_w.rows && p.fuse_w.cols == fused && p.fuse_b.rows == p.fuse_w.rows &&
                    p.out_w.rows == kClasses && p.out_w.cols == p.fuse_w.rows && p.out_b.rows == kClasses;
    if (!ok) throw Error(Errc::ShapeMismatch, "network parameter shapes are inconsistent");
}

struct Cache {
    std::size_t h = 0;
    // Per step: gates (4H, post-activation), cell, tanh(cell), hidden.
    std::vector<double> gates, cell, tanh_cell, hidden;
    std::vector<double> pers_z, stim_z, env_z;
    std::vector<double> fused_in;  // [h_T, a_p, a_s, a_e]
    std::vector<double> fuse_z, fuse_out;  // pre-activation and post-dropout
    std::array<double, kClasses> probs{};
};

void run_forward(const NetworkParams& p, const Example& ex, const std::vector<double>* mask, Cache& c) {
    const std::size_t h = p.hidden();
    const std::size_t T = kSequenceSteps;
    c.h = h;
    c.gates.assign(T * 4 * h, 0.0);
    c.cell.assign(T * h, 0.0);
    c.tanh_cell.assign(T * h, 0.0);
    c.hidden.assign(T * h, 0.0);
    std::vector<double> z(4 * h);
    for (std::size_t t = 0; t < T; ++t) {
        affine(p.lstm_w, p.lstm_b, ex.sequence[t].data(), z.data());
        if (t > 0) {
            const double* hp = &c.hidden[(t - 1) * h];
            for (std::size_t r = 0; r < 4 * h; ++r) {
                const double* row = &p.lstm_u.data[r * h];
                double s = 0.0;
                for (std::size_t k = 0; k < h; ++k) s += row[k] * hp[k];
                z[r] += s;
            }
        }
        double* g = &c.gates[t * 4 * h];
        for (std::size_t k = 0; k < h; ++k) {
            g[k] = sigmoid(z[k]);
            g[h + k] = sigmoid(z[h + k]);
            g[2 * h + k] = std::tanh(z[2 * h + k]);
            g[3 * h + k] = sigmoid(z[3 * h + k]);
            const double prev = t > 0 ? c.cell[(t - 1) * h + k] : 0.0;
            const double cell = g[h + k] * prev + g[k] * g[2 * h + k];
            c.cell[t * h + k] = cell;
            c.tanh_cell[t * h + k] = std::tanh(cell);
            c.hidden[t * h + k] = g[3 * h + k] * c.tanh_cell[t * h + k];
        }
    }

    const std::size_t np = p.pers_w.rows, ns = p.stim_w.rows, ne = p.env_w.rows;
    c.fused_in.assign(h + np + ns + ne, 0.0);
    std::copy_n(&c.hidden[(T - 1) * h], h, c.fused_in.begin());
    c.pers_z.assign(np, 0.0);
    c.stim_z.assign(ns, 0.0);
    c.env_z.assign(ne, 0.0);
    if (np) affine(p.pers_w, p.pers_b, ex.personality.data(), c.pers_z.data());
    if (ns) affine(p.stim_w, p.stim_b, ex.stimulus.data(), c.stim_z.data());
    affine(p.env_w, p.env_b, ex.env.data(), c.env_z.data());
    for (std::size_t k = 0; k < np; ++k) c.fused_in[h + k] = std::max(0.0, c.pers_z[k]);
    for (std::size_t k = 0; k < ns; ++k) c.fused_in[h + np + k] = std::max(0.0, c.stim_z[k]);
    for (std::size_t k = 0; k < ne; ++k) c.fused_in[h + np + ns + k] = std::max(0.0, c.env_z[k]);

    const std::size_t nf = p.fuse_w.rows;
    c.fuse_z.assign(nf, 0.0);
    c.fuse_out.assign(nf, 0.0);
    affine(p.fuse_w, p.fuse_b, c.fused_in.data(), c.fuse_z.data());
    for (std::size_t k = 0; k < nf; ++k) {
        const double a = std::max(0.0, c.fuse_z[k]);
        c.fuse_out[k] = mask ? a * (*mask)[k] : a;
    }
    std::array<double, kClasses> logits{};
    affine(p.out_w, p.out_b, c.fuse_out.data(), logits.data());
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t k = 0; k < kClasses; ++k) {
        c.probs[k] = std::exp(logits[k] - mx);
        sum += c.probs[k];
    }
    for (double& v : c.probs) v /= sum;
    for (double v : c.probs)
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteActivation, "network produced a non-finite probability");
}

void run_backward(const NetworkParams& p, const Example& ex, const std::vector<double>* mask, const Cache& c,
                  const std::array<double, kClasses>& dlogits, NetworkParams& g) {
    const std::size_t h = c.h;
    const std::size_t T = kSequenceSteps;
    const std::size_t np = p.pers_w.rows, ns = p.stim_w.rows, ne = p.env_w.rows, nf = p.fuse_w.rows;

    accumulate_outer(g.out_w, &g.out_b, dlogits.data(), c.fuse_out.data());
    std::vector<double> dz(nf, 0.0);
    transpose_times(p.out_w, dlogits.data(), dz.data());
    for (std::size_t k = 0; k < nf; ++k) {
        if (mask) dz[k] *= (*mask)[k];
        if (c.fuse_z[k] <= 0.0) dz[k] = 0.0;
    }
    accumulate_outer(g.fuse_w, &g.fuse_b, dz.data(), c.fused_in.data());
    std::vector<double> dv(c.fused_in.size(), 0.0);
    transpose_times(p.fuse_w, dz.data(), dv.data());

    auto dense_back = [&](std::size_t offset, std::size_t n, const std::vector<double>& pre, Tensor& gw, Tensor& gb,
                          const double* input) {
        if (n == 0) return;
        std::vector<double> d(n);
        for (std::size_t k = 0; k < n; ++k) d[k] = pre[k] > 0.0 ? dv[offset + k] : 0.0;
        accumulate_outer(gw, &gb, d.data(), input);
    };
    dense_back(h, np, c.pers_z, g.pers_w, g.pers_b, ex.personality.data());
    dense_back(h + np, ns, c.stim_z, g.stim_w, g.stim_b, ex.stimulus.data());
    dense_back(h + np + ns, ne, c.env_z, g.env_w, g.env_b, ex.env.data());

    std::vector<double> dh(dv.begin(), dv.begin() + static_cast<std::ptrdiff_t>(h));
    std::vector<double> dc(h, 0.0), dgate(4 * h), dh_prev(h);
    for (std::size_t t = T; t-- > 0;) {
        const double* gt = &c.gates[t * 4 * h];
        for (std::size_t k = 0; k < h; ++k) {
            const double i = gt[k], f = gt[h + k], gg = gt[2 * h + k], o = gt[3 * h + k];
            const double tc = c.tanh_cell[t * h + k];
            const double prev = t > 0 ? c.cell[(t - 1) * h + k] : 0.0;
            const double dct = dc[k] + dh[k] * o * (1.0 - tc * tc);
            dgate[k] = dct * gg * i * (1.0 - i);
            dgate[h + k] = dct * prev * f * (1.0 - f);
            dgate[2 * h + k] = dct * i * (1.0 - gg * gg);
            dgate[3 * h + k] = dh[k] * tc * o * (1.0 - o);
            dc[k] = dct * f;
        }
        accumulate_outer(g.lstm_w, &g.lstm_b, dgate.data(), ex.sequence[t].data());
        if (t > 0) {
            const double* hp = &c.hidden[(t - 1) * h];
            accumulate_outer(g.lstm_u, nullptr, dgate.data(), hp);
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            transpose_times(p.lstm_u, dgate.data(), dh_prev.data());
            dh.swap(dh_prev);
        }
    }
}

void glorot(Tensor& t, std::mt19937_64& rng) {
    if (t.rows == 0 || t.cols == 0) return;
    const double limit = std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (double& v : t.data) v = u(rng);
}

}  // namespace

std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::Eye: return "eye";
        case Variant::EyePersonality: return "eye_personality";
        case Variant::EyeStimulus: return "eye_stimulus";
        case Variant::Full: return "full";
    }
    return "?";
}

Variant parse_variant(std::string_view name) {
    for (Variant v : {Variant::Eye, Variant::EyePersonality, Variant::EyeStimulus, Variant::Full})
        if (variant_name(v) == name) return v;
    throw Error(Errc::InvalidConfig, "unknown model variant '" + std::string(name) + "'");
}

bool uses_personality(Variant v) { return v == Variant::EyePersonality || v == Variant::Full; }
bool uses_stimulus(Variant v) { return v == Variant::EyeStimulus || v == Variant::Full; }

ModelConfig ModelConfig::from_config(const config::Document& doc) {
    ModelConfig c;
    auto count = [&](std::string_view key, std::size_t fallback) {
        const double v = doc.number(key, static_cast<double>(fallback));
        if (v < 0 || v != std::floor(v)) throw Error(Errc::InvalidConfig, std::string(key) + " must be a count");
        return static_cast<std::size_t>(v);
    };
    c.learning_rate = doc.number("model.learning_rate", c.learning_rate);
    c.dropout = doc.number("model.dropout", c.dropout);
    c.noise_sigma = doc.number("model.noise_sigma", c.noise_sigma);
    c.weight_decay = doc.number("model.weight_decay", c.weight_decay);
    c.lstm_hidden = count("model.lstm_hidden", c.lstm_hidden);
    c.personality_width = count("model.personality_width", c.personality_width);
    c.stimulus_width = count("model.stimulus_width", c.stimulus_width);
    c.env_width = count("model.env_width", c.env_width);
    c.fusion_width = count("model.fusion_width", c.fusion_width);
    c.batch_size = count("model.batch_size", c.batch_size);
    c.max_epochs = count("model.max_epochs", c.max_epochs);
    c.patience = count("model.patience", c.patience);
    c.seed = count("model.seed", c.seed);
    const std::string weights = doc.string("model.class_weights", "inverse");
    if (weights == "inverse") c.class_weights = ClassWeightsMode::Inverse;
    else if (weights == "uniform") c.class_weights = ClassWeightsMode::Uniform;
    else throw Error(Errc::InvalidConfig, "model.class_weights must be inverse or uniform");
    c.variant = parse_variant(doc.string("model.variant", std::string(variant_name(c.variant))));
    c.validate();
    return c;
}

void ModelConfig::validate() const {
    if (!(learning_rate > 0.0)) throw Error(Errc::InvalidConfig, "learning_rate must be > 0");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(Errc::InvalidConfig, "dropout must be in [0,1)");
    if (!(noise_sigma >= 0.0)) throw Error(Errc::InvalidConfig, "noise_sigma must be >= 0");
    if (!(weight_decay >= 0.0)) throw Error(Errc::InvalidConfig, "weight_decay must be >= 0");
    if (patience < 1) throw Error(Errc::InvalidConfig, "patience must be >= 1");
    if (lstm_hidden < 1 || fusion_width < 1 || env_width < 1) throw Error(Errc::InvalidConfig, "layer widths must be >= 1");
    if (batch_size < 1) throw Error(Errc::InvalidConfig, "batch_size must be >= 1");
    if (uses_personality(variant) && personality_width < 1)
        throw Error(Errc::InvalidConfig, "personality_width must be >= 1 for this variant");
    if (uses_stimulus(variant) && stimulus_width < 1)
        throw Error(Errc::InvalidConfig, "stimulus_width must be >= 1 for this variant");
}

NetworkParams NetworkParams::zeros(const ModelConfig& config) {
    const std::size_t h = config.lstm_hidden;
    const std::size_t np = uses_personality(config.variant) ? config.personality_width : 0;
    const std::size_t ns = uses_stimulus(config.variant) ? config.stimulus_width : 0;
    const std::size_t ne = config.env_width, nf = config.fusion_width;
    NetworkParams p;
    p.variant = config.variant;
    p.lstm_w = make("lstm.w", 4 * h, kSequenceChannels);
    p.lstm_u = make("lstm.u", 4 * h, h);
    p.lstm_b = make("lstm.b", 4 * h, 1);
    p.pers_w = make("personality.w", np, kPersonalityDim);
    p.pers_b = make("personality.b", np, 1);
    p.stim_w = make("stimulus.w", ns, kStimulusDim);
    p.stim_b = make("stimulus.b", ns, 1);
    p.env_w = make("env.w", ne, kEnvDim);
    p.env_b = make("env.b", ne, 1);
    p.fuse_w = make("fusion.w", nf, h + np + ns + ne);
    p.fuse_b = make("fusion.b", nf, 1);
    p.out_w = make("output.w", kClasses, nf);
    p.out_b = make("output.b", kClasses, 1);
    return p;
}

NetworkParams NetworkParams::initialize(const ModelConfig& config, std::mt19937_64& rng) {
    NetworkParams p = zeros(config);
    for (Tensor* t : {&p.lstm_w, &p.lstm_u, &p.pers_w, &p.stim_w, &p.env_w, &p.fuse_w, &p.out_w}) glorot(*t, rng);
    const std::size_t h = config.lstm_hidden;
    for (std::size_t k = 0; k < h; ++k) p.lstm_b.data[h + k] = 1.0;
    // Small positive biases keep rectifiers alive at the start.
    for (Tensor* t : {&p.pers_b, &p.stim_b, &p.env_b, &p.fuse_b}) std::fill(t->data.begin(), t->data.end(), 0.01);
    return p;
}

std::vector<Tensor*> NetworkParams::tensors() {
    return {&lstm_w, &lstm_u, &lstm_b, &pers_w, &pers_b, &stim_w, &stim_b,
            &env_w,  &env_b,  &fuse_w, &fuse_b, &out_w,  &out_b};
}

std::vector<const Tensor*> NetworkParams::tensors() const {
    return {&lstm_w, &lstm_u, &lstm_b, &pers_w, &pers_b, &stim_w, &stim_b,
            &env_w,  &env_b,  &fuse_w, &fuse_b, &out_w,  &out_b};
}

std::size_t NetworkParams::parameter_count() const {
    std::size_t n = 0;
    for (const Tensor* t : tensors()) n += t->data.size();
    return n;
}

void NetworkParams::fill(double value) {
    for (Tensor* t : tensors()) std::fill(t->data.begin(), t->data.end(), value);
}

bool NetworkParams::all_finite() const {
    for (const Tensor* t : tensors())
        for (double v : t->data)
            if (!std::isfinite(v)) return false;
    return true;
}

std::string serialize_params(const NetworkParams& params) {
    std::ostringstream out;
    out << "gazeaffect-network 1\n";
    out << "variant " << variant_name(params.variant) << "\n";
    for (const Tensor* t : params.tensors()) {
        out << "tensor " << t->name << " " << t->rows << " " << t->cols << "\n";
        for (std::size_t r = 0; r < t->rows; ++r) {
            for (std::size_t c = 0; c < t->cols; ++c) {
                if (c) out << ' ';
                out << io::format_roundtrip((*t)(r, c));
            }
            out << "\n";
        }
    }
    return out.str();
}

NetworkParams parse_params(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "gazeaffect-network" || version != 1)
        throw Error(Errc::MalformedRow, "checkpoint header missing or unsupported");
    std::string variant;
    if (!(in >> word >> variant) || word != "variant") throw Error(Errc::MalformedRow, "checkpoint variant missing");
    NetworkParams p;
    p.variant = parse_variant(variant);
    for (Tensor* t : p.tensors()) {
        std::string name;
        std::size_t rows = 0, cols = 0;
        if (!(in >> word >> name >> rows >> cols) || word != "tensor")
            throw Error(Errc::MalformedRow, "checkpoint tensor header malformed");
        t->name = name;
        t->rows = rows;
        t->cols = cols;
        t->data.resize(rows * cols);
        for (double& v : t->data) {
            std::string tok;
            if (!(in >> tok)) throw Error(Errc::MalformedRow, "checkpoint tensor '" + name + "' is truncated");
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size())
                throw Error(Errc::MalformedRow, "checkpoint value '" + tok + "' in '" + name + "' is not a number");
        }
    }
    const NetworkParams reference = NetworkParams::zeros(ModelConfig{});
    const auto ref = reference.tensors();
    const auto got = p.tensors();
    for (std::size_t i = 0; i < got.size(); ++i)
        if (got[i]->name != ref[i]->name)
            throw Error(Errc::MalformedRow, "checkpoint tensor '" + got[i]->name + "' out of order");
    check_shapes(p);
    if (!p.all_finite()) throw Error(Errc::MalformedRow, "checkpoint contains non-finite values");
    return p;
}

void save_params(const NetworkParams& params, const std::filesystem::path& path) {
    io::write_file_atomic(path, serialize_params(params));
}

NetworkParams load_params(const std::filesystem::path& path) { return parse_params(io::read_file(path)); }

std::vector<double> dropout_mask(std::size_t width, double rate, std::mt19937_64& rng) {
    std::vector<double> mask(width, 1.0);
    if (rate <= 0.0) return mask;
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    for (double& m : mask) m = keep(rng) ? scale : 0.0;
    return mask;
}

std::array<double, kClasses> forward(const NetworkParams& params, const Example& ex, Mode mode, double dropout,
                                     std::mt19937_64* rng) {
    check_shapes(params);
    Cache cache;
    std::vector<double> mask;
    if (mode == Mode::Train && dropout > 0.0) {
        if (!rng) throw Error(Errc::InvalidSpec, "training-mode forward needs a random generator");
        mask = dropout_mask(params.fuse_w.rows, dropout, *rng);
    }
    run_forward(params, ex, mask.empty() ? nullptr : &mask, cache);
    return cache.probs;
}

double loss(const std::array<double, kClasses>& probs, int true_class, const std::array<double, kClasses>& weights) {
    const auto y = static_cast<std::size_t>(true_class);
    return -weights[y] * std::log(std::max(probs[y], 1e-12));
}

double batch_loss(const NetworkParams& params, std::span<const Example> batch,
                  const std::array<double, kClasses>& weights, std::span<const std::vector<double>> masks,
                  NetworkParams* grad) {
    check_shapes(params);
    if (batch.empty()) throw Error(Errc::EmptySplit, "empty batch");
    if (!masks.empty() && masks.size() != batch.size())
        throw Error(Errc::ShapeMismatch, "dropout masks do not match the batch size");
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    Cache cache;
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Example& ex = batch[i];
        if (ex.label < 0 || ex.label >= static_cast<int>(kClasses))
            throw Error(Errc::ShapeMismatch, "label outside 0..2");
        const std::vector<double>* mask = masks.empty() ? nullptr : &masks[i];
        if (mask && mask->size() != params.fuse_w.rows) throw Error(Errc::ShapeMismatch, "dropout mask width");
        run_forward(params, ex, mask, cache);
        total += loss(cache.probs, ex.label, weights);
        if (!grad) continue;
        const auto y = static_cast<std::size_t>(ex.label);
        const double w = weights[y] * inv_n;
        if (w == 0.0 || cache.probs[y] < 1e-12) continue;
        std::array<double, kClasses> dlogits{};
        for (std::size_t k = 0; k < kClasses; ++k) dlogits[k] = w * (cache.probs[k] - (k == y ? 1.0 : 0.0));
        run_backward(params, ex, mask, cache, dlogits, *grad);
    }
    if (grad && !grad->all_finite()) throw Error(Errc::NonFiniteGradient, "gradient contains non-finite values");
    return total * inv_n;
}

Adam::Adam(const NetworkParams& shape, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), b1_(beta1), b2_(beta2), eps_(epsilon) {
    for (const Tensor* t : shape.tensors()) {
        m_.emplace_back(t->data.size(), 0.0);
        v_.emplace_back(t->data.size(), 0.0);
    }
}

void Adam::step(NetworkParams& params, const NetworkParams& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    auto ps = params.tensors();
    auto gs = grad.tensors();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto& m = m_[i];
        auto& v = v_[i];
        auto& p = ps[i]->data;
        const auto& g = gs[i]->data;
        for (std::size_t k = 0; k < p.size(); ++k) {
            m[k] = b1_ * m[k] + (1.0 - b1_) * g[k];
            v[k] = b2_ * v[k] + (1.0 - b2_) * g[k] * g[k];
            p[k] -= lr_ * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps_);
        }
    }
}

}  // namespace gazeaffect::model
