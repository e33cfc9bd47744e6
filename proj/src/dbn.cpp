#include "onto/dbn.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "onto/errors.hpp"
#include "onto/jsonw.hpp"
#include "onto/textio.hpp"

namespace onto {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> hidden_probs(const Rbm& rbm, const std::vector<double>& v) {
  if (v.size() != rbm.visible) throw ArgumentError("hidden_probs: visible width mismatch");
  std::vector<double> p(rbm.hidden);
  for (std::size_t j = 0; j < rbm.hidden; ++j) {
    double a = rbm.b_hid[j];
    const double* row = rbm.W.data() + j * rbm.visible;
    for (std::size_t i = 0; i < rbm.visible; ++i) a += row[i] * v[i];
    p[j] = sigmoid(a);
  }
  return p;
}

std::vector<double> visible_probs(const Rbm& rbm, const std::vector<double>& h) {
  if (h.size() != rbm.hidden) throw ArgumentError("visible_probs: hidden width mismatch");
  std::vector<double> p(rbm.visible, 0.0);
  for (std::size_t j = 0; j < rbm.hidden; ++j) {
    const double hj = h[j];
    if (hj == 0.0) continue;
    const double* row = rbm.W.data() + j * rbm.visible;
    for (std::size_t i = 0; i < rbm.visible; ++i) p[i] += row[i] * hj;
  }
  for (std::size_t i = 0; i < rbm.visible; ++i) p[i] = sigmoid(p[i] + rbm.b_vis[i]);
  return p;
}

std::vector<double> sample_binary(const std::vector<double>& probs, Rng& rng) {
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = rng.next_bernoulli(probs[i]) ? 1.0 : 0.0;
  return out;
}

Rbm init_rbm(std::size_t visible, std::size_t hidden, Rng& rng) {
  Rbm rbm;
  rbm.visible = visible;
  rbm.hidden = hidden;
  rbm.W.resize(hidden * visible);
  for (double& w : rbm.W) w = rng.next_double(-0.01, 0.01);
  rbm.b_vis.assign(visible, 0.0);
  rbm.b_hid.assign(hidden, 0.0);
  return rbm;
}

void cd_update(Rbm& rbm, const std::vector<std::vector<double>>& batch, std::size_t k, double lr,
               Rng& rng) {
  if (batch.empty()) throw ArgumentError("cd_update: empty batch");
  if (k < 1) throw ArgumentError("cd_update: k must be >= 1");
  std::vector<double> dW(rbm.W.size(), 0.0);
  std::vector<double> dbv(rbm.visible, 0.0);
  std::vector<double> dbh(rbm.hidden, 0.0);
  for (const std::vector<double>& v0 : batch) {
    if (v0.size() != rbm.visible) throw ArgumentError("cd_update: visible width mismatch");
    const std::vector<double> h_data = hidden_probs(rbm, v0);
    std::vector<double> h_bin = sample_binary(h_data, rng);
    std::vector<double> v_model, h_model;
    for (std::size_t step = 1; step <= k; ++step) {
      std::vector<double> v_p = visible_probs(rbm, h_bin);
      if (step < k) {
        const std::vector<double> v_bin = sample_binary(v_p, rng);
        h_bin = sample_binary(hidden_probs(rbm, v_bin), rng);
      } else {
        h_model = hidden_probs(rbm, v_p);
        v_model = std::move(v_p);
      }
    }
    for (std::size_t j = 0; j < rbm.hidden; ++j) {
      double* row = dW.data() + j * rbm.visible;
      for (std::size_t i = 0; i < rbm.visible; ++i)
        row[i] += h_data[j] * v0[i] - h_model[j] * v_model[i];
    }
    for (std::size_t i = 0; i < rbm.visible; ++i) dbv[i] += v0[i] - v_model[i];
    for (std::size_t j = 0; j < rbm.hidden; ++j) dbh[j] += h_data[j] - h_model[j];
  }
  const double scale = lr / static_cast<double>(batch.size());
  for (std::size_t n = 0; n < rbm.W.size(); ++n) rbm.W[n] += scale * dW[n];
  for (std::size_t i = 0; i < rbm.visible; ++i) rbm.b_vis[i] += scale * dbv[i];
  for (std::size_t j = 0; j < rbm.hidden; ++j) rbm.b_hid[j] += scale * dbh[j];
}

std::vector<double> to_dense(const InstanceVector& inst, std::size_t dims) {
  std::vector<double> v(dims, 0.0);
  for (std::size_t slot : inst.active_slots) {
    if (slot >= dims) throw ArgumentError("to_dense: slot out of range");
    v[slot] = 1.0;
  }
  return v;
}

std::vector<Rbm> pretrain(const TrainingSet& train, const TrainConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, "pretrain"));
  std::vector<std::vector<double>> data;
  data.reserve(train.instances.size());
  for (const InstanceVector& inst : train.instances) data.push_back(to_dense(inst, train.dims));

  std::vector<Rbm> layers;
  std::size_t in_width = train.dims;
  for (std::size_t li = 0; li < cfg.layer_widths.size(); ++li) {
    Rbm rbm = init_rbm(in_width, cfg.layer_widths[li], rng);
    for (std::size_t epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
      for (std::size_t start = 0; start < data.size(); start += cfg.batch_size) {
        const std::size_t end = std::min(start + cfg.batch_size, data.size());
        const std::vector<std::vector<double>> batch(data.begin() + start, data.begin() + end);
        cd_update(rbm, batch, cfg.cd_k, cfg.learning_rate, rng);
      }
    }
    if (li + 1 < cfg.layer_widths.size()) {
      for (std::vector<double>& v : data) v = sample_binary(hidden_probs(rbm, v), rng);
    }
    in_width = cfg.layer_widths[li];
    layers.push_back(std::move(rbm));
  }
  return layers;
}

DbnModel assemble_model(std::vector<Rbm> layers, std::vector<std::string> class_names,
                        std::size_t dims, std::uint64_t seed, std::string space_fingerprint) {
  DbnModel model;
  model.layers = std::move(layers);
  model.class_names = std::move(class_names);
  model.dims = dims;
  model.seed = seed;
  model.space_fingerprint = std::move(space_fingerprint);
  Rng rng(derive_seed(seed, "head"));
  const std::size_t classes = model.class_count();
  const std::size_t top = model.top_width();
  model.softmax_W.resize(classes * top);
  for (double& w : model.softmax_W) w = rng.next_double(-0.01, 0.01);
  model.softmax_b.assign(classes, 0.0);
  return model;
}

namespace {

// Hidden activations of every layer; back() is the softmax input.
std::vector<std::vector<double>> forward_activations(const DbnModel& model,
                                                     const std::vector<double>& v) {
  std::vector<std::vector<double>> acts;
  acts.reserve(model.layers.size() + 1);
  acts.push_back(v);
  for (const Rbm& rbm : model.layers) acts.push_back(hidden_probs(rbm, acts.back()));
  return acts;
}

std::vector<double> softmax_of(const DbnModel& model, const std::vector<double>& top) {
  const std::size_t classes = model.class_count();
  std::vector<double> logits(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    double a = model.softmax_b[c];
    const double* row = model.softmax_W.data() + c * top.size();
    for (std::size_t t = 0; t < top.size(); ++t) a += row[t] * top[t];
    logits[c] = a;
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) {
    l = std::exp(l - m);
    z += l;
  }
  for (double& l : logits) l /= z;
  return logits;
}

}  // namespace

std::vector<double> forward(const DbnModel& model, const std::vector<double>& v) {
  if (v.size() != model.dims) throw ArgumentError("forward: input width mismatch");
  std::vector<double> x = v;
  for (const Rbm& rbm : model.layers) x = hidden_probs(rbm, x);
  return softmax_of(model, x);
}

void fine_tune(DbnModel& model, const TrainingSet& train, const TrainConfig& cfg) {
  const std::size_t classes = model.class_count();
  if (classes < 2) throw ArgumentError("fine_tune: need at least 2 classes");
  for (const InstanceVector& inst : train.instances)
    if (inst.label >= classes) throw ArgumentError("fine_tune: label out of range");
  if (train.dims != model.dims) throw ArgumentError("fine_tune: dims mismatch");

  std::vector<std::vector<double>> data;
  data.reserve(train.instances.size());
  for (const InstanceVector& inst : train.instances) data.push_back(to_dense(inst, train.dims));
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Rng rng(derive_seed(cfg.seed, "finetune"));
  const std::size_t n_layers = model.layers.size();
  const std::size_t top = model.top_width();

  for (std::size_t epoch = 0; epoch < cfg.finetune_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.next_below(i)]);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(start + cfg.batch_size, order.size());
      // gradient accumulators
      std::vector<double> g_sw(model.softmax_W.size(), 0.0);
      std::vector<double> g_sb(classes, 0.0);
      std::vector<std::vector<double>> g_w(n_layers), g_bh(n_layers);
      for (std::size_t l = 0; l < n_layers; ++l) {
        g_w[l].assign(model.layers[l].W.size(), 0.0);
        g_bh[l].assign(model.layers[l].hidden, 0.0);
      }
      for (std::size_t bi = start; bi < end; ++bi) {
        const std::size_t idx = order[bi];
        const std::vector<std::vector<double>> acts = forward_activations(model, data[idx]);
        const std::vector<double> probs = softmax_of(model, acts.back());
        // softmax head
        std::vector<double> delta(classes);
        for (std::size_t c = 0; c < classes; ++c)
          delta[c] = probs[c] - (c == train.instances[idx].label ? 1.0 : 0.0);
        for (std::size_t c = 0; c < classes; ++c) {
          double* row = g_sw.data() + c * top;
          for (std::size_t t = 0; t < top; ++t) row[t] += delta[c] * acts.back()[t];
          g_sb[c] += delta[c];
        }
        // gradient w.r.t. the top hidden activation
        std::vector<double> da(top, 0.0);
        for (std::size_t c = 0; c < classes; ++c) {
          const double* row = model.softmax_W.data() + c * top;
          for (std::size_t t = 0; t < top; ++t) da[t] += delta[c] * row[t];
        }
        // back through the sigmoid layers
        for (std::size_t l = n_layers; l-- > 0;) {
          const Rbm& rbm = model.layers[l];
          const std::vector<double>& a_out = acts[l + 1];
          const std::vector<double>& a_in = acts[l];
          std::vector<double> dz(rbm.hidden);
          for (std::size_t j = 0; j < rbm.hidden; ++j)
            dz[j] = da[j] * a_out[j] * (1.0 - a_out[j]);
          for (std::size_t j = 0; j < rbm.hidden; ++j) {
            double* row = g_w[l].data() + j * rbm.visible;
            const double dzj = dz[j];
            for (std::size_t i = 0; i < rbm.visible; ++i) row[i] += dzj * a_in[i];
            g_bh[l][j] += dzj;
          }
          if (l > 0) {
            da.assign(rbm.visible, 0.0);
            for (std::size_t j = 0; j < rbm.hidden; ++j) {
              const double* row = rbm.W.data() + j * rbm.visible;
              const double dzj = dz[j];
              for (std::size_t i = 0; i < rbm.visible; ++i) da[i] += dzj * row[i];
            }
          }
        }
      }
      const double scale = cfg.learning_rate / static_cast<double>(end - start);
      for (std::size_t nw = 0; nw < model.softmax_W.size(); ++nw)
        model.softmax_W[nw] -= scale * g_sw[nw];
      for (std::size_t c = 0; c < classes; ++c) model.softmax_b[c] -= scale * g_sb[c];
      for (std::size_t l = 0; l < n_layers; ++l) {
        for (std::size_t nw = 0; nw < g_w[l].size(); ++nw)
          model.layers[l].W[nw] -= scale * g_w[l][nw];
        for (std::size_t j = 0; j < model.layers[l].hidden; ++j)
          model.layers[l].b_hid[j] -= scale * g_bh[l][j];
      }
    }
  }
}

std::pair<std::size_t, double> predict(const DbnModel& model, const std::vector<double>& v) {
  const std::vector<double> probs = forward(model, v);
  std::size_t best = 0;
  for (std::size_t c = 1; c < probs.size(); ++c)
    if (probs[c] > probs[best]) best = c;  // strict: ties keep the lowest index
  return {best, probs[best]};
}

double mean_cross_entropy(const DbnModel& model, const TrainingSet& train) {
  if (train.instances.empty()) return 0.0;
  double total = 0.0;
  for (const InstanceVector& inst : train.instances) {
    const std::vector<double> probs = forward(model, to_dense(inst, train.dims));
    const double p = std::max(probs[inst.label], 1e-300);
    total -= std::log(p);
  }
  return total / static_cast<double>(train.instances.size());
}

DbnModel train_dbn(const TrainingSet& train, const TrainConfig& cfg,
                   std::string space_fingerprint) {
  std::vector<Rbm> layers = pretrain(train, cfg);
  DbnModel model = assemble_model(std::move(layers), train.class_names, train.dims, cfg.seed,
                                  std::move(space_fingerprint));
  fine_tune(model, train, cfg);
  return model;
}

namespace {

void append_vector(std::string& out, const std::vector<double>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  out += ']';
}

void append_matrix(std::string& out, const std::vector<double>& m, std::size_t rows,
                   std::size_t cols, std::string_view indent) {
  out += '[';
  for (std::size_t r = 0; r < rows; ++r) {
    if (r) out += ',';
    out += '\n';
    out += indent;
    std::vector<double> row(m.begin() + r * cols, m.begin() + (r + 1) * cols);
    append_vector(out, row);
  }
  if (rows) out += '\n';
  out += std::string(indent.size() >= 2 ? indent.substr(0, indent.size() - 2) : indent);
  out += ']';
}

}  // namespace

std::string format_model(const DbnModel& model) {
  std::string out;
  out += "{\n";
  out += "  \"version\": 1,\n";
  out += "  \"dims\": " + std::to_string(model.dims) + ",\n";
  out += "  \"class_names\": [";
  for (std::size_t i = 0; i < model.class_names.size(); ++i) {
    if (i) out += ", ";
    out += json_quote(model.class_names[i]);
  }
  out += "],\n";
  out += "  \"seed\": " + std::to_string(model.seed) + ",\n";
  out += "  \"space_fingerprint\": " + json_quote(model.space_fingerprint) + ",\n";
  out += "  \"layers\": [";
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Rbm& rbm = model.layers[l];
    if (l) out += ',';
    out += "\n    {\n      \"W\": ";
    append_matrix(out, rbm.W, rbm.hidden, rbm.visible, "        ");
    out += ",\n      \"b_vis\": ";
    append_vector(out, rbm.b_vis);
    out += ",\n      \"b_hid\": ";
    append_vector(out, rbm.b_hid);
    out += "\n    }";
  }
  if (!model.layers.empty()) out += "\n  ";
  out += "],\n";
  out += "  \"softmax_W\": ";
  append_matrix(out, model.softmax_W, model.class_count(), model.top_width(), "    ");
  out += ",\n  \"softmax_b\": ";
  append_vector(out, model.softmax_b);
  out += "\n}\n";
  return out;
}

void save_model(const DbnModel& model, const std::string& path) {
  write_file(path, format_model(model));
}

namespace {

std::vector<double> parse_double_array(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError("model: " + what + " is not an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& item : j) {
    if (!item.is_number()) throw ParseError("model: non-numeric entry in " + what);
    const double x = item.get<double>();
    if (!std::isfinite(x)) throw ParseError("model: non-finite entry in " + what);
    out.push_back(x);
  }
  return out;
}

// rows x cols row-major; cols inferred from the first row (0 rows -> cols 0).
std::vector<double> parse_matrix(const nlohmann::json& j, std::size_t& rows, std::size_t& cols,
                                 const std::string& what) {
  if (!j.is_array()) throw ParseError("model: " + what + " is not a matrix");
  rows = j.size();
  cols = 0;
  std::vector<double> out;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::vector<double> row = parse_double_array(j[r], what);
    if (r == 0)
      cols = row.size();
    else if (row.size() != cols)
      throw ParseError("model: ragged rows in " + what);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace

DbnModel parse_model(std::string_view bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("model: not an object");
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != 1)
    throw ParseError("model: unsupported or missing version");
  for (const char* key : {"dims", "class_names", "seed", "space_fingerprint", "layers",
                          "softmax_W", "softmax_b"})
    if (!j.contains(key)) throw ParseError(std::string("model: missing field ") + key);

  DbnModel model;
  if (!j["dims"].is_number_unsigned()) throw ParseError("model: bad dims");
  model.dims = j["dims"].get<std::size_t>();
  if (!j["class_names"].is_array() || j["class_names"].empty())
    throw ParseError("model: bad class_names");
  for (const auto& item : j["class_names"]) {
    if (!item.is_string()) throw ParseError("model: non-string class name");
    model.class_names.push_back(item.get<std::string>());
  }
  if (!j["seed"].is_number_unsigned()) throw ParseError("model: bad seed");
  model.seed = j["seed"].get<std::uint64_t>();
  if (!j["space_fingerprint"].is_string()) throw ParseError("model: bad space_fingerprint");
  model.space_fingerprint = j["space_fingerprint"].get<std::string>();

  if (!j["layers"].is_array()) throw ParseError("model: layers is not an array");
  std::size_t expect_visible = model.dims;
  for (const auto& jl : j["layers"]) {
    if (!jl.is_object() || !jl.contains("W") || !jl.contains("b_vis") || !jl.contains("b_hid"))
      throw ParseError("model: layer missing W/b_vis/b_hid");
    Rbm rbm;
    rbm.W = parse_matrix(jl["W"], rbm.hidden, rbm.visible, "layer W");
    rbm.b_vis = parse_double_array(jl["b_vis"], "b_vis");
    rbm.b_hid = parse_double_array(jl["b_hid"], "b_hid");
    if (rbm.b_vis.size() != rbm.visible || rbm.b_hid.size() != rbm.hidden)
      throw ParseError("model: layer bias widths inconsistent with W");
    if (rbm.visible != expect_visible) throw ParseError("model: layer widths do not chain");
    expect_visible = rbm.hidden;
    model.layers.push_back(std::move(rbm));
  }
  std::size_t rows = 0, cols = 0;
  model.softmax_W = parse_matrix(j["softmax_W"], rows, cols, "softmax_W");
  model.softmax_b = parse_double_array(j["softmax_b"], "softmax_b");
  if (rows != model.class_count()) throw ParseError("model: softmax_W row count != classes");
  if (rows > 0 && cols != model.top_width())
    throw ParseError("model: softmax_W column count != top width");
  if (model.softmax_b.size() != model.class_count())
    throw ParseError("model: softmax_b width != classes");
  return model;
}

DbnModel load_model(const std::string& path) { return parse_model(read_file(path)); }

}  // namespace onto
