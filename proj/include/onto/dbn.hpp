#ifndef ONTO_DBN_HPP
#define ONTO_DBN_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "onto/features.hpp"
#include "onto/rng.hpp"

namespace onto {

// Restricted Boltzmann machine. W is row-major hidden x visible:
// W[j * visible + i] connects hidden j to visible i.
struct Rbm {
  std::size_t visible = 0;
  std::size_t hidden = 0;
  std::vector<double> W;
  std::vector<double> b_vis;
  std::vector<double> b_hid;
};

// A stack of RBMs plus a softmax head. layers may be empty (softmax on raw
// input). dims is the visible width of the first layer / the input width.
struct DbnModel {
  std::vector<Rbm> layers;
  std::vector<double> softmax_W;  // row-major class x top_width
  std::vector<double> softmax_b;  // class
  std::vector<std::string> class_names;
  std::size_t dims = 0;
  std::uint64_t seed = 0;
  std::string space_fingerprint;  // 16 hex chars

  std::size_t class_count() const { return class_names.size(); }
  std::size_t top_width() const { return layers.empty() ? dims : layers.back().hidden; }
};

struct TrainConfig {
  std::vector<std::size_t> layer_widths = {64, 32};
  std::size_t cd_k = 1;
  std::size_t pretrain_epochs = 20;
  std::size_t finetune_epochs = 50;
  double learning_rate = 0.1;
  std::size_t batch_size = 16;
  std::uint64_t seed = 42;
  double momentum = 0.0;      // reserved, zero in v1
  double weight_decay = 0.0;  // reserved, zero in v1
};

double sigmoid(double x);

// p(h_j = 1 | v) componentwise; v entries in [0,1]. Throws ArgumentError on
// shape mismatch.
std::vector<double> hidden_probs(const Rbm& rbm, const std::vector<double>& v);
// p(v_i = 1 | h) componentwise.
std::vector<double> visible_probs(const Rbm& rbm, const std::vector<double>& h);

// Samples a binary vector from independent Bernoulli probabilities, consuming
// one rng draw per component in index order.
std::vector<double> sample_binary(const std::vector<double>& probs, Rng& rng);

// Weights uniform in [-0.01, 0.01] drawn row-major, biases zero.
Rbm init_rbm(std::size_t visible, std::size_t hidden, Rng& rng);

// One CD-k mini-batch update, in place. Probabilities are used for the data
// term and the final-step statistics; intermediate Gibbs steps use sampled
// binaries. Deterministic given the rng state.
void cd_update(Rbm& rbm, const std::vector<std::vector<double>>& batch, std::size_t k, double lr,
               Rng& rng);

// Dense 0/1 vector for an instance.
std::vector<double> to_dense(const InstanceVector& inst, std::size_t dims);

// Greedy layer-wise pretraining. Layer 0 sees the raw binary vectors; each
// later layer sees sampled binaries of the previous layer's hidden_probs.
// Batches run in data order (no shuffling) so a step-replay oracle can verify
// the schedule. All randomness comes from derive_seed(cfg.seed, "pretrain").
std::vector<Rbm> pretrain(const TrainingSet& train, const TrainConfig& cfg);

// Attaches a softmax head (weights uniform [-0.01,0.01] from
// derive_seed(seed, "head"), biases zero) to a pretrained stack.
DbnModel assemble_model(std::vector<Rbm> layers, std::vector<std::string> class_names,
                        std::size_t dims, std::uint64_t seed, std::string space_fingerprint);

// Deterministic mean-field forward pass; returns class probabilities
// (sums to 1). Throws ArgumentError on width mismatch.
std::vector<double> forward(const DbnModel& model, const std::vector<double>& v);

// Mini-batch SGD on mean cross-entropy through the softmax head and all
// sigmoid layers. Shuffling is seeded from derive_seed(cfg.seed, "finetune").
// Throws ArgumentError when class count < 2 or a label is out of range.
void fine_tune(DbnModel& model, const TrainingSet& train, const TrainConfig& cfg);

// argmax of forward(); ties break toward the lowest class index.
std::pair<std::size_t, double> predict(const DbnModel& model, const std::vector<double>& v);

// Mean cross-entropy of the model on a set (diagnostic; used by tests).
double mean_cross_entropy(const DbnModel& model, const TrainingSet& train);

// pretrain + assemble_model + fine_tune, classes taken from the set.
DbnModel train_dbn(const TrainingSet& train, const TrainConfig& cfg,
                   std::string space_fingerprint);

// Versioned canonical JSON (version 1), floats at 17 significant digits.
std::string format_model(const DbnModel& model);
void save_model(const DbnModel& model, const std::string& path);
DbnModel parse_model(std::string_view bytes);
DbnModel load_model(const std::string& path);

}  // namespace onto

#endif  // ONTO_DBN_HPP
