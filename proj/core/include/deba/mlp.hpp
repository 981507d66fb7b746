#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deba/dataset.hpp"
#include "deba/matrix.hpp"

namespace deba {

// One-hidden-layer rectifier network, the desk-scale stand-in for a deep
// victim model. Inputs are flattened images (planes row-major, channels
// concatenated) in [0, 1].
struct MlpModel {
  RealMatrix w1;           // input_dim x hidden
  std::vector<double> b1;  // hidden
  RealMatrix w2;           // hidden x classes
  std::vector<double> b2;  // classes

  int input_dim() const { return w1.rows(); }
  int hidden_units() const { return w1.cols(); }
  int class_count() const { return w2.cols(); }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct TrainSpec {
  int hidden_units = 256;
  int epochs = 30;
  int batch_size = 128;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::uint64_t seed = 0;
};

void validate(const TrainSpec& spec);

struct EvalReport {
  double cda = 0.0;
  double asr = 0.0;
  std::vector<double> per_class_accuracy;  // 0 for classes with no samples
  int n_clean_eval = 0;
  int n_poison_eval = 0;
};

std::vector<double> flatten(const ImageTensor& img);
RealMatrix flatten_dataset(const LabeledDataset& ds);  // N x input_dim

// Seeded init: weights uniform in +-sqrt(6 / (fan_in + fan_out)) drawn
// w1 row-major then w2 row-major from one splitmix64 stream; biases zero.
MlpModel init_model(int input_dim, int class_count, const TrainSpec& spec);

struct Gradients {
  RealMatrix w1;
  std::vector<double> b1;
  RealMatrix w2;
  std::vector<double> b2;
  double loss = 0.0;
};

// Mean softmax cross-entropy over the batch, and its analytic gradient.
double batch_loss(const MlpModel& model, const RealMatrix& x,
                  const std::vector<int>& y);
Gradients batch_gradients(const MlpModel& model, const RealMatrix& x,
                          const std::vector<int>& y);

// Argmax class per row; ties resolve to the lowest index.
std::vector<int> predict(const MlpModel& model, const RealMatrix& x);
std::vector<int> predict_dataset(const MlpModel& model,
                                 const LabeledDataset& ds);

struct TrainResult {
  MlpModel model;
  std::vector<double> epoch_loss;  // mean sample loss per epoch
};

// Mini-batch SGD with momentum on shuffled epochs; fully deterministic in
// spec.seed. Zero epochs returns the seeded initialization. Throws
// TrainingDiverged on a non-finite loss.
TrainResult train(const LabeledDataset& ds, const TrainSpec& spec);

struct ClassAccuracy {
  double accuracy = 0.0;
  std::vector<double> per_class;
};

// Fraction of clean samples predicted as their true label.
ClassAccuracy evaluate_cda(const MlpModel& model,
                           const LabeledDataset& clean_test);

// Fraction of poisoned samples predicted as the target label. The set
// must come from apply_trigger_to_test_set: no true label may equal the
// target.
double evaluate_asr(const MlpModel& model, const LabeledDataset& poisoned_test,
                    int target_label);

EvalReport make_eval_report(const MlpModel& model,
                            const LabeledDataset& clean_test,
                            const LabeledDataset& poisoned_test,
                            int target_label);

std::string to_json_string(const EvalReport& report);

// Versioned binary checkpoint: 8-byte magic "DEBAMLP1", little-endian
// u32 dims (input, hidden, classes), then w1, b1, w2, b2 as
// little-endian doubles. FormatError on anything else.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace deba
