#include "deba/mlp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "deba/errors.hpp"
#include "deba/rng.hpp"

namespace deba {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<EigenRowMajor>;
using ConstMapRM = Eigen::Map<const EigenRowMajor>;

ConstMapRM as_eigen(const RealMatrix& m) {
  return {m.data(), m.rows(), m.cols()};
}
MapRM as_eigen(RealMatrix& m) { return {m.data(), m.rows(), m.cols()}; }

struct Forward {
  EigenRowMajor hidden;  // post-relu, B x H
  EigenRowMajor probs;   // softmax rows, B x C
  double loss = 0.0;
};

Forward forward_pass(const MlpModel& model, const ConstMapRM& x,
                     const std::vector<int>& y) {
  const auto b1 = Eigen::Map<const Eigen::RowVectorXd>(
      model.b1.data(), static_cast<Eigen::Index>(model.b1.size()));
  const auto b2 = Eigen::Map<const Eigen::RowVectorXd>(
      model.b2.data(), static_cast<Eigen::Index>(model.b2.size()));

  Forward f;
  f.hidden.noalias() = x * as_eigen(model.w1);
  f.hidden.rowwise() += b1;
  f.hidden = f.hidden.cwiseMax(0.0);

  f.probs.noalias() = f.hidden * as_eigen(model.w2);
  f.probs.rowwise() += b2;

  double loss = 0.0;
  for (Eigen::Index r = 0; r < f.probs.rows(); ++r) {
    auto row = f.probs.row(r);
    const double peak = row.maxCoeff();
    row = (row.array() - peak).exp();
    const double total = row.sum();
    row /= total;
    loss -= std::log(f.probs(r, y[static_cast<std::size_t>(r)]));
  }
  f.loss = loss / static_cast<double>(f.probs.rows());
  return f;
}

void check_batch(const MlpModel& model, const RealMatrix& x,
                 const std::vector<int>& y) {
  if (x.rows() < 1) throw InvalidInput("mlp: empty batch");
  if (x.cols() != model.input_dim())
    throw InvalidInput("mlp: input width does not match model");
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw InvalidInput("mlp: batch size and label count differ");
  for (int label : y) {
    if (label < 0 || label >= model.class_count())
      throw InvalidInput("mlp: label out of range for model");
  }
}

}  // namespace

void validate(const TrainSpec& spec) {
  if (spec.hidden_units < 1 || spec.epochs < 0 || spec.batch_size < 1 ||
      spec.learning_rate <= 0.0 || spec.momentum < 0.0 || spec.momentum >= 1.0)
    throw InvalidInput("train spec: nonpositive or out-of-range field");
}

std::vector<double> flatten(const ImageTensor& img) {
  validate(img);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(img.height()) * img.width() *
              img.channels());
  for (const auto& plane : img.planes) {
    out.insert(out.end(), plane.data(), plane.data() + plane.size());
  }
  return out;
}

RealMatrix flatten_dataset(const LabeledDataset& ds) {
  validate(ds);
  if (ds.images.empty()) throw InvalidInput("flatten_dataset: empty dataset");
  const auto& first = ds.images.front();
  const int dim = first.height() * first.width() * first.channels();
  RealMatrix x(static_cast<int>(ds.size()), dim);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = flatten(ds.images[i]);
    std::memcpy(x.data() + i * static_cast<std::size_t>(dim), row.data(),
                row.size() * sizeof(double));
  }
  return x;
}

MlpModel init_model(int input_dim, int class_count, const TrainSpec& spec) {
  validate(spec);
  if (input_dim < 1 || class_count < 1)
    throw InvalidInput("init_model: bad dimensions");

  SplitMix64 rng(spec.seed);
  auto uniform_fill = [&rng](RealMatrix& m, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < m.size(); ++i) {
      m.data()[i] = (2.0 * rng.next_unit() - 1.0) * bound;
    }
  };

  MlpModel model;
  model.w1 = RealMatrix(input_dim, spec.hidden_units);
  uniform_fill(model.w1, input_dim, spec.hidden_units);
  model.b1.assign(static_cast<std::size_t>(spec.hidden_units), 0.0);
  model.w2 = RealMatrix(spec.hidden_units, class_count);
  uniform_fill(model.w2, spec.hidden_units, class_count);
  model.b2.assign(static_cast<std::size_t>(class_count), 0.0);
  return model;
}

double batch_loss(const MlpModel& model, const RealMatrix& x,
                  const std::vector<int>& y) {
  check_batch(model, x, y);
  return forward_pass(model, as_eigen(x), y).loss;
}

Gradients batch_gradients(const MlpModel& model, const RealMatrix& x,
                          const std::vector<int>& y) {
  check_batch(model, x, y);
  const auto xmap = as_eigen(x);
  Forward f = forward_pass(model, xmap, y);
  const auto batch = static_cast<double>(x.rows());

  // dO = (probs - onehot) / B
  EigenRowMajor d_out = f.probs;
  for (Eigen::Index r = 0; r < d_out.rows(); ++r) {
    d_out(r, y[static_cast<std::size_t>(r)]) -= 1.0;
  }
  d_out /= batch;

  Gradients g;
  g.loss = f.loss;
  g.w2 = RealMatrix(model.w2.rows(), model.w2.cols());
  as_eigen(g.w2).noalias() = f.hidden.transpose() * d_out;
  g.b2.resize(model.b2.size());
  Eigen::Map<Eigen::RowVectorXd>(g.b2.data(),
                                 static_cast<Eigen::Index>(g.b2.size())) =
      d_out.colwise().sum();

  // relu mask: hidden > 0 (post-relu equals pre-relu where positive)
  EigenRowMajor d_hidden = d_out * as_eigen(model.w2).transpose();
  d_hidden = (f.hidden.array() > 0.0).select(d_hidden, 0.0);

  g.w1 = RealMatrix(model.w1.rows(), model.w1.cols());
  as_eigen(g.w1).noalias() = xmap.transpose() * d_hidden;
  g.b1.resize(model.b1.size());
  Eigen::Map<Eigen::RowVectorXd>(g.b1.data(),
                                 static_cast<Eigen::Index>(g.b1.size())) =
      d_hidden.colwise().sum();
  return g;
}

std::vector<int> predict(const MlpModel& model, const RealMatrix& x) {
  std::vector<int> dummy_labels(static_cast<std::size_t>(x.rows()), 0);
  check_batch(model, x, dummy_labels);
  Forward f = forward_pass(model, as_eigen(x), dummy_labels);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < f.probs.rows(); ++r) {
    int best = 0;
    for (Eigen::Index c = 1; c < f.probs.cols(); ++c) {
      if (f.probs(r, c) > f.probs(r, best)) best = static_cast<int>(c);
    }
    out[static_cast<std::size_t>(r)] = best;
  }
  return out;
}

std::vector<int> predict_dataset(const MlpModel& model,
                                 const LabeledDataset& ds) {
  return predict(model, flatten_dataset(ds));
}

TrainResult train(const LabeledDataset& ds, const TrainSpec& spec) {
  validate(spec);
  validate(ds);
  if (ds.images.empty()) throw InvalidInput("train: empty dataset");

  const RealMatrix x_all = flatten_dataset(ds);
  const int n = x_all.rows();
  const int dim = x_all.cols();

  SplitMix64 rng(spec.seed);
  TrainResult result;
  result.model = init_model(dim, ds.class_count, spec);
  MlpModel& model = result.model;

  MlpModel velocity;
  velocity.w1 = RealMatrix(model.w1.rows(), model.w1.cols());
  velocity.b1.assign(model.b1.size(), 0.0);
  velocity.w2 = RealMatrix(model.w2.rows(), model.w2.cols());
  velocity.b2.assign(model.b2.size(), 0.0);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  RealMatrix xb;
  std::vector<int> yb;
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    shuffle(order, rng);
    double loss_sum = 0.0;
    for (int start = 0; start < n; start += spec.batch_size) {
      const int stop = std::min(start + spec.batch_size, n);
      const int rows = stop - start;
      xb = RealMatrix(rows, dim);
      yb.resize(static_cast<std::size_t>(rows));
      for (int r = 0; r < rows; ++r) {
        const auto src = static_cast<std::size_t>(order[static_cast<std::size_t>(start + r)]);
        std::memcpy(xb.data() + static_cast<std::size_t>(r) * dim,
                    x_all.data() + src * static_cast<std::size_t>(dim),
                    static_cast<std::size_t>(dim) * sizeof(double));
        yb[static_cast<std::size_t>(r)] = ds.labels[src];
      }

      Gradients g = batch_gradients(model, xb, yb);
      if (!std::isfinite(g.loss))
        throw TrainingDiverged("train: non-finite loss at epoch " +
                               std::to_string(epoch));
      loss_sum += g.loss * rows;

      auto update = [&spec](double& param, double& vel, double grad) {
        vel = spec.momentum * vel - spec.learning_rate * grad;
        param += vel;
      };
      for (std::size_t i = 0; i < model.w1.size(); ++i)
        update(model.w1.data()[i], velocity.w1.data()[i], g.w1.data()[i]);
      for (std::size_t i = 0; i < model.b1.size(); ++i)
        update(model.b1[i], velocity.b1[i], g.b1[i]);
      for (std::size_t i = 0; i < model.w2.size(); ++i)
        update(model.w2.data()[i], velocity.w2.data()[i], g.w2.data()[i]);
      for (std::size_t i = 0; i < model.b2.size(); ++i)
        update(model.b2[i], velocity.b2[i], g.b2[i]);
    }
    result.epoch_loss.push_back(loss_sum / n);
  }
  return result;
}

ClassAccuracy evaluate_cda(const MlpModel& model,
                           const LabeledDataset& clean_test) {
  validate(clean_test);
  if (clean_test.images.empty()) throw InvalidInput("evaluate_cda: empty set");

  const std::vector<int> pred = predict_dataset(model, clean_test);
  std::vector<int> correct(static_cast<std::size_t>(clean_test.class_count), 0);
  std::vector<int> total(static_cast<std::size_t>(clean_test.class_count), 0);
  int hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto cls = static_cast<std::size_t>(clean_test.labels[i]);
    ++total[cls];
    if (pred[i] == clean_test.labels[i]) {
      ++correct[cls];
      ++hits;
    }
  }

  ClassAccuracy out;
  out.accuracy = static_cast<double>(hits) / static_cast<double>(pred.size());
  out.per_class.resize(total.size(), 0.0);
  for (std::size_t c = 0; c < total.size(); ++c) {
    if (total[c] > 0) out.per_class[c] = static_cast<double>(correct[c]) / total[c];
  }
  return out;
}

double evaluate_asr(const MlpModel& model, const LabeledDataset& poisoned_test,
                    int target_label) {
  validate(poisoned_test);
  if (poisoned_test.images.empty()) throw InvalidInput("evaluate_asr: empty set");
  for (int label : poisoned_test.labels) {
    if (label == target_label)
      throw InvalidInput(
          "evaluate_asr: poisoned set contains a target-class sample");
  }

  const std::vector<int> pred = predict_dataset(model, poisoned_test);
  int hits = 0;
  for (int p : pred) {
    if (p == target_label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

EvalReport make_eval_report(const MlpModel& model,
                            const LabeledDataset& clean_test,
                            const LabeledDataset& poisoned_test,
                            int target_label) {
  EvalReport report;
  const ClassAccuracy clean = evaluate_cda(model, clean_test);
  report.cda = clean.accuracy;
  report.per_class_accuracy = clean.per_class;
  report.n_clean_eval = static_cast<int>(clean_test.size());
  report.asr = evaluate_asr(model, poisoned_test, target_label);
  report.n_poison_eval = static_cast<int>(poisoned_test.size());
  return report;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_json_string(const EvalReport& report) {
  std::string out = "{";
  out += "\"cda\":" + format_double(report.cda) + ",";
  out += "\"asr\":" + format_double(report.asr) + ",";
  out += "\"per_class_accuracy\":[";
  for (std::size_t i = 0; i < report.per_class_accuracy.size(); ++i) {
    if (i) out += ",";
    out += format_double(report.per_class_accuracy[i]);
  }
  out += "],";
  out += "\"n_clean_eval\":" + std::to_string(report.n_clean_eval) + ",";
  out += "\"n_poison_eval\":" + std::to_string(report.n_poison_eval);
  out += "}";
  return out;
}

namespace {

constexpr char kModelMagic[8] = {'D', 'E', 'B', 'A', 'M', 'L', 'P', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class BlobReader {
 public:
  BlobReader(const std::string& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  std::uint32_t get_u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | static_cast<unsigned char>(bytes_[pos_ + static_cast<std::size_t>(i)]);
    }
    pos_ += 4;
    return v;
  }

  double get_f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) {
      bits = (bits << 8) | static_cast<unsigned char>(bytes_[pos_ + static_cast<std::size_t>(i)]);
    }
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  void expect_magic() {
    need(8);
    if (std::memcmp(bytes_.data(), kModelMagic, 8) != 0)
      throw FormatError(path_ + ": not a model checkpoint");
    pos_ = 8;
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) throw FormatError(path_ + ": trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n)
      throw FormatError(path_ + ": truncated checkpoint");
  }

  const std::string& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_model(const MlpModel& model, const std::string& path) {
  std::string out(kModelMagic, 8);
  put_u32(out, static_cast<std::uint32_t>(model.input_dim()));
  put_u32(out, static_cast<std::uint32_t>(model.hidden_units()));
  put_u32(out, static_cast<std::uint32_t>(model.class_count()));
  for (std::size_t i = 0; i < model.w1.size(); ++i) put_f64(out, model.w1.data()[i]);
  for (double v : model.b1) put_f64(out, v);
  for (std::size_t i = 0; i < model.w2.size(); ++i) put_f64(out, model.w2.data()[i]);
  for (double v : model.b2) put_f64(out, v);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw FormatError("short write to " + path);
}

MlpModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());

  BlobReader reader(bytes, path);
  reader.expect_magic();
  const auto input_dim = static_cast<int>(reader.get_u32());
  const auto hidden = static_cast<int>(reader.get_u32());
  const auto classes = static_cast<int>(reader.get_u32());
  if (input_dim < 1 || hidden < 1 || classes < 1)
    throw FormatError(path + ": bad checkpoint dimensions");

  MlpModel model;
  model.w1 = RealMatrix(input_dim, hidden);
  for (std::size_t i = 0; i < model.w1.size(); ++i)
    model.w1.data()[i] = reader.get_f64();
  model.b1.resize(static_cast<std::size_t>(hidden));
  for (double& v : model.b1) v = reader.get_f64();
  model.w2 = RealMatrix(hidden, classes);
  for (std::size_t i = 0; i < model.w2.size(); ++i)
    model.w2.data()[i] = reader.get_f64();
  model.b2.resize(static_cast<std::size_t>(classes));
  for (double& v : model.b2) v = reader.get_f64();
  reader.expect_end();
  return model;
}

}  // namespace deba
