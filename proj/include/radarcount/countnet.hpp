#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "radarcount/cube.hpp"
#include "radarcount/features.hpp"

namespace radarcount {

/// Two-layer regressor: input standardisation (frozen after pre-training),
/// a ReLU hidden layer and one linear output.
///
/// Trainable parameters live in one vector `theta`:
///   W1 (hidden x input, column-major) | b1 (hidden) | W2 (hidden) | b2.
class CountModel {
 public:
  CountModel() = default;
  CountModel(int input_dim, int hidden);

  int input_dim() const { return input_dim_; }
  int hidden() const { return hidden_; }
  static Eigen::Index parameter_count(int input_dim, int hidden) {
    return static_cast<Eigen::Index>(hidden) * input_dim + 2 * hidden + 1;
  }

  Eigen::VectorXd theta;
  Eigen::VectorXd input_mean;   // subtracted from raw features
  Eigen::VectorXd input_scale;  // divides the centred features

  Eigen::Map<const Eigen::MatrixXd> w1() const { return {theta.data(), hidden_, input_dim_}; }
  Eigen::Map<const Eigen::VectorXd> b1() const { return {theta.data() + w1_size(), hidden_}; }
  Eigen::Map<const Eigen::VectorXd> w2() const { return {theta.data() + w1_size() + hidden_, hidden_}; }
  double b2() const { return theta(theta.size() - 1); }

  /// Rows are samples of raw (unstandardised) features.
  Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;
  double predict_one(const Eigen::VectorXd& features) const;

  bool operator==(const CountModel& o) const {
    return input_dim_ == o.input_dim_ && hidden_ == o.hidden_ && theta == o.theta && input_mean == o.input_mean &&
           input_scale == o.input_scale;
  }

 private:
  Eigen::Index w1_size() const { return static_cast<Eigen::Index>(hidden_) * input_dim_; }
  int input_dim_ = 0;
  int hidden_ = 0;
};

/// Fits the standardiser to `features` (population std, unit scale for flat
/// features) and draws He-initialised weights. The output bias starts at the
/// mean target.
CountModel init_model(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, int hidden,
                      std::uint64_t seed);

/// Mean squared error and its gradient with respect to theta.
std::pair<double, Eigen::VectorXd> mse_gradient(const CountModel& model, const Eigen::MatrixXd& features,
                                                const Eigen::VectorXd& targets);
double mse(const CountModel& model, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step = 0;
};

void adam_step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, AdamState& state, double lr);

struct TrainConfig {
  double lr = 1e-3;
  int max_epochs = 100;
  int patience = 10;
  int batch = 32;
  int hidden = 64;
  std::uint64_t seed = 0;
  /// When set, every training sample is rescaled by a fresh U[lo, hi] factor
  /// each epoch. The pooled mean/std/max features are positively homogeneous,
  /// so this is applied to the features directly.
  std::optional<std::pair<double, double>> epoch_scale;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  CountModel model;  // best-validation checkpoint
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_mse = 0.0;
};

struct FeatureSet {
  Eigen::MatrixXd x;  // one row per sample
  Eigen::VectorXd y;

  Eigen::Index size() const { return x.rows(); }
  FeatureSet subset(std::span<const std::size_t> rows) const;
};

FeatureSet make_feature_set(std::span<const RadarCube> cubes, const FeatureExtractor& fx = {});

/// Adam on mini-batch MSE with early stopping on validation MSE. Starts from
/// `init` when given (its standardiser is kept), otherwise from init_model.
TrainResult train(const FeatureSet& train_set, const FeatureSet& val_set, const TrainConfig& cfg,
                  const CountModel* init = nullptr);

/// Trains on the Train/Val splits of a dataset.
TrainResult train(const Dataset& ds, const TrainConfig& cfg, const FeatureExtractor& fx = {});

inline constexpr double kFineTuneLr = 1e-4;

/// Full-parameter fine-tuning on `n_train` samples drawn (stratified) from the
/// target training pool, early-stopped on `target_val`. n_train = 0 returns
/// the model unchanged.
TrainResult fine_tune(const CountModel& model, const FeatureSet& target_pool, const FeatureSet& target_val,
                      std::size_t n_train, TrainConfig cfg);

void save_model(const CountModel& model, const std::filesystem::path& path);
CountModel load_model(const std::filesystem::path& path);

void write_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path);

}  // namespace radarcount
