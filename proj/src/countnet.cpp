#include "radarcount/countnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "radarcount/dataset.hpp"

namespace radarcount {
namespace {

constexpr char kModelMagic[4] = {'R', 'C', 'M', '1'};
constexpr std::uint32_t kModelVersion = 1;

Eigen::MatrixXd standardize(const CountModel& m, const Eigen::MatrixXd& x) {
  if (x.cols() != m.input_dim()) {
    throw std::invalid_argument("feature width " + std::to_string(x.cols()) + " does not match model input " +
                                std::to_string(m.input_dim()));
  }
  return (x.rowwise() - m.input_mean.transpose()).array().rowwise() / m.input_scale.transpose().array();
}

void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::ostream& os, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_bytes(std::istream& is, int n, const std::filesystem::path& path) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) {
    const int c = is.get();
    if (c == EOF) throw FormatError("truncated model file " + path.string());
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

void check_finite(double loss, int epoch) {
  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << "training diverged: loss is " << loss << " at epoch " << epoch << " (try a lower learning rate)";
    throw std::runtime_error(os.str());
  }
}

}  // namespace

CountModel::CountModel(int input_dim, int hidden)
    : theta(Eigen::VectorXd::Zero(parameter_count(input_dim, hidden))),
      input_mean(Eigen::VectorXd::Zero(input_dim)),
      input_scale(Eigen::VectorXd::Ones(input_dim)),
      input_dim_(input_dim),
      hidden_(hidden) {
  if (input_dim < 1 || hidden < 1) throw std::invalid_argument("model dimensions must be positive");
}

Eigen::VectorXd CountModel::predict(const Eigen::MatrixXd& features) const {
  const Eigen::MatrixXd z = standardize(*this, features);
  const Eigen::MatrixXd h = ((z * w1().transpose()).rowwise() + b1().transpose()).cwiseMax(0.0);
  return (h * w2()).array() + b2();
}

double CountModel::predict_one(const Eigen::VectorXd& features) const {
  return predict(features.transpose())(0);
}

CountModel init_model(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, int hidden,
                      std::uint64_t seed) {
  if (features.rows() == 0) throw std::invalid_argument("cannot initialise a model from an empty split");
  const int d = static_cast<int>(features.cols());
  CountModel m(d, hidden);
  m.input_mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centred = features.rowwise() - m.input_mean.transpose();
  const Eigen::VectorXd sd =
      (centred.colwise().squaredNorm() / static_cast<double>(features.rows())).cwiseSqrt().transpose();
  m.input_scale = sd.unaryExpr([](double s) { return s > 1e-12 ? s : 1.0; });

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index nw1 = static_cast<Eigen::Index>(hidden) * d;
  const double s1 = std::sqrt(2.0 / d);
  const double s2 = std::sqrt(1.0 / hidden);
  for (Eigen::Index i = 0; i < nw1; ++i) m.theta(i) = s1 * gauss(rng);
  for (Eigen::Index i = 0; i < hidden; ++i) m.theta(nw1 + hidden + i) = s2 * gauss(rng);
  m.theta(m.theta.size() - 1) = targets.size() > 0 ? targets.mean() : 0.0;
  return m;
}

std::pair<double, Eigen::VectorXd> mse_gradient(const CountModel& model, const Eigen::MatrixXd& features,
                                                const Eigen::VectorXd& targets) {
  const Eigen::Index n = features.rows();
  if (n == 0 || targets.size() != n) throw std::invalid_argument("mse_gradient: bad batch");
  const int hid = model.hidden();
  const int d = model.input_dim();

  const Eigen::MatrixXd z = standardize(model, features);
  const Eigen::MatrixXd pre = (z * model.w1().transpose()).rowwise() + model.b1().transpose();
  const Eigen::MatrixXd h = pre.cwiseMax(0.0);
  const Eigen::VectorXd resid = ((h * model.w2()).array() + model.b2()).matrix() - targets;
  const double loss = resid.squaredNorm() / static_cast<double>(n);

  const Eigen::VectorXd d_out = resid * (2.0 / static_cast<double>(n));
  const Eigen::MatrixXd d_pre = ((d_out * model.w2().transpose()).array() * (pre.array() > 0.0).cast<double>()).matrix();

  Eigen::VectorXd grad(model.theta.size());
  const Eigen::Index nw1 = static_cast<Eigen::Index>(hid) * d;
  Eigen::Map<Eigen::MatrixXd>(grad.data(), hid, d) = d_pre.transpose() * z;
  grad.segment(nw1, hid) = d_pre.colwise().sum().transpose();
  grad.segment(nw1 + hid, hid) = h.transpose() * d_out;
  grad(grad.size() - 1) = d_out.sum();
  return {loss, grad};
}

double mse(const CountModel& model, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets) {
  if (features.rows() == 0) throw std::invalid_argument("mse of an empty set");
  return (model.predict(features) - targets).squaredNorm() / static_cast<double>(features.rows());
}

void adam_step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, AdamState& s, double lr) {
  if (s.m.size() != theta.size()) {
    s.m = Eigen::VectorXd::Zero(theta.size());
    s.v = Eigen::VectorXd::Zero(theta.size());
    s.step = 0;
  }
  ++s.step;
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * grad;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  theta.array() -= lr * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + s.eps);
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  if (patience < 1 || patience >= max_epochs) throw std::invalid_argument("patience must be in [1, max_epochs)");
  if (batch < 1) throw std::invalid_argument("batch must be >= 1");
  if (hidden < 1) throw std::invalid_argument("hidden must be >= 1");
  if (epoch_scale && !(epoch_scale->first > 0.0 && epoch_scale->first <= epoch_scale->second)) {
    throw std::invalid_argument("epoch scale range must satisfy 0 < lo <= hi");
  }
}

FeatureSet FeatureSet::subset(std::span<const std::size_t> rows) const {
  FeatureSet out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    out.y(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

FeatureSet make_feature_set(std::span<const RadarCube> cubes, const FeatureExtractor& fx) {
  FeatureSet fs;
  fs.x = fx.batch(cubes);
  fs.y.resize(static_cast<Eigen::Index>(cubes.size()));
  for (std::size_t i = 0; i < cubes.size(); ++i) fs.y(static_cast<Eigen::Index>(i)) = cubes[i].meta.label;
  return fs;
}

TrainResult train(const FeatureSet& train_set, const FeatureSet& val_set, const TrainConfig& cfg,
                  const CountModel* init) {
  cfg.validate();
  if (train_set.size() == 0) throw std::invalid_argument("empty training split");
  if (val_set.size() == 0) throw std::invalid_argument("empty validation split");

  TrainResult result;
  CountModel model = init ? *init : init_model(train_set.x, train_set.y, cfg.hidden, cfg.seed);
  result.model = model;
  result.best_val_mse = mse(model, val_set.x, val_set.y);
  check_finite(result.best_val_mse, 0);

  std::mt19937_64 rng(cfg.seed ^ 0x5eedf00dULL);
  std::vector<std::size_t> order(static_cast<std::size_t>(train_set.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  AdamState adam;
  Eigen::MatrixXd epoch_x = train_set.x;
  int since_best = 0;
  bool have_best = false;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (cfg.epoch_scale) {
      std::uniform_real_distribution<double> k(cfg.epoch_scale->first, cfg.epoch_scale->second);
      for (Eigen::Index i = 0; i < epoch_x.rows(); ++i) epoch_x.row(i) = train_set.x.row(i) * k(rng);
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
      Eigen::MatrixXd bx(static_cast<Eigen::Index>(end - start), epoch_x.cols());
      Eigen::VectorXd by(bx.rows());
      for (std::size_t i = start; i < end; ++i) {
        bx.row(static_cast<Eigen::Index>(i - start)) = epoch_x.row(static_cast<Eigen::Index>(order[i]));
        by(static_cast<Eigen::Index>(i - start)) = train_set.y(static_cast<Eigen::Index>(order[i]));
      }
      auto [loss, grad] = mse_gradient(model, bx, by);
      check_finite(loss, epoch);
      adam_step(model.theta, grad, adam, cfg.lr);
    }

    EpochRecord rec{epoch, mse(model, train_set.x, train_set.y), mse(model, val_set.x, val_set.y)};
    check_finite(rec.train_mse, epoch);
    check_finite(rec.val_mse, epoch);
    result.history.push_back(rec);
    if (!have_best || rec.val_mse < result.best_val_mse) {
      have_best = true;
      result.best_val_mse = rec.val_mse;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

TrainResult train(const Dataset& ds, const TrainConfig& cfg, const FeatureExtractor& fx) {
  const auto pick = [&](Split which) {
    std::vector<RadarCube> cubes;
    for (std::size_t i : indices_of(ds.splits, which)) cubes.push_back(ds.cubes[i]);
    if (cubes.empty()) throw std::invalid_argument("dataset has an empty " + to_string(which) + " split");
    return make_feature_set(cubes, fx);
  };
  return train(pick(Split::Train), pick(Split::Val), cfg);
}

TrainResult fine_tune(const CountModel& model, const FeatureSet& target_pool, const FeatureSet& target_val,
                      std::size_t n_train, TrainConfig cfg) {
  if (n_train > static_cast<std::size_t>(target_pool.size())) {
    throw std::invalid_argument("transfer size " + std::to_string(n_train) + " exceeds target pool of " +
                                std::to_string(target_pool.size()));
  }
  if (n_train == 0) {
    TrainResult r;
    r.model = model;
    return r;
  }
  std::vector<int> labels(static_cast<std::size_t>(target_pool.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(std::lround(target_pool.y(static_cast<Eigen::Index>(i))));
  std::vector<std::size_t> all(labels.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto rows = stratified_subsample(labels, all, n_train, cfg.seed);
  cfg.hidden = model.hidden();
  return train(target_pool.subset(rows), target_val, cfg, &model);
}

void save_model(const CountModel& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.write(kModelMagic, 4);
  put_u32(os, kModelVersion);
  put_u32(os, 3);
  put_u32(os, static_cast<std::uint32_t>(model.input_dim()));
  put_u32(os, static_cast<std::uint32_t>(model.hidden()));
  put_u32(os, 1);
  for (double v : model.input_mean) put_f64(os, v);
  for (double v : model.input_scale) put_f64(os, v);
  for (double v : model.theta) put_f64(os, v);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

CountModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != std::string(kModelMagic, 4)) {
    throw FormatError("bad model magic in " + path.string());
  }
  const auto version = static_cast<std::uint32_t>(get_bytes(is, 4, path));
  if (version != kModelVersion) throw FormatError("unsupported model version " + std::to_string(version));
  const auto layers = static_cast<std::uint32_t>(get_bytes(is, 4, path));
  if (layers != 3) throw FormatError("expected 3 layer dims, got " + std::to_string(layers));
  const auto d = static_cast<int>(get_bytes(is, 4, path));
  const auto h = static_cast<int>(get_bytes(is, 4, path));
  const auto out = get_bytes(is, 4, path);
  if (out != 1 || d < 1 || h < 1 || d > (1 << 20) || h > (1 << 20)) throw FormatError("bad layer dims");
  CountModel m(d, h);
  auto read_into = [&](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::bit_cast<double>(get_bytes(is, 8, path));
  };
  read_into(m.input_mean);
  read_into(m.input_scale);
  read_into(m.theta);
  if (is.peek() != EOF) throw FormatError("trailing bytes in model file " + path.string());
  return m;
}

void write_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "epoch,train_mse,val_mse\n" << std::setprecision(10);
  for (const auto& r : history) os << r.epoch << ',' << r.train_mse << ',' << r.val_mse << '\n';
}

}  // namespace radarcount
