#include "radarcount/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "radarcount/cube_io.hpp"
#include "radarcount/preprocess.hpp"
#include "radarcount/scene.hpp"

namespace radarcount {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t cube_hash(const RadarCube& c) {
  const auto bytes = encode_cube(c);
  return fnv1a(bytes.data(), bytes.size());
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; results must be
/// written to per-index slots by fn. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Sources {
  CubeSource a, b, c, background;
  bool has_background = false;
};

CubeSource subset(const CubeSource& src, std::vector<std::size_t> rows) {
  CubeSource out;
  for (std::size_t i : rows) out.meta.push_back(src.meta[i]);
  if (!src.splits.empty())
    for (std::size_t i : rows) out.splits.push_back(src.splits[i]);
  out.load = [load = src.load, rows = std::move(rows)](std::size_t i) { return load(rows.at(i)); };
  return out;
}

int c_per_class(const TransferConfig& t) {
  const int total = t.scaled_sizes().back() + t.scaled_val() + t.scaled_test();
  return (total + kMaxPersons) / (kMaxPersons + 1);
}

Sources load_sources(const StudyConfig& cfg, std::uint64_t seed, bool need_b, bool need_c) {
  const auto& d = cfg.data;
  Sources s;
  const bool simulate_ab = !d.a_manifest || (need_b && !d.b_manifest);
  const bool simulate_c = need_c && !d.c_manifest;
  if (simulate_ab || (!d.background_manifest && !d.a_manifest)) {
    auto suite = make_environment_suite_configs(seed, d.n_per_class, d.n_background);
    if (!d.a_manifest) s.a = source_from_scenes(std::move(suite.a));
    if (need_b && !d.b_manifest) s.b = source_from_scenes(std::move(suite.b));
    if (!d.background_manifest && !d.a_manifest && !suite.a_background.empty()) {
      s.background = source_from_scenes(std::move(suite.a_background));
      s.has_background = true;
    }
  }
  if (simulate_c) s.c = source_from_scenes(make_environment_suite_configs(seed, c_per_class(cfg.transfer), 0).c);
  if (d.a_manifest) s.a = source_from_manifest(*d.a_manifest);
  if (need_b && d.b_manifest) s.b = source_from_manifest(*d.b_manifest);
  if (need_c && d.c_manifest) s.c = source_from_manifest(*d.c_manifest);
  if (d.background_manifest) {
    s.background = source_from_manifest(*d.background_manifest);
    s.has_background = true;
  }
  return s;
}

/// Background cubes for the low-rank model: the dedicated set, or else the
/// empty-room cubes of A's training split.
CubeSource background_source(const Sources& s, std::span<const Split> a_splits) {
  if (s.has_background) return s.background;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < s.a.size(); ++i)
    if (s.a.meta[i].label == 0 && a_splits[i] == Split::Train) rows.push_back(i);
  return subset(s.a, std::move(rows));
}

std::vector<Preprocessor> make_preprocessors(const StudyConfig& cfg, std::span<const PreprocessMethod> methods,
                                             const CubeSource& backgrounds, std::uint64_t seed) {
  std::vector<Preprocessor> out;
  std::shared_ptr<const BackgroundModel> model;
  for (auto m : methods) {
    PreprocessConfig pc = cfg.preprocess;
    pc.method = m;
    if (m == PreprocessMethod::BackgroundSuppress) {
      if (!model) {
        BackgroundAccumulator acc;
        for (std::size_t i = 0; i < backgrounds.size(); ++i) acc.add(backgrounds.load(i));
        if (acc.frames() == 0) throw std::invalid_argument("background suppression needs 0-person background cubes");
        model = std::make_shared<const BackgroundModel>(acc.fit(pc.background_rank, seed));
      }
      out.emplace_back(pc, model);
    } else {
      out.emplace_back(pc);
    }
  }
  return out;
}

struct Featurized {
  std::vector<Eigen::MatrixXd> features;  // per preprocessor, one row per cube
  std::vector<Eigen::MatrixXd> std_maps;  // per preprocessor when requested
  Eigen::MatrixXd raw_std_maps;
  std::vector<std::uint64_t> hashes;      // per cube, of the unprocessed cube
  Eigen::VectorXd labels;
};

Featurized featurize(const CubeSource& src, std::span<const Preprocessor> pps, const std::vector<bool>& want_std,
                     bool want_raw_std) {
  const FeatureExtractor fx;
  const auto n = static_cast<Eigen::Index>(src.size());
  Featurized f;
  f.features.assign(pps.size(), Eigen::MatrixXd(n, fx.dim()));
  f.std_maps.resize(pps.size());
  f.labels.resize(n);
  f.hashes.resize(src.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const RadarCube cube = src.load(static_cast<std::size_t>(i));
    f.hashes[static_cast<std::size_t>(i)] = cube_hash(cube);
    f.labels(i) = cube.meta.label;
    if (want_raw_std) {
      const auto row = std_map_row(cube);
      if (i == 0) f.raw_std_maps.resize(n, row.size());
      f.raw_std_maps.row(i) = row;
    }
    for (std::size_t p = 0; p < pps.size(); ++p) {
      const RadarCube x = pps[p](cube);
      f.features[p].row(i) = fx(x).transpose();
      if (want_std[p]) {
        const auto row = std_map_row(x);
        if (i == 0) f.std_maps[p].resize(n, row.size());
        f.std_maps[p].row(i) = row;
      }
    }
  }
  return f;
}

FeatureSet rows_of(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const std::size_t> rows) {
  return FeatureSet{x, y}.subset(rows);
}

RegressionReport evaluate(const CountModel& m, const FeatureSet& fs) {
  const Eigen::VectorXd p = m.predict(fs.x);
  std::vector<double> preds(p.data(), p.data() + p.size());
  std::vector<int> labels;
  for (Eigen::Index i = 0; i < fs.y.size(); ++i) labels.push_back(static_cast<int>(std::lround(fs.y(i))));
  return rmse_mae(preds, labels);
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

std::uint64_t chain_hash(std::uint64_t h, const std::vector<std::uint64_t>& hashes, std::span<const std::size_t> rows) {
  for (std::size_t i : rows) h = fnv1a(&hashes[i], sizeof(std::uint64_t), h);
  return h;
}

std::string combine_hashes(const std::vector<std::uint64_t>& per_seed) {
  std::uint64_t h = kFnvOffset;
  for (auto v : per_seed) h = fnv1a(&v, sizeof v, h);
  return hex(h);
}

TrainConfig seeded(TrainConfig c, std::uint64_t seed) {
  c.seed ^= seed;
  return c;
}

std::vector<double> column(const std::vector<std::vector<EnvScores>>& per_seed, std::size_t row,
                           double (*pick)(const EnvScores&)) {
  std::vector<double> v;
  for (const auto& s : per_seed) v.push_back(pick(s[row]));
  return v;
}

MethodRow summarise(const std::string& name, const std::vector<std::vector<EnvScores>>& per_seed, std::size_t row) {
  MethodRow r;
  r.method = name;
  r.a_rmse = median(column(per_seed, row, [](const EnvScores& e) { return e.a.rmse; }));
  r.a_mae = median(column(per_seed, row, [](const EnvScores& e) { return e.a.mae; }));
  const auto xr = column(per_seed, row, [](const EnvScores& e) { return e.b.rmse; });
  r.x_rmse = median(xr);
  r.x_mae = median(column(per_seed, row, [](const EnvScores& e) { return e.b.mae; }));
  r.x_rmse_min = *std::min_element(xr.begin(), xr.end());
  r.x_rmse_max = *std::max_element(xr.begin(), xr.end());
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::filesystem::path ensure_out(const StudyConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec || !std::filesystem::is_directory(cfg.out)) {
    throw std::runtime_error("cannot create output directory " + cfg.out.string());
  }
  return cfg.out;
}

std::filesystem::path seed_dir(const StudyConfig& cfg, std::uint64_t seed) {
  auto dir = cfg.out / ("seed_" + std::to_string(seed));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

/// Grouped bar chart; one group per label, one bar per series.
std::string svg_bars(const std::string& title, const std::vector<std::string>& groups,
                     const std::vector<std::string>& series, const std::vector<std::vector<double>>& values) {
  const double w = 640, h = 360, left = 60, bottom = 300, top = 40;
  double vmax = 0.0;
  for (const auto& g : values)
    for (double v : g) vmax = std::max(vmax, v);
  if (vmax <= 0.0) vmax = 1.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << svg_escape(title)
     << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << w - 20 << "\" y2=\"" << bottom
     << "\" stroke=\"black\"/>\n";
  const char* colors[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44"};
  const double group_w = (w - left - 20) / static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double x0 = left + g * group_w + group_w * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = values[g][s];
      const double bh = (bottom - top) * std::max(v, 0.0) / vmax;
      os << "<rect x=\"" << format_fixed(x0 + s * bar_w, 1) << "\" y=\"" << format_fixed(bottom - bh, 1)
         << "\" width=\"" << format_fixed(bar_w * 0.9, 1) << "\" height=\"" << format_fixed(bh, 1) << "\" fill=\""
         << colors[s % 4] << "\"/>\n";
    }
    os << "<text x=\"" << format_fixed(x0 + group_w * 0.4, 1) << "\" y=\"" << bottom + 16
       << "\" text-anchor=\"middle\" font-size=\"10\">" << svg_escape(groups[g]) << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    os << "<rect x=\"" << left + 10 << "\" y=\"" << top + 14 * s << "\" width=\"10\" height=\"10\" fill=\""
       << colors[s % 4] << "\"/><text x=\"" << left + 24 << "\" y=\"" << top + 9 + 14 * s
       << "\" font-size=\"10\">" << svg_escape(series[s]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_curve(const std::string& title, const std::vector<double>& xs, const std::vector<double>& ys,
                      double baseline) {
  const double w = 640, h = 360, left = 60, right = 20, bottom = 300, top = 40;
  const double xmax = xs.empty() ? 1.0 : *std::max_element(xs.begin(), xs.end());
  double ymax = baseline;
  for (double y : ys) ymax = std::max(ymax, y);
  if (ymax <= 0.0) ymax = 1.0;
  auto px = [&](double x) { return left + (w - left - right) * x / xmax; };
  auto py = [&](double y) { return bottom - (bottom - top) * y / ymax; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << svg_escape(title)
     << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << w - right << "\" y2=\"" << bottom
     << "\" stroke=\"black\"/><line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << format_fixed(py(baseline), 1) << "\" x2=\"" << w - right
     << "\" y2=\"" << format_fixed(py(baseline), 1) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#4477aa\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) os << format_fixed(px(xs[i]), 1) << ',' << format_fixed(py(ys[i]), 1) << ' ';
  os << "\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << "<circle cx=\"" << format_fixed(px(xs[i]), 1) << "\" cy=\"" << format_fixed(py(ys[i]), 1)
       << "\" r=\"3\" fill=\"#4477aa\"/><text x=\"" << format_fixed(px(xs[i]), 1) << "\" y=\"" << bottom + 16
       << "\" text-anchor=\"middle\" font-size=\"10\">" << format_fixed(xs[i], 0) << "</text>\n";
  }
  os << "<text x=\"" << left << "\" y=\"" << top - 6 << "\" font-size=\"10\">RMSE (max " << format_fixed(ymax, 3)
     << ")</text>\n</svg>\n";
  return os.str();
}

}  // namespace

std::vector<int> TransferConfig::scaled_sizes() const {
  std::vector<int> out;
  for (int s : sizes) out.push_back(static_cast<int>(std::lround(s * size_scale)));
  return out;
}
int TransferConfig::scaled_val() const { return std::max(1, static_cast<int>(std::lround(val * size_scale))); }
int TransferConfig::scaled_test() const { return std::max(1, static_cast<int>(std::lround(test * size_scale))); }

void StudyConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("seeds: at least one seed is required");
  if (data.n_per_class < 2) throw std::invalid_argument("data.n_per_class must be >= 2");
  if (methods.empty() || methods.front() != PreprocessMethod::None) {
    throw std::invalid_argument("preprocess.methods must start with the baseline 'none'");
  }
  if (augment_variants.empty() || augment_variants.front() != "none") {
    throw std::invalid_argument("augment.variants must start with 'none'");
  }
  const auto sizes = transfer.scaled_sizes();
  if (sizes.empty()) throw std::invalid_argument("transfer.sizes must not be empty");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw std::invalid_argument("transfer.sizes must be positive and strictly increasing after scaling");
    }
  }
  if (kmeans_restarts < 1) throw std::invalid_argument("separability.restarts must be >= 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  preprocess.validate();
  train.validate();
  fine_tune.validate();
  augment.validate();
}

double improvement_rate(double baseline, double method) { return (1.0 - method / baseline) * 100.0; }

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

std::string comparison_csv(const std::vector<MethodRow>& rows, const std::string& env_a, const std::string& env_x,
                           const std::string& test_hash) {
  std::ostringstream os;
  os << "method," << env_a << "_rmse," << env_a << "_mae," << env_x << "_rmse," << env_x << "_mae," << env_x
     << "_rmse_min," << env_x << "_rmse_max," << env_x << "_rmse_improvement_pct," << env_x
     << "_mae_improvement_pct,test_hash\n";
  if (rows.empty()) return os.str();
  const MethodRow& base = rows.front();
  for (const auto& r : rows) {
    os << r.method << ',';
    if (r.has_a) {
      os << format_fixed(r.a_rmse, 4) << ',' << format_fixed(r.a_mae, 4) << ',';
    } else {
      os << "-,-,";
    }
    os << format_fixed(r.x_rmse, 4) << ',' << format_fixed(r.x_mae, 4) << ',' << format_fixed(r.x_rmse_min, 4) << ','
       << format_fixed(r.x_rmse_max, 4) << ',' << format_fixed(improvement_rate(base.x_rmse, r.x_rmse), 1) << ','
       << format_fixed(improvement_rate(base.x_mae, r.x_mae), 1) << ',' << test_hash << '\n';
  }
  return os.str();
}

std::string separability_csv(const std::vector<SeparabilityRow>& rows) {
  std::ostringstream os;
  os << "method,metric,person_count_before,person_count_after,layout_type_before,layout_type_after\n";
  for (const auto& r : rows) {
    os << r.method << ",AMI," << format_fixed(r.person.before.ami, 4) << ',' << format_fixed(r.person.after.ami, 4)
       << ',' << format_fixed(r.layout.before.ami, 4) << ',' << format_fixed(r.layout.after.ami, 4) << '\n';
    os << r.method << ",Fisher," << format_fixed(r.person.before.fisher, 4) << ','
       << format_fixed(r.person.after.fisher, 4) << ',' << format_fixed(r.layout.before.fisher, 4) << ','
       << format_fixed(r.layout.after.fisher, 4) << '\n';
  }
  return os.str();
}

std::string hash_cubes(const CubeSource& src, std::span<const std::size_t> indices, std::uint64_t basis) {
  std::uint64_t h = basis ? basis : kFnvOffset;
  for (std::size_t i : indices) {
    const auto c = cube_hash(src.load(i));
    h = fnv1a(&c, sizeof c, h);
  }
  return hex(h);
}

// --- preprocessing ------------------------------------------------------------

PreprocessStudy run_preprocess_study(const StudyConfig& cfg) {
  cfg.validate();
  const std::size_t n_seeds = cfg.seeds.size();
  PreprocessStudy study;
  study.per_seed.resize(n_seeds);
  study.separability_per_seed.resize(n_seeds);
  std::vector<std::uint64_t> hashes(n_seeds);

  // Every preprocessor the study needs, methods first.
  std::vector<PreprocessMethod> all = cfg.methods;
  for (auto m : cfg.separability_methods)
    if (std::find(all.begin(), all.end(), m) == all.end()) all.push_back(m);

  parallel_for(n_seeds, cfg.jobs, [&](std::size_t k) {
    const std::uint64_t seed = cfg.seeds[k];
    const Sources src = load_sources(cfg, seed, true, false);
    const auto a_labels = src.a.labels();
    const auto a_splits = src.a.splits.empty() ? stratified_assign(a_labels, cfg.a_split, seed) : src.a.splits;
    const auto pps = make_preprocessors(cfg, all, background_source(src, a_splits), seed);

    std::vector<bool> want_std(all.size(), false);
    for (std::size_t p = 0; p < all.size(); ++p) {
      want_std[p] = std::find(cfg.separability_methods.begin(), cfg.separability_methods.end(), all[p]) !=
                    cfg.separability_methods.end();
    }
    const Featurized fa = featurize(src.a, pps, want_std, !cfg.separability_methods.empty());
    const std::span<const Preprocessor> model_pps(pps.data(), cfg.methods.size());
    const Featurized fb = featurize(src.b, model_pps, std::vector<bool>(cfg.methods.size(), false), false);

    const auto train_rows = indices_of(a_splits, Split::Train);
    const auto val_rows = indices_of(a_splits, Split::Val);
    const auto test_rows = indices_of(a_splits, Split::Test);
    const auto b_rows = all_rows(src.b.size());
    hashes[k] = chain_hash(chain_hash(kFnvOffset, fa.hashes, test_rows), fb.hashes, b_rows);

    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      const auto result = train(rows_of(fa.features[m], fa.labels, train_rows),
                                rows_of(fa.features[m], fa.labels, val_rows), seeded(cfg.train, seed));
      study.per_seed[k].push_back({evaluate(result.model, rows_of(fa.features[m], fa.labels, test_rows)),
                                   evaluate(result.model, rows_of(fb.features[m], fb.labels, b_rows))});
    }

    if (!cfg.separability_methods.empty()) {
      std::vector<int> counts(a_labels.begin(), a_labels.end());
      const auto lay = src.a.layouts();
      const std::vector<int> layouts(lay.begin(), lay.end());
      if (std::set<int>(layouts.begin(), layouts.end()).size() < 2) {
        throw std::invalid_argument("separability needs layout labels in environment A");
      }
      const SeparabilityOptions opt{cfg.kmeans_restarts, seed};
      const SeparabilityScores person_before = separability_scores(fa.raw_std_maps, counts, opt);
      const SeparabilityScores layout_before = separability_scores(fa.raw_std_maps, layouts, opt);
      for (auto method : cfg.separability_methods) {
        const auto p = static_cast<std::size_t>(std::find(all.begin(), all.end(), method) - all.begin());
        SeparabilityRow row;
        row.method = display_name(method);
        row.person = {Labeling::PersonCount, person_before, separability_scores(fa.std_maps[p], counts, opt)};
        row.layout = {Labeling::LayoutType, layout_before, separability_scores(fa.std_maps[p], layouts, opt)};
        study.separability_per_seed[k].push_back(row);
      }
    }
  });

  study.test_hash = combine_hashes(hashes);
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    study.rows.push_back(summarise(display_name(cfg.methods[m]), study.per_seed, m));
  }
  for (std::size_t r = 0; r < cfg.separability_methods.size(); ++r) {
    SeparabilityRow row;
    row.method = display_name(cfg.separability_methods[r]);
    auto med = [&](auto pick) {
      std::vector<double> v;
      for (const auto& s : study.separability_per_seed) v.push_back(pick(s[r]));
      return median(v);
    };
    row.person.labeling = Labeling::PersonCount;
    row.layout.labeling = Labeling::LayoutType;
    row.person.before = {med([](const SeparabilityRow& x) { return x.person.before.ami; }),
                         med([](const SeparabilityRow& x) { return x.person.before.fisher; })};
    row.person.after = {med([](const SeparabilityRow& x) { return x.person.after.ami; }),
                        med([](const SeparabilityRow& x) { return x.person.after.fisher; })};
    row.layout.before = {med([](const SeparabilityRow& x) { return x.layout.before.ami; }),
                         med([](const SeparabilityRow& x) { return x.layout.before.fisher; })};
    row.layout.after = {med([](const SeparabilityRow& x) { return x.layout.after.ami; }),
                        med([](const SeparabilityRow& x) { return x.layout.after.fisher; })};
    study.separability.push_back(row);
  }
  return study;
}

void write_preprocess_study(const PreprocessStudy& s, const StudyConfig& cfg) {
  const auto out = ensure_out(cfg);
  write_text(out / "preprocessing_comparison.csv", comparison_csv(s.rows, "env_a", "env_b", s.test_hash));
  if (!s.separability.empty()) write_text(out / "separability.csv", separability_csv(s.separability));

  std::ostringstream per;
  per << "seed,method,env_a_rmse,env_a_mae,env_b_rmse,env_b_mae\n";
  for (std::size_t k = 0; k < s.per_seed.size(); ++k) {
    for (std::size_t m = 0; m < s.per_seed[k].size(); ++m) {
      const auto& e = s.per_seed[k][m];
      per << cfg.seeds[k] << ',' << to_string(cfg.methods[m]) << ',' << format_fixed(e.a.rmse, 6) << ','
          << format_fixed(e.a.mae, 6) << ',' << format_fixed(e.b.rmse, 6) << ',' << format_fixed(e.b.mae, 6) << '\n';
    }
  }
  write_text(out / "preprocessing_per_seed.csv", per.str());

  if (cfg.plots && !s.separability.empty()) {
    std::vector<std::string> groups;
    std::vector<std::vector<double>> vals;
    for (const auto& r : s.separability) {
      groups.push_back(r.method);
      vals.push_back({r.person.before.fisher, r.person.after.fisher, r.layout.before.fisher, r.layout.after.fisher});
    }
    write_text(out / "separability_fisher.svg",
               svg_bars("Fisher score before/after preprocessing", groups,
                        {"person before", "person after", "layout before", "layout after"}, vals));
  }
}

// --- augmentation ---------------------------------------------------------------

AugmentStudy run_augment_study(const StudyConfig& cfg) {
  cfg.validate();
  const std::size_t n_seeds = cfg.seeds.size();
  const std::size_t n_var = cfg.augment_variants.size();
  AugmentStudy study;
  study.per_seed.resize(n_seeds);
  std::vector<std::vector<std::size_t>> sizes(n_seeds);
  std::vector<std::uint64_t> hashes(n_seeds);

  parallel_for(n_seeds, cfg.jobs, [&](std::size_t k) {
    const std::uint64_t seed = cfg.seeds[k];
    const Sources src = load_sources(cfg, seed, true, false);
    const auto a_labels = src.a.labels();
    const auto a_splits = src.a.splits.empty() ? stratified_assign(a_labels, cfg.a_split, seed) : src.a.splits;
    const std::vector<PreprocessMethod> pm = {cfg.augment_preprocess};
    const auto pps = make_preprocessors(cfg, pm, background_source(src, a_splits), seed);
    const Preprocessor& pp = pps.front();
    const FeatureExtractor fx;

    std::vector<AugmentSpec> specs;
    for (const auto& name : cfg.augment_variants) {
      AugmentSpec spec = augment_spec_from_name(name, cfg.augment.seed ^ seed);
      spec.scale_lo = cfg.augment.scale_lo;
      spec.scale_hi = cfg.augment.scale_hi;
      spec.scale_mode = cfg.augment.scale_mode;
      spec.copies = cfg.augment.copies;
      specs.push_back(spec);
    }

    std::vector<std::vector<Eigen::VectorXd>> train_x(n_var);
    std::vector<std::vector<double>> train_y(n_var);
    Eigen::MatrixXd eval_x(static_cast<Eigen::Index>(src.a.size()), fx.dim());
    Eigen::VectorXd eval_y(eval_x.rows());
    std::vector<std::uint64_t> a_hashes(src.a.size());
    for (std::size_t i = 0; i < src.a.size(); ++i) {
      const RadarCube cube = src.a.load(i);
      a_hashes[i] = cube_hash(cube);
      eval_x.row(static_cast<Eigen::Index>(i)) = fx(pp(cube)).transpose();
      eval_y(static_cast<Eigen::Index>(i)) = cube.meta.label;
      if (a_splits[i] != Split::Train) continue;
      for (std::size_t v = 0; v < n_var; ++v) {
        for (const auto& aug : augment_cube(cube, specs[v], i)) {
          train_x[v].push_back(fx(pp(aug)));
          train_y[v].push_back(cube.meta.label);
        }
      }
    }
    const Featurized fb = featurize(src.b, pps, {false}, false);
    const auto val_rows = indices_of(a_splits, Split::Val);
    const auto test_rows = indices_of(a_splits, Split::Test);
    const auto b_rows = all_rows(src.b.size());
    hashes[k] = chain_hash(chain_hash(kFnvOffset, a_hashes, test_rows), fb.hashes, b_rows);

    for (std::size_t v = 0; v < n_var; ++v) {
      FeatureSet tr;
      tr.x.resize(static_cast<Eigen::Index>(train_x[v].size()), fx.dim());
      tr.y.resize(tr.x.rows());
      for (std::size_t i = 0; i < train_x[v].size(); ++i) {
        tr.x.row(static_cast<Eigen::Index>(i)) = train_x[v][i].transpose();
        tr.y(static_cast<Eigen::Index>(i)) = train_y[v][i];
      }
      sizes[k].push_back(train_x[v].size());
      TrainConfig tc = seeded(cfg.train, seed);
      if (specs[v].scale && specs[v].scale_mode == ScaleMode::PerEpoch) {
        tc.epoch_scale = std::make_pair(specs[v].scale_lo, specs[v].scale_hi);
      }
      const auto result = train(tr, rows_of(eval_x, eval_y, val_rows), tc);
      study.per_seed[k].push_back({evaluate(result.model, rows_of(eval_x, eval_y, test_rows)),
                                   evaluate(result.model, rows_of(fb.features[0], fb.labels, b_rows))});
    }
  });

  study.test_hash = combine_hashes(hashes);
  study.train_sizes = sizes.front();
  const std::map<std::string, std::string> names = {{"none", "Base model"},
                                                    {"flips", "Symmetry-based flipping"},
                                                    {"scale", "Random scaling"},
                                                    {"scaling", "Random scaling"},
                                                    {"framedrop", "Frame dropping and interpolation"},
                                                    {"all", "All augmentations"}};
  for (std::size_t v = 0; v < n_var; ++v) {
    const auto it = names.find(cfg.augment_variants[v]);
    study.rows.push_back(
        summarise(it == names.end() ? cfg.augment_variants[v] : it->second, study.per_seed, v));
  }
  return study;
}

void write_augment_study(const AugmentStudy& s, const StudyConfig& cfg) {
  const auto out = ensure_out(cfg);
  write_text(out / "augmentation_comparison.csv", comparison_csv(s.rows, "env_a", "env_b", s.test_hash));
  std::ostringstream per;
  per << "seed,variant,train_size,env_a_rmse,env_a_mae,env_b_rmse,env_b_mae\n";
  for (std::size_t k = 0; k < s.per_seed.size(); ++k) {
    for (std::size_t v = 0; v < s.per_seed[k].size(); ++v) {
      const auto& e = s.per_seed[k][v];
      per << cfg.seeds[k] << ',' << cfg.augment_variants[v] << ',' << s.train_sizes[v] << ','
          << format_fixed(e.a.rmse, 6) << ',' << format_fixed(e.a.mae, 6) << ',' << format_fixed(e.b.rmse, 6) << ','
          << format_fixed(e.b.mae, 6) << '\n';
    }
  }
  write_text(out / "augmentation_per_seed.csv", per.str());
  if (cfg.plots) {
    std::vector<std::string> groups;
    std::vector<std::vector<double>> vals;
    for (const auto& r : s.rows) {
      groups.push_back(r.method);
      vals.push_back({r.a_rmse, r.x_rmse});
    }
    write_text(out / "augmentation_rmse.svg", svg_bars("RMSE by augmentation", groups, {"env A", "env B"}, vals));
  }
}

// --- transfer -------------------------------------------------------------------

TransferStudy run_transfer_study(const StudyConfig& cfg) {
  cfg.validate();
  const std::size_t n_seeds = cfg.seeds.size();
  const auto sizes = cfg.transfer.scaled_sizes();
  std::vector<std::vector<EnvScores>> per_seed(n_seeds);
  std::vector<std::uint64_t> hashes(n_seeds);
  ensure_out(cfg);

  parallel_for(n_seeds, cfg.jobs, [&](std::size_t k) {
    const std::uint64_t seed = cfg.seeds[k];
    const Sources src = load_sources(cfg, seed, false, true);
    const auto a_splits = src.a.splits.empty() ? stratified_assign(src.a.labels(), cfg.a_split, seed) : src.a.splits;
    const std::vector<PreprocessMethod> pm = {cfg.transfer.preprocess};
    const auto pps = make_preprocessors(cfg, pm, background_source(src, a_splits), seed);

    const Featurized fa = featurize(src.a, pps, {false}, false);
    const Featurized fc = featurize(src.c, pps, {false}, false);

    std::vector<Split> c_splits = src.c.splits;
    if (c_splits.empty()) {
      const double total = static_cast<double>(src.c.size());
      const double val = cfg.transfer.scaled_val() / total;
      const double test = cfg.transfer.scaled_test() / total;
      c_splits = stratified_assign(src.c.labels(), {1.0 - val - test, val, test}, seed ^ 0xC0FFEEULL);
    }
    const auto pool_rows = indices_of(c_splits, Split::Train);
    const auto c_val_rows = indices_of(c_splits, Split::Val);
    const auto c_test_rows = indices_of(c_splits, Split::Test);
    if (static_cast<std::size_t>(sizes.back()) > pool_rows.size()) {
      throw std::invalid_argument("transfer size " + std::to_string(sizes.back()) + " exceeds target pool of " +
                                  std::to_string(pool_rows.size()));
    }
    const auto a_test = indices_of(a_splits, Split::Test);
    hashes[k] = chain_hash(chain_hash(kFnvOffset, fa.hashes, a_test), fc.hashes, c_test_rows);

    const auto pre = train(rows_of(fa.features[0], fa.labels, indices_of(a_splits, Split::Train)),
                           rows_of(fa.features[0], fa.labels, indices_of(a_splits, Split::Val)),
                           seeded(cfg.train, seed));
    const auto dir = seed_dir(cfg, seed);
    save_model(pre.model, dir / "pretrained.rcm");
    write_history(pre.history, dir / "pretrain_history.csv");

    const FeatureSet c_test = rows_of(fc.features[0], fc.labels, c_test_rows);
    const FeatureSet c_pool = rows_of(fc.features[0], fc.labels, pool_rows);
    const FeatureSet c_val = rows_of(fc.features[0], fc.labels, c_val_rows);
    per_seed[k].push_back({evaluate(pre.model, rows_of(fa.features[0], fa.labels, a_test)),
                           evaluate(pre.model, c_test)});
    for (int n : sizes) {
      const auto ft = fine_tune(pre.model, c_pool, c_val, static_cast<std::size_t>(n), seeded(cfg.fine_tune, seed));
      write_history(ft.history, dir / ("finetune_" + std::to_string(n) + "_history.csv"));
      per_seed[k].push_back({RegressionReport{}, evaluate(ft.model, c_test)});
    }
  });

  TransferStudy study;
  study.test_hash = combine_hashes(hashes);
  for (std::size_t r = 0; r <= sizes.size(); ++r) {
    MethodRow row = summarise(r == 0 ? "No transfer" : std::to_string(sizes[r - 1]) + "-sample transfer", per_seed, r);
    row.has_a = r == 0;
    study.rows.push_back(row);
  }
  for (const auto& s : per_seed) {
    std::vector<double> v;
    for (const auto& e : s) v.push_back(e.b.rmse);
    study.c_rmse_per_seed.push_back(v);
  }
  for (std::size_t r = 2; r < study.rows.size(); ++r) {
    if (study.rows[r].x_rmse > study.rows[r - 1].x_rmse) study.monotone = false;
  }
  return study;
}

void write_transfer_study(const TransferStudy& s, const StudyConfig& cfg) {
  const auto out = ensure_out(cfg);
  write_text(out / "transfer_comparison.csv", comparison_csv(s.rows, "env_a", "env_c", s.test_hash));
  std::ostringstream per;
  per << "seed,row,env_c_rmse\n";
  for (std::size_t k = 0; k < s.c_rmse_per_seed.size(); ++k) {
    for (std::size_t r = 0; r < s.c_rmse_per_seed[k].size(); ++r) {
      per << cfg.seeds[k] << ',' << s.rows[r].method << ',' << format_fixed(s.c_rmse_per_seed[k][r], 6) << '\n';
    }
  }
  write_text(out / "transfer_per_seed.csv", per.str());
  if (cfg.plots) {
    const auto sizes = cfg.transfer.scaled_sizes();
    std::vector<double> xs(sizes.begin(), sizes.end()), ys;
    for (std::size_t r = 1; r < s.rows.size(); ++r) ys.push_back(s.rows[r].x_rmse);
    write_text(out / "transfer_rmse.svg",
               svg_curve("Target RMSE vs fine-tuning size (dashed: no transfer)", xs, ys, s.rows[0].x_rmse));
  }
}

}  // namespace radarcount
