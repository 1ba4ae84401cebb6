// Command-line front end: dataset generation, single-step processing and the
// three study runners.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "radarcount/augment.hpp"
#include "radarcount/config.hpp"
#include "radarcount/countnet.hpp"
#include "radarcount/cube_io.hpp"
#include "radarcount/dataset.hpp"
#include "radarcount/metrics.hpp"
#include "radarcount/normalize.hpp"
#include "radarcount/pipeline.hpp"
#include "radarcount/scene.hpp"
#include "radarcount/studies.hpp"

namespace fs = std::filesystem;
using namespace radarcount;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 0;
};

fs::path make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
  return dir;
}

fs::path out_dir(const Globals& g, const char* fallback) { return make_dir(g.out.empty() ? fallback : g.out); }

void print_counts(const std::string& name, const std::vector<ManifestEntry>& entries) {
  std::map<int, int> counts;
  for (const auto& e : entries) ++counts[e.label];
  std::cout << name << ":";
  for (const auto& [label, n] : counts) std::cout << " label " << label << " = " << n;
  std::cout << " (" << entries.size() << " cubes)\n";
}

// Simulates, normalises and writes each scene as it goes.
void write_scenes(const std::vector<SceneConfig>& scenes, const fs::path& dir,
                  const std::optional<SplitFractions>& split, std::uint64_t seed, const std::string& name) {
  make_dir(dir);
  std::vector<int> labels;
  for (const auto& s : scenes) labels.push_back(static_cast<int>(s.persons.size()));
  std::vector<Split> splits(scenes.size(), Split::Unassigned);
  if (split) splits = stratified_assign(labels, *split, seed);

  const CubeSource src = source_from_scenes(scenes);
  std::vector<ManifestEntry> entries;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    char file[32];
    std::snprintf(file, sizeof file, "cube_%05zu.rdc", i);
    const RadarCube cube = src.load(i);
    write_cube(cube, dir / file);
    entries.push_back({dir / file, cube.meta.label, cube.meta.environment, cube.meta.activity, splits[i],
                       cube.meta.layout});
  }
  write_manifest(entries, dir / "manifest.jsonl");
  print_counts(name, entries);
}

int cmd_generate(const Globals& g, const std::string& scene_path) {
  if (!scene_path.empty()) {
    auto scene = read_json_file(scene_path).get<SceneConfig>();
    if (g.seed) scene.seed = *g.seed;
    scene.validate();
    const auto dir = out_dir(g, "data");
    const RadarCube cube = clip_and_normalize(generate_cube(scene)).first;
    write_cube(cube, dir / "scene.rdc");
    std::cout << "wrote " << (dir / "scene.rdc").string() << " (label " << cube.meta.label << ")\n";
    return 0;
  }
  if (g.config.empty()) throw ConfigError("--config", "generate needs --config or --scene");
  GenerateConfig cfg = generate_config_from_json(read_json_file(g.config));
  if (g.seed) cfg.seed = *g.seed;
  const auto dir = out_dir(g, "data");
  if (!cfg.scenes.empty()) {
    write_scenes(cfg.scenes, dir / "custom", cfg.split, cfg.seed, "custom");
    return 0;
  }
  auto suite = make_environment_suite_configs(cfg.seed, cfg.n_per_class, cfg.n_background);
  for (const auto& env : cfg.environments) {
    const auto& scenes = env == "a" ? suite.a : env == "b" ? suite.b : suite.c;
    write_scenes(scenes, dir / ("env_" + env), cfg.split, cfg.seed, "env_" + env);
  }
  if (!suite.a_background.empty()) write_scenes(suite.a_background, dir / "env_a_background", std::nullopt, cfg.seed, "env_a_background");
  return 0;
}

PreprocessConfig preprocess_from_flags(const Globals& g, const std::string& method, double tau, double s, int rank,
                                       const std::string& wiring) {
  PreprocessConfig pc;
  if (!g.config.empty()) {
    const auto j = read_json_file(g.config);
    if (j.contains("preprocess")) pc = preprocess_config_from_json(j.at("preprocess"), "preprocess");
  }
  if (!method.empty()) {
    try {
      pc.method = preprocess_method_from_string(method);
    } catch (const std::exception& e) {
      throw ConfigError("--method", e.what());
    }
  }
  if (tau >= 0.0) pc.tau = tau;
  if (s > 0.0) pc.s = s;
  if (rank >= 0) pc.background_rank = rank;
  if (!wiring.empty()) {
    if (wiring != "cascade" && wiring != "parallel") throw ConfigError("--wiring", "expected cascade or parallel");
    pc.wiring = wiring == "cascade" ? BlendWiring::Cascade : BlendWiring::Parallel;
  }
  return pc;
}

int cmd_preprocess(const Globals& g, const std::string& input, const std::string& method, double tau, double s,
                   int rank, const std::string& wiring, const std::string& background) {
  const PreprocessConfig pc = preprocess_from_flags(g, method, tau, s, rank, wiring);
  std::optional<CubeSource> bg;
  if (!background.empty()) bg = source_from_manifest(background);
  const Preprocessor pp = make_preprocessor(pc, bg ? &*bg : nullptr, g.seed.value_or(0));
  const auto entries = read_manifest(input);
  const auto dir = out_dir(g, "preprocessed");
  std::vector<ManifestEntry> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto path = dir / entries[i].path.filename();
    write_cube(pp(read_cube(entries[i].path)), path);
    auto e = entries[i];
    e.path = path;
    out.push_back(e);
  }
  write_manifest(out, dir / "manifest.jsonl");
  std::cout << "preprocessed " << out.size() << " cubes with " << to_string(pc.method) << " into " << dir.string()
            << "\n";
  return 0;
}

int cmd_augment(const Globals& g, const std::string& input, const std::string& which, double lo, double hi,
                std::uint64_t aug_seed) {
  AugmentSpec spec;
  try {
    spec = augment_spec_from_name(which, aug_seed);
  } catch (const std::exception& e) {
    throw ConfigError("--augment", e.what());
  }
  spec.scale_lo = lo;
  spec.scale_hi = hi;
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError("--scale-lo/--scale-hi", e.what());
  }
  const auto entries = read_manifest(input);
  const auto dir = out_dir(g, "augmented");
  std::vector<ManifestEntry> out;
  std::size_t written = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const RadarCube cube = read_cube(entries[i].path);
    // Only training cubes are augmented; everything else is copied through.
    const bool augment = entries[i].split == Split::Train || entries[i].split == Split::Unassigned;
    const auto variants = augment ? augment_cube(cube, spec, i) : std::vector<RadarCube>{cube};
    for (std::size_t v = 0; v < variants.size(); ++v) {
      char file[48];
      std::snprintf(file, sizeof file, "cube_%05zu_%02zu.rdc", i, v);
      write_cube(variants[v], dir / file);
      auto e = entries[i];
      e.path = dir / file;
      out.push_back(e);
      ++written;
    }
  }
  write_manifest(out, dir / "manifest.jsonl");
  std::cout << "wrote " << written << " cubes (" << entries.size() << " originals) into " << dir.string() << "\n";
  return 0;
}

Dataset load_split(const fs::path& manifest) { return read_dataset(manifest); }

int cmd_train(const Globals& g, const std::string& input, const std::string& init, double lr) {
  TrainConfig tc;
  if (!g.config.empty()) {
    const auto j = read_json_file(g.config);
    if (j.contains("train")) tc = train_config_from_json(j.at("train"), "train");
  }
  if (lr > 0.0) tc.lr = lr;
  if (g.seed) tc.seed = *g.seed;
  try {
    tc.validate();
  } catch (const std::exception& e) {
    throw ConfigError("train", e.what());
  }
  const Dataset ds = load_split(input);
  const auto pick = [&](Split which) {
    std::vector<RadarCube> cubes;
    for (std::size_t i : indices_of(ds.splits, which)) cubes.push_back(ds.cubes[i]);
    if (cubes.empty()) throw std::invalid_argument("manifest has no " + to_string(which) + " cubes: " + input);
    return make_feature_set(cubes);
  };
  std::optional<CountModel> start;
  if (!init.empty()) start = load_model(init);
  const auto result = train(pick(Split::Train), pick(Split::Val), tc, start ? &*start : nullptr);
  const auto dir = out_dir(g, "model");
  save_model(result.model, dir / "model.rcm");
  write_history(result.history, dir / "history.csv");
  std::cout << "best epoch " << result.best_epoch << ", val MSE " << format_fixed(result.best_val_mse, 6)
            << "; wrote " << (dir / "model.rcm").string() << "\n";
  return 0;
}

int cmd_evaluate(const Globals& g, const std::string& model_path, const std::string& input, const std::string& split) {
  const CountModel model = load_model(model_path);
  const Dataset ds = load_split(input);
  std::vector<RadarCube> cubes;
  const bool all = split == "all";
  const Split which = all ? Split::Unassigned : split_from_string(split);
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (all || ds.split_of(i) == which) cubes.push_back(ds.cubes[i]);
  if (cubes.empty()) throw std::invalid_argument("no cubes in split '" + split + "' of " + input);
  const FeatureSet fs = make_feature_set(cubes);
  const Eigen::VectorXd p = model.predict(fs.x);
  std::vector<double> preds(p.data(), p.data() + p.size());
  std::vector<int> labels;
  for (const auto& c : cubes) labels.push_back(c.meta.label);
  const auto r = rmse_mae(preds, labels);
  std::cout << "n=" << r.n << " rmse=" << format_fixed(r.rmse, 4) << " mae=" << format_fixed(r.mae, 4) << "\n";
  if (!g.out.empty()) {
    const auto dir = make_dir(g.out);
    std::FILE* f = std::fopen((dir / "evaluation.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot write evaluation.csv");
    std::fprintf(f, "n,rmse,mae\n%zu,%s,%s\nlabel,mae\n", r.n, format_fixed(r.rmse, 6).c_str(),
                 format_fixed(r.mae, 6).c_str());
    for (const auto& [label, mae] : r.per_class_mae) std::fprintf(f, "%d,%s\n", label, format_fixed(mae, 6).c_str());
    std::fclose(f);
  }
  return 0;
}

StudyConfig study_config(const Globals& g, bool plots) {
  StudyConfig c = g.config.empty() ? StudyConfig{} : study_config_from_json(read_json_file(g.config));
  if (g.seed) {
    for (std::size_t i = 0; i < c.seeds.size(); ++i) c.seeds[i] = *g.seed + i;
  }
  if (!g.out.empty()) c.out = g.out;
  if (g.jobs > 0) c.jobs = g.jobs;
  if (plots) c.plots = true;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar people-counting experiments on synthetic range-azimuth cubes"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Base random seed")->capture_default_str();
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--jobs", g.jobs, "Worker threads for study commands")->check(CLI::PositiveNumber);

  std::string scene;
  auto* gen = app.add_subcommand("generate", "Simulate datasets (environment suite or explicit scenes)");
  gen->add_option("--scene", scene, "Single scene JSON; writes one cube");

  std::string input, method, wiring, background;
  double tau = -1.0, steep = -1.0;
  int rank = -1;
  auto* pre = app.add_subcommand("preprocess", "Apply one preprocessing method to a dataset");
  pre->add_option("--input", input, "Input manifest")->required();
  pre->add_option("--method", method, "none|threshold_zero|sigmoid_weight|butterworth_bandpass|two_stage_highpass|background_suppress");
  pre->add_option("--tau", tau, "Std threshold / sigmoid midpoint");
  pre->add_option("--s", steep, "Sigmoid steepness");
  pre->add_option("--rank", rank, "Background model rank");
  pre->add_option("--wiring", wiring, "Two-stage blend wiring: cascade|parallel");
  pre->add_option("--background", background, "Manifest of 0-person cubes for background_suppress");

  std::string which = "all";
  double lo = 0.95, hi = 1.05;
  std::uint64_t aug_seed = 0;
  auto* aug = app.add_subcommand("augment", "Augment the training cubes of a dataset");
  aug->add_option("--input", input, "Input manifest")->required();
  aug->add_option("--augment", which, "flips|scale|framedrop|all")->capture_default_str();
  aug->add_option("--scale-lo", lo, "Lower scaling bound")->capture_default_str();
  aug->add_option("--scale-hi", hi, "Upper scaling bound")->capture_default_str();
  aug->add_option("--aug-seed", aug_seed, "Augmentation seed")->capture_default_str();

  std::string init;
  double lr = -1.0;
  auto* tr = app.add_subcommand("train", "Train a count model on the train/val splits of a manifest");
  tr->add_option("--input", input, "Manifest with train and val splits")->required();
  tr->add_option("--init", init, "Start from this checkpoint (fine-tuning)");
  tr->add_option("--lr", lr, "Learning rate override");

  std::string model, split = "test";
  auto* ev = app.add_subcommand("evaluate", "RMSE/MAE of a checkpoint on a manifest split");
  ev->add_option("--model", model, "Checkpoint (.rcm)")->required();
  ev->add_option("--input", input, "Manifest")->required();
  ev->add_option("--split", split, "train|val|test|unassigned|all")->capture_default_str();

  bool plots = false;
  auto* sp = app.add_subcommand("study-preprocess", "Separability and cross-environment preprocessing study");
  auto* sa = app.add_subcommand("study-augment", "Augmentation study");
  auto* st = app.add_subcommand("study-transfer", "Fine-tuning size study");
  for (auto* sub : {sp, sa, st}) sub->add_flag("--plots", plots, "Also write SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (*seed_opt) g.seed = seed_value;

  try {
    if (*gen) return cmd_generate(g, scene);
    if (*pre) return cmd_preprocess(g, input, method, tau, steep, rank, wiring, background);
    if (*aug) return cmd_augment(g, input, which, lo, hi, aug_seed);
    if (*tr) return cmd_train(g, input, init, lr);
    if (*ev) return cmd_evaluate(g, model, input, split);
    if (*sp) {
      const auto cfg = study_config(g, plots);
      const auto s = run_preprocess_study(cfg);
      write_preprocess_study(s, cfg);
      std::cout << comparison_csv(s.rows, "env_a", "env_b", s.test_hash) << "\n" << separability_csv(s.separability);
      return 0;
    }
    if (*sa) {
      const auto cfg = study_config(g, plots);
      const auto s = run_augment_study(cfg);
      write_augment_study(s, cfg);
      std::cout << comparison_csv(s.rows, "env_a", "env_b", s.test_hash);
      return 0;
    }
    if (*st) {
      const auto cfg = study_config(g, plots);
      const auto s = run_transfer_study(cfg);
      write_transfer_study(s, cfg);
      std::cout << comparison_csv(s.rows, "env_a", "env_c", s.test_hash);
      if (!s.monotone) std::cerr << "warning: median target RMSE is not monotone in the fine-tuning size\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
