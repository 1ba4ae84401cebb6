#include "radarcount/config.hpp"

#include <cmath>
#include <fstream>

namespace radarcount {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

template <typename T>
T get_or(const json& j, const std::string& path, const std::string& key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(join(path, key), std::string("wrong type (") + j.at(key).type_name() + ")");
  }
}

template <typename T>
T get_required(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(join(path, key), "missing required field");
  return get_or<T>(j, path, key, T{});
}

template <typename Fn>
auto checked(const std::string& field, Fn fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

SplitFractions split_from_json(const json& j, const std::string& path, SplitFractions def) {
  if (!j.contains("split")) return def;
  const auto p = join(path, "split");
  const json& s = j.at("split");
  require_object(s, p);
  return {get_or<double>(s, p, "train", def.train), get_or<double>(s, p, "val", def.val),
          get_or<double>(s, p, "test", def.test)};
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path.string(), "cannot open config file");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

GenerateConfig generate_config_from_json(const json& j) {
  require_object(j, "");
  GenerateConfig g;
  g.seed = get_or<std::uint64_t>(j, "", "seed", 0);
  if (j.contains("split")) g.split = split_from_json(j, "", {});
  if (j.contains("scenes")) {
    if (!j.at("scenes").is_array() || j.at("scenes").empty()) throw ConfigError("scenes", "expected a non-empty array");
    for (std::size_t i = 0; i < j.at("scenes").size(); ++i) {
      const auto field = "scenes[" + std::to_string(i) + "]";
      g.scenes.push_back(checked(field, [&] {
        auto s = j.at("scenes").at(i).get<SceneConfig>();
        s.validate();
        return s;
      }));
    }
    return g;
  }
  g.n_per_class = get_required<int>(j, "", "n_per_class");
  if (g.n_per_class < 1) throw ConfigError("n_per_class", "must be >= 1");
  g.n_background = get_or<int>(j, "", "n_background", 0);
  if (g.n_background < 0) throw ConfigError("n_background", "must be >= 0");
  g.environments = get_or<std::vector<std::string>>(j, "", "environments", g.environments);
  for (const auto& e : g.environments) {
    if (e != "a" && e != "b" && e != "c") throw ConfigError("environments", "unknown environment '" + e + "'");
  }
  if (g.split) checked("split", [&] {
    const double sum = g.split->train + g.split->val + g.split->test;
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("fractions must sum to 1");
    return 0;
  });
  return g;
}

TrainConfig train_config_from_json(const json& j, const std::string& path, TrainConfig t) {
  require_object(j, path);
  t.lr = get_or<double>(j, path, "lr", t.lr);
  t.max_epochs = get_or<int>(j, path, "max_epochs", t.max_epochs);
  t.patience = get_or<int>(j, path, "patience", t.patience);
  t.batch = get_or<int>(j, path, "batch", t.batch);
  t.hidden = get_or<int>(j, path, "hidden", t.hidden);
  t.seed = get_or<std::uint64_t>(j, path, "seed", t.seed);
  checked(path, [&] {
    t.validate();
    return 0;
  });
  return t;
}

PreprocessConfig preprocess_config_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  PreprocessConfig p;
  if (j.contains("method")) {
    p.method = checked(join(path, "method"),
                       [&] { return preprocess_method_from_string(get_or<std::string>(j, path, "method", "")); });
  }
  p.tau = get_or<double>(j, path, "tau", p.tau);
  p.s = get_or<double>(j, path, "s", p.s);
  p.bandpass_order = get_or<int>(j, path, "bandpass_order", p.bandpass_order);
  p.bandpass_low_hz = get_or<double>(j, path, "bandpass_low_hz", p.bandpass_low_hz);
  p.bandpass_high_hz = get_or<double>(j, path, "bandpass_high_hz", p.bandpass_high_hz);
  p.background_rank = get_or<int>(j, path, "rank", p.background_rank);
  const auto wiring = get_or<std::string>(j, path, "wiring", "cascade");
  if (wiring == "cascade") {
    p.wiring = BlendWiring::Cascade;
  } else if (wiring == "parallel") {
    p.wiring = BlendWiring::Parallel;
  } else {
    throw ConfigError(join(path, "wiring"), "expected 'cascade' or 'parallel'");
  }
  checked(path, [&] {
    p.validate();
    return 0;
  });
  return p;
}

StudyConfig study_config_from_json(const json& j) {
  require_object(j, "");
  StudyConfig c;
  c.seeds = get_or<std::vector<std::uint64_t>>(j, "", "seeds", c.seeds);
  if (c.seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  c.jobs = get_or<int>(j, "", "jobs", c.jobs);
  if (c.jobs < 1) throw ConfigError("jobs", "must be >= 1");
  c.out = get_or<std::string>(j, "", "out", c.out.string());
  c.plots = get_or<bool>(j, "", "plots", c.plots);
  c.a_split = split_from_json(j, "", c.a_split);

  if (j.contains("data")) {
    const json& d = j.at("data");
    require_object(d, "data");
    c.data.n_per_class = get_or<int>(d, "data", "n_per_class", c.data.n_per_class);
    if (c.data.n_per_class < 2) throw ConfigError("data.n_per_class", "must be >= 2");
    c.data.n_background = get_or<int>(d, "data", "n_background", c.data.n_background);
    for (const char* key : {"a", "b", "c", "background"}) {
      if (!d.contains(key)) continue;
      const std::filesystem::path p = get_or<std::string>(d, "data", key, "");
      if (std::string(key) == "a") c.data.a_manifest = p;
      if (std::string(key) == "b") c.data.b_manifest = p;
      if (std::string(key) == "c") c.data.c_manifest = p;
      if (std::string(key) == "background") c.data.background_manifest = p;
    }
  }

  if (j.contains("preprocess")) {
    const json& p = j.at("preprocess");
    c.preprocess = preprocess_config_from_json(p, "preprocess");
    if (p.contains("methods")) {
      c.methods.clear();
      for (const auto& name : get_or<std::vector<std::string>>(p, "preprocess", "methods", {})) {
        c.methods.push_back(checked("preprocess.methods", [&] { return preprocess_method_from_string(name); }));
      }
      if (c.methods.empty() || c.methods.front() != PreprocessMethod::None) {
        throw ConfigError("preprocess.methods", "must start with 'none' (the baseline row)");
      }
    }
    if (p.contains("separability_methods")) {
      c.separability_methods.clear();
      for (const auto& name : get_or<std::vector<std::string>>(p, "preprocess", "separability_methods", {})) {
        c.separability_methods.push_back(
            checked("preprocess.separability_methods", [&] { return preprocess_method_from_string(name); }));
      }
    }
  }

  if (j.contains("augment")) {
    const json& a = j.at("augment");
    require_object(a, "augment");
    c.augment_variants = get_or<std::vector<std::string>>(a, "augment", "variants", c.augment_variants);
    if (c.augment_variants.empty() || c.augment_variants.front() != "none") {
      throw ConfigError("augment.variants", "must start with 'none' (the base row)");
    }
    for (const auto& v : c.augment_variants) checked("augment.variants", [&] { return augment_spec_from_name(v); });
    c.augment.scale_lo = get_or<double>(a, "augment", "scale_lo", c.augment.scale_lo);
    c.augment.scale_hi = get_or<double>(a, "augment", "scale_hi", c.augment.scale_hi);
    c.augment.copies = get_or<int>(a, "augment", "copies", c.augment.copies);
    c.augment.seed = get_or<std::uint64_t>(a, "augment", "seed", c.augment.seed);
    const auto mode = get_or<std::string>(a, "augment", "scale_mode", "once");
    if (mode == "once") {
      c.augment.scale_mode = ScaleMode::Once;
    } else if (mode == "per_epoch") {
      c.augment.scale_mode = ScaleMode::PerEpoch;
    } else {
      throw ConfigError("augment.scale_mode", "expected 'once' or 'per_epoch'");
    }
    if (a.contains("preprocess")) {
      c.augment_preprocess = checked("augment.preprocess", [&] {
        return preprocess_method_from_string(get_or<std::string>(a, "augment", "preprocess", ""));
      });
    }
    checked("augment", [&] {
      c.augment.validate();
      return 0;
    });
  }

  if (j.contains("train")) c.train = train_config_from_json(j.at("train"), "train", c.train);
  if (j.contains("fine_tune")) c.fine_tune = train_config_from_json(j.at("fine_tune"), "fine_tune", c.fine_tune);

  if (j.contains("transfer")) {
    const json& t = j.at("transfer");
    require_object(t, "transfer");
    c.transfer.sizes = get_or<std::vector<int>>(t, "transfer", "sizes", c.transfer.sizes);
    c.transfer.size_scale = get_or<double>(t, "transfer", "scale", c.transfer.size_scale);
    c.transfer.val = get_or<int>(t, "transfer", "val", c.transfer.val);
    c.transfer.test = get_or<int>(t, "transfer", "test", c.transfer.test);
    if (t.contains("preprocess")) {
      c.transfer.preprocess = checked("transfer.preprocess", [&] {
        return preprocess_method_from_string(get_or<std::string>(t, "transfer", "preprocess", ""));
      });
    }
    const auto sizes = c.transfer.scaled_sizes();
    if (sizes.empty()) throw ConfigError("transfer.sizes", "must not be empty");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (sizes[i] < 1 || (i > 0 && sizes[i] <= sizes[i - 1])) {
        throw ConfigError("transfer.sizes", "must be positive and strictly increasing after scaling");
      }
    }
  }

  if (j.contains("separability")) {
    const json& s = j.at("separability");
    require_object(s, "separability");
    c.kmeans_restarts = get_or<int>(s, "separability", "restarts", c.kmeans_restarts);
    if (c.kmeans_restarts < 1) throw ConfigError("separability.restarts", "must be >= 1");
  }

  checked("<root>", [&] {
    c.validate();
    return 0;
  });
  return c;
}

}  // namespace radarcount
