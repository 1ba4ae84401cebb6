#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "radarcount/config.hpp"
#include "radarcount/studies.hpp"

using namespace radarcount;

namespace {

StudyConfig tiny_study(const std::string& name) {
  StudyConfig c;
  c.seeds = {0, 1};
  c.data.n_per_class = 8;
  c.data.n_background = 4;
  c.methods = {PreprocessMethod::None, PreprocessMethod::SigmoidWeight};
  c.separability_methods = {PreprocessMethod::SigmoidWeight};
  c.augment_variants = {"none", "flips"};
  c.train.max_epochs = 3;
  c.train.patience = 2;
  c.train.hidden = 8;
  c.fine_tune = c.train;
  c.transfer.sizes = {4, 8};
  c.transfer.val = 4;
  c.transfer.test = 8;
  c.kmeans_restarts = 2;
  c.out = testutil::scratch_dir(name);
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("improvement rate rounds to one decimal") {
  CHECK(format_fixed(improvement_rate(1.2474, 0.6219), 1) == "50.1");
  CHECK(format_fixed(improvement_rate(0.8678, 0.3888), 1) == "55.2");
  CHECK(improvement_rate(2.0, 2.0) == 0.0);
  CHECK(improvement_rate(2.0, 3.0) == doctest::Approx(-50.0));
}

TEST_CASE("format_fixed") {
  CHECK(format_fixed(-0.0, 1) == "0.0");
  CHECK(format_fixed(-0.00001, 2) == "0.00");
  CHECK(format_fixed(-0.5, 1) == "-0.5");
  CHECK(format_fixed(1.23456, 4) == "1.2346");
  CHECK(format_fixed(3.0, 0) == "3");
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(median({7.0}) == 7.0);
  CHECK_THROWS(median({}));
}

TEST_CASE("comparison csv layout") {
  MethodRow base{"Baseline", 0.5, 0.4, 1.2474, 0.8678, 1.1, 1.3, true};
  MethodRow sig{"Sigmoid", 0.45, 0.35, 0.6219, 0.3888, 0.6, 0.7, true};
  MethodRow no_a = sig;
  no_a.method = "Target only";
  no_a.has_a = false;
  const auto rows = lines(comparison_csv({base, sig, no_a}, "env_a", "env_b", "abc"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] ==
        "method,env_a_rmse,env_a_mae,env_b_rmse,env_b_mae,env_b_rmse_min,env_b_rmse_max,"
        "env_b_rmse_improvement_pct,env_b_mae_improvement_pct,test_hash");
  CHECK(rows[1] == "Baseline,0.5000,0.4000,1.2474,0.8678,1.1000,1.3000,0.0,0.0,abc");
  CHECK(rows[2] == "Sigmoid,0.4500,0.3500,0.6219,0.3888,0.6000,0.7000,50.1,55.2,abc");
  CHECK(rows[3].rfind("Target only,-,-,0.6219,", 0) == 0);
  CHECK(lines(comparison_csv({}, "a", "b", "h")).size() == 1);
}

TEST_CASE("study config errors name the field") {
  auto field_of = [](const nlohmann::json& j) -> std::string {
    try {
      study_config_from_json(j);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "";
  };
  CHECK(field_of({{"preprocess", {{"methods", {"sigmoid_weight", "none"}}}}}) == "preprocess.methods");
  CHECK(field_of({{"preprocess", {{"methods", {"none", "nonsense"}}}}}) == "preprocess.methods");
  CHECK(field_of({{"transfer", {{"sizes", {100, 100}}}}}) == "transfer.sizes");
  CHECK(field_of({{"transfer", {{"sizes", {200, 100}}}}}) == "transfer.sizes");
  CHECK(field_of({{"seeds", nlohmann::json::array()}}) == "seeds");
  CHECK(field_of({{"train", {{"lr", "fast"}}}}) == "train.lr");
  CHECK(field_of({{"augment", {{"variants", {"flips"}}}}}) == "augment.variants");
  CHECK(field_of({{"data", {{"n_per_class", 1}}}}) == "data.n_per_class");
  CHECK(field_of(nlohmann::json::object()).empty());
}

TEST_CASE("generate config requires n_per_class") {
  try {
    generate_config_from_json({{"seed", 3}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "n_per_class");
    CHECK(std::string(e.what()).find("missing required field") != std::string::npos);
  }
  const auto g = generate_config_from_json({{"n_per_class", 2}, {"environments", {"a"}}});
  CHECK(g.n_per_class == 2);
  CHECK(g.environments == std::vector<std::string>{"a"});
  CHECK_THROWS_AS(generate_config_from_json({{"n_per_class", 2}, {"environments", {"d"}}}), ConfigError);
}

TEST_CASE("preprocess study output is deterministic and well formed") {
  auto c1 = tiny_study("study_a");
  auto c2 = tiny_study("study_b");
  c2.jobs = 2;
  const auto s1 = run_preprocess_study(c1);
  const auto s2 = run_preprocess_study(c2);
  write_preprocess_study(s1, c1);
  write_preprocess_study(s2, c2);
  for (const char* f : {"preprocessing_comparison.csv", "separability.csv", "preprocessing_per_seed.csv"}) {
    CAPTURE(f);
    const auto a = slurp(c1.out / f);
    CHECK(!a.empty());
    CHECK(a == slurp(c2.out / f));
  }
  REQUIRE(s1.rows.size() == 2);
  CHECK(s1.rows[0].method == display_name(PreprocessMethod::None));
  CHECK(s1.per_seed.size() == 2);
  CHECK(s1.test_hash.size() == 16);
  REQUIRE(s1.separability.size() == 1);
  CHECK(s1.separability[0].person.before.fisher >= 0.0);
  CHECK(lines(slurp(c1.out / "separability.csv")).size() == 3);
}

TEST_CASE("transfer study rows and outputs") {
  auto c = tiny_study("study_transfer");
  const auto s = run_transfer_study(c);
  write_transfer_study(s, c);
  REQUIRE(s.rows.size() == 3);
  CHECK(s.rows[0].has_a);
  CHECK_FALSE(s.rows[1].has_a);
  CHECK(s.rows[2].method == "8-sample transfer");
  CHECK(s.c_rmse_per_seed.size() == 2);
  CHECK(std::filesystem::exists(c.out / "transfer_comparison.csv"));
  CHECK(std::filesystem::exists(c.out / "seed_0" / "pretrained.rcm"));
  CHECK(std::filesystem::exists(c.out / "seed_1" / "finetune_4_history.csv"));
}

TEST_CASE("augment study trains one model per variant") {
  auto c = tiny_study("study_augment");
  c.seeds = {0};
  const auto s = run_augment_study(c);
  REQUIRE(s.rows.size() == 2);
  CHECK(s.rows[1].method == "Symmetry-based flipping");
  CHECK(s.train_sizes[1] == 4 * s.train_sizes[0]);
}

TEST_CASE("in-domain error on the default environment suite stays under the pilot bound") {
  StudyConfig c;
  c.seeds = {0};
  c.methods = {PreprocessMethod::None};
  c.separability_methods.clear();
  c.out = testutil::scratch_dir("study_in_domain");
  const auto s = run_preprocess_study(c);
  CHECK(s.rows[0].a_rmse < 0.75);
  CHECK(s.rows[0].x_rmse > s.rows[0].a_rmse);  // the layout shift costs accuracy
}
