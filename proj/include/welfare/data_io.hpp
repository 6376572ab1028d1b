#ifndef WELFARE_DATA_IO_HPP_
#define WELFARE_DATA_IO_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "welfare/core.hpp"
#include "welfare/fairness.hpp"
#include "welfare/report.hpp"
#include "welfare/svm.hpp"
#include "welfare/welfare.hpp"

namespace welfare {

using Json = nlohmann::json;

inline constexpr const char* kToolName = "welfare";
inline constexpr const char* kToolVersion = "0.1.0";
/// The only generator the population sampler implements.
inline constexpr const char* kGeneratorRng = "mt19937_64";

struct GroupSpec {
  std::size_t n = 100;
  Vector mean;               // feature mean, length d
  double income_mu = 10.0;   // log-normal location
  double income_sigma = 0.75;
};

/// Synthetic lending population. Features are Gaussian with covariance
/// covariance_scale * I around a per-group mean; incomes are log-normal and
/// floored at income_floor; labels follow the sign of the true linear rule
/// and are flipped independently with probability label_noise.
struct GeneratorConfig {
  std::string rng = kGeneratorRng;
  std::uint64_t seed = 7;
  std::size_t d = 5;
  std::array<GroupSpec, 2> groups;
  double covariance_scale = 1.0;
  double income_floor = 10.0;
  Vector true_theta;
  double true_b = 0.0;
  double label_noise = 0.05;

  /// Defaults used when no config file overrides them: group 1 is shifted
  /// against the true normal and has lower incomes.
  static GeneratorConfig defaults();
  void validate() const;
};

Dataset generate_population(const GeneratorConfig& config);

struct CheckConfig {
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  double step = 1e-6;
  double tol = 1e-8;
  std::size_t configurations = 100;  // random (x, h, h') draws for eq4/grad
  std::size_t min_dim = 2;
  std::size_t max_dim = 10;

  void validate() const;
};

/// Everything a pipeline run can be configured with, namespaced as in the
/// JSON config file: generator, train, weights, fairness, check.
struct AppConfig {
  GeneratorConfig generator = GeneratorConfig::defaults();
  TrainConfig train;
  double fair_lambda = 0.0;
  WeightFunction weights;
  FairnessCriterion fairness;
  CheckConfig check;

  void validate() const;
};

// CSV: header f1..fd,income,group,label. Lines starting with '#' are
// comments. Labels may be -1/+1 or 0/1 (0 maps to -1).
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(const std::string& text, const std::string& source = "<memory>");
void save_csv(const Dataset& dataset, const std::filesystem::path& path, const std::string& comment = "");
std::string format_csv(const Dataset& dataset, const std::string& comment = "");

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

Json to_json(const LinearClassifier& classifier);
Json to_json(const ThresholdSet& thresholds);
Json to_json(const UtilityModel& model);
Json to_json(const WeightFunction& wf);
Json to_json(const WelfareReport& report);
Json to_json(const ComparisonTable& table);
Json to_json(const ConditionReport& report);
Json to_json(const AppConfig& config);

LinearClassifier classifier_from_json(const Json& j);
ThresholdSet thresholds_from_json(const Json& j);
WeightFunction weight_function_from_json(const Json& j);
/// Rebuilds a report and re-checks its invariants.
WelfareReport report_from_json(const Json& j);
/// Missing keys keep their defaults; unknown keys are rejected.
AppConfig config_from_json(const Json& j);

AppConfig load_config(const std::filesystem::path& path);
Json load_json(const std::filesystem::path& path);
/// Writes j.dump(2) plus a trailing newline. Keys come out sorted.
void save_json(const Json& j, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

/// FNV-1a 64 of a byte string, 16 lowercase hex digits.
std::string digest(const std::string& bytes);

}  // namespace welfare

#endif  // WELFARE_DATA_IO_HPP_
