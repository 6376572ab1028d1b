#include "welfare/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace welfare {

// ---------------------------------------------------------------------------
// Synthetic population

GeneratorConfig GeneratorConfig::defaults() {
  GeneratorConfig c;
  c.true_theta = {1.0, -0.8, 0.6, 0.4, -0.2};
  c.true_b = 0.2;
  c.groups[0] = GroupSpec{100, {0.0, 0.0, 0.0, 0.0, 0.0}, 10.4, 0.6};
  c.groups[1] = GroupSpec{100, {-0.5, 0.4, -0.3, -0.2, 0.1}, 10.0, 0.7};
  return c;
}

void GeneratorConfig::validate() const {
  require(rng == kGeneratorRng, "generator.rng: only '" + std::string(kGeneratorRng) + "' is implemented");
  require(d >= 1, "generator.d must be >= 1");
  require(true_theta.size() == d, "generator.true_theta must have d entries");
  for (double v : true_theta) require(std::isfinite(v), "generator.true_theta must be finite");
  require(std::isfinite(true_b), "generator.true_b must be finite");
  require(std::isfinite(covariance_scale) && covariance_scale > 0.0, "generator.covariance_scale must be > 0");
  require(std::isfinite(income_floor) && income_floor >= 10.0, "generator.income_floor must be >= 10");
  require(std::isfinite(label_noise) && label_noise >= 0.0 && label_noise < 0.5,
          "generator.label_noise must be in [0, 0.5)");
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string ns = "generator.groups[" + std::to_string(g) + "].";
    require(groups[g].n >= 1, ns + "n must be >= 1");
    require(groups[g].mean.size() == d, ns + "mean must have d entries");
    for (double v : groups[g].mean) require(std::isfinite(v), ns + "mean must be finite");
    require(std::isfinite(groups[g].income_mu), ns + "income_mu must be finite");
    require(std::isfinite(groups[g].income_sigma) && groups[g].income_sigma >= 0.0,
            ns + "income_sigma must be >= 0");
  }
}

Dataset generate_population(const GeneratorConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution flip(config.label_noise);
  const double feature_sd = std::sqrt(config.covariance_scale);

  std::vector<Individual> people;
  for (int g = 0; g < 2; ++g) {
    const GroupSpec& spec = config.groups[static_cast<std::size_t>(g)];
    for (std::size_t i = 0; i < spec.n; ++i) {
      Individual ind;
      ind.group = g;
      ind.features.resize(config.d);
      for (std::size_t j = 0; j < config.d; ++j) ind.features[j] = spec.mean[j] + feature_sd * gauss(rng);
      ind.income = std::max(config.income_floor, std::exp(spec.income_mu + spec.income_sigma * gauss(rng)));
      double score = config.true_b;
      for (std::size_t j = 0; j < config.d; ++j) score += config.true_theta[j] * ind.features[j];
      bool positive = score > 0.0;
      if (flip(rng)) positive = !positive;
      ind.label = positive ? Label::Positive : Label::Negative;
      people.push_back(std::move(ind));
    }
  }
  return Dataset(std::move(people));
}

void CheckConfig::validate() const {
  require(samples >= 1, "check.samples must be >= 1");
  require(std::isfinite(step) && step > 0.0, "check.step must be > 0");
  require(std::isfinite(tol) && tol > 0.0, "check.tol must be > 0");
  require(configurations >= 1, "check.configurations must be >= 1");
  require(min_dim >= 2 && min_dim <= max_dim, "check.min_dim/max_dim must satisfy 2 <= min_dim <= max_dim");
}

void AppConfig::validate() const {
  generator.validate();
  train.validate();
  require(std::isfinite(fair_lambda) && fair_lambda >= 0.0, "train.fair_lambda must be >= 0");
  weights.validate();
  require(std::isfinite(fairness.tolerance) && fairness.tolerance >= 0.0, "fairness.tolerance must be >= 0");
  check.validate();
}

// ---------------------------------------------------------------------------
// Text helpers

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("failed to format double");
  return std::string(buf, end);
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_real(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string digest(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

// ---------------------------------------------------------------------------
// CSV

Dataset parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (trim(line).empty() || line.front() == '#') continue;
    header = split(line, ',');
    break;
  }
  require(!header.empty(), source + ": missing header row");

  std::size_t income_col = header.size();
  std::size_t group_col = header.size();
  std::size_t label_col = header.size();
  std::vector<std::size_t> feature_cols;
  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    require(seen.insert(name).second, source + ": duplicate column '" + name + "'");
    if (name == "income") {
      income_col = c;
    } else if (name == "group") {
      group_col = c;
    } else if (name == "label") {
      label_col = c;
    } else if (name.size() > 1 && name[0] == 'f') {
      std::size_t k = 0;
      const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
      require(ec == std::errc() && ptr == name.data() + name.size() && k >= 1,
              source + ": unknown column '" + name + "'");
      if (feature_cols.size() < k) feature_cols.resize(k, header.size());
      feature_cols[k - 1] = c;
    } else {
      throw ValidationError(source + ": unknown column '" + name + "'");
    }
  }
  require(income_col < header.size(), source + ": missing column 'income'");
  require(group_col < header.size(), source + ": missing column 'group'");
  require(label_col < header.size(), source + ": missing column 'label'");
  require(!feature_cols.empty(), source + ": missing feature columns f1..fd");
  for (std::size_t k = 0; k < feature_cols.size(); ++k) {
    require(feature_cols[k] < header.size(), source + ": missing column 'f" + std::to_string(k + 1) + "'");
  }

  std::vector<Individual> people;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty() || line.front() == '#') continue;
    ++row;
    const std::vector<std::string> cells = split(line, ',');
    const std::string where = source + ": row " + std::to_string(row);
    require(cells.size() == header.size(), where + ": expected " + std::to_string(header.size()) +
                                               " columns, got " + std::to_string(cells.size()));
    const auto real = [&](std::size_t col) {
      double v = 0.0;
      require(parse_real(cells[col], v) && std::isfinite(v),
              where + ", column " + header[col] + ": not a finite number '" + cells[col] + "'");
      return v;
    };
    Individual ind;
    for (std::size_t col : feature_cols) ind.features.push_back(real(col));
    ind.income = real(income_col);
    require(ind.income > 0.0, where + ", column income: income must be > 0");
    const double g = real(group_col);
    require(g == 0.0 || g == 1.0, where + ", column group: unknown group '" + cells[group_col] + "'");
    ind.group = static_cast<int>(g);
    const double y = real(label_col);
    require(y == -1.0 || y == 0.0 || y == 1.0,
            where + ", column label: expected -1/+1 or 0/1, got '" + cells[label_col] + "'");
    ind.label = y > 0.0 ? Label::Positive : Label::Negative;
    people.push_back(std::move(ind));
  }
  require(!people.empty(), source + ": no data rows");
  return Dataset(std::move(people));
}

Dataset load_csv(const std::filesystem::path& path) { return parse_csv(read_file(path), path.string()); }

std::string format_csv(const Dataset& dataset, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  for (std::size_t j = 0; j < dataset.dim(); ++j) out += "f" + std::to_string(j + 1) + ",";
  out += "income,group,label\n";
  for (const auto& ind : dataset.individuals()) {
    for (double v : ind.features) out += format_double(v) + ",";
    out += format_double(ind.income) + "," + std::to_string(ind.group) + "," + std::to_string(sign_of(ind.label)) +
           "\n";
  }
  return out;
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path, const std::string& comment) {
  write_file(path, format_csv(dataset, comment));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& ns) {
  require(j.is_object(), ns + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok |= key == a;
    require(ok, "unknown config key '" + (ns.empty() ? key : ns + "." + key) + "'");
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& ns) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("config key '" + ns + "." + key + "' has the wrong type");
  }
}

template <typename T>
T need(const Json& j, const char* key, const std::string& what) {
  require(j.is_object() && j.contains(key), what + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(what + ": key '" + key + "' has the wrong type");
  }
}

Json group_map_json(const std::map<int, Json>& m) {
  Json out = Json::object();
  for (const auto& [g, v] : m) out[std::to_string(g)] = v;
  return out;
}

int group_key(const std::string& key, const std::string& what) {
  require(key == "0" || key == "1", what + ": unknown group tag '" + key + "'");
  return key == "1" ? 1 : 0;
}

}  // namespace

Json to_json(const LinearClassifier& classifier) { return Json{{"theta", classifier.theta}, {"b", classifier.b}}; }

LinearClassifier classifier_from_json(const Json& j) {
  LinearClassifier c;
  c.theta = need<Vector>(j, "theta", "classifier");
  c.b = need<double>(j, "b", "classifier");
  require(!c.theta.empty(), "classifier: theta must not be empty");
  for (double v : c.theta) require(std::isfinite(v), "classifier: theta must be finite");
  require(std::isfinite(c.b), "classifier: b must be finite");
  return c;
}

Json to_json(const ThresholdSet& thresholds) {
  std::map<int, Json> groups;
  for (const auto& [g, th] : thresholds.groups) groups[g] = Json{{"tau", th.tau}, {"scale", th.scale}};
  return Json{{"tau_0", thresholds.tau_0}, {"groups", group_map_json(groups)}};
}

ThresholdSet thresholds_from_json(const Json& j) {
  ThresholdSet ts;
  ts.tau_0 = need<double>(j, "tau_0", "thresholds");
  const Json groups = need<Json>(j, "groups", "thresholds");
  require(groups.is_object(), "thresholds: groups must be an object");
  for (const auto& [key, value] : groups.items()) {
    GroupThreshold th;
    th.tau = need<double>(value, "tau", "thresholds.groups." + key);
    if (value.contains("scale")) th.scale = need<double>(value, "scale", "thresholds.groups." + key);
    ts.groups[group_key(key, "thresholds")] = th;
  }
  ts.validate();
  return ts;
}

Json to_json(const UtilityModel& model) {
  return Json{{"family", to_string(model.family)}, {"gamma", model.gamma}, {"loan_amount", model.loan_amount}};
}

Json to_json(const WeightFunction& wf) {
  return Json{{"f", "exp"}, {"beta", wf.beta}, {"k", wf.k}, {"utility", to_json(wf.utility)}};
}

WeightFunction weight_function_from_json(const Json& j) {
  check_keys(j, {"f", "beta", "k", "utility"}, "weights");
  WeightFunction wf;
  std::string f = "exp";
  read(j, "f", f, "weights");
  require(f == "exp", "weights.f: only 'exp' is supported");
  read(j, "beta", wf.beta, "weights");
  read(j, "k", wf.k, "weights");
  if (j.contains("utility")) {
    const Json& u = j.at("utility");
    check_keys(u, {"family", "gamma", "loan_amount"}, "weights.utility");
    std::string family = to_string(wf.utility.family);
    read(u, "family", family, "weights.utility");
    wf.utility.family = parse_utility_family(family);
    read(u, "gamma", wf.utility.gamma, "weights.utility");
    read(u, "loan_amount", wf.utility.loan_amount, "weights.utility");
  }
  wf.validate();
  return wf;
}

Json to_json(const WelfareReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back(Json{{"index", r.index},
                        {"group", r.group},
                        {"income", r.income},
                        {"margin", r.margin},
                        {"weight", r.weight},
                        {"marginal_gain", r.marginal_gain},
                        {"allocated", r.allocated},
                        {"label", r.label}});
  }
  std::map<int, Json> groups;
  for (const auto& [g, s] : report.groups) {
    groups[g] = Json{{"count", s.count},
                     {"positive_rate", s.positive_rate},
                     {"tpr", s.tpr ? Json(*s.tpr) : Json(nullptr)},
                     {"mean_weight", s.mean_weight},
                     {"welfare", s.welfare},
                     {"welfare_share", s.welfare_share}};
  }
  std::map<int, Json> counts;
  for (const auto& [g, c] : report.histogram.counts) counts[g] = c;
  Json j{{"regime", report.regime},
         {"weight_function", to_json(report.weight_function)},
         {"budget", report.budget},
         {"income_checksum", report.income_checksum},
         {"total_welfare", report.total_welfare},
         {"groups", group_map_json(groups)},
         {"rows", rows},
         {"weight_histogram", Json{{"lo", report.histogram.lo},
                                   {"hi", report.histogram.hi},
                                   {"counts", group_map_json(counts)}}}};
  j["matched"] = report.matched ? Json(*report.matched) : Json(nullptr);
  return j;
}

WelfareReport report_from_json(const Json& j) {
  WelfareReport r;
  r.regime = need<std::string>(j, "regime", "report");
  r.weight_function = weight_function_from_json(need<Json>(j, "weight_function", "report"));
  r.budget = need<std::size_t>(j, "budget", "report");
  r.income_checksum = need<std::string>(j, "income_checksum", "report");
  r.total_welfare = need<double>(j, "total_welfare", "report");
  if (j.contains("matched") && !j.at("matched").is_null()) r.matched = need<bool>(j, "matched", "report");
  for (const auto& row : need<Json>(j, "rows", "report")) {
    r.rows.push_back(ReportRow{need<std::size_t>(row, "index", "report row"), need<int>(row, "group", "report row"),
                               need<double>(row, "income", "report row"), need<double>(row, "margin", "report row"),
                               need<double>(row, "weight", "report row"),
                               need<double>(row, "marginal_gain", "report row"),
                               need<int>(row, "allocated", "report row"), need<int>(row, "label", "report row")});
  }
  const Json groups = need<Json>(j, "groups", "report");
  for (const auto& [key, value] : groups.items()) {
    GroupSummary s;
    s.count = need<std::size_t>(value, "count", "report group");
    s.positive_rate = need<double>(value, "positive_rate", "report group");
    if (value.contains("tpr") && !value.at("tpr").is_null()) s.tpr = need<double>(value, "tpr", "report group");
    s.mean_weight = need<double>(value, "mean_weight", "report group");
    s.welfare = need<double>(value, "welfare", "report group");
    s.welfare_share = need<double>(value, "welfare_share", "report group");
    r.groups[group_key(key, "report")] = s;
  }
  if (j.contains("weight_histogram")) {
    const Json& h = j.at("weight_histogram");
    r.histogram.lo = need<double>(h, "lo", "report histogram");
    r.histogram.hi = need<double>(h, "hi", "report histogram");
    const Json counts = need<Json>(h, "counts", "report histogram");
    for (const auto& [key, value] : counts.items()) {
      r.histogram.counts[group_key(key, "report histogram")] = value.get<std::vector<std::size_t>>();
    }
  }
  std::size_t allocated = 0;
  for (const auto& row : r.rows) allocated += static_cast<std::size_t>(row.allocated);
  require(allocated == r.budget, "report: allocated rows do not sum to the budget");
  r.validate();
  return r;
}

Json to_json(const ComparisonTable& table) {
  Json regimes = Json::array();
  for (const auto& cmp : table.regimes) {
    std::map<int, Json> deltas;
    for (const auto& [g, d] : cmp.deltas) {
      deltas[g] = Json{{"positive_rate", d.positive_rate},
                       {"mean_weight", d.mean_weight},
                       {"welfare_share", d.welfare_share}};
    }
    Json flipped = Json::array();
    for (const auto& f : cmp.flipped) {
      flipped.push_back(Json{{"index", f.index},
                             {"group", f.group},
                             {"income_quantile", f.income_quantile},
                             {"from", f.from},
                             {"to", f.to}});
    }
    regimes.push_back(Json{{"regime", cmp.regime},
                           {"deltas", group_map_json(deltas)},
                           {"flipped_count", cmp.flipped.size()},
                           {"flipped", flipped}});
  }
  return Json{{"baseline", table.baseline}, {"regimes", regimes}};
}

Json to_json(const ConditionReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations) {
    violations.push_back(
        Json{{"description", v.description}, {"observed", v.observed}, {"expected_sign", v.expected_sign}});
  }
  return Json{{"n_samples", report.n_samples},
              {"passed", report.passed()},
              {"max_abs_error_at_dh_zero", report.max_abs_error_at_dh_zero},
              {"violations", violations}};
}

Json to_json(const AppConfig& c) {
  Json groups = Json::array();
  for (const auto& g : c.generator.groups) {
    groups.push_back(
        Json{{"n", g.n}, {"mean", g.mean}, {"income_mu", g.income_mu}, {"income_sigma", g.income_sigma}});
  }
  return Json{
      {"generator",
       Json{{"rng", c.generator.rng},
            {"seed", c.generator.seed},
            {"d", c.generator.d},
            {"groups", groups},
            {"covariance_scale", c.generator.covariance_scale},
            {"income_floor", c.generator.income_floor},
            {"true_theta", c.generator.true_theta},
            {"true_b", c.generator.true_b},
            {"label_noise", c.generator.label_noise}}},
      {"train", Json{{"reg_lambda", c.train.reg_lambda},
                     {"epochs", c.train.epochs},
                     {"seed", c.train.seed},
                     {"eta0", c.train.eta0},
                     {"fair_lambda", c.fair_lambda}}},
      {"weights", to_json(c.weights)},
      {"fairness", Json{{"criterion", to_string(c.fairness.kind)}, {"tolerance", c.fairness.tolerance}}},
      {"check", Json{{"samples", c.check.samples},
                     {"seed", c.check.seed},
                     {"step", c.check.step},
                     {"tol", c.check.tol},
                     {"configurations", c.check.configurations},
                     {"min_dim", c.check.min_dim},
                     {"max_dim", c.check.max_dim}}}};
}

AppConfig config_from_json(const Json& j) {
  AppConfig c;
  check_keys(j, {"generator", "train", "weights", "fairness", "check"}, "");
  if (j.contains("generator")) {
    const Json& g = j.at("generator");
    check_keys(g, {"rng", "seed", "d", "groups", "covariance_scale", "income_floor", "true_theta", "true_b",
                   "label_noise"},
               "generator");
    read(g, "rng", c.generator.rng, "generator");
    read(g, "seed", c.generator.seed, "generator");
    read(g, "d", c.generator.d, "generator");
    read(g, "covariance_scale", c.generator.covariance_scale, "generator");
    read(g, "income_floor", c.generator.income_floor, "generator");
    read(g, "true_theta", c.generator.true_theta, "generator");
    read(g, "true_b", c.generator.true_b, "generator");
    read(g, "label_noise", c.generator.label_noise, "generator");
    if (g.contains("groups")) {
      const Json& groups = g.at("groups");
      require(groups.is_array() && groups.size() == 2, "generator.groups must be an array of two group specs");
      for (std::size_t k = 0; k < 2; ++k) {
        const std::string ns = "generator.groups[" + std::to_string(k) + "]";
        check_keys(groups[k], {"n", "mean", "income_mu", "income_sigma"}, ns);
        read(groups[k], "n", c.generator.groups[k].n, ns);
        read(groups[k], "mean", c.generator.groups[k].mean, ns);
        read(groups[k], "income_mu", c.generator.groups[k].income_mu, ns);
        read(groups[k], "income_sigma", c.generator.groups[k].income_sigma, ns);
      }
    }
  }
  if (j.contains("train")) {
    const Json& t = j.at("train");
    check_keys(t, {"reg_lambda", "epochs", "seed", "eta0", "fair_lambda"}, "train");
    read(t, "reg_lambda", c.train.reg_lambda, "train");
    read(t, "epochs", c.train.epochs, "train");
    read(t, "seed", c.train.seed, "train");
    read(t, "eta0", c.train.eta0, "train");
    read(t, "fair_lambda", c.fair_lambda, "train");
  }
  if (j.contains("weights")) c.weights = weight_function_from_json(j.at("weights"));
  if (j.contains("fairness")) {
    const Json& f = j.at("fairness");
    check_keys(f, {"criterion", "tolerance"}, "fairness");
    std::string kind = to_string(c.fairness.kind);
    read(f, "criterion", kind, "fairness");
    c.fairness.kind = parse_fairness_kind(kind);
    read(f, "tolerance", c.fairness.tolerance, "fairness");
  }
  if (j.contains("check")) {
    const Json& k = j.at("check");
    check_keys(k, {"samples", "seed", "step", "tol", "configurations", "min_dim", "max_dim"}, "check");
    read(k, "samples", c.check.samples, "check");
    read(k, "seed", c.check.seed, "check");
    read(k, "step", c.check.step, "check");
    read(k, "tol", c.check.tol, "check");
    read(k, "configurations", c.check.configurations, "check");
    read(k, "min_dim", c.check.min_dim, "check");
    read(k, "max_dim", c.check.max_dim, "check");
  }
  c.validate();
  return c;
}

Json load_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

AppConfig load_config(const std::filesystem::path& path) { return config_from_json(load_json(path)); }

void save_json(const Json& j, const std::filesystem::path& path) { write_file(path, j.dump(2) + "\n"); }

}  // namespace welfare
