#include "welfare/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "welfare/checks.hpp"
#include "welfare/data_io.hpp"
#include "welfare/fairness.hpp"
#include "welfare/kernels.hpp"
#include "welfare/report.hpp"
#include "welfare/svm.hpp"
#include "welfare/welfare.hpp"

namespace welfare::cli {

namespace {

namespace fs = std::filesystem;

/// Thrown when `allocate` finds an unmatched allocation.
struct UnmatchedAllocation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Provenance {
  std::string config_digest;

  Json json() const {
    return Json{{"tool", kToolName}, {"version", kToolVersion}, {"config_digest", config_digest}};
  }
  std::string comment() const {
    return std::string("tool=") + kToolName + " version=" + kToolVersion + " config_digest=" + config_digest;
  }
};

/// Digest of the resolved settings plus the contents (not paths) of every
/// input file, so identical runs in different directories agree.
Provenance resolve(const std::string& subcommand, Json settings, const std::vector<std::string>& inputs,
                   std::ostream& out) {
  Json resolved{{"subcommand", subcommand}, {"settings", std::move(settings)}};
  Json input_digests = Json::array();
  for (const auto& path : inputs) input_digests.push_back(digest(read_file(path)));
  resolved["inputs"] = input_digests;
  Provenance p{digest(resolved.dump())};
  out << "config digest: " << p.config_digest << "\n";
  return p;
}

void write_json_artifact(Json j, const Provenance& p, const std::string& path) {
  j["provenance"] = p.json();
  save_json(j, path);
}

struct WeightOptions {
  std::string config;
  std::string utility;
  std::optional<double> beta;
  std::optional<double> k;
  std::optional<double> gamma;
  std::optional<double> loan_amount;

  void attach(CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", config, "JSON config (weights section is used)");
    sub->add_option("--utility", utility, "utility family: linear|addsep|log")
        ->check(CLI::IsMember({"linear", "addsep", "log"}));
    sub->add_option("--beta", beta, "f(h) = exp(beta*h), beta > 0");
    sub->add_option("--k", k, "weight scale constant k > 0");
    sub->add_option("--gamma", gamma, "allocation benefit for linear/addsep utility");
    sub->add_option("--loan-amount", loan_amount, "loan amount L for log utility");
  }

  WeightFunction resolve() const {
    WeightFunction wf = config.empty() ? WeightFunction{} : load_config(config).weights;
    if (!utility.empty()) wf.utility.family = parse_utility_family(utility);
    if (beta) wf.beta = *beta;
    if (k) wf.k = *k;
    if (gamma) wf.utility.gamma = *gamma;
    if (loan_amount) wf.utility.loan_amount = *loan_amount;
    wf.validate();
    return wf;
  }
};

std::vector<double> effective_margins(const Dataset& data, const LinearClassifier& model,
                                      const std::string& thresholds_path) {
  std::vector<double> margins = kernels::margins(model, data);
  if (thresholds_path.empty()) return margins;
  const ThresholdSet ts = thresholds_from_json(load_json(thresholds_path));
  const std::vector<int> groups = data.groups();
  return post_process(margins, groups, ts);
}

std::vector<std::string> present(std::initializer_list<std::string> paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

void print_report(const ConditionReport& report, const std::string& label, std::ostream& out, std::ostream& err) {
  out << label << ": " << report.n_samples << " samples, " << report.violations.size() << " violations, "
      << "max |dw_f| at dh=0: " << report.max_abs_error_at_dh_zero << "\n";
  const std::size_t shown = std::min<std::size_t>(report.violations.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& v = report.violations[i];
    err << "violation: " << label << " " << v.description << " observed=" << v.observed
        << " expected_sign=" << v.expected_sign << "\n";
  }
  if (report.violations.size() > shown) {
    err << "violation: " << label << " ... " << report.violations.size() - shown << " more\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Implied welfare weights, matched allocations and fairness adjustments for linear classifiers",
               "welfare"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // gen
  std::string gen_config, gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic lending population");
  gen->add_option("--config", gen_config, "JSON config")->required();
  gen->add_option("--out", gen_out, "output dataset CSV")->required();

  // train
  std::string train_data, train_config, train_out;
  std::optional<double> fair_lambda;
  auto* train = app.add_subcommand("train", "Train a linear SVM (optionally covariance-penalized)");
  train->add_option("--data", train_data, "dataset CSV")->required();
  train->add_option("--config", train_config, "JSON config")->required();
  train->add_option("--out", train_out, "output model JSON")->required();
  train->add_option("--fair-lambda", fair_lambda, "covariance penalty weight (overrides train.fair_lambda)");

  // fairify
  std::string fair_data, fair_model, fair_criterion, fair_out, fair_margins_out;
  double fair_tolerance = 0.0;
  auto* fairify = app.add_subcommand("fairify", "Fit group thresholds and post-process margins");
  fairify->add_option("--data", fair_data, "dataset CSV")->required();
  fairify->add_option("--model", fair_model, "model JSON")->required();
  fairify->add_option("--criterion", fair_criterion, "dp|eo")->required()->check(CLI::IsMember({"dp", "eo"}));
  fairify->add_option("--out", fair_out, "output thresholds JSON")->required();
  fairify->add_option("--margins-out", fair_margins_out, "output CSV of original and adjusted margins")->required();
  fairify->add_option("--tolerance", fair_tolerance, "skip adjustment when the current gap is within this");

  // weights
  std::string w_data, w_model, w_thresholds, w_out;
  WeightOptions w_opts;
  auto* weights_cmd = app.add_subcommand("weights", "Dump implied welfare weights per individual");
  weights_cmd->add_option("--data", w_data, "dataset CSV")->required();
  weights_cmd->add_option("--model", w_model, "model JSON")->required();
  weights_cmd->add_option("--thresholds", w_thresholds, "thresholds JSON (post-processed margins)");
  weights_cmd->add_option("--out", w_out, "output weights CSV")->required();
  w_opts.attach(weights_cmd, true);

  // allocate
  std::string a_data, a_model, a_thresholds, a_report, a_regime;
  std::size_t a_bins = 20;
  WeightOptions a_opts;
  auto* allocate = app.add_subcommand("allocate", "Greedy welfare allocation, matched check and report");
  allocate->add_option("--data", a_data, "dataset CSV")->required();
  allocate->add_option("--model", a_model, "model JSON")->required();
  allocate->add_option("--thresholds", a_thresholds, "thresholds JSON (post-processed margins)");
  allocate->add_option("--report", a_report, "output report JSON")->required();
  allocate->add_option("--regime", a_regime, "regime label stored in the report");
  allocate->add_option("--bins", a_bins, "weight histogram bins")->check(CLI::PositiveNumber);
  a_opts.attach(allocate, true);

  // compare
  std::vector<std::string> c_reports;
  std::string c_out;
  auto* compare = app.add_subcommand("compare", "Compare regimes against the first report");
  compare->add_option("--reports", c_reports, "report JSON files, baseline first")->required()->expected(2, -1);
  compare->add_option("--out", c_out, "output comparison JSON")->required();

  // check
  std::string k_suite, k_config;
  auto* check = app.add_subcommand("check", "Run the numerical condition checkers");
  check->add_option("--suite", k_suite, "eq1|eq3|eq4|grad")->required()->check(
      CLI::IsMember({"eq1", "eq3", "eq4", "grad"}));
  check->add_option("--config", k_config, "JSON config (check and weights sections)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }

  try {
    if (gen->parsed()) {
      const AppConfig config = load_config(gen_config);
      const Provenance p = resolve("gen", to_json(config), {}, out);
      const Dataset data = generate_population(config.generator);
      save_csv(data, gen_out, p.comment());
      std::size_t labelled_positive = 0;
      for (const auto& ind : data.individuals()) labelled_positive += to_assignment(ind.label);
      out << "generated " << data.size() << " individuals (d=" << data.dim() << "), " << labelled_positive
          << " labelled positive\n";
      return kOk;
    }

    if (train->parsed()) {
      AppConfig config = load_config(train_config);
      if (fair_lambda) config.fair_lambda = *fair_lambda;
      config.validate();
      const Dataset data = load_csv(train_data);
      const Provenance p = resolve(
          "train", Json{{"train", to_json(config)["train"]}}, {train_data}, out);
      TrainResult result = config.fair_lambda > 0.0
                               ? train_fair_svm_detailed(data, config.train, config.fair_lambda)
                               : train_svm_detailed(data, config.train);
      Json model = to_json(result.classifier);
      model["objective"] = result.objective;
      model["fair_lambda"] = config.fair_lambda;
      if (data.has_both_groups()) model["covariance_proxy"] = covariance_proxy(result.classifier, data);
      const Allocation alloc = classify(result.classifier, data);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        correct += alloc.assignments[i] == to_assignment(data[i].label) ? 1 : 0;
      }
      const double accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
      model["training_accuracy"] = accuracy;
      write_json_artifact(model, p, train_out);
      out << "trained on " << data.size() << " individuals: objective " << result.objective
          << ", training accuracy " << accuracy << "\n";
      return kOk;
    }

    if (fairify->parsed()) {
      const Dataset data = load_csv(fair_data);
      const LinearClassifier model = classifier_from_json(load_json(fair_model));
      const FairnessCriterion criterion{parse_fairness_kind(fair_criterion), fair_tolerance};
      const Provenance p = resolve("fairify", Json{{"criterion", fair_criterion}, {"tolerance", fair_tolerance}},
                                   {fair_data, fair_model}, out);
      const std::vector<double> margins = kernels::margins(model, data);
      const ThresholdSet ts = find_group_thresholds(data, margins, criterion);
      const std::vector<int> groups = data.groups();
      const std::vector<double> adjusted = post_process(margins, groups, ts);
      const Allocation before = allocate_by_sign(margins);
      const Allocation after = allocate_by_sign(adjusted);
      write_json_artifact(to_json(ts), p, fair_out);

      std::string csv = "# " + p.comment() + "\nindex,group,margin,adjusted_margin,allocated\n";
      for (std::size_t i = 0; i < data.size(); ++i) {
        csv += std::to_string(i) + "," + std::to_string(groups[i]) + "," + format_double(margins[i]) + "," +
               format_double(adjusted[i]) + "," + std::to_string(after.assignments[i]) + "\n";
      }
      write_file(fair_margins_out, csv);

      const auto rates_before = group_positive_rates(data, before);
      const auto rates_after = group_positive_rates(data, after);
      out << "criterion " << fair_criterion << ": tau_0=" << ts.tau_0 << " tau[0]=" << ts.groups.at(0).tau
          << " tau[1]=" << ts.groups.at(1).tau << "\n"
          << "positives " << before.budget << " -> " << after.budget << "; positive rate gap "
          << std::abs(rates_before.at(0) - rates_before.at(1)) << " -> "
          << std::abs(rates_after.at(0) - rates_after.at(1)) << "\n";
      return kOk;
    }

    if (weights_cmd->parsed()) {
      const WeightFunction wf = w_opts.resolve();
      const Dataset data = load_csv(w_data);
      const LinearClassifier model = classifier_from_json(load_json(w_model));
      const Provenance p = resolve("weights", Json{{"weights", to_json(wf)}},
                                   present({w_data, w_model, w_thresholds}), out);
      const std::vector<double> margins = effective_margins(data, model, w_thresholds);
      const std::vector<double> incomes = data.incomes();
      const std::vector<double> w = weights(wf, margins, incomes);
      const std::vector<double> gains = marginal_gains(wf, margins, incomes);
      std::string csv = "# " + p.comment() + "\nindex,group,income,margin,weight,marginal_gain\n";
      for (std::size_t i = 0; i < data.size(); ++i) {
        csv += std::to_string(i) + "," + std::to_string(data[i].group) + "," + format_double(incomes[i]) + "," +
               format_double(margins[i]) + "," + format_double(w[i]) + "," + format_double(gains[i]) + "\n";
      }
      write_file(w_out, csv);
      out << "wrote weights for " << data.size() << " individuals\n";
      return kOk;
    }

    if (allocate->parsed()) {
      const WeightFunction wf = a_opts.resolve();
      const Dataset data = load_csv(a_data);
      const LinearClassifier model = classifier_from_json(load_json(a_model));
      const std::string regime =
          !a_regime.empty() ? a_regime : (a_thresholds.empty() ? "unconstrained" : "post_process");
      const Provenance p = resolve("allocate", Json{{"weights", to_json(wf)}, {"regime", regime}, {"bins", a_bins}},
                                   present({a_data, a_model, a_thresholds}), out);
      const std::vector<double> margins = effective_margins(data, model, a_thresholds);
      const std::vector<double> incomes = data.incomes();
      std::size_t nonpositive = 0;
      for (double m : incomes) nonpositive += utility(wf.utility, m, 0) <= 0.0 ? 1 : 0;
      if (nonpositive > 0) {
        err << "warning: " << nonpositive << " individuals have non-positive utility; welfare shares may mislead\n";
      }
      const MatchResult match = matched_allocation(margins, incomes, wf);
      WelfareReport report = build_report(data, margins, match.planner, wf, regime, a_bins);
      report.matched = match.matched;
      write_json_artifact(to_json(report), p, a_report);
      out << "regime " << regime << ": budget " << match.planner.budget << ", matched "
          << (match.matched ? "true" : "false") << ", total welfare " << report.total_welfare << "\n";
      for (const auto& [g, s] : report.groups) {
        out << "  group " << g << ": n=" << s.count << " positive_rate=" << s.positive_rate
            << " welfare_share=" << s.welfare_share << "\n";
      }
      if (!match.matched) {
        throw UnmatchedAllocation("planner allocation differs from the classifier allocation in " +
                                  std::to_string(hamming_distance(match.planner, match.classifier)) + " places");
      }
      return kOk;
    }

    if (compare->parsed()) {
      std::vector<WelfareReport> reports;
      for (const auto& path : c_reports) reports.push_back(report_from_json(load_json(path)));
      const Provenance p = resolve("compare", Json::object(), c_reports, out);
      const ComparisonTable table = compare_regimes(reports);
      write_json_artifact(to_json(table), p, c_out);
      out << render_text(table);
      return kOk;
    }

    if (check->parsed()) {
      const AppConfig config = k_config.empty() ? AppConfig{} : load_config(k_config);
      config.validate();
      resolve("check", Json{{"suite", k_suite}, {"config", to_json(config)}}, {}, out);
      const CheckConfig& c = config.check;
      ConditionReport total;
      if (k_suite == "eq1") {
        for (auto family : {UtilityFamily::Linear, UtilityFamily::AdditivelySeparable, UtilityFamily::ConcaveLog}) {
          WeightFunction wf = config.weights;
          wf.utility.family = family;
          const ConditionReport r = check_weight_conditions(wf, c.samples, c.seed, c.step, c.tol);
          print_report(r, "eq1[" + to_string(family) + "]", out, err);
          merge(total, r);
        }
      } else if (k_suite == "eq3") {
        WeightFunction wf = config.weights;
        wf.utility.family = UtilityFamily::ConcaveLog;
        total = check_multiplicative_identity(wf, c.samples, c.seed);
        print_report(total, "eq3", out, err);
      } else if (k_suite == "eq4") {
        total = check_boundary_conditions_random(config.weights, c.configurations, c.min_dim, c.max_dim, c.seed, c.step, c.tol);
        print_report(total, "eq4", out, err);
      } else {
        const GradientCheck g = check_distance_gradients(c.configurations, c.min_dim, c.max_dim, c.seed, c.step);
        out << "grad: max relative error " << g.max_relative_error << ", max closed-form error "
            << g.max_closed_form_error << "\n";
        total = g.report;
        print_report(total, "grad", out, err);
      }
      return total.passed() ? kOk : kViolations;
    }
  } catch (const UnmatchedAllocation& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  err << "error: no subcommand\n";
  return kValidationError;
}

}  // namespace welfare::cli
