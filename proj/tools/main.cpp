// phishlex: lexical phishing-URL detection toolkit.
//
// Subcommands cover the full pipeline: featurize -> train -> eval ->
// predict -> explain -> compare. Every command is deterministic given its
// flags and seed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phishlex/baselines.hpp"
#include "phishlex/csv.hpp"
#include "phishlex/data_pipeline.hpp"
#include "phishlex/explain.hpp"
#include "phishlex/model.hpp"
#include "phishlex/run_config.hpp"
#include "phishlex/url_features.hpp"
#include "phishlex/util.hpp"

namespace fs = std::filesystem;
using namespace phishlex;
using cli::RunConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct CliState {
  RunConfig cfg;
  bool json_output = false;
  bool show_config = false;

  // predict
  std::vector<std::string> urls;
  bool read_stdin = false;

  // eval / compare
  std::string report_name = "CNN";
  bool eval_test_split = false;
  std::vector<std::string> report_files;
  std::string external_csv;
  std::string proposed_name = "CNN";

  // explain
  long long row_id = -1;
  std::string explain_url;
  bool global_mode = false;

  // train
  bool with_baselines = false;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

features::WordLists word_lists(const RunConfig& cfg) {
  return features::WordLists::load(cfg.keywords_path, cfg.shorteners_path);
}

void emit_config(const CliState& state) {
  std::cout << state.cfg.to_json().dump(2) << '\n';
}

std::string sibling(const std::string& base, const std::string& suffix) {
  return base + suffix;
}

// ---------------------------------------------------------------------------
// featurize
// ---------------------------------------------------------------------------

int cmd_featurize(const CliState& state) {
  const RunConfig& cfg = state.cfg;
  require(!cfg.phish_csv.empty(), "featurize: --phish is required");
  require(!cfg.legit_path.empty(), "featurize: --legit is required");
  require(!cfg.out.empty(), "featurize: --out is required");

  data::IngestOptions opts;
  opts.url_column = cfg.url_column;
  data::IngestResult phish = data::ingest_phish_csv(cfg.phish_csv, opts);
  data::IngestResult legit = data::ingest_legit_list(cfg.legit_path, opts);
  for (const auto& w : phish.warnings) {
    std::cerr << "warning: " << cfg.phish_csv << " row " << w.row_index << ": "
              << w.message << '\n';
  }
  for (const auto& w : legit.warnings) {
    std::cerr << "warning: " << cfg.legit_path << " row " << w.row_index << ": "
              << w.message << '\n';
  }

  data::MergeResult merged = data::merge_dedupe(phish.records, legit.records);
  const features::StubIndexProvider stub;
  features::BatchResult batch =
      features::featurize_batch(merged.records, stub, word_lists(cfg));
  for (const auto& e : batch.errors) {
    std::cerr << "warning: could not featurize \"" << merged.records[e.row_index].url
              << "\": " << e.message << '\n';
  }
  data::write_feature_csv(batch.matrix, cfg.out);

  nlohmann::json summary{{"out", cfg.out},
                         {"rows", batch.matrix.rows()},
                         {"phish_records", phish.records.size()},
                         {"legit_records", legit.records.size()},
                         {"duplicates_removed", merged.duplicate_count},
                         {"label_conflicts_dropped", merged.conflict_count},
                         {"featurize_errors", batch.errors.size()}};
  if (state.json_output) {
    std::cout << summary.dump() << '\n';
  } else {
    std::cout << "wrote " << batch.matrix.rows() << " rows to " << cfg.out << " ("
              << merged.duplicate_count << " duplicates, " << merged.conflict_count
              << " label conflicts dropped)\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int cmd_train(const CliState& state) {
  const RunConfig& cfg = state.cfg;
  require(!cfg.features_csv.empty(), "train: --features is required");
  require(!cfg.checkpoint.empty(), "train: --checkpoint is required");

  FeatureMatrix all = data::read_feature_csv(cfg.features_csv);
  data::MatrixSplitResult split =
      data::split_matrix(all, cfg.split_ratio, cfg.seed);
  data::StandardizeResult std_r = data::standardize(split.train, split.test);

  model::ModelConfig mc;
  mc.seed = cfg.seed;
  mc.epochs = cfg.epochs;
  mc.batch_size = cfg.batch_size;
  model::PhishModel init = model::PhishModel::build(mc);
  init.set_norm_stats(std_r.stats);
  model::TrainResult result = model::train(init, std_r.train, std_r.test);

  model::save_checkpoint(result.best, cfg.checkpoint);
  model::save_checkpoint(result.final, sibling(cfg.checkpoint, ".final"));
  const std::string curves = sibling(cfg.checkpoint, ".curves.csv");
  model::export_curves(result.final.history(), curves);
  const std::string stats = sibling(cfg.checkpoint, ".stats.json");
  data::write_stats_json(std_r.stats, stats);

  nlohmann::json summary{
      {"checkpoint", cfg.checkpoint},
      {"checkpoint_checksum", model::checkpoint_checksum(cfg.checkpoint)},
      {"final_checkpoint", sibling(cfg.checkpoint, ".final")},
      {"curves", curves},
      {"stats", stats},
      {"best_epoch", result.best_epoch},
      {"best_test_acc", result.final.history()[result.best_epoch - 1].test_acc},
      {"final_test_acc", result.final.history().back().test_acc},
      {"train_rows", std_r.train.rows()},
      {"test_rows", std_r.test.rows()}};

  if (state.with_baselines) {
    model::TrainLoopConfig loop;
    loop.epochs = cfg.epochs;
    loop.batch_size = cfg.batch_size;
    loop.seed = cfg.seed;
    baselines::MlpModel mlp(cfg.seed);
    mlp.fit(std_r.train, std_r.test, loop);
    const model::EvalReport mlp_report = mlp.evaluate(std_r.test, cfg.threshold);
    baselines::KnnModel knn = baselines::KnnModel::fit(std_r.train, 5);
    const model::EvalReport knn_report = knn.evaluate(std_r.test, cfg.threshold);

    auto write_report = [&](const char* name, const model::EvalReport& report,
                            const std::string& path) {
      nlohmann::json j = report.to_json();
      j["name"] = name;
      j["source"] = "computed";
      std::ofstream out(path);
      if (!out) throw IoError("cannot write: " + path);
      out << j.dump(2) << '\n';
    };
    write_report("MLP", mlp_report, sibling(cfg.checkpoint, ".mlp_report.json"));
    write_report("KNN", knn_report, sibling(cfg.checkpoint, ".knn_report.json"));
    summary["mlp_accuracy"] = mlp_report.accuracy;
    summary["knn_accuracy"] = knn_report.accuracy;
  }

  if (state.json_output) {
    std::cout << summary.dump() << '\n';
  } else {
    std::cout << "checkpoint " << cfg.checkpoint << " (best epoch "
              << result.best_epoch << ", test acc "
              << summary["best_test_acc"].get<double>() << ")\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const CliState& state) {
  const RunConfig& cfg = state.cfg;
  require(!cfg.checkpoint.empty(), "eval: --checkpoint is required");
  require(!cfg.features_csv.empty(), "eval: --features is required");

  model::PhishModel m = model::load_checkpoint(cfg.checkpoint);
  FeatureMatrix all = data::read_feature_csv(cfg.features_csv);
  FeatureMatrix subject = all;
  if (state.eval_test_split) {
    subject = data::split_matrix(all, cfg.split_ratio, cfg.seed).test;
  }
  const FeatureMatrix standardized = data::apply_stats(subject, m.norm_stats());
  const model::EvalReport report = m.evaluate(standardized, cfg.threshold);

  nlohmann::json j = report.to_json();
  j["name"] = state.report_name;
  j["source"] = "computed";
  j["rows"] = standardized.rows();
  j["run_config"] = cfg.to_json();
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    if (!out) throw IoError("cannot write: " + cfg.out);
    out << j.dump(2) << '\n';
  }
  if (state.json_output) {
    std::cout << j.dump() << '\n';
  } else {
    std::cout << state.report_name << " accuracy/precision/recall/f1: "
              << report.formatted() << "  (n=" << standardized.rows() << ")\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

int cmd_predict(const CliState& state) {
  const RunConfig& cfg = state.cfg;
  require(!cfg.checkpoint.empty(), "predict: --checkpoint is required");
  require(!state.urls.empty() || state.read_stdin,
          "predict: pass URLs or --stdin");

  model::PhishModel m = model::load_checkpoint(cfg.checkpoint);
  const features::WordLists lists = word_lists(cfg);
  const features::StubIndexProvider stub;

  auto predict_one = [&](const std::string& url) {
    nlohmann::json line;
    line["url"] = url;
    try {
      const features::FeatureVector fv = features::extract_features(url, stub, lists);
      const std::vector<double> x = data::apply_stats_row(fv.values, m.norm_stats());
      const double p = m.predict_one(x);
      line["probability"] = p;
      line["verdict"] = p >= cfg.threshold ? "phishing" : "legitimate";
    } catch (const Error& e) {
      line["error"] = e.what();
    }
    std::cout << line.dump() << '\n';
  };

  for (const auto& url : state.urls) predict_one(url);
  if (state.read_stdin) {
    std::string line;
    while (std::getline(std::cin, line)) {
      if (!line.empty()) predict_one(line);
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// explain
// ---------------------------------------------------------------------------

int cmd_explain(const CliState& state) {
  const RunConfig& cfg = state.cfg;
  require(!cfg.checkpoint.empty(), "explain: --checkpoint is required");
  require(!cfg.features_csv.empty(), "explain: --features is required");
  const bool has_row = state.row_id >= 0;
  const bool has_url = !state.explain_url.empty();
  require(!(has_row && has_url), "explain: pass either --row or --url, not both");
  require(has_row || has_url || state.global_mode,
          "explain: pass --row, --url, or --global");

  model::PhishModel m = model::load_checkpoint(cfg.checkpoint);
  FeatureMatrix raw = data::read_feature_csv(cfg.features_csv);
  const FeatureMatrix standardized = data::apply_stats(raw, m.norm_stats());
  const explain::BackgroundSet background = explain::BackgroundSet::sample(
      standardized, cfg.background_size, util::derive_seed(cfg.seed, 0xb6));

  explain::Scorer scorer = [&m](std::span<const double> v) {
    return m.predict_one(v);
  };

  const fs::path out_dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
  fs::create_directories(out_dir);
  nlohmann::json summary;

  if (state.global_mode) {
    FeatureMatrix sample;
    sample.schema_version = standardized.schema_version;
    const std::size_t n = std::min<std::size_t>(cfg.explain_samples,
                                                standardized.rows());
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = standardized.row(i);
      sample.values.insert(sample.values.end(), row.begin(), row.end());
      sample.labels.push_back(standardized.labels[i]);
    }
    explain::GlobalSummaryConfig gcfg;
    gcfg.n_permutations = cfg.n_permutations;
    gcfg.seed = cfg.seed;
    std::vector<explain::Attribution> attributions;
    explain::GlobalSummary gs =
        explain::global_summary(scorer, sample, background, gcfg, &attributions);

    const std::string summary_csv = (out_dir / "shap_summary.csv").string();
    const std::string decision_csv = (out_dir / "shap_decision.csv").string();
    explain::write_summary_csv(gs, summary_csv);
    explain::write_decision_csv(attributions, gs.ranking, decision_csv);
    summary["summary_csv"] = summary_csv;
    summary["decision_csv"] = decision_csv;
    summary["samples"] = n;
    const auto& schema = features::FeatureSchema::canonical();
    summary["top_feature"] = schema.names[gs.ranking.front()];
    summary["bottom_feature"] = schema.names[gs.ranking.back()];
  }

  if (has_row || has_url) {
    std::vector<double> x_std, x_raw;
    if (has_row) {
      require(static_cast<std::size_t>(state.row_id) < standardized.rows(),
              "explain: --row out of range");
      const auto srow = standardized.row(static_cast<std::size_t>(state.row_id));
      const auto rrow = raw.row(static_cast<std::size_t>(state.row_id));
      x_std.assign(srow.begin(), srow.end());
      x_raw.assign(rrow.begin(), rrow.end());
    } else {
      const features::StubIndexProvider stub;
      const features::FeatureVector fv =
          features::extract_features(state.explain_url, stub, word_lists(cfg));
      x_raw.assign(fv.values.begin(), fv.values.end());
      x_std = data::apply_stats_row(fv.values, m.norm_stats());
    }
    const explain::Attribution attr = explain::shapley_sampled(
        scorer, x_std, background, cfg.n_permutations,
        util::derive_seed(cfg.seed, 0x77f));
    const std::string waterfall_csv = (out_dir / "shap_waterfall.csv").string();
    explain::write_waterfall_csv(attr, x_raw, waterfall_csv);
    summary["waterfall_csv"] = waterfall_csv;
    summary["fx"] = attr.fx;
    summary["base_value"] = attr.base_value;
    summary["reconstruction_gap"] = attr.reconstruction_gap;
  }

  if (state.json_output) {
    std::cout << summary.dump() << '\n';
  } else {
    for (const auto& [key, value] : summary.items()) {
      std::cout << key << ": " << value << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

int cmd_compare(const CliState& state) {
  const RunConfig& cfg = state.cfg;
  require(!state.report_files.empty() || !state.external_csv.empty(),
          "compare: pass report files and/or --external");
  require(!cfg.out.empty(), "compare: --out is required");

  std::vector<baselines::ComparisonRow> rows;
  for (const auto& path : state.report_files) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError("cannot open report: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("report " + path + " is not valid JSON: " + e.what());
    }
    baselines::ComparisonRow row;
    row.name = j.value("name", fs::path(path).stem().string());
    row.accuracy = j.at("accuracy").get<double>();
    row.precision = j.at("precision").get<double>();
    row.recall = j.at("recall").get<double>();
    row.f1 = j.at("f1").get<double>();
    row.source = j.value("source", "computed");
    row.proposed = row.name == state.proposed_name;
    rows.push_back(row);
  }
  if (!state.external_csv.empty()) {
    csvio::Table table = csvio::read_file(state.external_csv, /*has_header=*/true);
    const std::vector<std::string> expected{"model", "accuracy", "precision",
                                            "recall", "f1"};
    require(table.header.size() >= expected.size(),
            "compare: external CSV needs model,accuracy,precision,recall,f1");
    for (const auto& r : table.rows) {
      baselines::ComparisonRow row;
      row.name = r[0];
      row.accuracy = std::stod(r[1]);
      row.precision = std::stod(r[2]);
      row.recall = std::stod(r[3]);
      row.f1 = std::stod(r[4]);
      row.source = "external";
      row.proposed = row.name == state.proposed_name;
      rows.push_back(row);
    }
  }

  const std::vector<baselines::ComparisonRow> sorted =
      baselines::compare_models(rows);
  baselines::write_comparison_csv(sorted, cfg.out);

  if (state.json_output) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : sorted) {
      j.push_back({{"model", r.name},
                   {"accuracy", r.accuracy},
                   {"precision", r.precision},
                   {"recall", r.recall},
                   {"f1", r.f1},
                   {"source", r.source},
                   {"proposed", r.proposed}});
    }
    std::cout << nlohmann::json{{"out", cfg.out}, {"table", j}}.dump() << '\n';
  } else {
    std::cout << "wrote " << sorted.size() << " rows to " << cfg.out << '\n';
  }
  return kExitOk;
}

// Peeks at argv for --config so the file's values become the defaults the
// flags then override.
std::optional<std::string> find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc - 1; ++i) {
    if (std::string(argv[i]) == "--config") return std::string(argv[i + 1]);
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CliState state;

  try {
    if (auto config_path = find_config_arg(argc, argv)) {
      state.cfg = RunConfig::from_file(*config_path);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"lexical phishing-URL detector: featurize, train, evaluate, "
               "predict, explain, compare"};
  app.require_subcommand(0, 1);
  std::string config_dummy;
  app.add_option("--config", config_dummy, "JSON config file (flags override it)");
  app.add_flag("--json", state.json_output, "machine-readable JSON on stdout");
  app.add_flag("--show-config", state.show_config,
               "print the effective configuration and exit");
  app.add_option("--seed", state.cfg.seed, "global RNG seed");

  RunConfig& cfg = state.cfg;
  int (*run)(const CliState&) = nullptr;

  CLI::App* featurize = app.add_subcommand(
      "featurize", "ingest phishing CSV + legitimate list into a feature CSV");
  featurize->add_option("--phish", cfg.phish_csv, "phishing feed CSV");
  featurize->add_option("--legit", cfg.legit_path, "legitimate URL list or CSV");
  featurize->add_option("--out", cfg.out, "output feature CSV");
  featurize->add_option("--url-column", cfg.url_column, "URL column name");
  featurize->add_option("--keywords", cfg.keywords_path, "suspicious keyword list");
  featurize->add_option("--shorteners", cfg.shorteners_path, "shortener domain list");
  featurize->callback([&]() { run = cmd_featurize; });

  CLI::App* train = app.add_subcommand("train", "split, standardize, train, save");
  train->add_option("--features", cfg.features_csv, "feature CSV from featurize");
  train->add_option("--checkpoint", cfg.checkpoint, "output checkpoint path");
  train->add_option("--split-ratio", cfg.split_ratio, "train fraction");
  train->add_option("--epochs", cfg.epochs, "training epochs");
  train->add_option("--batch-size", cfg.batch_size, "mini-batch size");
  train->add_flag("--baselines", state.with_baselines,
                  "also fit KNN and MLP baselines and write their reports");
  train->callback([&]() { run = cmd_train; });

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on features");
  eval->add_option("--checkpoint", cfg.checkpoint, "checkpoint path");
  eval->add_option("--features", cfg.features_csv, "feature CSV");
  eval->add_option("--threshold", cfg.threshold, "classification threshold");
  eval->add_option("--out", cfg.out, "write the report JSON here");
  eval->add_option("--name", state.report_name, "model name in the report");
  eval->add_flag("--test-split", state.eval_test_split,
                 "evaluate only the seeded test partition of the file");
  eval->add_option("--split-ratio", cfg.split_ratio, "train fraction for --test-split");
  eval->callback([&]() { run = cmd_eval; });

  CLI::App* predict = app.add_subcommand("predict", "score URLs with a checkpoint");
  predict->add_option("--checkpoint", cfg.checkpoint, "checkpoint path");
  predict->add_option("--threshold", cfg.threshold, "verdict threshold");
  predict->add_option("--keywords", cfg.keywords_path, "suspicious keyword list");
  predict->add_option("--shorteners", cfg.shorteners_path, "shortener domain list");
  predict->add_option("urls", state.urls, "URLs to score");
  predict->add_flag("--stdin", state.read_stdin, "read URLs from stdin, one per line");
  predict->callback([&]() { run = cmd_predict; });

  CLI::App* explain_cmd = app.add_subcommand(
      "explain", "Shapley attributions for one sample or a global summary");
  explain_cmd->add_option("--checkpoint", cfg.checkpoint, "checkpoint path");
  explain_cmd->add_option("--features", cfg.features_csv, "feature CSV");
  explain_cmd->add_option("--row", state.row_id, "explain this row of the CSV");
  explain_cmd->add_option("--url", state.explain_url, "explain this URL");
  explain_cmd->add_flag("--global", state.global_mode,
                        "emit mean-|SHAP| summary and decision-plot data");
  explain_cmd->add_option("--samples", cfg.explain_samples,
                          "rows to explain with --global");
  explain_cmd->add_option("--background", cfg.background_size,
                          "background sample count");
  explain_cmd->add_option("--perms", cfg.n_permutations,
                          "permutations per explained sample");
  explain_cmd->add_option("--out-dir", cfg.out_dir, "directory for the CSV outputs");
  explain_cmd->callback([&]() { run = cmd_explain; });

  CLI::App* compare = app.add_subcommand(
      "compare", "merge eval reports and external rows into a comparison table");
  compare->add_option("reports", state.report_files, "eval report JSON files");
  compare->add_option("--external", state.external_csv,
                      "CSV of externally published rows");
  compare->add_option("--out", cfg.out, "output table CSV");
  compare->add_option("--proposed", state.proposed_name,
                      "model name to flag as the proposed one");
  compare->callback([&]() { run = cmd_compare; });

  // Let --json/--seed/--config appear after the subcommand name too.
  for (CLI::App* sub : {featurize, train, eval, predict, explain_cmd, compare}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (state.show_config) {
    emit_config(state);
    return kExitOk;
  }
  if (!run) {
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    return run(state);
  } catch (const NonFiniteError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
}
