// Command-line front end: prepare / train / eval / analyze.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "poirec/checkpoint.hpp"
#include "poirec/evaluator.hpp"
#include "poirec/io.hpp"
#include "poirec/pipeline.hpp"
#include "poirec/trainer.hpp"

namespace fs = std::filesystem;
using namespace poirec;

namespace {

// Knob flags shadow TrainConfig fields; only flags the user actually set
// override the config file, which overrides the defaults.
struct Knobs {
  TrainConfig v;
  std::string config_path;
};

void add_knobs(CLI::App* cmd, Knobs& k) {
  cmd->add_option("--config", k.config_path,
                  "flat key=value config file (flags win over it)");
  cmd->add_option("--dim", k.v.dim, "embedding dimension");
  cmd->add_option("--layers", k.v.layers, "convolution layers");
  cmd->add_option("--lr", k.v.lr, "learning rate");
  cmd->add_option("--weight-decay", k.v.weight_decay, "L2 weight decay");
  cmd->add_option("--batch-size", k.v.batch_size, "max batch size");
  cmd->add_option("--epochs", k.v.epochs, "training epochs");
  cmd->add_option("--patience", k.v.patience, "early-stopping patience");
  cmd->add_option("--lambda", k.v.lambda, "contrastive loss weight");
  cmd->add_option("--tau", k.v.tau, "contrastive temperature");
  cmd->add_option("--split-threshold", k.v.split_threshold,
                  "gradient-conflict similarity threshold");
  cmd->add_option("--warmup-epochs", k.v.warmup_epochs,
                  "epochs before conflict checks begin");
  cmd->add_option("--sim-window", k.v.sim_window,
                  "batches per conflict check window");
  cmd->add_option("--geo-threshold-km", k.v.geo_threshold_km,
                  "geographical neighborhood radius");
  cmd->add_option("--downtown-radius-km", k.v.downtown_radius_km,
                  "downtown classification radius");
  cmd->add_option("--tourist-threshold", k.v.tourist_threshold,
                  "accommodation share above which a user is a tourist");
  cmd->add_option("--split-ratio", k.v.split_ratio,
                  "train fraction of each user's trajectories");
  cmd->add_option("--val-fraction", k.v.val_fraction,
                  "validation share of training trajectories");
  cmd->add_option("--tz-offset-min", k.v.default_tz_offset_min,
                  "timezone offset for formats without one (gowalla)");
  cmd->add_option("--min-user-checkins", k.v.min_user_checkins,
                  "drop users with fewer check-ins (0 = keep all)");
  cmd->add_option("--min-poi-checkins", k.v.min_poi_checkins,
                  "drop POIs with fewer check-ins (0 = keep all)");
  cmd->add_flag("--no-split", k.v.no_split, "disable parameter splitting");
  cmd->add_flag("--no-subgraph", k.v.no_subgraph,
                "single merged hypergraph per view");
  cmd->add_option("--seed", k.v.seed, "RNG seed");
}

TrainConfig resolve_config(CLI::App* cmd, const Knobs& k) {
  TrainConfig cfg;  // defaults
  if (!k.config_path.empty()) cfg = load_config_file(k.config_path, cfg);
  auto take = [&](const std::string& flag, auto member) {
    if (cmd->count(flag)) cfg.*member = k.v.*member;
  };
  take("--dim", &TrainConfig::dim);
  take("--layers", &TrainConfig::layers);
  take("--lr", &TrainConfig::lr);
  take("--weight-decay", &TrainConfig::weight_decay);
  take("--batch-size", &TrainConfig::batch_size);
  take("--epochs", &TrainConfig::epochs);
  take("--patience", &TrainConfig::patience);
  take("--lambda", &TrainConfig::lambda);
  take("--tau", &TrainConfig::tau);
  take("--split-threshold", &TrainConfig::split_threshold);
  take("--warmup-epochs", &TrainConfig::warmup_epochs);
  take("--sim-window", &TrainConfig::sim_window);
  take("--geo-threshold-km", &TrainConfig::geo_threshold_km);
  take("--downtown-radius-km", &TrainConfig::downtown_radius_km);
  take("--tourist-threshold", &TrainConfig::tourist_threshold);
  take("--split-ratio", &TrainConfig::split_ratio);
  take("--val-fraction", &TrainConfig::val_fraction);
  take("--tz-offset-min", &TrainConfig::default_tz_offset_min);
  take("--min-user-checkins", &TrainConfig::min_user_checkins);
  take("--min-poi-checkins", &TrainConfig::min_poi_checkins);
  take("--no-split", &TrainConfig::no_split);
  take("--no-subgraph", &TrainConfig::no_subgraph);
  take("--seed", &TrainConfig::seed);
  cfg.validate();
  return cfg;
}

void write_run_manifest(const std::string& out_dir, const std::string& kind,
                        const TrainConfig& cfg, nlohmann::json extra) {
  nlohmann::json m;
  m["artifact_version"] = "0.1.0";
  m["kind"] = kind;
  m["seed"] = cfg.seed;
  m["config"] = config_to_kv(cfg);
  auto now = std::chrono::system_clock::now().time_since_epoch();
  m["created_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now).count();
  m.update(extra);
  std::ofstream out(out_dir + "/manifest.json");
  if (!out) throw DataError("cannot write manifest.json in " + out_dir);
  out << m.dump(2) << "\n";
}

int cmd_prepare(const std::string& dataset, const std::string& format,
                const std::string& centers, const std::string& out,
                CLI::App* cmd, const Knobs& k) {
  PrepareOptions opts;
  opts.dataset_path = dataset;
  opts.format = parse_format(format);
  opts.centers_path = centers;
  opts.out_dir = out;
  opts.cfg = resolve_config(cmd, k);
  PreparedData data = prepare(opts);
  std::size_t train = 0;
  for (bool b : data.is_train) train += b;
  std::cout << "prepared " << out << ": users=" << data.catalog.user_count()
            << " pois=" << data.catalog.poi_count()
            << " trajectories=" << data.trajectories.size()
            << " train=" << train
            << " test=" << (data.trajectories.size() - train) << "\n";
  return 0;
}

int cmd_train(const std::string& prepared, const std::string& out,
              CLI::App* cmd, const Knobs& k) {
  TrainConfig cfg = resolve_config(cmd, k);
  auto bundle = load_model_bundle(prepared, cfg);
  fs::create_directories(out);
  TrainResult result =
      train(bundle->model, bundle->data.trajectories, bundle->data.is_train,
            bundle->data.labels, cfg, out);
  save_checkpoint(out + "/checkpoint", bundle->model.registry, cfg);
  write_run_manifest(out, "train", cfg,
                     {{"prepared_dir", prepared},
                      {"epochs_run", result.epochs.size()},
                      {"best_epoch", result.best_epoch},
                      {"early_stopped", result.early_stopped},
                      {"splits", result.splits.size()}});
  std::cout << "trained " << result.epochs.size() << " epochs, "
            << result.splits.size() << " parameter splits, best epoch "
            << result.best_epoch << "\n";
  return 0;
}

std::unique_ptr<ModelBundle> bundle_from_checkpoint(
    const std::string& checkpoint, const std::string& prepared,
    TrainConfig& cfg_out) {
  LoadedCheckpoint ck = load_checkpoint(checkpoint);
  cfg_out = ck.config;
  auto bundle = load_model_bundle(prepared, ck.config);
  bundle->model.registry = std::move(ck.registry);
  return bundle;
}

int cmd_eval(const std::string& checkpoint, const std::string& prepared,
             const std::string& out) {
  TrainConfig cfg;
  auto bundle = bundle_from_checkpoint(checkpoint, prepared, cfg);
  EvalOutput eval = evaluate(bundle->model, bundle->data.trajectories,
                             bundle->data.is_train, bundle->data.labels);
  fs::create_directories(out);
  save_report_json(eval.report, out + "/report.json");
  save_predictions_tsv(eval, out + "/predictions.tsv");
  write_run_manifest(out, "eval", cfg,
                     {{"checkpoint", checkpoint}, {"prepared_dir", prepared}});
  auto overall = eval.report.slices.find("overall");
  if (overall != eval.report.slices.end()) {
    const SliceMetrics& m = overall->second;
    std::cout << "overall: acc@1=" << m.acc1 << " acc@5=" << m.acc5
              << " acc@10=" << m.acc10 << " acc@20=" << m.acc20
              << " mrr=" << m.mrr << " n=" << m.count << "\n";
  } else {
    std::cout << "no test trajectories\n";
  }
  return 0;
}

int cmd_analyze(const std::string& checkpoint, const std::string& prepared,
                const std::string& out) {
  TrainConfig cfg;
  auto bundle = bundle_from_checkpoint(checkpoint, prepared, cfg);
  EvalOutput eval = evaluate(bundle->model, bundle->data.trajectories,
                             bundle->data.is_train, bundle->data.labels);
  fs::create_directories(out);
  CategoryDelta delta = category_delta(bundle->data.catalog, eval);
  bool categories = delta.available;
  if (categories) {
    save_category_delta(delta, bundle->data.catalog,
                        out + "/category_delta.csv",
                        out + "/category_delta.svg");
  } else {
    std::cout << "notice: no category data; category deltas skipped\n";
  }
  DistanceHistogram hist =
      distance_histogram(bundle->data.catalog, bundle->data.trajectories, eval);
  save_distance_histogram(hist, out + "/distance_hist.csv",
                          out + "/distance_hist.svg");
  write_run_manifest(out, "analyze", cfg,
                     {{"checkpoint", checkpoint},
                      {"prepared_dir", prepared},
                      {"category_delta", categories}});
  std::cout << "analysis written to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenario-aware next-POI recommender"};
  app.require_subcommand(1);

  Knobs knobs;
  std::string dataset, format = "foursquare", centers, out, prepared,
              checkpoint;

  CLI::App* prep = app.add_subcommand(
      "prepare", "ingest a check-in log and build the sub-hypergraphs");
  prep->add_option("--dataset", dataset, "raw check-in file")->required();
  prep->add_option("--format", format, "foursquare or gowalla");
  prep->add_option("--centers", centers, "city centers file (name\\tlat\\tlon)");
  prep->add_option("--out", out, "output directory")->required();
  add_knobs(prep, knobs);

  CLI::App* tr = app.add_subcommand("train", "train on a prepared directory");
  tr->add_option("--prepared", prepared, "prepared directory")->required();
  tr->add_option("--out", out, "run output directory")->required();
  add_knobs(tr, knobs);

  CLI::App* ev = app.add_subcommand("eval", "score the test split");
  ev->add_option("--checkpoint", checkpoint, "checkpoint directory")
      ->required();
  ev->add_option("--prepared", prepared, "prepared directory")->required();
  ev->add_option("--out", out, "output directory")->required();

  CLI::App* an = app.add_subcommand(
      "analyze", "category and distance distribution analyses");
  an->add_option("--checkpoint", checkpoint, "checkpoint directory")
      ->required();
  an->add_option("--prepared", prepared, "prepared directory")->required();
  an->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (prep->parsed()) return cmd_prepare(dataset, format, centers, out,
                                           prep, knobs);
    if (tr->parsed()) return cmd_train(prepared, out, tr, knobs);
    if (ev->parsed()) return cmd_eval(checkpoint, prepared, out);
    if (an->parsed()) return cmd_analyze(checkpoint, prepared, out);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
