// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: train, infer, eval, gen-synth, export-toy-features.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "peekaboo/checkpoint.hpp"
#include "peekaboo/config.hpp"
#include "peekaboo/image_io.hpp"
#include "peekaboo/pipeline.hpp"
#include "peekaboo/synth.hpp"

namespace fs = std::filesystem;
using namespace peekaboo;

namespace {

void configure_logging() {
  const char* level = std::getenv("PEEKABOO_LOG");
  if (level == nullptr) {
    spdlog::set_level(spdlog::level::info);
    return;
  }
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && std::string(level) != "off") {
    spdlog::warn("PEEKABOO_LOG='{}' not recognized; using info", level);
    spdlog::set_level(spdlog::level::info);
    return;
  }
  spdlog::set_level(parsed);
}

struct RunOverrides {
  fs::path config;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::string manifest;
  std::string mask_mode;
  bool no_mfp = false;
  bool no_pcl = false;
  std::string out;
  std::optional<int> iterations;
  std::optional<int> batch;
  std::optional<int> workers;
};

void add_run_options(CLI::App* cmd, RunOverrides& o) {
  cmd->add_option("--config", o.config, "Run config JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Override the run seed");
  cmd->add_option("--backend", o.backend, "toy|replay")->check(CLI::IsMember({"toy", "replay"}));
  cmd->add_option("--manifest", o.manifest, "Override the dataset manifest")
      ->check(CLI::ExistingFile);
  cmd->add_option("--mask-mode", o.mask_mode, "high|low")->check(CLI::IsMember({"high", "low"}));
  cmd->add_flag("--no-mfp", o.no_mfp, "Disable the masked-branch loss");
  cmd->add_flag("--no-pcl", o.no_pcl, "Disable the consistency loss");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--iterations", o.iterations, "Override the iteration count");
  cmd->add_option("--batch", o.batch, "Override the batch size");
  cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
}

RunConfig resolve_config(const RunOverrides& o) {
  RunConfig cfg = load_run_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.backend.empty()) cfg.backend = parse_backend(o.backend);
  if (!o.manifest.empty()) cfg.manifest = fs::absolute(o.manifest).lexically_normal();
  if (!o.mask_mode.empty()) cfg.mask_mode = parse_mask_mode(o.mask_mode);
  if (o.no_mfp) cfg.loss.enable_mfp = false;
  if (o.no_pcl) cfg.loss.enable_pcl = false;
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.iterations) cfg.iterations = *o.iterations;
  if (o.batch) cfg.batch_size = *o.batch;
  if (o.workers) cfg.workers = *o.workers;
  cfg.validate();
  return cfg;
}

DecoderParams load_params(const fs::path& path, const RunConfig& cfg, int dim) {
  LoadedCheckpoint loaded = load_checkpoint(path, dim, cfg.hash());
  for (const auto& w : loaded.warnings) spdlog::warn("{}", w);
  return loaded.checkpoint.params;
}

int run_train(const RunOverrides& o) {
  const RunConfig cfg = resolve_config(o);
  spdlog::info("training: backend={} iterations={} batch={} out={}", to_string(cfg.backend),
               cfg.iterations, cfg.batch_size, cfg.out_dir.string());
  const DatasetManifest manifest = read_manifest(cfg.manifest);
  const LoadedDataset data = load_dataset(manifest, cfg.working_size);
  const auto backend = make_backend(cfg, manifest);
  std::optional<MaskBank> bank;
  if (cfg.backend == BackendKind::kToy && (cfg.loss.enable_mfp || cfg.loss.enable_pcl)) {
    bank = build_bank(cfg.mask_dir, cfg.mask_mode, cfg.seed, cfg.working_size, cfg.working_size);
    spdlog::info("mask bank: {} masks in mode {}", bank->size(), to_string(bank->mode()));
  }
  TrainInputs in;
  in.config = &cfg;
  in.data = &data;
  in.backend = backend.get();
  in.masks = bank ? &*bank : nullptr;
  in.on_iteration = [](const IterationLog& l, const DecoderParams&) {
    spdlog::debug("iter {} l_total {:.5f} lr {:.4g}", l.iter, l.l_total, l.lr);
    if (l.skipped > 0) spdlog::warn("iter {}: {} samples redrawn after solver failure", l.iter, l.skipped);
  };
  const TrainResult r = train(in);
  spdlog::info("done: l_total {:.5f} -> {:.5f}, redrawn samples {}", r.log.front().l_total,
               r.log.back().l_total, r.skipped);
  if (r.backend_hash_before != r.backend_hash_after) {
    spdlog::error("encoder state changed during training");
    return 1;
  }
  return 0;
}

int run_infer(const RunOverrides& o, const fs::path& checkpoint, bool bs) {
  const RunConfig cfg = resolve_config(o);
  const DatasetManifest manifest = read_manifest(cfg.manifest);
  const LoadedDataset data = load_dataset(manifest, cfg.working_size);
  const auto backend = make_backend(cfg, manifest);
  const DecoderParams params = load_params(checkpoint, cfg, backend->dim());
  const fs::path dir = cfg.out_dir / "masks";
  fs::create_directories(dir);
  for (const auto& li : data.images) {
    const Inference inf = infer(params, *backend, li.entry.image_id, li.image, cfg.solver, bs);
    write_soft_png(dir / (li.entry.image_id + "_raw.png"), inf.raw);
    write_mask_png(dir / (li.entry.image_id + "_mask.png"), binarize(inf.raw));
    if (inf.refined) write_mask_png(dir / (li.entry.image_id + "_bs.png"), *inf.refined);
  }
  spdlog::info("wrote masks for {} images to {}", data.images.size(), dir.string());
  return 0;
}

int run_eval(const RunOverrides& o, const fs::path& checkpoint, bool bs, const std::string& name) {
  const RunConfig cfg = resolve_config(o);
  const DatasetManifest manifest = read_manifest(cfg.manifest);
  const LoadedDataset data = load_dataset(manifest, cfg.working_size);
  const auto backend = make_backend(cfg, manifest);
  const DecoderParams params = load_params(checkpoint, cfg, backend->dim());
  const auto reports = evaluate(params, *backend, data, cfg, bs, name);
  for (const auto& r : reports) {
    if (r.aggregate.iou_excluded > 0) {
      spdlog::warn("{}: {} images without foreground excluded from IoU", r.variant,
                   r.aggregate.iou_excluded);
    }
  }
  fs::create_directories(cfg.out_dir);
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : reports) doc.push_back(to_json(r));
  std::ofstream(cfg.out_dir / "eval_report.json") << doc.dump(2) << "\n";
  std::cout << format_table(reports);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Masked self-training for unsupervised object localization"};
  app.require_subcommand(1);

  RunOverrides train_o;
  auto* train_cmd = app.add_subcommand("train", "Train the segmenter head");
  add_run_options(train_cmd, train_o);

  RunOverrides infer_o;
  fs::path infer_ckpt;
  bool infer_bs = true;
  auto* infer_cmd = app.add_subcommand("infer", "Write predicted masks");
  add_run_options(infer_cmd, infer_o);
  infer_cmd->add_option("--checkpoint", infer_ckpt)->required()->check(CLI::ExistingFile);
  infer_cmd->add_flag("--bs,!--no-bs", infer_bs, "Also write refined masks");

  RunOverrides eval_o;
  fs::path eval_ckpt;
  bool eval_bs = true;
  std::string eval_name = "dataset";
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  add_run_options(eval_cmd, eval_o);
  eval_cmd->add_option("--checkpoint", eval_ckpt)->required()->check(CLI::ExistingFile);
  eval_cmd->add_flag("--bs,!--no-bs", eval_bs, "Include the refined (+BS) row");
  eval_cmd->add_option("--name", eval_name, "Dataset name for the report");

  SyntheticSpec spec;
  fs::path synth_out;
  auto* synth_cmd = app.add_subcommand("gen-synth", "Generate the synthetic blob dataset");
  synth_cmd->add_option("--out", synth_out)->required();
  synth_cmd->add_option("--count", spec.image_count);
  synth_cmd->add_option("--size", spec.image_size);
  synth_cmd->add_option("--seed", spec.seed);
  synth_cmd->add_option("--masks", spec.mask_count, "Irregular masks to write");
  synth_cmd->add_option("--texture", spec.texture_amplitude);

  fs::path export_manifest;
  fs::path export_masks;
  fs::path export_out;
  std::string export_mode = "high";
  int export_variants = 8;
  int export_size = kWorkingSize;
  ToyBackendConfig export_toy;
  std::uint64_t export_seed = 0;
  auto* export_cmd =
      app.add_subcommand("export-toy-features", "Write toy-encoder features as PKBF files");
  export_cmd->add_option("--manifest", export_manifest)->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--masks", export_masks)->required()->check(CLI::ExistingDirectory);
  export_cmd->add_option("--out", export_out)->required();
  export_cmd->add_option("--mask-mode", export_mode)->check(CLI::IsMember({"high", "low"}));
  export_cmd->add_option("--variants", export_variants);
  export_cmd->add_option("--size", export_size);
  export_cmd->add_option("--patch", export_toy.patch);
  export_cmd->add_option("--dim", export_toy.dim);
  export_cmd->add_option("--toy-seed", export_toy.seed);
  export_cmd->add_option("--seed", export_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return run_train(train_o);
    if (*infer_cmd) return run_infer(infer_o, infer_ckpt, infer_bs);
    if (*eval_cmd) return run_eval(eval_o, eval_ckpt, eval_bs, eval_name);
    if (*synth_cmd) {
      const auto m = generate_synthetic_dataset(spec, synth_out);
      spdlog::info("wrote {} images and {} masks to {}", m.entries.size(), spec.mask_count,
                   synth_out.string());
      return 0;
    }
    if (*export_cmd) {
      const ToyEncoder enc(export_toy.patch, export_toy.dim, export_toy.seed);
      const MaskBank bank =
          build_bank(export_masks, parse_mask_mode(export_mode), export_seed, export_size, export_size);
      const auto m = export_toy_features(read_manifest(export_manifest), enc, bank,
                                         export_variants, export_size, export_out);
      spdlog::info("exported features for {} images to {}", m.entries.size(), export_out.string());
      return 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
