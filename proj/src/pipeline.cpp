// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/pipeline.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>

#include "peekaboo/augment.hpp"
#include "peekaboo/image_io.hpp"
#include "peekaboo/losses.hpp"
#include "peekaboo/parallel.hpp"
#include "peekaboo/random.hpp"

namespace peekaboo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSampleKey = 0x73616d70;
constexpr std::uint64_t kInitKey = 0x696e6974;
constexpr std::uint64_t kExportKey = 0x65787074;
constexpr int kMaxAttempts = 8;

BinaryMask read_ground_truth(const fs::path& path) {
  const Plane<float> gray = read_gray_image(path);
  Plane<std::uint8_t> bits(gray.height(), gray.width());
  for (std::size_t i = 0; i < gray.size(); ++i) bits.data()[i] = gray.data()[i] >= 127.5f ? 1 : 0;
  return BinaryMask(std::move(bits));
}

ImageTensor prepare_image(const fs::path& path, int working_size, int* native_h, int* native_w) {
  const ImageTensor raw = read_rgb_image(path);
  if (native_h) *native_h = raw.height();
  if (native_w) *native_w = raw.width();
  return normalize_image(resize_bilinear(raw, working_size, working_size));
}

BinaryMask zeta_or_fail(const SoftMask& mask, const BilateralGrid& grid, const SolverConfig& cfg,
                        bool& converged) {
  try {
    ZetaResult z = zeta_detailed(mask, grid, cfg);
    converged = converged && z.solve.converged;
    return std::move(z.mask);
  } catch (const NumericError& e) {
    throw SolverFailure(e.what());
  }
}

bool uses_masked_branch(const LossConfig& loss) { return loss.enable_mfp || loss.enable_pcl; }

}  // namespace

LoadedDataset load_dataset(const DatasetManifest& manifest, int working_size) {
  if (manifest.entries.empty()) throw InvalidArgument("dataset manifest lists no images");
  LoadedDataset out;
  out.metadata = manifest.metadata;
  for (const auto& e : manifest.entries) {
    LoadedImage li;
    li.entry = e;
    li.image = prepare_image(e.image_path, working_size, &li.native_height, &li.native_width);
    if (e.ground_truth_mask_path) li.ground_truth = read_ground_truth(*e.ground_truth_mask_path);
    out.images.push_back(std::move(li));
  }
  return out;
}

std::unique_ptr<EncoderBackend> make_backend(const RunConfig& cfg, const DatasetManifest& manifest) {
  if (cfg.backend == BackendKind::kToy) {
    return std::make_unique<ToyEncoder>(cfg.toy.patch, cfg.toy.dim, cfg.toy.seed);
  }
  return std::make_unique<ReplayEncoder>(ReplayEncoder::from_manifest(manifest, cfg.replay_dim));
}

json to_json(const IterationLog& l) {
  return {{"iter", l.iter},       {"l_seg", l.l_seg},   {"l_mfp", l.l_mfp},
          {"l_pcl", l.l_pcl},     {"l_aux", l.l_aux},   {"l_total", l.l_total},
          {"lr", l.lr},           {"l_pcl_literal", l.l_pcl_literal},
          {"skipped", l.skipped}, {"unconverged", l.unconverged}};
}

DecoderParams initial_params(const RunConfig& cfg, int dim) {
  if (cfg.optimizer.head_init == HeadInit::kZeros) return DecoderParams::zeros(dim);
  return DecoderParams::gaussian(dim, derive_seed(cfg.seed, {kInitKey}));
}

SampleOutcome training_sample(const DecoderParams& params, const EncoderBackend& backend,
                              const std::string& image_id, const ImageTensor& image,
                              const ImageTensor& masked_image, const FeatureVariant& masked_variant,
                              const RunConfig& cfg) {
  const int h = image.height();
  const int w = image.width();
  SampleOutcome out;
  const FeatureGrid feat_p = backend.encode({&image, image_id, FeatureVariant::unmasked()});
  const auto head_p = head_forward<float>(params, feat_p, h, w);
  const BilateralGrid grid = make_reference_grid(image, cfg.solver);
  const BinaryMask zeta_p = zeta_or_fail(head_p.prob_fg_full, grid, cfg.solver, out.converged);

  if (!uses_masked_branch(cfg.loss)) {
    out.losses = total_loss<float>({&head_p.prob_fg_full, &head_p.prob_fg_full, &zeta_p, &zeta_p},
                                   cfg.loss);
    out.grads = head_backward_full(params, feat_p, out.losses.grad_p);
    return out;
  }

  const FeatureGrid feat_pm = backend.encode({&masked_image, image_id, masked_variant});
  const auto head_pm = head_forward<float>(params, feat_pm, h, w);
  // The masked branch is refined against the unmasked reference image.
  const BinaryMask zeta_pm = zeta_or_fail(head_pm.prob_fg_full, grid, cfg.solver, out.converged);
  out.losses = total_loss<float>({&head_p.prob_fg_full, &head_pm.prob_fg_full, &zeta_p, &zeta_pm},
                                 cfg.loss);
  out.grads = head_backward_full(params, feat_p, out.losses.grad_p);
  out.grads += head_backward_full(params, feat_pm, out.losses.grad_pm);
  return out;
}

TrainResult train(const TrainInputs& in) {
  const RunConfig& cfg = *in.config;
  const LoadedDataset& data = *in.data;
  const EncoderBackend& backend = *in.backend;
  if (data.images.empty()) throw InvalidArgument("training dataset is empty");
  const bool toy = cfg.backend == BackendKind::kToy;
  if (toy && in.masks == nullptr && uses_masked_branch(cfg.loss)) {
    throw InvalidArgument("toy backend training needs a mask bank");
  }

  TrainResult result;
  result.backend_hash_before = backend.state_hash();
  DecoderParams params = in.initial ? *in.initial : initial_params(cfg, backend.dim());
  if (params.dim != backend.dim()) {
    throw ShapeError("initial parameters have dim " + std::to_string(params.dim) +
                     ", backend has " + std::to_string(backend.dim()));
  }
  AdamState adam = AdamState::for_size(params.parameter_count(), cfg.optimizer.lr,
                                       cfg.optimizer.beta1, cfg.optimizer.beta2, cfg.optimizer.eps);
  const LrSchedule schedule{cfg.optimizer.schedule, cfg.optimizer.lr, cfg.optimizer.final_fraction,
                            cfg.iterations};
  const std::string config_hash = cfg.hash();
  const int workers = resolve_workers(cfg.workers);
  const auto* replay = dynamic_cast<const ReplayEncoder*>(&backend);

  std::ofstream log_file;
  if (in.write_outputs) {
    fs::create_directories(cfg.out_dir);
    save_run_config(cfg, cfg.out_dir / "config.json");
    log_file.open(cfg.out_dir / "train_log.jsonl", std::ios::trunc);
    if (!log_file) throw IoError("cannot write training log under " + cfg.out_dir.string());
  }

  const int batch = cfg.batch_size;
  for (int t = 0; t < cfg.iterations; ++t) {
    const double lr = schedule.at(t);
    std::vector<std::optional<SampleOutcome>> slots(batch);
    std::vector<int> attempts(batch, 0);
    parallel_for(static_cast<std::size_t>(batch), workers, [&](std::size_t b) {
      for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        RandomStream rng(cfg.seed, {kSampleKey, static_cast<std::uint64_t>(t), b,
                                    static_cast<std::uint64_t>(attempt)});
        const LoadedImage& li = data.images[rng.below(data.images.size())];
        ImageTensor image = li.image;
        ImageTensor masked;
        FeatureVariant variant = FeatureVariant::unmasked();
        if (toy) {
          image = augment(li.image, cfg.augment, rng);
          if (in.masks != nullptr) {
            const std::uint64_t draw =
                (static_cast<std::uint64_t>(t) * batch + b) * kMaxAttempts + attempt;
            const MaskRecord& rec = sample_mask(*in.masks, draw);
            ScribbleMask mask = rec.mask;
            if (mask.height() != image.height() || mask.width() != image.width()) {
              mask = resize_nearest(mask, image.height(), image.width());
            }
            masked = apply_mask(image, mask);
            variant = FeatureVariant::with_mask(rec.id);
          }
        } else if (uses_masked_branch(cfg.loss)) {
          const auto& ids = replay->mask_ids(li.entry.image_id);
          if (ids.empty()) {
            throw InvalidArgument("no masked variants for image '" + li.entry.image_id +
                                  "' in the replay store");
          }
          variant = FeatureVariant::with_mask(ids[rng.below(ids.size())]);
        }
        try {
          slots[b] = training_sample(params, backend, li.entry.image_id, image, masked, variant, cfg);
          attempts[b] = attempt;
          return;
        } catch (const SolverFailure&) {
          attempts[b] = attempt + 1;
        }
      }
      throw SolverFailure(fmt::format("refinement failed {} times in a row at iteration {}",
                                      kMaxAttempts, t));
    });

    IterationLog entry;
    entry.iter = t;
    entry.lr = lr;
    DecoderGrads grads = DecoderParams::zeros(params.dim);
    for (int b = 0; b < batch; ++b) {
      const SampleOutcome& s = *slots[b];
      entry.l_seg += s.losses.l_seg;
      entry.l_mfp += s.losses.l_mfp;
      entry.l_pcl += s.losses.l_pcl;
      entry.l_pcl_literal += s.losses.l_pcl_literal;
      entry.l_aux += s.losses.l_aux;
      entry.l_total += s.losses.l_total;
      entry.skipped += attempts[b];
      entry.unconverged += s.converged ? 0 : 1;
      grads += s.grads;
    }
    const double inv = 1.0 / batch;
    entry.l_seg *= inv;
    entry.l_mfp *= inv;
    entry.l_pcl *= inv;
    entry.l_pcl_literal *= inv;
    entry.l_aux *= inv;
    entry.l_total *= inv;
    grads *= inv;
    if (!std::isfinite(entry.l_total)) {
      throw NumericError(fmt::format("non-finite loss at iteration {}: {}", t, to_json(entry).dump()));
    }
    result.skipped += entry.skipped;
    adam_step(adam, params, grads, lr);

    if (log_file.is_open()) log_file << to_json(entry).dump() << "\n" << std::flush;
    if (in.on_iteration) in.on_iteration(entry, params);
    result.log.push_back(entry);

    const bool last = t + 1 == cfg.iterations;
    if (in.write_outputs &&
        ((cfg.checkpoint_every > 0 && (t + 1) % cfg.checkpoint_every == 0) || last)) {
      Checkpoint ck{params, adam, t + 1, config_hash};
      save_checkpoint(ck, cfg.out_dir / fmt::format("checkpoint_{:05d}.json", t + 1));
      if (last) save_checkpoint(ck, cfg.out_dir / "checkpoint_final.json");
    }
  }
  result.final = Checkpoint{params, adam, cfg.iterations, config_hash};
  result.backend_hash_after = backend.state_hash();
  return result;
}

TrainResult train(const RunConfig& cfg) {
  cfg.validate();
  const DatasetManifest manifest = read_manifest(cfg.manifest);
  const LoadedDataset data = load_dataset(manifest, cfg.working_size);
  const auto backend = make_backend(cfg, manifest);
  std::optional<MaskBank> bank;
  if (cfg.backend == BackendKind::kToy && uses_masked_branch(cfg.loss)) {
    bank = build_bank(cfg.mask_dir, cfg.mask_mode, cfg.seed, cfg.working_size, cfg.working_size);
  }
  TrainInputs in;
  in.config = &cfg;
  in.data = &data;
  in.backend = backend.get();
  in.masks = bank ? &*bank : nullptr;
  return train(in);
}

Inference infer(const DecoderParams& params, const EncoderBackend& backend,
                const std::string& image_id, const ImageTensor& image, const SolverConfig& solver,
                bool refine) {
  Inference out;
  const FeatureGrid feat = backend.encode({&image, image_id, FeatureVariant::unmasked()});
  out.raw = head_forward<float>(params, feat, image.height(), image.width()).prob_fg_full;
  if (refine) {
    ZetaResult z = zeta_detailed(out.raw, make_reference_grid(image, solver), solver);
    out.converged = z.solve.converged;
    out.refined = std::move(z.mask);
  }
  return out;
}

std::vector<EvalReport> evaluate(const DecoderParams& params, const EncoderBackend& backend,
                                 const LoadedDataset& data, const RunConfig& cfg, bool bs,
                                 const std::string& dataset_name) {
  const bool need_refined = bs || cfg.corloc_from_refined;
  const std::size_t n = data.images.size();
  std::vector<ImageRecord> plain(n);
  std::vector<ImageRecord> refined(n);
  parallel_for(n, resolve_workers(cfg.workers), [&](std::size_t i) {
    const LoadedImage& li = data.images[i];
    const Inference inf =
        infer(params, backend, li.entry.image_id, li.image, cfg.solver, need_refined);
    const int nh = li.native_height;
    const int nw = li.native_width;
    const SoftMask raw_native = resize_bilinear(inf.raw, nh, nw);
    const BinaryMask raw_bits = binarize(raw_native);
    std::optional<BinaryMask> ref_bits;
    if (inf.refined) ref_bits = resize_nearest(*inf.refined, nh, nw);

    auto box_of = [](const BinaryMask& m) -> std::optional<BoundingBox> {
      if (m.count_ones() == 0) return std::nullopt;
      return mask_to_box(m);
    };
    auto fill = [&](ImageRecord& rec, const SoftMask& pred, const BinaryMask& box_source) {
      rec.image_id = li.entry.image_id;
      if (li.ground_truth) rec.saliency = saliency_scores(pred, *li.ground_truth, cfg.metrics);
      rec.predicted_box = box_of(box_source);
      if (!li.entry.ground_truth_boxes.empty()) {
        rec.box_hit = rec.predicted_box && box_hit(*rec.predicted_box, li.entry.ground_truth_boxes,
                                                   cfg.metrics.corloc_iou_threshold);
      }
    };
    const BinaryMask& box_source = cfg.corloc_from_refined ? *ref_bits : raw_bits;
    fill(plain[i], raw_native, box_source);
    if (bs) fill(refined[i], ref_bits->as_soft<float>(), box_source);
  });

  std::vector<EvalReport> reports;
  reports.push_back({dataset_name, "plain", plain, aggregate(plain, cfg.metrics), cfg.metrics});
  if (bs) {
    reports.push_back({dataset_name, "+BS", refined, aggregate(refined, cfg.metrics), cfg.metrics});
  }
  return reports;
}

DatasetManifest export_toy_features(const DatasetManifest& manifest, const ToyEncoder& encoder,
                                    const MaskBank& masks, int variants, int working_size,
                                    const fs::path& out_dir) {
  if (variants < 0) throw InvalidArgument("variants must be >= 0");
  fs::create_directories(out_dir / "features");
  DatasetManifest out = manifest;
  for (auto& e : out.entries) {
    const ImageTensor image = prepare_image(e.image_path, working_size, nullptr, nullptr);
    const fs::path unmasked = out_dir / "features" / (e.image_id + "__unmasked.pkbf");
    write_feature_file({e.image_id, FeatureVariant::unmasked(), encoder.encode(image)}, unmasked);
    e.unmasked_feature_path = unmasked;
    e.masked_variants.clear();
    const std::uint64_t id_hash = fnv1a(e.image_id.data(), e.image_id.size());
    const int wanted = std::min<int>(variants, static_cast<int>(masks.size()));
    std::set<std::string> used;
    for (std::uint64_t draw = 0; static_cast<int>(used.size()) < wanted; ++draw) {
      const MaskRecord& rec = sample_mask(masks, derive_seed(id_hash, {kExportKey, draw}));
      if (!used.insert(rec.id).second) continue;
      ScribbleMask m = rec.mask;
      if (m.height() != working_size || m.width() != working_size) {
        m = resize_nearest(m, working_size, working_size);
      }
      const auto variant = FeatureVariant::with_mask(rec.id);
      const fs::path path = out_dir / "features" / (e.image_id + "__" + fs::path(rec.id).stem().string() + ".pkbf");
      write_feature_file({e.image_id, variant, encoder.encode(apply_mask(image, m))}, path);
      e.masked_variants.push_back({rec.id, path});
    }
  }
  out.metadata["feature_source"] = {{"backend", "toy"},
                                    {"patch", encoder.patch()},
                                    {"dim", encoder.dim()},
                                    {"seed", encoder.seed()},
                                    {"variants", variants},
                                    {"mask_mode", to_string(masks.mode())}};
  write_manifest(out, out_dir / "manifest.json");
  return out;
}

}  // namespace peekaboo
