// Copyright 2026 The Eigencontour Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "eigencontour/basis_io.h"
#include "eigencontour/dataset.h"
#include "eigencontour/eigenspace.h"
#include "eigencontour/errors.h"
#include "eigencontour/eval.h"
#include "eigencontour/losses.h"
#include "eigencontour/postprocess.h"
#include "eigencontour/prediction_io.h"
#include "json.hpp"

namespace eigencontour::cli {

namespace {

using nlohmann::json;

constexpr int kDefaultRank = 36;
constexpr int kDefaultCorpusSize = 500;

struct CorpusFlags {
  std::string annotations;
  std::string synthetic;
  int count = kDefaultCorpusSize;
  std::optional<uint64_t> seed;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
};

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

json ParseJson(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(what + ": malformed JSON: " + e.what());
  }
}

// Writes to `path`, or to the context's stdout when path is empty.
void Emit(const Context& ctx, const std::string& path, const std::string& text) {
  if (path.empty()) {
    ctx.out << text;
  } else {
    WriteText(path, text);
  }
}

Normalization ParseNormalization(const std::string& name) {
  if (name == "none") return Normalization::kNone;
  if (name == "max-radius") return Normalization::kMaxRadius;
  throw ValidationError("unknown normalization '" + name + "'");
}

void AddCorpusFlags(CLI::App* cmd, CorpusFlags& flags) {
  auto* ann = cmd->add_option("--annotations", flags.annotations,
                              "COCO-format instance JSON with polygon "
                              "segmentations");
  auto* syn = cmd->add_option("--synthetic", flags.synthetic,
                              "JSON file with a synthetic shape spec");
  ann->excludes(syn);
  cmd->add_option("--count", flags.count,
                  "number of synthetic shapes")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags.seed,
                  "seed for synthetic corpora; overrides the spec file's "
                  "seed when given");
}

SyntheticShapeSpec LoadSyntheticSpec(const CorpusFlags& flags) {
  SyntheticShapeSpec spec = SyntheticSpecFromJson(
      ParseJson(ReadText(flags.synthetic), flags.synthetic));
  if (flags.seed) spec.seed = *flags.seed;
  return spec;
}

void RequireCorpus(const CorpusFlags& flags) {
  if (flags.annotations.empty() && flags.synthetic.empty()) {
    throw ValidationError("one of --annotations or --synthetic is required");
  }
}

// Masks of every instance in the selected corpus.
std::vector<Mask> LoadCorpusMasks(const CorpusFlags& flags,
                                  const Context& ctx) {
  RequireCorpus(flags);
  if (!flags.synthetic.empty()) {
    return GenerateSyntheticCorpus(LoadSyntheticSpec(flags), flags.count).masks;
  }
  std::vector<Mask> masks;
  LoadStats stats = LoadAnnotations(
      flags.annotations,
      [&masks](AnnotatedInstance&& inst) { masks.push_back(std::move(inst.mask)); });
  ctx.err << "loaded " << stats.instances << " instances ("
          << stats.skipped_empty << " empty, " << stats.skipped_rle
          << " RLE skipped)\n";
  return masks;
}

// Vectors file: {"radii": [[...], ...]} or {"coefficients": [[...], ...]}.
struct VectorFile {
  std::string kind;
  std::vector<std::vector<double>> vectors;
};

VectorFile ReadVectors(const std::string& path) {
  const json doc = ParseJson(ReadText(path), path);
  VectorFile file;
  for (const char* kind : {"radii", "coefficients"}) {
    if (doc.is_object() && doc.contains(kind)) file.kind = kind;
  }
  if (file.kind.empty()) {
    throw ValidationError(path + ": expected a 'radii' or 'coefficients' key");
  }
  try {
    file.vectors = doc.at(file.kind).get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return file;
}

std::string DumpVectors(const std::string& kind,
                        const std::vector<std::vector<double>>& vectors) {
  json doc;
  doc[kind] = vectors;
  return doc.dump() + "\n";
}

std::vector<double> ReadValues(const std::string& path) {
  const json doc = ParseJson(ReadText(path), path);
  try {
    return doc.is_array() ? doc.get<std::vector<double>>()
                          : doc.at("values").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void PrintSpectrum(const EigenBasis& basis, std::ostream& err) {
  double energy = 0.0;
  for (double s : basis.sigma()) energy += s * s;
  err << "basis N=" << basis.n() << " M=" << basis.m()
      << " corpus=" << basis.corpus_size() << "\n";
  double running = 0.0;
  const int shown = std::min(basis.m(), 8);
  for (int i = 0; i < basis.m(); ++i) {
    running += basis.sigma()[i] * basis.sigma()[i];
    if (i < shown || i + 1 == basis.m()) {
      err << "  sigma[" << i + 1 << "] = " << std::setprecision(6)
          << basis.sigma()[i] << "  cumulative energy "
          << running / energy << "\n";
    }
  }
}

// ---------------------------------------------------------------------------

struct BuildBasisFlags {
  CorpusFlags corpus;
  int n = kDefaultSampleCount;
  int m = kDefaultRank;
  std::string normalize = "none";
  std::string output;
  int threads = 0;
};

int BuildBasisCommand(const BuildBasisFlags& f, const Context& ctx) {
  RequireCorpus(f.corpus);
  GramAccumulator gram(f.n, ParseNormalization(f.normalize), f.threads);
  json params = {{"n", f.n}, {"m", f.m}, {"normalize", f.normalize}};
  if (!f.corpus.synthetic.empty()) {
    SyntheticShapeSpec spec = LoadSyntheticSpec(f.corpus);
    spec.samples = f.n;
    const SyntheticCorpus corpus = GenerateSyntheticCorpus(spec, f.corpus.count);
    for (const StarContour& c : corpus.contours) gram.Add(c.radii);
    params["source"] = "synthetic";
    params["synthetic"] = SyntheticSpecToJson(spec);
    params["count"] = f.corpus.count;
  } else {
    LoadStats stats =
        LoadAnnotations(f.corpus.annotations, [&](AnnotatedInstance&& inst) {
          gram.Add(CentroidContour(inst.mask, f.n).radii);
        });
    ctx.err << "loaded " << stats.instances << " instances ("
            << stats.skipped_empty << " empty, " << stats.skipped_rle
            << " RLE skipped)\n";
    params["source"] = "annotations";
    params["annotations"] = f.corpus.annotations;
  }
  if (gram.columns() == 0) throw ValidationError("corpus is empty");
  const Spectrum spectrum = ComputeSpectrum(gram);
  const EigenBasis basis = TruncateSpectrum(spectrum, f.m);
  SaveBasis(basis, f.output);
  WriteBasisSidecar(basis, f.output, params);
  PrintSpectrum(basis, ctx.err);

  json summary = {{"basis", f.output},
                  {"sidecar", SidecarPath(f.output)},
                  {"corpus_size", basis.corpus_size()},
                  {"n", basis.n()},
                  {"m", basis.m()},
                  {"singular_values", basis.sigma()}};
  ctx.out << summary.dump() << "\n";
  return kExitOk;
}

struct CodecFlags {
  std::string basis;
  std::string input;
  std::string output;
};

int EncodeCommand(const CodecFlags& f, const Context& ctx) {
  const EigenBasis basis = LoadBasis(f.basis);
  const VectorFile in = ReadVectors(f.input);
  if (in.kind != "radii") {
    throw ValidationError(f.input + ": encode expects a 'radii' file");
  }
  std::vector<std::vector<double>> coeffs;
  for (const auto& r : in.vectors) coeffs.push_back(Encode(basis, r).values);
  Emit(ctx, f.output, DumpVectors("coefficients", coeffs));
  return kExitOk;
}

int DecodeCommand(const CodecFlags& f, const Context& ctx) {
  const EigenBasis basis = LoadBasis(f.basis);
  const VectorFile in = ReadVectors(f.input);
  if (in.kind != "coefficients") {
    throw ValidationError(f.input + ": decode expects a 'coefficients' file");
  }
  std::vector<std::vector<double>> radii;
  for (const auto& c : in.vectors) radii.push_back(Decode(basis, {c}));
  Emit(ctx, f.output, DumpVectors("radii", radii));
  return kExitOk;
}

struct ReconFlags {
  CorpusFlags corpus;
  int n = kDefaultSampleCount;
  std::vector<int> m{kDefaultRank};
  std::string basis;
  double holdout = 0.0;
  std::string normalize = "none";
  std::string output;
  std::string csv;
  bool records = true;
  int threads = 0;
};

int ReconEvalCommand(const ReconFlags& f, const Context& ctx) {
  const std::vector<Mask> masks = LoadCorpusMasks(f.corpus, ctx);
  std::vector<ReconReport> reports;
  if (!f.basis.empty()) {
    reports.push_back(CompareDescriptorsWithBasis(masks, LoadBasis(f.basis),
                                                  f.threads));
  } else {
    CompareOptions options;
    options.holdout_fraction = f.holdout;
    options.normalization = ParseNormalization(f.normalize);
    options.threads = f.threads;
    reports = CompareDescriptorsSweep(masks, f.n, f.m, options);
  }
  for (const ReconReport& r : reports) {
    ctx.err << "M=" << r.m << " mean IoU eigen " << std::setprecision(6)
            << r.mean_iou_eigen << " profile " << r.mean_iou_profile << "\n";
  }
  json doc;
  if (reports.size() == 1) {
    doc = ReconReportToJson(reports.front(), f.records);
  } else {
    doc["reports"] = json::array();
    for (const ReconReport& r : reports) {
      doc["reports"].push_back(ReconReportToJson(r, f.records));
    }
  }
  Emit(ctx, f.output, doc.dump() + "\n");
  if (!f.csv.empty()) WriteText(f.csv, ReconReportCsv(reports));
  return kExitOk;
}

struct PostprocessFlags {
  std::string maps;
  std::string basis;
  double confidence = kDefaultConfidenceThreshold;
  double nms_iou = kDefaultNmsIouThreshold;
  int max_candidates = kDefaultMaxCandidates;
  double radius_scale = 1.0;
  int image_width = 0;
  int image_height = 0;
  std::optional<int64_t> image_id;
  std::string output;
  int threads = 0;
};

int PostprocessCommand(const PostprocessFlags& f, const Context& ctx) {
  const EigenBasis basis = LoadBasis(f.basis);
  const std::vector<PredictionMaps> levels = LoadPredictionMaps(f.maps);
  PostprocessConfig config;
  config.confidence_threshold = f.confidence;
  config.nms_iou_threshold = f.nms_iou;
  config.max_candidates = f.max_candidates;
  config.radius_scale = f.radius_scale;
  config.image_width = f.image_width;
  config.image_height = f.image_height;
  config.threads = f.threads;
  const std::vector<Instance> instances = RunPostprocess(levels, basis, config);
  std::string text;
  for (const Instance& inst : instances) {
    json record = InstanceToJson(inst);
    if (f.image_id) record["image_id"] = *f.image_id;
    text += record.dump() + "\n";
  }
  ctx.err << instances.size() << " instances\n";
  Emit(ctx, f.output, text);
  return kExitOk;
}

struct EvalApFlags {
  std::string detections;
  std::string ground_truth;
  std::string output;
};

int EvalApCommand(const EvalApFlags& f, const Context& ctx) {
  LoadStats stats;
  const std::vector<AnnotatedInstance> gts =
      LoadAllAnnotations(f.ground_truth, &stats);
  std::vector<ImageEval> images(stats.images.size());
  std::map<int64_t, size_t> image_index;
  for (size_t i = 0; i < stats.images.size(); ++i) {
    image_index[stats.images[i].first] = i;
  }
  for (const AnnotatedInstance& gt : gts) {
    images[image_index.at(gt.image_id)].ground_truth.push_back(
        {gt.category, gt.mask});
  }

  std::istringstream lines(ReadText(f.detections));
  std::string line;
  int64_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json record = ParseJson(line, f.detections + ":" + std::to_string(line_no));
    Instance inst = InstanceFromJson(record);
    size_t target = 0;
    if (record.contains("image_id")) {
      auto it = image_index.find(record["image_id"].get<int64_t>());
      if (it == image_index.end()) {
        throw ValidationError(f.detections + ":" + std::to_string(line_no) +
                              ": unknown image_id");
      }
      target = it->second;
    } else if (images.size() != 1) {
      throw ValidationError(f.detections + ":" + std::to_string(line_no) +
                            ": image_id is required with several images");
    }
    images[target].detections.push_back(std::move(inst));
  }
  const EvalReport report = EvaluateAp(images);
  ctx.err << "AP " << std::setprecision(4) << report.ap << " AP50 "
          << report.ap50 << " AP75 " << report.ap75 << "\n";
  json doc = EvalReportToJson(report);
  doc["category_ids"] = stats.category_ids;
  Emit(ctx, f.output, doc.dump() + "\n");
  return kExitOk;
}

struct LossFlags {
  std::string pred;
  std::string gt;
  std::string basis;
  std::string cls_probs;
  std::string cls_targets;
  std::string cen_probs;
  std::string cen_targets;
  double alpha = kFocalAlpha;
  double gamma = kFocalGamma;
  std::string output;
};

int LossCommand(const LossFlags& f, const Context& ctx) {
  const VectorFile pred = ReadVectors(f.pred);
  const VectorFile gt = ReadVectors(f.gt);
  if (pred.kind != gt.kind) {
    throw ValidationError("prediction and target files hold different kinds");
  }
  if (pred.vectors.size() != gt.vectors.size()) {
    throw ValidationError("prediction and target vector counts differ");
  }
  double coeff = 0.0;
  if (pred.kind == "coefficients") {
    if (f.basis.empty()) {
      throw ValidationError("--basis is required for coefficient files");
    }
    const EigenBasis basis = LoadBasis(f.basis);
    for (size_t i = 0; i < pred.vectors.size(); ++i) {
      coeff += CoeffLoss(basis, {pred.vectors[i]}, {gt.vectors[i]});
    }
  } else {
    for (size_t i = 0; i < pred.vectors.size(); ++i) {
      coeff += PolarIouLoss(pred.vectors[i], gt.vectors[i]);
    }
  }
  double cls = 0.0;
  if (!f.cls_probs.empty() || !f.cls_targets.empty()) {
    cls = FocalLoss(ReadValues(f.cls_probs), ReadValues(f.cls_targets), f.alpha,
                    f.gamma);
  }
  double cen = 0.0;
  if (!f.cen_probs.empty() || !f.cen_targets.empty()) {
    cen = BceLoss(ReadValues(f.cen_probs), ReadValues(f.cen_targets));
  }
  const LossBreakdown b = TotalLoss(cls, cen, coeff);
  json doc = {{"cls", b.cls}, {"cen", b.cen}, {"coeff", b.coeff},
              {"total", b.total}};
  Emit(ctx, f.output, doc.dump() + "\n");
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Eigencontour codec and evaluation toolkit", "eigencontour"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  Context ctx{out, err};

  BuildBasisFlags bb;
  auto* build = app.add_subcommand(
      "build-basis", "Build an eigencontour basis from a contour corpus");
  AddCorpusFlags(build, bb.corpus);
  build->add_option("-n,--samples", bb.n, "rays per star contour (N)")
      ->check(CLI::Range(3, 1 << 16));
  build->add_option("-m,--rank", bb.m, "number of eigencontours (M)")
      ->check(CLI::PositiveNumber);
  build->add_option("--normalize", bb.normalize,
                    "per-contour normalization before accumulation")
      ->check(CLI::IsMember({"none", "max-radius"}));
  build->add_option("-o,--output", bb.output, "basis file to write (ECEB)")
      ->required();
  build->add_option("--threads", bb.threads, "worker threads, 0 = auto");

  CodecFlags enc;
  auto* encode = app.add_subcommand(
      "encode", "Project radii onto a basis: c = U^T r");
  encode->add_option("--basis", enc.basis, "basis file (ECEB)")->required();
  encode->add_option("-i,--input", enc.input, "JSON file {\"radii\": [[...]]}")
      ->required();
  encode->add_option("-o,--output", enc.output,
                     "coefficient JSON to write; stdout when empty");

  CodecFlags dec;
  auto* decode = app.add_subcommand(
      "decode", "Reconstruct radii from coefficients: r = U c");
  decode->add_option("--basis", dec.basis, "basis file (ECEB)")->required();
  decode->add_option("-i,--input", dec.input,
                     "JSON file {\"coefficients\": [[...]]}")
      ->required();
  decode->add_option("-o,--output", dec.output,
                     "radii JSON to write; stdout when empty");

  ReconFlags rf;
  auto* recon = app.add_subcommand(
      "recon-eval",
      "Compare eigencontour and centroidal-profile reconstructions");
  AddCorpusFlags(recon, rf.corpus);
  recon->add_option("-n,--samples", rf.n, "rays per star contour (N)")
      ->check(CLI::Range(3, 1 << 16));
  recon->add_option("-m,--rank", rf.m,
                    "descriptor size(s) M; repeat for a sweep")
      ->check(CLI::PositiveNumber);
  recon->add_option("--basis", rf.basis,
                    "evaluate this basis instead of building one on the "
                    "corpus");
  recon->add_option("--holdout", rf.holdout,
                    "fraction of the corpus held out from basis building")
      ->check(CLI::Range(0.0, 0.99));
  recon->add_option("--normalize", rf.normalize,
                    "per-contour normalization before accumulation")
      ->check(CLI::IsMember({"none", "max-radius"}));
  recon->add_option("-o,--output", rf.output,
                    "report JSON to write; stdout when empty");
  recon->add_option("--csv", rf.csv, "per-instance CSV to write");
  recon->add_option("--records", rf.records,
                    "include per-instance records in the JSON report");
  recon->add_option("--threads", rf.threads, "worker threads, 0 = auto");

  PostprocessFlags pf;
  auto* post = app.add_subcommand(
      "postprocess", "Decode prediction maps into instance masks");
  post->add_option("--maps", pf.maps, "prediction map file (ECPM)")
      ->required();
  post->add_option("--basis", pf.basis, "basis file (ECEB)")->required();
  post->add_option("--confidence", pf.confidence,
                   "minimum confidence score")
      ->check(CLI::Range(0.0, 1.0));
  post->add_option("--nms-iou", pf.nms_iou,
                   "mask IoU above which lower-scored instances are dropped")
      ->check(CLI::Range(0.0, 1.0));
  post->add_option("--max-candidates", pf.max_candidates,
                   "candidates kept before NMS")
      ->check(CLI::PositiveNumber);
  post->add_option("--radius-scale", pf.radius_scale,
                   "factor applied to decoded radii (stride for "
                   "feature-scale regression)")
      ->check(CLI::PositiveNumber);
  post->add_option("--image-width", pf.image_width,
                   "output mask width, 0 = map width * stride");
  post->add_option("--image-height", pf.image_height,
                   "output mask height, 0 = map height * stride");
  post->add_option("--image-id", pf.image_id,
                   "image id attached to every output record");
  post->add_option("-o,--output", pf.output,
                   "JSON-lines file to write; stdout when empty");
  post->add_option("--threads", pf.threads, "worker threads, 0 = auto");

  EvalApFlags ef;
  auto* evalap = app.add_subcommand(
      "eval-ap", "COCO-style mask AP of detections against ground truth");
  evalap->add_option("--detections", ef.detections,
                     "JSON-lines instances (postprocess output)")
      ->required();
  evalap->add_option("--ground-truth", ef.ground_truth,
                     "COCO-format ground-truth JSON")
      ->required();
  evalap->add_option("-o,--output", ef.output,
                     "report JSON to write; stdout when empty");

  LossFlags lf;
  auto* loss = app.add_subcommand("loss", "Evaluate the training loss terms");
  loss->add_option("--pred", lf.pred, "predicted radii or coefficients JSON")
      ->required();
  loss->add_option("--gt", lf.gt, "target radii or coefficients JSON")
      ->required();
  loss->add_option("--basis", lf.basis,
                   "basis file, required for coefficient inputs");
  loss->add_option("--cls-probs", lf.cls_probs,
                   "JSON list of class probabilities for the focal term");
  loss->add_option("--cls-targets", lf.cls_targets,
                   "JSON list of 0/1 class targets");
  loss->add_option("--cen-probs", lf.cen_probs,
                   "JSON list of centerness probabilities for the BCE term");
  loss->add_option("--cen-targets", lf.cen_targets,
                   "JSON list of 0/1 centerness targets");
  loss->add_option("--alpha", lf.alpha, "focal loss alpha");
  loss->add_option("--gamma", lf.gamma, "focal loss gamma");
  loss->add_option("-o,--output", lf.output,
                   "breakdown JSON to write; stdout when empty");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*build) {
      if (bb.m > bb.n) throw ValidationError("rank M must not exceed N");
      return BuildBasisCommand(bb, ctx);
    }
    if (*encode) return EncodeCommand(enc, ctx);
    if (*decode) return DecodeCommand(dec, ctx);
    if (*recon) return ReconEvalCommand(rf, ctx);
    if (*post) return PostprocessCommand(pf, ctx);
    if (*evalap) return EvalApCommand(ef, ctx);
    if (*loss) return LossCommand(lf, ctx);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace eigencontour::cli
