#include "gardener/scan.hpp"

#include "gardener/error.hpp"

namespace gardener {

std::string_view binning_name(BinningMode m) noexcept { return m == BinningMode::PerBlock ? "block" : "global"; }

BinningMode parse_binning(std::string_view name) {
  if (name == "block" || name == "per_block") return BinningMode::PerBlock;
  if (name == "global") return BinningMode::Global;
  fail(ErrorCode::InvalidArgument, "binning mode must be 'block' or 'global', got '" + std::string(name) + "'");
}

bool needs_mutual_information(Criterion c) noexcept { return c == Criterion::MiNumber || c == Criterion::MiValue; }

namespace {

std::optional<double> magnitude_entropy_or_empty(const Histogram& h) {
  double total = 0.0;
  for (double m : h.magnitude) total += m;
  if (!(total > 0.0)) return std::nullopt;
  return magnitude_entropy(h);
}

}  // namespace

ModelScan scan_model(const BlockModel& model, const Checkpoint& ckpt, const ScoringParams& params,
                     bool with_mutual_information) {
  if (params.bins < 1) fail(ErrorCode::InvalidBinCount, "bin count must be >= 1, got " + std::to_string(params.bins));
  ModelScan scan;
  scan.params = params;
  scan.has_mutual_information = with_mutual_information;

  const bool per_block = params.binning == BinningMode::PerBlock;
  RangeAccumulator global;
  std::vector<double> buffer;
  std::vector<double> chunk;
  for (const Block& block : model.blocks) {
    BlockScan bs;
    bs.id = block.id;
    RangeAccumulator range;
    MomentAccumulator moments;
    buffer.clear();
    if (per_block) buffer.reserve(block.param_count);
    for (const auto& name : block.tensor_names) {
      chunk.clear();
      append_as_f64(ckpt.info(name).dtype, ckpt.bytes(name), chunk);
      range.add(chunk);
      moments.add(chunk);
      if (per_block) buffer.insert(buffer.end(), chunk.begin(), chunk.end());
    }
    bs.stats = moments.stats();
    if (per_block) {
      HistogramAccumulator hist(range.range(), params.bins);
      hist.add(buffer);
      bs.histogram = hist.histogram();
      bs.entropy_number = weight_number_entropy(bs.histogram);
      bs.entropy_value = magnitude_entropy_or_empty(bs.histogram);
    }
    global.merge(range);
    scan.blocks.push_back(std::move(bs));
  }
  buffer = {};
  scan.global_range = global.range();

  if (!per_block || with_mutual_information) {
    scan.passes = 2;
    std::vector<Histogram> shared;
    shared.reserve(model.blocks.size());
    for (const Block& block : model.blocks) {
      HistogramAccumulator hist(scan.global_range, params.bins);
      for (const auto& name : block.tensor_names) {
        chunk.clear();
        append_as_f64(ckpt.info(name).dtype, ckpt.bytes(name), chunk);
        hist.add(chunk);
      }
      shared.push_back(hist.histogram());
    }
    if (!per_block) {
      for (std::size_t i = 0; i < shared.size(); ++i) {
        scan.blocks[i].histogram = shared[i];
        scan.blocks[i].entropy_number = weight_number_entropy(shared[i]);
        scan.blocks[i].entropy_value = magnitude_entropy_or_empty(shared[i]);
      }
    }
    if (with_mutual_information) {
      const auto k = static_cast<std::size_t>(params.bins);
      Histogram all = shared.front();
      for (std::size_t i = 1; i < shared.size(); ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          all.counts[j] += shared[i].counts[j];
          all.magnitude[j] += shared[i].magnitude[j];
        }
        all.total += shared[i].total;
      }
      for (std::size_t i = 0; i < shared.size(); ++i) {
        // Rest = every other block; counts subtract exactly, magnitudes are
        // re-summed to avoid cancellation.
        Histogram rest = shared[i];
        rest.total = all.total - shared[i].total;
        for (std::size_t j = 0; j < k; ++j) {
          rest.counts[j] = all.counts[j] - shared[i].counts[j];
          double mass = 0.0;
          for (std::size_t m = 0; m < shared.size(); ++m) {
            if (m != i) mass += shared[m].magnitude[j];
          }
          rest.magnitude[j] = mass;
        }
        BlockScan& bs = scan.blocks[i];
        if (rest.total == 0) {
          bs.mi_number = 0.0;
          bs.mi_value = 0.0;
          continue;
        }
        bs.mi_number = mutual_information_counts(shared[i], rest);
        try {
          bs.mi_value = mutual_information_magnitude(shared[i], rest);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateMagnitude) throw;
        }
      }
    }
  }
  return scan;
}

double criterion_score(const ModelScan& scan, const BlockScan& block, Criterion c) {
  const LogBase base = scan.params.log_base;
  const auto block_tag = " (block " + std::to_string(block.id) + ")";
  switch (c) {
    case Criterion::EntropyNumber: return from_nats(block.entropy_number, base);
    case Criterion::EntropyValue:
      if (!block.entropy_value) fail(ErrorCode::DegenerateMagnitude, "all weights are zero" + block_tag);
      return from_nats(*block.entropy_value, base);
    case Criterion::MiNumber:
      if (!block.mi_number) fail(ErrorCode::InternalInvariant, "mutual information was not computed" + block_tag);
      return from_nats(*block.mi_number, base);
    case Criterion::MiValue:
      if (!scan.has_mutual_information) {
        fail(ErrorCode::InternalInvariant, "mutual information was not computed" + block_tag);
      }
      if (!block.mi_value) fail(ErrorCode::DegenerateMagnitude, "all weights are zero" + block_tag);
      return from_nats(*block.mi_value, base);
    case Criterion::Mean: return block.stats.mean_abs;
    case Criterion::Variance: return block.stats.variance;
    case Criterion::Std: return block.stats.std;
    case Criterion::L1: return block.stats.l1;
    case Criterion::L2: return block.stats.l2;
    case Criterion::Max: return block.stats.max_abs;
    case Criterion::Kurtosis:
      if (!block.stats.kurtosis) fail(ErrorCode::DegenerateKurtosis, "zero variance" + block_tag);
      return *block.stats.kurtosis;
    case Criterion::Random:
    case Criterion::External: break;
  }
  fail(ErrorCode::InvalidArgument,
       "criterion '" + std::string(criterion_name(c)) + "' is not computed from weights");
}

ScoreTable score_from_scan(const ModelScan& scan, Criterion c, std::optional<PruneDirection> direction) {
  std::vector<double> raw;
  raw.reserve(scan.blocks.size());
  for (const auto& b : scan.blocks) raw.push_back(criterion_score(scan, b, c));
  return make_score_table(c, std::move(raw), direction.value_or(default_direction(c)));
}

ScoreTable score_blocks(const BlockModel& model, const Checkpoint& ckpt, Criterion c, const ScoringParams& params,
                        std::optional<PruneDirection> direction) {
  if (c == Criterion::Random || c == Criterion::External) {
    fail(ErrorCode::InvalidArgument,
         "criterion '" + std::string(criterion_name(c)) + "' is not computed from weights");
  }
  const ModelScan scan = scan_model(model, ckpt, params, needs_mutual_information(c));
  return score_from_scan(scan, c, direction);
}

}  // namespace gardener
