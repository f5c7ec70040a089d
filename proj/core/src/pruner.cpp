#include "gardener/pruner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "gardener/error.hpp"

namespace gardener {

PruningPlan make_plan(const BlockModel& model, const std::vector<int>& remove) {
  std::set<int> removed;
  for (int id : remove) {
    model.block(id);  // BlockNotFound
    removed.insert(id);
  }
  if (removed.empty()) fail(ErrorCode::EmptySelection, "no blocks selected for removal");
  if (static_cast<int>(removed.size()) >= model.num_blocks()) {
    fail(ErrorCode::FullModelPrune, "refusing to remove every block");
  }

  PruningPlan plan;
  plan.remove.assign(removed.begin(), removed.end());
  int next_native = model.pattern.index_base;
  for (const Block& b : model.blocks) {
    if (removed.count(b.id)) {
      plan.drop.insert(plan.drop.end(), b.tensor_names.begin(), b.tensor_names.end());
      continue;
    }
    for (const auto& name : b.tensor_names) {
      plan.rename.emplace_back(name, replace_block_index(name, model.pattern, next_native));
    }
    ++next_native;
    ++plan.kept_blocks;
  }
  return plan;
}

PruningPlan make_plan(const BlockModel& model, const PruneSet& set) { return make_plan(model, set.block_ids); }

Checkpoint apply_plan(const Checkpoint& ckpt, const PruningPlan& plan, const PlanProvenance& provenance) {
  std::map<std::string_view, std::string_view> renames;
  for (const auto& [from, to] : plan.rename) {
    if (!ckpt.contains(from)) fail(ErrorCode::PlanConflict, "planned tensor '" + from + "' is not in the checkpoint");
    if (!renames.emplace(from, to).second) fail(ErrorCode::PlanConflict, "tensor '" + from + "' renamed twice");
  }
  std::set<std::string_view> drops;
  for (const auto& name : plan.drop) {
    if (!ckpt.contains(name)) fail(ErrorCode::PlanConflict, "planned tensor '" + name + "' is not in the checkpoint");
    if (renames.count(name)) fail(ErrorCode::PlanConflict, "tensor '" + name + "' is both renamed and dropped");
    drops.insert(name);
  }

  Checkpoint out;
  std::set<std::string> taken;
  for (const auto& ti : ckpt.tensors()) {
    if (drops.count(ti.name)) continue;
    auto it = renames.find(ti.name);
    std::string target = it == renames.end() ? ti.name : std::string(it->second);
    if (!taken.insert(target).second) {
      fail(ErrorCode::PlanConflict, "two tensors would both be named '" + target + "'");
    }
    out.add_alias(std::move(target), ckpt, ti.name);
  }

  out.metadata() = ckpt.metadata();
  std::ostringstream removed;
  for (std::size_t i = 0; i < plan.remove.size(); ++i) removed << (i ? "," : "") << plan.remove[i];
  out.metadata()["gardener.removed_blocks"] = removed.str();
  out.metadata()["gardener.kept_blocks"] = std::to_string(plan.kept_blocks);
  if (!provenance.criterion.empty()) out.metadata()["gardener.criterion"] = provenance.criterion;
  if (provenance.ratio > 0.0) {
    std::ostringstream r;
    r.precision(17);
    r << provenance.ratio;
    out.metadata()["gardener.ratio"] = r.str();
  }
  if (!provenance.tool_version.empty()) out.metadata()["gardener.version"] = provenance.tool_version;
  return out;
}

CostConfig fit_cost_config(const std::vector<std::pair<int, double>>& points, double bytes_per_param) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [k, f] : points) {
    sx += k;
    sy += f;
    sxx += static_cast<double>(k) * k;
    sxy += k * f;
  }
  const double n = static_cast<double>(points.size());
  const double denom = n * sxx - sx * sx;
  if (points.size() < 2 || !(std::fabs(denom) > 0.0)) {
    fail(ErrorCode::InvalidConfig, "cost fit needs at least two distinct block counts");
  }
  CostConfig cfg;
  cfg.per_block_flops = (n * sxy - sx * sy) / denom;
  cfg.base_flops = (sy - cfg.per_block_flops * sx) / n;
  cfg.bytes_per_param = bytes_per_param;
  return cfg;
}

CostEstimate estimate_cost(const BlockModel& model, const std::vector<int>& remove, const CostConfig& cfg) {
  for (double v : {cfg.base_flops, cfg.per_block_flops, cfg.bytes_per_param}) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::InvalidConfig, "cost config values must be finite and >= 0");
  }
  std::set<int> removed(remove.begin(), remove.end());
  CostEstimate e;
  e.params_before = model.total_params();
  std::uint64_t removed_params = 0;
  for (int id : removed) removed_params += model.block(id).param_count;
  e.params_after = e.params_before - removed_params;
  const int kept = model.num_blocks() - static_cast<int>(removed.size());
  e.flops_before = cfg.base_flops + cfg.per_block_flops * model.num_blocks();
  e.flops_after = cfg.base_flops + cfg.per_block_flops * kept;
  e.size_bytes_before = static_cast<double>(e.params_before) * cfg.bytes_per_param;
  e.size_bytes_after = static_cast<double>(e.params_after) * cfg.bytes_per_param;
  return e;
}

}  // namespace gardener
