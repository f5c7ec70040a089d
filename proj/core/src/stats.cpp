#include "gardener/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gardener/error.hpp"

namespace gardener {
namespace {

void check_bins(int bins) {
  if (bins < 1) fail(ErrorCode::InvalidBinCount, "bin count must be >= 1, got " + std::to_string(bins));
}

// I(X; Z) for a K x 2 table given as two columns of cell masses.
double mutual_information_from_cells(std::span<const double> in, std::span<const double> out) {
  double total_in = 0.0;
  double total_out = 0.0;
  for (double m : in) total_in += m;
  for (double m : out) total_out += m;
  const double total = total_in + total_out;
  if (!(total > 0.0)) return 0.0;
  const double pz_in = total_in / total;
  const double pz_out = total_out / total;
  double mi = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double px = (in[i] + out[i]) / total;
    if (in[i] > 0.0) {
      const double p = in[i] / total;
      mi += p * std::log(p / (px * pz_in));
    }
    if (out[i] > 0.0) {
      const double p = out[i] / total;
      mi += p * std::log(p / (px * pz_out));
    }
  }
  return std::max(mi, 0.0);
}

std::vector<double> as_masses(const std::vector<std::uint64_t>& counts) {
  return {counts.begin(), counts.end()};
}

void require_same_binning(const Histogram& a, const Histogram& b) {
  if (a.bins() != b.bins() || a.edges != b.edges) {
    fail(ErrorCode::InvalidArgument, "mutual information needs both histograms over the same bins");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void RangeAccumulator::add(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteWeight, "encountered a NaN or infinite weight");
    if (count_ == 0) {
      lo_ = hi_ = v;
    } else {
      lo_ = std::min(lo_, v);
      hi_ = std::max(hi_, v);
    }
    ++count_;
  }
}

void RangeAccumulator::merge(const RangeAccumulator& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  lo_ = std::min(lo_, other.lo_);
  hi_ = std::max(hi_, other.hi_);
  count_ += other.count_;
}

ValueRange RangeAccumulator::range() const {
  if (count_ == 0) fail(ErrorCode::EmptyInput, "range of an empty sequence");
  return {lo_, hi_};
}

// ---------------------------------------------------------------------------

HistogramAccumulator::HistogramAccumulator(ValueRange range, int bins) : range_(range) {
  check_bins(bins);
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || range.hi < range.lo) {
    fail(ErrorCode::InvalidArgument, "histogram range must be finite with lo <= hi");
  }
  const auto k = static_cast<std::size_t>(bins);
  hist_.counts.assign(k, 0);
  hist_.magnitude.assign(k, 0.0);
  hist_.edges.resize(k + 1);
  const double width = range.hi - range.lo;
  for (std::size_t i = 0; i <= k; ++i) {
    hist_.edges[i] = range.lo + width * static_cast<double>(i) / static_cast<double>(k);
  }
  hist_.edges[k] = range.hi;
  scale_ = range.degenerate() ? 0.0 : static_cast<double>(bins) / width;
}

int HistogramAccumulator::bin_of(double v) const noexcept {
  if (scale_ == 0.0) return 0;
  const double pos = (v - range_.lo) * scale_;
  const int last = hist_.bins() - 1;
  if (!(pos > 0.0)) return 0;
  if (pos >= static_cast<double>(last)) return last;
  return static_cast<int>(pos);
}

void HistogramAccumulator::add(std::span<const double> values) {
  for (double v : values) {
    if (std::isnan(v)) fail(ErrorCode::NonFiniteWeight, "encountered a NaN weight");
    const auto i = static_cast<std::size_t>(bin_of(v));
    ++hist_.counts[i];
    hist_.magnitude[i] += std::fabs(v);
  }
  hist_.total += values.size();
}

void HistogramAccumulator::merge(const HistogramAccumulator& other) {
  if (!(other.range_ == range_) || other.hist_.bins() != hist_.bins()) {
    fail(ErrorCode::InvalidArgument, "cannot merge histograms over different bins");
  }
  for (std::size_t i = 0; i < hist_.counts.size(); ++i) {
    hist_.counts[i] += other.hist_.counts[i];
    hist_.magnitude[i] += other.hist_.magnitude[i];
  }
  hist_.total += other.hist_.total;
}

Histogram build_histogram(std::span<const double> values, int bins) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "cannot build a histogram of no values");
  check_bins(bins);
  RangeAccumulator range;
  range.add(values);
  return build_histogram(values, bins, range.range());
}

Histogram build_histogram(std::span<const double> values, int bins, ValueRange range) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "cannot build a histogram of no values");
  HistogramAccumulator acc(range, bins);
  acc.add(values);
  return acc.histogram();
}

// ---------------------------------------------------------------------------

double entropy_of(std::span<const double> masses) noexcept {
  double total = 0.0;
  for (double m : masses) total += m;
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (double m : masses) {
    if (m > 0.0) {
      const double p = m / total;
      h -= p * std::log(p);
    }
  }
  return std::max(h, 0.0);
}

double weight_number_entropy(const Histogram& hist) noexcept {
  if (hist.total == 0) return 0.0;
  const double total = static_cast<double>(hist.total);
  double h = 0.0;
  for (auto c : hist.counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / total;
      h -= p * std::log(p);
    }
  }
  return std::max(h, 0.0);
}

double magnitude_entropy(const Histogram& hist) {
  double total = 0.0;
  for (double m : hist.magnitude) total += m;
  if (!(total > 0.0)) fail(ErrorCode::DegenerateMagnitude, "every weight is zero; magnitude mass undefined");
  return entropy_of(hist.magnitude);
}

double magnitude_weighted_entropy(std::span<const double> values, int bins) {
  return magnitude_entropy(build_histogram(values, bins));
}

double mutual_information_counts(const Histogram& in_block, const Histogram& rest) {
  require_same_binning(in_block, rest);
  const auto in = as_masses(in_block.counts);
  const auto out = as_masses(rest.counts);
  return mutual_information_from_cells(in, out);
}

double mutual_information_magnitude(const Histogram& in_block, const Histogram& rest) {
  require_same_binning(in_block, rest);
  double total = 0.0;
  for (double m : in_block.magnitude) total += m;
  for (double m : rest.magnitude) total += m;
  if (!(total > 0.0)) fail(ErrorCode::DegenerateMagnitude, "every weight is zero; magnitude mass undefined");
  return mutual_information_from_cells(in_block.magnitude, rest.magnitude);
}

namespace {

std::pair<Histogram, Histogram> shared_histograms(std::span<const double> block, std::span<const double> rest,
                                                  int bins) {
  if (block.empty() || rest.empty()) fail(ErrorCode::EmptyInput, "mutual information needs both sides non-empty");
  check_bins(bins);
  RangeAccumulator range;
  range.add(block);
  range.add(rest);
  return {build_histogram(block, bins, range.range()), build_histogram(rest, bins, range.range())};
}

}  // namespace

double mi_number(std::span<const double> block, std::span<const double> rest, int bins) {
  const auto [in, out] = shared_histograms(block, rest, bins);
  return mutual_information_counts(in, out);
}

double mi_value(std::span<const double> block, std::span<const double> rest, int bins) {
  const auto [in, out] = shared_histograms(block, rest, bins);
  return mutual_information_magnitude(in, out);
}

// ---------------------------------------------------------------------------

double BasicStats::kurtosis_or_throw() const {
  if (!kurtosis) fail(ErrorCode::DegenerateKurtosis, "kurtosis undefined for zero variance");
  return *kurtosis;
}

void MomentAccumulator::add(std::span<const double> values) {
  if (values.empty()) return;
  // Exact two-pass moments for this chunk, then a pairwise merge.
  MomentAccumulator chunk;
  chunk.n_ = values.size();
  double sum = 0.0;
  chunk.min_ = chunk.max_ = values.front();
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteWeight, "encountered a NaN or infinite weight");
    sum += v;
    const double a = std::fabs(v);
    chunk.sum_abs_ += a;
    chunk.sum_sq_ += v * v;
    chunk.max_abs_ = std::max(chunk.max_abs_, a);
    chunk.min_ = std::min(chunk.min_, v);
    chunk.max_ = std::max(chunk.max_, v);
    if (v == 0.0) ++chunk.zeros_;
  }
  chunk.mean_ = sum / static_cast<double>(chunk.n_);
  for (double v : values) {
    const double d = v - chunk.mean_;
    const double d2 = d * d;
    chunk.m2_ += d2;
    chunk.m3_ += d2 * d;
    chunk.m4_ += d2 * d2;
  }
  merge(chunk);
}

void MomentAccumulator::merge(const MomentAccumulator& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  const double d2 = delta * delta;
  const double d3 = d2 * delta;
  const double d4 = d2 * d2;

  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) + 3.0 * delta * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) + 4.0 * delta * (na * o.m3_ - nb * m3_) / n;

  mean_ += delta * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  n_ += o.n_;
  sum_abs_ += o.sum_abs_;
  sum_sq_ += o.sum_sq_;
  max_abs_ = std::max(max_abs_, o.max_abs_);
  min_ = std::min(min_, o.min_);
  max_ = std::max(max_, o.max_);
  zeros_ += o.zeros_;
}

BasicStats MomentAccumulator::stats() const {
  if (n_ == 0) fail(ErrorCode::EmptyInput, "statistics of an empty sequence");
  const double n = static_cast<double>(n_);
  BasicStats s;
  s.count = n_;
  s.mean_abs = sum_abs_ / n;
  // Rounding in the running mean leaves m2 slightly positive for constant input.
  const bool constant = min_ == max_;
  s.variance = constant ? 0.0 : m2_ / n;
  s.std = std::sqrt(s.variance);
  s.l1 = sum_abs_;
  s.l2 = std::sqrt(sum_sq_);
  s.max_abs = max_abs_;
  if (!constant && m2_ > 0.0) s.kurtosis = n * m4_ / (m2_ * m2_);
  s.zero_count = zeros_;
  s.mean = mean_;
  s.min = min_;
  s.max = max_;
  return s;
}

BasicStats basic_stats(std::span<const double> values) {
  MomentAccumulator acc;
  acc.add(values);
  return acc.stats();
}

std::vector<double> minmax_normalize(std::span<const double> scores) {
  if (scores.size() < 2) {
    fail(ErrorCode::NormalizationUndefined, "min-max normalization needs at least two blocks");
  }
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> out(scores.size(), 0.5);
  if (hi > lo) {
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - lo) / (hi - lo);
  }
  return out;
}

double from_nats(double nats, LogBase base) noexcept {
  return base == LogBase::Bit ? nats / std::numbers::ln2 : nats;
}

}  // namespace gardener
