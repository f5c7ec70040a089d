#pragma once

// Per-block weight statistics. Everything here is a pure function of the
// values handed in; the accumulators exist so a block can be consumed one
// tensor at a time and merged deterministically.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gardener {

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;

  bool degenerate() const noexcept { return !(hi > lo); }
  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

/// K equal-width bins over [lo, hi]. `magnitude[i]` is the sum of |w| over
/// the values that landed in bin i; p(i) = counts[i] / total.
struct Histogram {
  std::vector<std::uint64_t> counts;
  std::vector<double> edges;
  std::vector<double> magnitude;
  std::uint64_t total = 0;

  int bins() const noexcept { return static_cast<int>(counts.size()); }
};

/// Tracks min/max. Throws NonFiniteWeight on NaN or infinity.
class RangeAccumulator {
 public:
  void add(std::span<const double> values);
  void merge(const RangeAccumulator& other) noexcept;

  std::uint64_t count() const noexcept { return count_; }
  /// Throws EmptyInput when nothing was added.
  ValueRange range() const;

 private:
  std::uint64_t count_ = 0;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Bin assignment: floor((v - lo) / (hi - lo) * K), with v == hi going to
/// the last bin. A degenerate range sends everything to bin 0.
class HistogramAccumulator {
 public:
  HistogramAccumulator(ValueRange range, int bins);

  void add(std::span<const double> values);
  void merge(const HistogramAccumulator& other);

  int bin_of(double v) const noexcept;
  const Histogram& histogram() const noexcept { return hist_; }

 private:
  ValueRange range_;
  double scale_ = 0.0;
  Histogram hist_;
};

/// Bins over [min(values), max(values)]. Errors: EmptyInput,
/// InvalidBinCount, NonFiniteWeight.
Histogram build_histogram(std::span<const double> values, int bins);
Histogram build_histogram(std::span<const double> values, int bins, ValueRange range);

/// Shannon entropy (nats) of an arbitrary non-negative mass vector, with
/// 0 log 0 taken as 0. Returns 0 when the total mass is zero.
double entropy_of(std::span<const double> masses) noexcept;

/// Weight-number entropy: -sum p(i) ln p(i) with p(i) = counts[i] / total.
double weight_number_entropy(const Histogram& hist) noexcept;

/// Entropy of q(i) = magnitude[i] / sum(magnitude). Throws
/// DegenerateMagnitude when every bin carries zero magnitude.
double magnitude_entropy(const Histogram& hist);
double magnitude_weighted_entropy(std::span<const double> values, int bins);

/// One-vs-rest mutual information I(bin; in_block) in nats, from two
/// histograms built over the same range and bin count.
double mutual_information_counts(const Histogram& in_block, const Histogram& rest);
/// Same, with cells weighted by summed |w| instead of counts.
double mutual_information_magnitude(const Histogram& in_block, const Histogram& rest);

/// Both sequences share one K-bin histogram spanning their union range.
double mi_number(std::span<const double> block, std::span<const double> rest, int bins);
double mi_value(std::span<const double> block, std::span<const double> rest, int bins);

struct BasicStats {
  std::uint64_t count = 0;
  double mean_abs = 0.0;
  double variance = 0.0;  // population
  double std = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double max_abs = 0.0;
  /// Pearson (non-excess) m4 / m2^2; empty when the variance is zero.
  std::optional<double> kurtosis;
  std::uint64_t zero_count = 0;
  // Signed counterparts of mean_abs / max_abs.
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;

  /// Throws DegenerateKurtosis when the variance is zero.
  double kurtosis_or_throw() const;
};

/// Mergeable central moments up to fourth order (pairwise update).
class MomentAccumulator {
 public:
  void add(std::span<const double> values);
  void merge(const MomentAccumulator& other) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  /// Throws EmptyInput when nothing was added.
  BasicStats stats() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
  double sum_abs_ = 0.0;
  double sum_sq_ = 0.0;
  double max_abs_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
  std::uint64_t zeros_ = 0;
};

/// Errors: EmptyInput, NonFiniteWeight.
BasicStats basic_stats(std::span<const double> values);

/// (x - min) / (max - min); all 0.5 when max == min. Throws
/// NormalizationUndefined for fewer than two scores.
std::vector<double> minmax_normalize(std::span<const double> scores);

enum class LogBase { Nat, Bit };

double from_nats(double nats, LogBase base) noexcept;

}  // namespace gardener
