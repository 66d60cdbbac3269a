#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "substrcard/ebwt.hpp"

namespace substrcard {

/// A point (row, rank) of a rank step function.
struct Knot {
  std::uint64_t row = 0;
  std::uint64_t rank = 0;

  friend bool operator==(const Knot&, const Knot&) = default;
};

enum class FitKind : std::uint8_t { kLinear = 0, kSpline = 1 };

/// Learned approximation of rank(c, i) for one character over one segment.
///
/// Spline kind: piecewise-linear through `knots`, exact at every knot.
/// Linear kind: least-squares line `slope * i + intercept`.
/// Both keep the first and last fitted triples as their support.
class RankFunction {
 public:
  RankFunction() = default;

  static RankFunction linear(double slope, double intercept, Knot first,
                             Knot last);
  /// Knots must be strictly increasing in row and non-decreasing in rank.
  static RankFunction spline(std::vector<Knot> knots);

  FitKind kind() const { return kind_; }
  double slope() const { return slope_; }
  double intercept() const { return intercept_; }
  std::span<const Knot> knots() const { return knots_; }
  Knot first() const { return first_; }
  Knot last() const { return last_; }
  std::size_t segment_count() const {
    return kind_ == FitKind::kLinear ? 1
                                     : (knots_.size() > 1 ? knots_.size() - 1 : 1);
  }

  /// Estimated rank at row `i`. Below the support this is first().rank - 1,
  /// above it last().rank. Inside, spline interpolation is rounded half to
  /// even and clamped to [first().rank - 1, last().rank]; the linear form is
  /// rounded and clamped to [0, last().rank].
  std::uint64_t evaluate(std::uint64_t i) const;

  friend bool operator==(const RankFunction&, const RankFunction&) = default;

 private:
  FitKind kind_ = FitKind::kSpline;
  double slope_ = 0.0;
  double intercept_ = 0.0;
  Knot first_;
  Knot last_;
  std::vector<Knot> knots_;
};

/// Least-squares line through (row, rank). A single triple gives slope 0.
RankFunction fit_linear(std::span<const LTriple> triples);

/// Error-bounded greedy spline over the rank step function implied by
/// `triples` (ascending in row and rank). Between two triples whose ranks
/// differ by one the rank is flat until the later row, so the corner
/// (later.row - 1, earlier.rank) is fitted too. The result satisfies
/// |evaluate(i) - rank(i)| <= epsilon at every triple and at every row between
/// consecutive triples of unit rank gap.
RankFunction fit_spline(std::span<const LTriple> triples, std::uint64_t epsilon);

/// Spline corridor over raw points (ascending row, non-decreasing rank).
/// Every point is within epsilon of the result; first and last are knots.
std::vector<Knot> greedy_spline(std::span<const Knot> points,
                                std::uint64_t epsilon);

inline std::uint64_t evaluate(const RankFunction& f, std::uint64_t i) {
  return f.evaluate(i);
}

}  // namespace substrcard
