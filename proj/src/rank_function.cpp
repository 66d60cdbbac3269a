#include "substrcard/rank_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace substrcard {
namespace {

using i128 = __int128;

// Slope bound dy/dx with dx > 0.
struct Slope {
  i128 dy;
  i128 dx;
};

bool less(const Slope& a, const Slope& b) { return a.dy * b.dx < b.dy * a.dx; }

// round(num / den) with ties to even; num >= 0, den > 0.
std::uint64_t div_round_even(i128 num, i128 den) {
  i128 q = num / den;
  const i128 r2 = 2 * (num % den);
  if (r2 > den || (r2 == den && (q & 1))) ++q;
  return static_cast<std::uint64_t>(q);
}

}  // namespace

RankFunction RankFunction::linear(double slope, double intercept, Knot first,
                                  Knot last) {
  RankFunction f;
  f.kind_ = FitKind::kLinear;
  f.slope_ = slope;
  f.intercept_ = intercept;
  f.first_ = first;
  f.last_ = last;
  return f;
}

RankFunction RankFunction::spline(std::vector<Knot> knots) {
  if (knots.empty()) throw std::invalid_argument("spline needs a knot");
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (knots[k].row <= knots[k - 1].row || knots[k].rank < knots[k - 1].rank)
      throw std::invalid_argument("spline knots are not monotone");
  }
  RankFunction f;
  f.kind_ = FitKind::kSpline;
  f.first_ = knots.front();
  f.last_ = knots.back();
  f.knots_ = std::move(knots);
  return f;
}

std::uint64_t RankFunction::evaluate(std::uint64_t i) const {
  const std::uint64_t floor_rank = first_.rank > 0 ? first_.rank - 1 : 0;
  if (kind_ == FitKind::kLinear) {
    const double v = std::nearbyint(slope_ * static_cast<double>(i) + intercept_);
    if (!(v > 0.0)) return 0;
    return std::min(static_cast<std::uint64_t>(v), last_.rank);
  }
  if (i < first_.row) return floor_rank;
  if (i >= last_.row) return last_.rank;
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), i,
                             [](std::uint64_t x, const Knot& k) { return x < k.row; });
  const Knot& b = *hi;
  const Knot& a = *(hi - 1);
  if (i == a.row) return a.rank;
  const std::uint64_t v =
      a.rank + div_round_even(static_cast<i128>(b.rank - a.rank) * (i - a.row),
                              static_cast<i128>(b.row - a.row));
  return std::clamp(v, floor_rank, last_.rank);
}

RankFunction fit_linear(std::span<const LTriple> triples) {
  if (triples.empty()) throw std::invalid_argument("fit_linear: no triples");
  const Knot first{triples.front().row, triples.front().rank};
  const Knot last{triples.back().row, triples.back().rank};
  if (triples.size() == 1)
    return RankFunction::linear(0.0, static_cast<double>(first.rank), first, last);
  // Centered sums keep the normal equations well conditioned.
  const double n = static_cast<double>(triples.size());
  double mean_x = 0, mean_y = 0;
  for (const auto& t : triples) {
    mean_x += static_cast<double>(t.row);
    mean_y += static_cast<double>(t.rank);
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0, sxy = 0;
  for (const auto& t : triples) {
    const double dx = static_cast<double>(t.row) - mean_x;
    sxx += dx * dx;
    sxy += dx * (static_cast<double>(t.rank) - mean_y);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  return RankFunction::linear(slope, mean_y - slope * mean_x, first, last);
}

std::vector<Knot> greedy_spline(std::span<const Knot> points,
                                std::uint64_t epsilon) {
  std::vector<Knot> knots;
  if (points.empty()) return knots;
  const i128 eps = epsilon;
  Knot anchor = points.front();
  knots.push_back(anchor);
  bool open = false;  // corridor bounds valid
  Slope lo{0, 1}, hi{0, 1};
  for (std::size_t j = 1; j < points.size(); ++j) {
    const Knot& p = points[j];
    Slope s{static_cast<i128>(p.rank) - static_cast<i128>(anchor.rank),
            static_cast<i128>(p.row) - static_cast<i128>(anchor.row)};
    if (open && (less(s, lo) || less(hi, s))) {
      anchor = points[j - 1];
      knots.push_back(anchor);
      open = false;
      s = {static_cast<i128>(p.rank) - static_cast<i128>(anchor.rank),
           static_cast<i128>(p.row) - static_cast<i128>(anchor.row)};
    }
    const Slope p_lo{s.dy - eps, s.dx};
    const Slope p_hi{s.dy + eps, s.dx};
    if (!open) {
      lo = p_lo;
      hi = p_hi;
      open = true;
    } else {
      if (less(lo, p_lo)) lo = p_lo;
      if (less(p_hi, hi)) hi = p_hi;
    }
  }
  if (!(points.back() == knots.back())) knots.push_back(points.back());
  return knots;
}

RankFunction fit_spline(std::span<const LTriple> triples, std::uint64_t epsilon) {
  if (triples.empty()) throw std::invalid_argument("fit_spline: no triples");
  std::vector<Knot> points;
  points.reserve(triples.size() * 2);
  points.push_back({triples.front().row, triples.front().rank});
  for (std::size_t k = 1; k < triples.size(); ++k) {
    const LTriple& prev = triples[k - 1];
    const LTriple& cur = triples[k];
    if (cur.row <= prev.row || cur.rank < prev.rank)
      throw std::invalid_argument("fit_spline: triples are not ordered");
    if (cur.rank == prev.rank + 1 && cur.row > prev.row + 1)
      points.push_back({cur.row - 1, prev.rank});
    points.push_back({cur.row, cur.rank});
  }
  return RankFunction::spline(greedy_spline(points, epsilon));
}

}  // namespace substrcard
