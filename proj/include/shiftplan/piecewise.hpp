#pragma once

// Chord-based piecewise-linear models of the per-step reward (concave, for
// maximization) and of the squared deviation (convex, for the baselines).
// Both interpolate their function at every integer 0..y_max, so an integer
// supply is priced exactly.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shiftplan/domain.hpp"

namespace shiftplan {

/// Slopes closer than this are treated as one line.
inline constexpr double kSlopeMergeTolerance = 1e-12;

struct LinearPiece {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double y) const { return slope * y + intercept; }
};

namespace detail {

template <class Cmp>
void check_pieces(const std::vector<LinearPiece>& pieces, Cmp strictly_ordered, const char* what) {
  if (pieces.empty()) throw std::invalid_argument(std::string(what) + ": needs at least one piece");
  for (const auto& p : pieces)
    if (!std::isfinite(p.slope) || !std::isfinite(p.intercept))
      throw std::invalid_argument(std::string(what) + ": non-finite piece");
  for (std::size_t i = 1; i < pieces.size(); ++i)
    if (!strictly_ordered(pieces[i - 1].slope, pieces[i].slope))
      throw std::invalid_argument(std::string(what) + ": slopes are not strictly monotone");
}

}  // namespace detail

/// Minimum of lines with strictly decreasing slopes.
class ConcavePL {
 public:
  explicit ConcavePL(std::vector<LinearPiece> pieces) : pieces_(std::move(pieces)) {
    detail::check_pieces(pieces_, std::greater<>{}, "ConcavePL");
  }
  const std::vector<LinearPiece>& pieces() const { return pieces_; }

 private:
  std::vector<LinearPiece> pieces_;
};

/// Maximum of lines with strictly increasing slopes.
class ConvexPL {
 public:
  explicit ConvexPL(std::vector<LinearPiece> pieces) : pieces_(std::move(pieces)) {
    detail::check_pieces(pieces_, std::less<>{}, "ConvexPL");
  }
  const std::vector<LinearPiece>& pieces() const { return pieces_; }

 private:
  std::vector<LinearPiece> pieces_;
};

inline double eval_pl(const ConcavePL& pl, double y) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pl.pieces()) best = std::min(best, p(y));
  return best;
}

inline double eval_pl(const ConvexPL& pl, double y) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pl.pieces()) best = std::max(best, p(y));
  return best;
}

namespace detail {

/// Chords of g through (k-1, g(k-1)) and (k, g(k)) for k = 1..y_max, dropping
/// chords whose slope matches the previously kept one.
template <class F>
std::vector<LinearPiece> integer_chords(F&& g, int y_max) {
  std::vector<LinearPiece> pieces;
  double prev = g(0);
  for (int k = 1; k <= y_max; ++k) {
    const double cur = g(k);
    const double slope = cur - prev;
    if (pieces.empty() || std::abs(slope - pieces.back().slope) >= kSlopeMergeTolerance)
      pieces.push_back({slope, cur - slope * k});
    prev = cur;
  }
  return pieces;
}

}  // namespace detail

inline ConcavePL concavify_reward(const RewardParams& p, int y_max) {
  if (y_max < 1) throw std::invalid_argument("concavify_reward: y_max must be >= 1");
  p.validate();
  if (p.demand == 0.0) return ConcavePL({{0.0, 0.0}});
  return ConcavePL(detail::integer_chords([&](int y) { return reward(y, p); }, y_max));
}

/// Chords of (y - target)^2 through the integers 0..y_max.
inline ConvexPL convexify_sq_dev(double target, int y_max) {
  if (y_max < 1) throw std::invalid_argument("convexify_sq_dev: y_max must be >= 1");
  if (!std::isfinite(target)) throw std::invalid_argument("convexify_sq_dev: non-finite target");
  return ConvexPL(detail::integer_chords(
      [&](int y) {
        const double dev = y - target;
        return dev * dev;
      },
      y_max));
}

}  // namespace shiftplan
