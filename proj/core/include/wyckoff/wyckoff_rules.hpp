#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wyckoff::rules {

/// Trading-range structure check on four swing values [p1, p2, p3, p4]:
/// p1 > p2, p2 < p3, p4 < p3, p3 < p1 and p4 > p2. Equivalent to the total
/// order p2 < p4 < p3 < p1. Throws std::invalid_argument unless exactly four
/// finite values are given.
bool tr_valid(std::span<const double> p);

enum class SwingKind { High, Low };

struct SwingPoint {
  std::size_t index = 0;
  double price = 0.0;
  SwingKind kind = SwingKind::High;

  friend bool operator==(const SwingPoint&, const SwingPoint&) = default;
};

struct SwingSeries {
  std::vector<SwingPoint> points;
  std::size_t source_len = 0;
};

/// Swing highs and lows by a symmetric strict-extremum window of half-width
/// `k`: index i is a HIGH when prices[i] exceeds every other price in
/// [i-k, i+k], a LOW symmetrically. Only indices with a full window are
/// candidates, so plateaus and series ends never produce swings. A run of
/// consecutive same-kind candidates collapses to its most extreme member
/// (earliest on ties), which makes the output alternate. A swing that does
/// not clear the opposite-kind swing before it (a LOW at or above the
/// preceding HIGH, or vice versa) removes that earlier swing and merges into
/// the run before it, so every HIGH is above both neighbouring LOWs.
///
/// Throws std::invalid_argument if k == 0 or prices.size() < 2k+1.
SwingSeries extract_swings(std::span<const double> prices, std::size_t k);

struct SwingWindow {
  std::vector<double> values;   // swing prices in order
  std::size_t end_index = 0;    // source index of the last swing
};

/// Every run of `width` consecutive swing prices, sliding by one swing.
/// Fewer swings than `width` gives an empty list.
std::vector<SwingWindow> windows_of_lows_highs(const SwingSeries& s, std::size_t width);

}  // namespace wyckoff::rules
