#include "wyckoff/wyckoff_rules.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wyckoff::rules {

bool tr_valid(std::span<const double> p) {
  if (p.size() != 4) {
    throw std::invalid_argument("tr_valid: expected 4 values, got " + std::to_string(p.size()));
  }
  for (double v : p) {
    if (!std::isfinite(v)) throw std::invalid_argument("tr_valid: non-finite value");
  }
  const double p1 = p[0], p2 = p[1], p3 = p[2], p4 = p[3];
  return p1 > p2 && p2 < p3 && p4 < p3 && p3 < p1 && p4 > p2;
}

namespace {

// True when `a` lies strictly past `b` in a's own direction: above it for a
// HIGH, below it for a LOW.
bool beyond(const SwingPoint& a, const SwingPoint& b) {
  return a.kind == SwingKind::High ? a.price > b.price : a.price < b.price;
}

}  // namespace

SwingSeries extract_swings(std::span<const double> prices, std::size_t k) {
  if (k == 0) throw std::invalid_argument("extract_swings: window k must be >= 1");
  if (prices.size() < 2 * k + 1) {
    throw std::invalid_argument("extract_swings: series of length " +
                                std::to_string(prices.size()) + " is too short for k=" +
                                std::to_string(k));
  }

  SwingSeries out;
  out.source_len = prices.size();

  for (std::size_t i = k; i + k < prices.size(); ++i) {
    bool is_high = true;
    bool is_low = true;
    for (std::size_t j = i - k; j <= i + k && (is_high || is_low); ++j) {
      if (j == i) continue;
      if (!(prices[i] > prices[j])) is_high = false;
      if (!(prices[i] < prices[j])) is_low = false;
    }
    if (!is_high && !is_low) continue;

    const SwingPoint candidate{i, prices[i], is_high ? SwingKind::High : SwingKind::Low};
    auto& pts = out.points;
    // A swing must clear the opposite-kind swing before it; when the newcomer
    // does not, that earlier swing is dropped and the newcomer joins the
    // same-kind run preceding it.
    if (!pts.empty() && pts.back().kind != candidate.kind && !beyond(candidate, pts.back())) {
      pts.pop_back();
    }
    if (!pts.empty() && pts.back().kind == candidate.kind) {
      if (beyond(candidate, pts.back())) pts.back() = candidate;
      continue;
    }
    pts.push_back(candidate);
  }
  return out;
}

std::vector<SwingWindow> windows_of_lows_highs(const SwingSeries& s, std::size_t width) {
  std::vector<SwingWindow> windows;
  if (width == 0) throw std::invalid_argument("windows_of_lows_highs: width must be >= 1");
  if (s.points.size() < width) return windows;
  windows.reserve(s.points.size() - width + 1);
  for (std::size_t start = 0; start + width <= s.points.size(); ++start) {
    SwingWindow w;
    w.values.reserve(width);
    for (std::size_t j = start; j < start + width; ++j) w.values.push_back(s.points[j].price);
    w.end_index = s.points[start + width - 1].index;
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace wyckoff::rules
