#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wyckoff/random.hpp"

namespace wyckoff {

enum class Phase { TR, ST };

std::string_view to_string(Phase p);
/// Accepts "TR"/"ST" in any letter case; throws std::invalid_argument otherwise.
Phase parse_phase(std::string_view s);

/// One labeled pattern. `values` are price-like points in [0, 100].
/// `anchors` holds the generator's underlying swing values and is empty once
/// a sample has been read back from disk.
struct PatternSample {
  int label = 0;
  std::vector<double> values;
  std::vector<double> anchors;
};

struct Dataset {
  Phase phase = Phase::TR;
  std::size_t n_features = 4;
  std::vector<PatternSample> samples;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kTrFeatures = 4;
inline constexpr std::size_t kStFeatures = 10;

namespace synth {

/// Secondary-test generator knobs.
struct StParams {
  double gauss_sigma = 5.0;
  std::size_t fillers_per_gap = 2;
  std::size_t up_fillers = 1;
};

struct GenSpec {
  Phase phase = Phase::TR;
  std::size_t n_valid = 0;
  std::size_t n_invalid = 0;
  std::uint64_t seed = 0;
  StParams st;
};

/// Pattern width produced for a phase: 4 for TR; for ST it follows from the
/// filler counts (10 at the defaults).
std::size_t feature_count(Phase phase, const StParams& st = {});

/// Trading-range sample. The valid branch draws p1 ~ U(0,100),
/// p2 ~ U(0,p1), p3 ~ U(p2,p1), p4 ~ U(p2,p3), redrawing the tuple on
/// zero-probability ties so that p2 < p4 < p3 < p1 holds strictly. The
/// invalid branch draws four iid U(0,100) values and relabels the sample
/// as valid when they happen to satisfy rules::tr_valid.
PatternSample gen_tr_sample(Rng& rng, bool valid);

/// Secondary-test sample (always label 1): p1 ~ U(0,100), p2 ~ U(0,p1),
/// p3 and p4 ~ N(p2, sigma) clamped to [0,p1]; values are
/// filler([p1, p2] ++ up_filler([p3, p4], p1)).
PatternSample gen_st_sample(Rng& rng, const StParams& params = {});

/// Negative secondary-test sample: `width` iid U(0,100) values, label 0.
PatternSample gen_st_negative(Rng& rng, std::size_t width = kStFeatures);

/// Emits each anchor followed by `fillers_per_gap` uniform draws between it
/// and the next anchor; the last anchor closes the sequence.
/// Throws std::invalid_argument for fewer than two anchors.
std::vector<double> filler(Rng& rng, std::span<const double> anchors,
                           std::size_t fillers_per_gap = 2);

/// For each i in [0, n-2]: values[i], then `count` draws uniform between
/// values[i] and `upper_limit`. The final input element is not emitted.
/// Throws std::invalid_argument for fewer than two values.
std::vector<double> up_filler(Rng& rng, std::span<const double> values, double upper_limit,
                              std::size_t count = 1);

/// All valid-branch samples, then all invalid-branch samples, from one stream
/// seeded by `spec.seed`.
Dataset gen_dataset(const GenSpec& spec);

}  // namespace synth

/// Dataset CSV text: `# phase=<TR|ST> seed=<u64>`, header `label,x1..xN`,
/// one row per sample with values at 17 significant digits.
std::string format_dataset(const Dataset& d);
Dataset parse_dataset(std::string_view text);

void write_dataset(const Dataset& d, const std::filesystem::path& path);
/// Throws ParseError (with line number) on any schema violation, DataError
/// if the file cannot be opened.
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace wyckoff
