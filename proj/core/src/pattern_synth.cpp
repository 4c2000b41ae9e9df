#include "wyckoff/pattern_synth.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

#include "wyckoff/errors.hpp"
#include "wyckoff/text_io.hpp"
#include "wyckoff/wyckoff_rules.hpp"

namespace wyckoff {

std::string_view to_string(Phase p) { return p == Phase::TR ? "TR" : "ST"; }

Phase parse_phase(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "TR") return Phase::TR;
  if (up == "ST") return Phase::ST;
  throw std::invalid_argument("unknown phase '" + std::string(s) + "' (expected TR or ST)");
}

namespace synth {

namespace {

constexpr double kPriceMax = 100.0;

}  // namespace

std::size_t feature_count(Phase phase, const StParams& st) {
  if (phase == Phase::TR) return kTrFeatures;
  // anchors: p1, p2, then up_filler([p3, p4]) -> p3 plus up_fillers draws
  const std::size_t anchors = 3 + st.up_fillers;
  return (anchors - 1) * (1 + st.fillers_per_gap) + 1;
}

PatternSample gen_tr_sample(Rng& rng, bool valid) {
  PatternSample s;
  if (valid) {
    double p1, p2, p3, p4;
    do {
      p1 = rng.uniform(0.0, kPriceMax);
      p2 = rng.uniform(0.0, p1);
      p3 = rng.uniform(p2, p1);
      p4 = rng.uniform(p2, p3);
    } while (!(p2 < p4 && p4 < p3 && p3 < p1));
    s.label = 1;
    s.values = {p1, p2, p3, p4};
  } else {
    s.values.resize(kTrFeatures);
    for (double& v : s.values) v = rng.uniform(0.0, kPriceMax);
    s.label = rules::tr_valid(s.values) ? 1 : 0;
  }
  s.anchors = s.values;
  return s;
}

std::vector<double> filler(Rng& rng, std::span<const double> anchors,
                           std::size_t fillers_per_gap) {
  if (anchors.size() < 2) {
    throw std::invalid_argument("filler: need at least 2 anchors, got " +
                                std::to_string(anchors.size()));
  }
  std::vector<double> out;
  out.reserve((anchors.size() - 1) * (1 + fillers_per_gap) + 1);
  for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
    out.push_back(anchors[i]);
    for (std::size_t f = 0; f < fillers_per_gap; ++f) {
      out.push_back(rng.uniform(anchors[i], anchors[i + 1]));
    }
  }
  out.push_back(anchors.back());
  return out;
}

std::vector<double> up_filler(Rng& rng, std::span<const double> values, double upper_limit,
                              std::size_t count) {
  if (values.size() < 2) {
    throw std::invalid_argument("up_filler: need at least 2 values, got " +
                                std::to_string(values.size()));
  }
  std::vector<double> out;
  out.reserve((values.size() - 1) * (1 + count));
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    out.push_back(values[i]);
    for (std::size_t f = 0; f < count; ++f) out.push_back(rng.uniform(values[i], upper_limit));
  }
  return out;
}

PatternSample gen_st_sample(Rng& rng, const StParams& params) {
  if (!(params.gauss_sigma > 0.0)) {
    throw std::invalid_argument("gen_st_sample: gauss_sigma must be positive");
  }
  const double p1 = rng.uniform(0.0, kPriceMax);
  const double p2 = rng.uniform(0.0, p1);
  const double p3 = std::min(std::max(0.0, rng.gauss(p2, params.gauss_sigma)), p1);
  const double p4 = std::min(std::max(0.0, rng.gauss(p2, params.gauss_sigma)), p1);

  std::vector<double> anchors{p1, p2};
  const double lows[] = {p3, p4};
  const auto tail = up_filler(rng, lows, p1, params.up_fillers);
  anchors.insert(anchors.end(), tail.begin(), tail.end());

  PatternSample s;
  s.label = 1;
  s.values = filler(rng, anchors, params.fillers_per_gap);
  s.anchors = {p1, p2, p3, p4};
  return s;
}

PatternSample gen_st_negative(Rng& rng, std::size_t width) {
  PatternSample s;
  s.label = 0;
  s.values.resize(width);
  for (double& v : s.values) v = rng.uniform(0.0, kPriceMax);
  s.anchors = s.values;
  return s;
}

Dataset gen_dataset(const GenSpec& spec) {
  if (spec.phase == Phase::ST && !(spec.st.gauss_sigma > 0.0)) {
    throw std::invalid_argument("gen_dataset: gauss_sigma must be positive");
  }
  Dataset d;
  d.phase = spec.phase;
  d.n_features = feature_count(spec.phase, spec.st);
  d.seed = spec.seed;
  d.samples.reserve(spec.n_valid + spec.n_invalid);

  Rng rng(spec.seed);
  if (spec.phase == Phase::TR) {
    for (std::size_t i = 0; i < spec.n_valid; ++i) d.samples.push_back(gen_tr_sample(rng, true));
    for (std::size_t i = 0; i < spec.n_invalid; ++i) d.samples.push_back(gen_tr_sample(rng, false));
  } else {
    for (std::size_t i = 0; i < spec.n_valid; ++i) d.samples.push_back(gen_st_sample(rng, spec.st));
    for (std::size_t i = 0; i < spec.n_invalid; ++i) {
      d.samples.push_back(gen_st_negative(rng, d.n_features));
    }
  }
  return d;
}

}  // namespace synth

std::string format_dataset(const Dataset& d) {
  std::string out;
  out.reserve(64 + d.samples.size() * (d.n_features * 24 + 4));
  out += "# phase=";
  out += to_string(d.phase);
  out += " seed=";
  out += std::to_string(d.seed);
  out += "\nlabel";
  for (std::size_t j = 1; j <= d.n_features; ++j) out += ",x" + std::to_string(j);
  out += '\n';
  for (const auto& s : d.samples) {
    if (s.values.size() != d.n_features) {
      throw ShapeError("format_dataset: sample has " + std::to_string(s.values.size()) +
                       " values, dataset declares " + std::to_string(d.n_features));
    }
    out += s.label ? '1' : '0';
    for (double v : s.values) {
      out += ',';
      out += text::format_real(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

void parse_comment(std::string_view line, Dataset& d) {
  if (line.empty() || line.front() != '#') {
    throw ParseError(1, "expected '# phase=<TR|ST> seed=<u64>' comment line");
  }
  line.remove_prefix(1);
  bool have_phase = false;
  bool have_seed = false;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    auto end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    const auto token = line.substr(pos, end - pos);
    pos = end;
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) throw ParseError(1, "malformed key=value token");
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    if (key == "phase") {
      try {
        d.phase = parse_phase(value);
      } catch (const std::invalid_argument& e) {
        throw ParseError(1, e.what());
      }
      have_phase = true;
    } else if (key == "seed") {
      const auto res = std::from_chars(value.data(), value.data() + value.size(), d.seed);
      if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        throw ParseError(1, "seed is not an unsigned 64-bit integer");
      }
      have_seed = true;
    }
  }
  if (!have_phase) throw ParseError(1, "missing phase= in comment line");
  if (!have_seed) throw ParseError(1, "missing seed= in comment line");
}

}  // namespace

Dataset parse_dataset(std::string_view text) {
  const auto lines = text::split_lines(text);
  if (lines.empty()) throw ParseError(1, "empty file");
  Dataset d;
  parse_comment(lines[0], d);

  if (lines.size() < 2) throw ParseError(2, "missing header line");
  const auto header = text::split_csv(lines[1]);
  if (header.empty() || header[0] != "label") throw ParseError(2, "header must start with 'label'");
  const std::size_t width = header.size() - 1;
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != "x" + std::to_string(j)) {
      throw ParseError(2, "header column " + std::to_string(j + 1) + " should be x" +
                              std::to_string(j));
    }
  }
  if (d.phase == Phase::TR && width != kTrFeatures) {
    throw ParseError(2, "phase TR expects " + std::to_string(kTrFeatures) +
                            " value columns, header has " + std::to_string(width));
  }
  if (width < 2) throw ParseError(2, "need at least 2 value columns");
  d.n_features = width;

  for (std::size_t li = 2; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    if (lines[li].empty()) continue;
    const auto cells = text::split_csv(lines[li]);
    if (cells.size() != width + 1) {
      throw ParseError(line_no, "expected " + std::to_string(width) + " values, got " +
                                    std::to_string(cells.size() - 1));
    }
    PatternSample s;
    if (cells[0] == "1") {
      s.label = 1;
    } else if (cells[0] == "0") {
      s.label = 0;
    } else {
      throw ParseError(line_no, "label '" + std::string(cells[0]) + "' is not 0 or 1");
    }
    s.values.reserve(width);
    for (std::size_t j = 1; j < cells.size(); ++j) {
      const auto v = text::parse_real(cells[j]);
      if (!v) {
        throw ParseError(line_no, "column x" + std::to_string(j) + ": non-numeric cell '" +
                                      std::string(cells[j]) + "'");
      }
      s.values.push_back(*v);
    }
    d.samples.push_back(std::move(s));
  }
  return d;
}

void write_dataset(const Dataset& d, const std::filesystem::path& path) {
  text::write_file(path, format_dataset(d));
}

Dataset read_dataset(const std::filesystem::path& path) {
  return parse_dataset(text::read_file(path));
}

}  // namespace wyckoff
