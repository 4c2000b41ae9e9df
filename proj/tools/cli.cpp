#include "cli.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "wyckoff/checkpoint.hpp"
#include "wyckoff/errors.hpp"
#include "wyckoff/pattern_synth.hpp"
#include "wyckoff/text_io.hpp"
#include "wyckoff/train_eval.hpp"
#include "wyckoff/wyckoff_rules.hpp"

namespace wyckoff::cli {

namespace {

using text::format_real;


struct GenArgs {
  std::string phase = "tr";
  std::size_t n_valid = 0;
  std::size_t n_invalid = 0;
  std::uint64_t seed = 0;
  double sigma = 5.0;
  std::size_t fillers = 2;
  std::size_t up_fillers = 1;
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::size_t epochs = train::TrainConfig{}.epochs;
  double lr = train::TrainConfig{}.learning_rate;
  std::size_t batch = train::TrainConfig{}.batch_size;
  std::uint64_t seed = 0;
  double test_fraction = train::TrainConfig{}.split_test_fraction;
  std::size_t hidden = train::TrainConfig{}.hidden;
  std::size_t threads = 1;
  bool sequential = false;
  bool deterministic = false;
  std::string model_out;
  std::string history_out;
};

struct EvalArgs {
  std::string model;
  std::string data;
  std::string roc_out;
  double threshold = 0.5;
  std::size_t threads = 1;
};

struct ScanArgs {
  std::string ohlc;
  std::string model;
  std::size_t k = 5;
  std::string out;
  std::string phase = "tr";
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  synth::GenSpec spec;
  spec.phase = parse_phase(a.phase);
  spec.n_valid = a.n_valid;
  spec.n_invalid = a.n_invalid;
  spec.seed = a.seed;
  spec.st = {a.sigma, a.fillers, a.up_fillers};
  const Dataset d = synth::gen_dataset(spec);
  write_dataset(d, a.out);
  std::size_t positives = 0;
  for (const auto& s : d.samples) positives += static_cast<std::size_t>(s.label);
  out << "wrote " << d.samples.size() << " samples (" << positives << " labeled valid) to "
      << a.out << "\n";
  return kExitOk;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const Dataset d = read_dataset(a.data);
  train::TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  cfg.split_test_fraction = a.test_fraction;
  cfg.shuffle_seed = a.seed;
  cfg.hidden = a.hidden;
  cfg.sequential = a.sequential;
  cfg.eval_threads = a.deterministic ? 1 : std::max<std::size_t>(1, a.threads);
  cfg.validate();

  // Splitting and initialisation draw from distinct seeds derived from --seed.
  const auto result = train::train(d, cfg, a.seed + 1);
  nn::save_model(result.model, d.phase, a.model_out);
  if (!a.history_out.empty()) train::write_history(result.history, a.history_out);

  const auto& last = result.history.back();
  out << "test_loss=" << format_real(last.test_loss) << " test_acc=" << format_real(last.test_accuracy)
      << "\n";
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto ckpt = nn::load_model(a.model);
  const Dataset d = read_dataset(a.data);
  if (ckpt.model.pattern_width() != d.n_features) {
    throw FeatureMismatch(ckpt.model.pattern_width(), d.n_features);
  }
  if (ckpt.phase != d.phase) {
    throw DataError("phase mismatch: model=" + std::string(to_string(ckpt.phase)) +
                    " data=" + std::string(to_string(d.phase)));
  }
  const auto rep = train::evaluate(ckpt.model, d, a.threshold, std::max<std::size_t>(1, a.threads));
  if (rep.roc.points.empty()) {
    throw DataError("ROC needs at least one sample of each class in '" + a.data + "'");
  }
  if (!a.roc_out.empty()) train::write_roc(rep.roc, a.roc_out);
  const auto& c = rep.confusion;
  out << "loss=" << format_real(rep.loss) << " acc=" << format_real(rep.accuracy)
      << " auc=" << format_real(rep.roc.auc) << " tp=" << c.tp << " fp=" << c.fp
      << " tn=" << c.tn << " fn=" << c.fn << "\n";
  return kExitOk;
}

int cmd_scan(const ScanArgs& a, std::ostream& err) {
  const auto ckpt = nn::load_model(a.model);
  const Phase phase = parse_phase(a.phase);
  if (ckpt.phase != phase) {
    throw DataError("phase mismatch: model=" + std::string(to_string(ckpt.phase)) +
                    " scan=" + std::string(to_string(phase)));
  }
  const auto series = read_ohlc(a.ohlc);
  const auto result = scan(series, ckpt.model, a.k);
  text::write_file(a.out, format_scan(result, ckpt.model.pattern_width()));
  err << "scan: " << result.windows << " windows, " << result.rows.size() << " scored, "
      << result.skipped_constant << " skipped as constant\n";
  return kExitOk;
}

}  // namespace

OhlcSeries read_ohlc(const std::filesystem::path& path) {
  const std::string content = text::read_file(path);
  const auto lines = text::split_lines(content);
  if (lines.empty()) throw ParseError(1, "OHLC file '" + path.string() + "' is empty");

  const auto header = text::split_csv(lines[0]);
  const std::vector<std::string> required{"timestamp", "open", "high", "low", "close"};
  std::map<std::string, std::size_t> column;
  for (std::size_t j = 0; j < header.size(); ++j) column.emplace(std::string(header[j]), j);
  std::string missing;
  for (const auto& name : required) {
    if (!column.contains(name)) missing += (missing.empty() ? "" : ",") + name;
  }
  if (!missing.empty()) {
    throw ParseError(1, "OHLC header is missing column(s): " + missing);
  }

  OhlcSeries s;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    if (lines[li].empty()) continue;
    const auto cells = text::split_csv(lines[li]);
    if (cells.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " cells, got " +
                                    std::to_string(cells.size()));
    }
    double close = 0.0;
    for (const char* name : {"open", "high", "low", "close"}) {
      const auto v = text::parse_real(cells[column.at(name)]);
      if (!v) {
        throw ParseError(line_no, std::string("column ") + name + ": non-numeric cell '" +
                                      std::string(cells[column.at(name)]) + "'");
      }
      if (std::string_view(name) == "close") close = *v;
    }
    s.timestamps.emplace_back(cells[column.at("timestamp")]);
    s.close.push_back(close);
  }
  return s;
}

ScanResult scan(const OhlcSeries& series, const nn::LstmModel& model, std::size_t k) {
  if (k == 0) throw std::invalid_argument("scan: k must be >= 1");
  ScanResult result;
  if (series.close.size() < 2 * k + 1) return result;

  const auto swings = rules::extract_swings(series.close, k);
  const std::size_t width = model.pattern_width();
  const auto windows = rules::windows_of_lows_highs(swings, width);
  result.windows = windows.size();

  std::vector<double> rescaled(width);
  for (const auto& w : windows) {
    const auto [lo, hi] = std::minmax_element(w.values.begin(), w.values.end());
    const double range = *hi - *lo;
    if (!(range > 0.0)) {
      ++result.skipped_constant;
      continue;
    }
    for (std::size_t j = 0; j < width; ++j) rescaled[j] = 100.0 * (w.values[j] - *lo) / range;
    ScanRow row;
    row.timestamp = series.timestamps[w.end_index];
    row.end_index = w.end_index;
    row.probability = nn::predict(model, nn::model_input(rescaled));
    row.window_values = w.values;
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string format_scan(const ScanResult& result, std::size_t width) {
  std::string out = "timestamp,end_index,probability";
  for (std::size_t j = 1; j <= width; ++j) out += ",p" + std::to_string(j);
  out += '\n';
  for (const auto& r : result.rows) {
    out += r.timestamp;
    out += ',' + std::to_string(r.end_index) + ',' + format_real(r.probability);
    for (double v : r.window_values) out += ',' + format_real(v);
    out += '\n';
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wyckoff trading-range / secondary-test pattern toolkit"};
  app.name("wyckoff");
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a labeled synthetic dataset");
  gen_cmd->add_option("--phase", gen.phase, "tr or st")
      ->required()
      ->check(CLI::IsMember({"tr", "st"}, CLI::ignore_case));
  gen_cmd->add_option("--valid", gen.n_valid, "Valid-branch sample count")->required();
  gen_cmd->add_option("--invalid", gen.n_invalid, "Invalid-branch sample count")->required();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->required();
  gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();
  gen_cmd->add_option("--sigma", gen.sigma, "ST Gaussian sigma")->capture_default_str();
  gen_cmd->add_option("--fillers", gen.fillers, "ST fillers per gap")->capture_default_str();
  gen_cmd->add_option("--up-fillers", gen.up_fillers, "ST up-fillers")->capture_default_str();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train the LSTM classifier on a dataset");
  train_cmd->add_option("--data", tr.data, "Dataset CSV")->required();
  train_cmd->add_option("--epochs", tr.epochs)->capture_default_str();
  train_cmd->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--batch", tr.batch, "Mini-batch size")->capture_default_str();
  train_cmd->add_option("--seed", tr.seed, "Split/shuffle/init seed")->capture_default_str();
  train_cmd->add_option("--test-fraction", tr.test_fraction)->capture_default_str();
  train_cmd->add_option("--hidden", tr.hidden, "LSTM width")->capture_default_str();
  train_cmd->add_option("--threads", tr.threads, "Evaluation threads")->capture_default_str();
  train_cmd->add_flag("--sequential", tr.sequential, "Feed one value per time step");
  train_cmd->add_flag("--deterministic", tr.deterministic, "Single-threaded, reproducible run");
  train_cmd->add_option("--model-out", tr.model_out, "Checkpoint path")->required();
  train_cmd->add_option("--history-out", tr.history_out, "Per-epoch history CSV");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval_cmd->add_option("--model", ev.model, "Checkpoint path")->required();
  eval_cmd->add_option("--data", ev.data, "Dataset CSV")->required();
  eval_cmd->add_option("--roc-out", ev.roc_out, "ROC CSV path");
  eval_cmd->add_option("--threshold", ev.threshold)->capture_default_str();
  eval_cmd->add_option("--threads", ev.threads)->capture_default_str();

  ScanArgs sc;
  auto* scan_cmd = app.add_subcommand("scan", "Score swing windows of an OHLC file");
  scan_cmd->add_option("--ohlc", sc.ohlc, "OHLC CSV (timestamp,open,high,low,close)")->required();
  scan_cmd->add_option("--model", sc.model, "Checkpoint path")->required();
  scan_cmd->add_option("--k", sc.k, "Swing half-window")->capture_default_str()->check(
      CLI::PositiveNumber);
  scan_cmd->add_option("--out", sc.out, "Output CSV path")->required();
  scan_cmd->add_option("--phase", sc.phase, "tr (default) or st (experimental)")
      ->check(CLI::IsMember({"tr", "st"}, CLI::ignore_case));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out);
    if (train_cmd->parsed()) return cmd_train(tr, out);
    if (eval_cmd->parsed()) return cmd_eval(ev, out);
    if (scan_cmd->parsed()) return cmd_scan(sc, err);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace wyckoff::cli
