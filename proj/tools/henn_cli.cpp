// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// henn command line: train polynomial-activation networks on a target
// function, evaluate them on the leveled-arithmetic simulator, extract the
// polynomial they compute, run the Fourier baseline, and merge run reports.
//
// Exit codes: 0 success, 2 flag errors / malformed report input,
// 3 training diverged, 4 level budget exhausted, 5 degree cap exceeded.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "henn/henn.hpp"

namespace {

using nlohmann::json;

struct Options {
  std::string function;
  double radius = 30.0;
  double precision = 0.01;
  double train_step = 0.1;
  long layers = 6;
  long width = 16;
  long degree = 2;
  long epochs = 2000;
  long batch = 64;
  double lr = 1e-3;
  double l2 = 0.0;
  long patience = 100;
  std::uint64_t seed = 1;
  int quantize_bits = 0;
  long slots = 8192;
  long max_level = 40;
  double noise_sigma = 0.0;
  bool auto_bootstrap = false;
  long fourier_n = 16;
  double fourier_l = 0.0;  // 0: default to radius + 10
  long sine_t = 10;
  long sine_k = 7;
  std::string out;
  std::string weights = "weights.csv";
};

// model.csv -> model.suffix ; model -> model.suffix
std::string sibling_path(const std::string& primary, const std::string& suffix) {
  const std::size_t dot = primary.find_last_of('.');
  const std::size_t slash = primary.find_last_of("/\\");
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return primary.substr(0, dot) + suffix;
  }
  return primary + suffix;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw henn::Error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

henn::NetworkConfig network_config(const Options& o) {
  henn::NetworkConfig cfg;
  cfg.hidden_layers = o.layers;
  cfg.width = o.width;
  cfg.activation_degree = o.degree;
  cfg.activation_init = henn::default_quadratic_activation();
  cfg.learning_rate = o.lr;
  cfg.max_epochs = o.epochs;
  cfg.batch_size = o.batch;
  cfg.l2_lambda = o.l2;
  cfg.patience = o.patience;
  cfg.seed = o.seed;
  cfg.input_scale = 1.0 / o.radius;
  return cfg;
}

json config_echo(const Options& o) {
  json j;
  j["function"] = o.function;
  j["radius"] = o.radius;
  j["precision"] = o.precision;
  j["train_step"] = o.train_step;
  j["layers"] = o.layers;
  j["width"] = o.width;
  j["degree"] = o.degree;
  j["epochs"] = o.epochs;
  j["batch"] = o.batch;
  j["lr"] = o.lr;
  j["l2"] = o.l2;
  j["patience"] = o.patience;
  j["seed"] = o.seed;
  j["quantize_bits"] = o.quantize_bits;
  j["slots"] = o.slots;
  j["max_level"] = o.max_level;
  j["noise_sigma"] = o.noise_sigma;
  j["auto_bootstrap"] = o.auto_bootstrap;
  j["fourier_n"] = o.fourier_n;
  j["fourier_l"] = o.fourier_l;
  j["sine_t"] = o.sine_t;
  j["sine_k"] = o.sine_k;
  return j;
}

henn::Context::Params context_params(const Options& o) {
  henn::Context::Params p;
  p.slot_count = o.slots;
  p.max_level = o.max_level;
  p.noise_sigma = o.noise_sigma;
  p.auto_bootstrap = o.auto_bootstrap;
  return p;
}

int run_train(const Options& o) {
  henn::TargetFunction f = henn::TargetFunction::from_source(o.function, o.radius, o.precision);
  henn::SampleSet full = henn::sample(f);
  const long keep_every = std::max<long>(1, std::lround(o.train_step / o.precision));
  auto [train_set, validation_set] = henn::split_train_validation(full, keep_every);

  auto [net, report] = henn::train(network_config(o), train_set, validation_set);

  const std::string weights_path = o.out.empty() ? "weights.csv" : o.out;
  henn::save_weights_csv(net, weights_path);

  json j;
  j["epochs_run"] = report.epochs_run;
  j["final_train_mse"] = report.final_train_mse;
  j["final_validation_mse"] = report.final_validation_mse;
  j["best_epoch"] = report.best_epoch;
  j["loss_history"] = report.loss_history;
  j["train_points"] = train_set.size();
  j["validation_points"] = validation_set.size();
  j["config"] = config_echo(o);
  const std::string report_path = sibling_path(weights_path, ".train.json");
  write_json(j, report_path);

  std::cout << "trained " << o.layers << "x" << o.width << " d=" << o.degree << " on "
            << o.function << " [-" << o.radius << "," << o.radius << "]\n"
            << "  epochs " << report.epochs_run << ", best " << report.best_epoch
            << ", train mse " << report.final_train_mse << ", validation mse "
            << report.final_validation_mse << "\n"
            << "  weights -> " << weights_path << "\n  report  -> " << report_path << "\n";
  return 0;
}

struct EncryptedRun {
  std::vector<double> predictions;
  long levels_consumed = 0;
  long ct_mults = 0;
  long scalar_mults = 0;
  long bootstraps = 0;
};

// Evaluates `compute` over the grid in slot-sized chunks, each on a fresh
// context; counters are merged by chunk index.
template <typename ComputeChunk>
EncryptedRun run_chunks(const Options& o, const std::vector<double>& xs, ComputeChunk compute) {
  EncryptedRun run;
  run.predictions.reserve(xs.size());
  const std::size_t chunk = static_cast<std::size_t>(o.slots);
  for (std::size_t begin = 0; begin < xs.size(); begin += chunk) {
    const std::size_t end = std::min(xs.size(), begin + chunk);
    std::vector<double> part(xs.begin() + static_cast<std::ptrdiff_t>(begin),
                             xs.begin() + static_cast<std::ptrdiff_t>(end));
    henn::Context ctx(context_params(o));
    henn::Ciphertext ct = compute(ctx, henn::encrypt_real(ctx, part));
    std::vector<henn::Complex> slots = henn::decrypt(ct);
    for (std::size_t i = 0; i < part.size(); ++i) run.predictions.push_back(slots[i].real());
    run.levels_consumed = std::max(run.levels_consumed, ct.depth);
    run.ct_mults += ctx.ct_mults();
    run.scalar_mults += ctx.scalar_mults();
    run.bootstraps += ctx.bootstraps();
  }
  return run;
}

void write_predictions_csv(const std::string& path, const henn::SampleSet& grid,
                           const std::vector<double>& predictions) {
  std::ofstream out(path);
  if (!out) throw henn::Error("cannot open '" + path + "' for writing");
  out << "x,y_true,y_pred,abs_err\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << henn::detail::format_double(grid.xs[i]) << ','
        << henn::detail::format_double(grid.ys[i]) << ','
        << henn::detail::format_double(predictions[i]) << ','
        << henn::detail::format_double(std::fabs(predictions[i] - grid.ys[i])) << '\n';
  }
}

int run_eval(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  henn::Network net = henn::load_weights_csv(o.weights);
  if (o.quantize_bits > 0) net = henn::quantize_uniform(net, o.quantize_bits);

  henn::TargetFunction f = henn::TargetFunction::from_source(o.function, o.radius, o.precision);
  henn::SampleSet grid = henn::sample(f);

  EncryptedRun run = run_chunks(o, grid.xs, [&](henn::Context& ctx, const henn::Ciphertext& ct) {
    return henn::forward_encrypted(ctx, net, ct);
  });

  henn::EvalReport report;
  report.method = "nn";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double err = std::fabs(run.predictions[i] - grid.ys[i]);
    report.max_abs_error = std::max(report.max_abs_error, err);
    report.mse += err * err;
  }
  report.mse /= static_cast<double>(grid.size());
  report.levels_consumed = run.levels_consumed;
  report.ct_mults = run.ct_mults;
  report.scalar_mults = run.scalar_mults;
  report.bootstraps = run.bootstraps;
  report.config = config_echo(o);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string csv_path = o.out.empty() ? "predictions.csv" : o.out;
  write_predictions_csv(csv_path, grid, run.predictions);
  const std::string report_path = sibling_path(csv_path, ".report.json");
  write_json(report.to_json(), report_path);

  std::cout << "evaluated " << grid.size() << " points: max abs err " << report.max_abs_error
            << ", mse " << report.mse << ", levels " << report.levels_consumed
            << ", ct mults " << report.ct_mults << ", bootstraps " << report.bootstraps << "\n"
            << "  predictions -> " << csv_path << "\n  report      -> " << report_path << "\n";
  return 0;
}

int run_extract(const Options& o) {
  henn::Network net = henn::load_weights_csv(o.weights);
  henn::Polynomial p = henn::extract_polynomial(net);

  const std::string out_path = o.out.empty() ? "poly.txt" : o.out;
  std::ofstream out(out_path);
  if (!out) throw henn::Error("cannot open '" + out_path + "' for writing");
  for (double c : p.coeffs()) out << henn::detail::format_double(c) << '\n';

  henn::MultCount plan = henn::plan_depth(net.config);
  std::cout << "degree " << p.degree() << "\nplan depth " << plan.depth << "\ncoefficients -> "
            << out_path << "\n";
  return 0;
}

int run_fourier(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  henn::TargetFunction f = henn::TargetFunction::from_source(o.function, o.radius, o.precision);
  const double f0 = f(0.0);
  const double period_half = o.fourier_l > 0.0 ? o.fourier_l : o.radius + 10.0;

  henn::FourierSeries series = henn::fourier_sine_coeffs(
      [&](double x) { return f(x) - f0; }, period_half, o.fourier_n);

  henn::SampleSet grid = henn::sample(f);

  double plain_max = 0.0, plain_mse = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double err = std::fabs(henn::eval_series_plain(series, grid.xs[i]) + f0 - grid.ys[i]);
    plain_max = std::max(plain_max, err);
    plain_mse += err * err;
  }
  plain_mse /= static_cast<double>(grid.size());

  henn::SineParams sine{o.sine_t, o.sine_k};
  EncryptedRun run = run_chunks(o, grid.xs, [&](henn::Context& ctx, const henn::Ciphertext& ct) {
    return henn::cadd(henn::eval_series_encrypted(ctx, series, ct, sine),
                      henn::Complex(f0, 0.0));
  });

  henn::EvalReport report;
  report.method = "fourier";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double err = std::fabs(run.predictions[i] - grid.ys[i]);
    report.max_abs_error = std::max(report.max_abs_error, err);
    report.mse += err * err;
  }
  report.mse /= static_cast<double>(grid.size());
  report.levels_consumed = run.levels_consumed;
  report.ct_mults = run.ct_mults;
  report.scalar_mults = run.scalar_mults;
  report.bootstraps = run.bootstraps;
  report.config = config_echo(o);
  report.config["fourier_l_effective"] = period_half;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string series_path = o.out.empty() ? "series.txt" : o.out;
  henn::write_series(series, series_path);
  json j = report.to_json();
  j["plain_max_abs_error"] = plain_max;
  j["plain_mse"] = plain_mse;
  const std::string report_path = sibling_path(series_path, ".report.json");
  write_json(j, report_path);

  std::cout << "fourier N=" << o.fourier_n << " l=" << period_half << " on " << o.function
            << ": plain max err " << plain_max << ", encrypted max err " << report.max_abs_error
            << ", levels " << report.levels_consumed << ", bootstraps " << report.bootstraps
            << "\n  series -> " << series_path << "\n  report -> " << report_path << "\n";
  return 0;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out_path) {
  struct Row {
    double interval;
    std::string method;
    henn::EvalReport report;
  };
  std::vector<Row> rows;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "cannot open '" << path << "'\n";
      return 2;
    }
    json j;
    try {
      in >> j;
      Row row;
      row.report = henn::EvalReport::from_json(j);
      row.method = row.report.method;
      row.interval = row.report.config.value("radius", 0.0);
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      std::cerr << "malformed report '" << path << "': " << e.what() << "\n";
      return 2;
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.interval != b.interval) return a.interval < b.interval;
    return a.method < b.method;
  });

  std::ostringstream table;
  table << "interval,method,max_abs_error,mse,levels_consumed,ct_mults,bootstraps\n";
  for (const Row& r : rows) {
    table << henn::detail::format_double(r.interval) << ',' << r.method << ','
          << henn::detail::format_double(r.report.max_abs_error) << ','
          << henn::detail::format_double(r.report.mse) << ',' << r.report.levels_consumed << ','
          << r.report.ct_mults << ',' << r.report.bootstraps << '\n';
  }
  if (out_path.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw henn::Error("cannot open '" + out_path + "' for writing");
    out << table.str();
    std::cout << "table -> " << out_path << "\n";
  }
  return 0;
}

void add_function_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--function", o.function, "builtin name or expression in x")->required();
  cmd->add_option("--radius", o.radius, "approximation interval radius R");
  cmd->add_option("--precision", o.precision, "evaluation grid step (1/P)");
}

void add_network_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--layers", o.layers, "hidden layer count");
  cmd->add_option("--width", o.width, "neurons per hidden layer");
  cmd->add_option("--degree", o.degree, "activation polynomial degree");
}

void add_sim_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--slots", o.slots, "ciphertext slot count");
  cmd->add_option("--max-level", o.max_level, "multiplicative level budget");
  cmd->add_option("--noise-sigma", o.noise_sigma, "per-product Gaussian noise std");
  cmd->add_flag("--auto-bootstrap", o.auto_bootstrap, "bootstrap when the budget runs out");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polynomial-activation networks on a leveled homomorphic-arithmetic simulator"};
  app.require_subcommand(1);

  Options o;
  std::vector<std::string> report_inputs;
  std::string report_out;

  CLI::App* train = app.add_subcommand("train", "sample a target and fit a network");
  add_function_flags(train, o);
  add_network_flags(train, o);
  train->add_option("--train-step", o.train_step, "training grid step");
  train->add_option("--epochs", o.epochs, "maximum training epochs");
  train->add_option("--batch", o.batch, "minibatch size");
  train->add_option("--lr", o.lr, "learning rate");
  train->add_option("--l2", o.l2, "L2 penalty weight");
  train->add_option("--patience", o.patience, "early-stopping patience in epochs");
  train->add_option("--seed", o.seed, "PRNG seed");
  train->add_option("--out", o.out, "weights CSV path (default weights.csv)");

  CLI::App* eval = app.add_subcommand("eval", "run the encrypted forward pass over the grid");
  add_function_flags(eval, o);
  add_sim_flags(eval, o);
  eval->add_option("--weights", o.weights, "weights CSV to evaluate");
  eval->add_option("--quantize-bits", o.quantize_bits, "quantize weights before evaluating");
  eval->add_option("--out", o.out, "predictions CSV path (default predictions.csv)");

  CLI::App* extract = app.add_subcommand("extract", "expand a network into its polynomial");
  extract->add_option("--weights", o.weights, "weights CSV to expand");
  extract->add_option("--out", o.out, "coefficient file path (default poly.txt)");

  CLI::App* fourier = app.add_subcommand("fourier", "sine-series baseline for the odd shift");
  add_function_flags(fourier, o);
  add_sim_flags(fourier, o);
  fourier->add_option("--fourier-n", o.fourier_n, "number of harmonics");
  fourier->add_option("--fourier-l", o.fourier_l, "period half-length (default R+10)");
  fourier->add_option("--sine-t", o.sine_t, "sine rescale exponent");
  fourier->add_option("--sine-k", o.sine_k, "sine Taylor terms");
  fourier->add_option("--out", o.out, "series file path (default series.txt)");

  CLI::App* report = app.add_subcommand("report", "merge run reports into a comparison table");
  report->add_option("inputs", report_inputs, "report JSON files")->required();
  report->add_option("--out", report_out, "table CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (train->parsed()) return run_train(o);
    if (eval->parsed()) return run_eval(o);
    if (extract->parsed()) return run_extract(o);
    if (fourier->parsed()) return run_fourier(o);
    if (report->parsed()) return run_report(report_inputs, report_out);
  } catch (const henn::Diverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const henn::LevelExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const henn::DegreeLimitExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
