#include "rdp/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdp/codec.hpp"
#include "rdp/oracle.hpp"
#include "rdp/sources.hpp"
#include "rdp/spectra.hpp"
#include "rdp/tradeoff.hpp"

namespace rdp::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

// lo:hi:step with endpoints inclusive within 1e-12.
std::vector<double> parse_grid(const std::string& spec, const char* flag) {
  double lo = 0, hi = 0, step = 0;
  const auto fail = [&]() {
    throw std::invalid_argument(std::string(flag) +
                                ": expected lo:hi:step, got '" + spec + "'");
  };
  const auto first = spec.find(':');
  const auto second = spec.find(':', first == std::string::npos ? 0 : first + 1);
  if (first == std::string::npos || second == std::string::npos) fail();
  try {
    std::size_t used = 0;
    lo = std::stod(spec.substr(0, first), &used);
    if (used != first) fail();
    hi = std::stod(spec.substr(first + 1, second - first - 1), &used);
    if (used != second - first - 1) fail();
    step = std::stod(spec.substr(second + 1), &used);
    if (used != spec.size() - second - 1) fail();
  } catch (const std::invalid_argument&) {
    fail();
  } catch (const std::out_of_range&) {
    fail();
  }
  if (!(step > 0.0)) throw std::invalid_argument(std::string(flag) + ": step must be > 0");
  if (hi < lo - 1e-12) throw std::invalid_argument(std::string(flag) + ": hi must be >= lo");
  std::vector<double> values;
  for (std::int64_t i = 0;; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    if (v > hi + 1e-12) break;
    values.push_back(v);
    if (values.size() > 10'000'000)
      throw std::invalid_argument(std::string(flag) + ": grid has too many points");
  }
  return values;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

int resolve_workers(int flag_value) {
  if (const char* env = std::getenv("RDP_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("RDP_WORKERS must be a positive integer");
  }
  if (flag_value >= 1) return flag_value;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void emit_plot_script(const std::string& csv_path) {
  std::ostringstream script;
  script << "#!/usr/bin/env python3\n"
            "# Quick look at the CSV produced alongside this script.\n"
            "import csv\n"
            "import sys\n"
            "\n"
            "import matplotlib\n"
            "matplotlib.use(\"Agg\")\n"
            "import matplotlib.pyplot as plt\n"
            "\n"
            "path = \"" << csv_path << "\"\n"
            "with open(path, newline=\"\") as fh:\n"
            "    rows = list(csv.reader(fh))\n"
            "header, data = rows[0], rows[1:]\n"
            "\n"
            "def numeric(col):\n"
            "    out = []\n"
            "    for row in data:\n"
            "        try:\n"
            "            out.append(float(row[col]))\n"
            "        except ValueError:\n"
            "            out.append(float(\"nan\"))\n"
            "    return out\n"
            "\n"
            "numeric_cols = []\n"
            "for i, name in enumerate(header):\n"
            "    vals = numeric(i)\n"
            "    if any(v == v for v in vals):\n"
            "        numeric_cols.append((name, vals))\n"
            "if len(numeric_cols) < 2:\n"
            "    sys.exit(\"not enough numeric columns to plot\")\n"
            "x_name, x = numeric_cols[0]\n"
            "for name, vals in numeric_cols[1:]:\n"
            "    plt.plot(x, vals, marker=\".\", linestyle=\"none\", label=name)\n"
            "plt.xlabel(x_name)\n"
            "plt.legend()\n"
            "plt.savefig(path + \".png\", dpi=150)\n"
            "print(path + \".png\")\n";
  write_file(csv_path + ".plot.py", script.str());
}

// CSV goes to the output path (or stdout), the JSON-lines metadata record
// to <path>.meta.jsonl (or stderr when printing to stdout).
void emit(const std::string& out_path, const std::string& csv,
          const nlohmann::json& metadata, bool plot_script) {
  std::string meta_line = metadata.dump();
  meta_line += '\n';
  if (out_path.empty()) {
    std::cout << csv;
    std::cerr << meta_line;
    return;
  }
  write_file(out_path, csv);
  write_file(out_path + ".meta.jsonl", meta_line);
  if (plot_script) emit_plot_script(out_path);
}

nlohmann::json base_metadata(const std::string& subcommand, const std::string& out_path) {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["version"] = kVersion;
  j["timestamp"] = utc_timestamp();
  j["output"] = out_path.empty() ? "-" : out_path;
  return j;
}

struct CommonOptions {
  std::string source = "paper-mixed";
  std::string out_path;
  bool plot_script = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--source", opts.source,
                  "Source spec: bernoulli:p, mix:w1*p1,w2*p2,... or paper-mixed")
      ->capture_default_str();
  cmd->add_option("--out", opts.out_path,
                  "Output CSV path (stdout when omitted); metadata goes to "
                  "<out>.meta.jsonl");
  cmd->add_flag("--emit-plot-script", opts.plot_script,
                "Write a generic plotting script next to the CSV")
      ->needs(cmd->get_option("--out"));
}

// ---------------------------------------------------------------- curves

struct CurvesOptions {
  CommonOptions common;
  std::string d_grid = "0:0.5:0.05";
  std::string s_grid = "0:1:0.25";
};

int run_curves(const CurvesOptions& opts) {
  const SourceModel model = SourceModel::parse(opts.common.source);
  const auto d_values = parse_grid(opts.d_grid, "--d-grid");
  const auto s_values = parse_grid(opts.s_grid, "--s-grid");
  for (double d : d_values)
    if (d < 0.0) throw std::invalid_argument("--d-grid: D must be >= 0");
  for (double s : s_values)
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("--s-grid: S must be in [0, 1]");
  const bool canonical = model.is_paper_mixed();

  std::ostringstream csv;
  csv << "D,S,rd_term,perception_term,R_theorem,R_paper,flagged\n";
  for (double d : d_values) {
    for (double s : s_values) {
      const RdpBreakdown breakdown = rdp_theorem(model, d, s);
      double paper = std::numeric_limits<double>::quiet_NaN();
      if (canonical && d <= 0.5) paper = rdp_paper_example(d, s);
      const bool flagged = !std::isnan(paper) && std::abs(breakdown.value - paper) > 1e-9;
      csv << fmt(d) << ',' << fmt(s) << ',' << fmt(breakdown.rd_term) << ','
          << fmt(breakdown.perception_term) << ',' << fmt(breakdown.value) << ','
          << fmt(paper) << ',' << (flagged ? '1' : '0') << '\n';
    }
  }

  nlohmann::json meta = base_metadata("curves", opts.common.out_path);
  meta["config"] = {{"source", opts.common.source},
                    {"d_grid", opts.d_grid},
                    {"s_grid", opts.s_grid}};
  emit(opts.common.out_path, csv.str(), meta, opts.common.plot_script);
  return 0;
}

// --------------------------------------------------------------- spectrum

struct SpectrumOptions {
  CommonOptions common;
  std::int64_t n = 0;
  std::string r_grid;
};

int run_spectrum(const SpectrumOptions& opts) {
  const SourceModel model = SourceModel::parse(opts.common.source);
  const auto r_values = parse_grid(opts.r_grid, "--r-grid");
  const ExceedanceCurve curve = compute_exceedance(model, opts.n, r_values);

  std::ostringstream csv;
  csv << "n,R,F_exact\n";
  for (const auto& [r, f] : curve.points)
    csv << opts.n << ',' << fmt(r) << ',' << fmt(f) << '\n';
  // Sidecar rows describing the limit step function; the value at each
  // breakpoint is the new level.
  const StepFunction limit = asymptotic_spectral_cdf(model);
  if (limit.thresholds().empty() || limit.thresholds().front() > 0.0)
    csv << "asymptotic,0," << fmt(limit.levels().front()) << '\n';
  for (std::size_t i = 0; i < limit.thresholds().size(); ++i)
    csv << "asymptotic," << fmt(limit.thresholds()[i]) << ','
        << fmt(limit.levels()[i + 1]) << '\n';

  nlohmann::json meta = base_metadata("spectrum", opts.common.out_path);
  meta["config"] = {{"source", opts.common.source},
                    {"n", opts.n},
                    {"r_grid", opts.r_grid}};
  emit(opts.common.out_path, csv.str(), meta, opts.common.plot_script);
  return 0;
}

// --------------------------------------------------------------- simulate

struct SimulateOptions {
  CommonOptions common;
  std::int64_t n = 0;
  std::vector<std::uint64_t> m_values;
  std::vector<double> rates;
  std::string method = "random";
  std::int64_t samples = 10000;
  std::uint64_t seed = 0;
  std::int64_t exact_cap = 20;
  double tail = 0.01;
  int workers = 0;
};

int run_simulate(const SimulateOptions& opts) {
  const SourceModel model = SourceModel::parse(opts.common.source);
  const LossyMethod method = parse_lossy_method(opts.method);
  const int workers = resolve_workers(opts.workers);

  if (opts.m_values.empty() == opts.rates.empty())
    throw std::invalid_argument("simulate: give exactly one of --m or --rate");
  std::vector<std::uint64_t> budgets = opts.m_values;
  for (double rate : opts.rates) {
    const double bits = static_cast<double>(opts.n) * rate;
    if (!(bits >= 0.0) || bits > 62.0)
      throw std::invalid_argument("simulate: --rate implies M outside [1, 2^62]");
    const std::uint64_t m = static_cast<std::uint64_t>(std::floor(std::exp2(bits)));
    if (m < 1) throw std::invalid_argument("simulate: --rate implies M < 1");
    budgets.push_back(m);
  }

  std::ostringstream csv;
  csv << "source,n,M,method,samples,seed,exact_cap,tail,rate,distortion,"
         "distortion_std_error,distortion_exact,distortion_tail_quantile,"
         "sigma,sigma_exact,epsilon\n";
  for (std::uint64_t m : budgets) {
    const TwoStageCodec codec = build_codec(model, opts.n, m, method, opts.seed);
    const CodecMetrics metrics = evaluate(codec, model, opts.samples, opts.seed,
                                          opts.exact_cap, opts.tail, workers);
    csv << opts.common.source << ',' << opts.n << ',' << m << ','
        << to_string(method) << ',' << metrics.samples_used << ',' << opts.seed
        << ',' << opts.exact_cap << ',' << fmt(opts.tail) << ','
        << fmt(metrics.rate) << ',' << fmt(metrics.distortion) << ','
        << fmt(metrics.distortion_std_error) << ','
        << (metrics.distortion_exact ? '1' : '0') << ','
        << fmt(metrics.distortion_tail_quantile
                   ? *metrics.distortion_tail_quantile
                   : std::numeric_limits<double>::quiet_NaN())
        << ','
        << fmt(metrics.sigma ? *metrics.sigma
                             : std::numeric_limits<double>::quiet_NaN())
        << ',' << (metrics.sigma ? '1' : '0') << ',' << fmt(metrics.epsilon)
        << '\n';
  }

  nlohmann::json meta = base_metadata("simulate", opts.common.out_path);
  meta["config"] = {{"source", opts.common.source},
                    {"n", opts.n},
                    {"m", budgets},
                    {"lossy_method", opts.method},
                    {"samples", opts.samples},
                    {"seed", opts.seed},
                    {"exact_cap", opts.exact_cap},
                    {"tail", opts.tail},
                    {"workers", workers}};
  emit(opts.common.out_path, csv.str(), meta, opts.common.plot_script);
  return 0;
}

// ----------------------------------------------------------------- oracle

struct OracleOptions {
  CommonOptions common;
  std::int64_t n = 0;
  std::uint64_t m = 0;
  bool heuristic = false;
  std::uint64_t seed = 0;
  int workers = 0;
};

int run_oracle(const OracleOptions& opts) {
  const SourceModel model = SourceModel::parse(opts.common.source);
  const int workers = resolve_workers(opts.workers);
  const auto frontier =
      enumerate_frontier(model, opts.n, opts.m, opts.heuristic, opts.seed, workers);

  std::ostringstream csv;
  csv << "M,D,sigma,exhaustive\n";
  std::ostringstream witness;
  for (const auto& point : frontier) {
    csv << point.m << ',' << fmt(point.distortion) << ',' << fmt(point.sigma)
        << ',' << (point.exhaustive ? '1' : '0') << '\n';
    witness << point.witness.to_line() << '\n';
  }

  nlohmann::json meta = base_metadata("oracle", opts.common.out_path);
  meta["config"] = {{"source", opts.common.source},
                    {"n", opts.n},
                    {"m", opts.m},
                    {"heuristic", opts.heuristic},
                    {"seed", opts.seed},
                    {"workers", workers}};
  emit(opts.common.out_path, csv.str(), meta, opts.common.plot_script);
  if (!opts.common.out_path.empty())
    write_file(opts.common.out_path + ".witness.txt", witness.str());
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"rate-distortion-perception curves, spectra, codecs and oracles "
               "for binary mixture sources"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a key=value file "
                                 "(dotted keys: subcommand.option=value)");

  CurvesOptions curves;
  CLI::App* curves_cmd = app.add_subcommand(
      "curves", "Closed-form tradeoff curves over a (D, S) grid");
  add_common(curves_cmd, curves.common);
  curves_cmd->add_option("--d-grid", curves.d_grid, "Distortion grid lo:hi:step")
      ->capture_default_str();
  curves_cmd->add_option("--s-grid", curves.s_grid, "Perception grid lo:hi:step")
      ->capture_default_str();

  SpectrumOptions spectrum;
  CLI::App* spectrum_cmd = app.add_subcommand(
      "spectrum", "Exact finite-n self-information spectrum plus its limit");
  add_common(spectrum_cmd, spectrum.common);
  spectrum_cmd->add_option("--n", spectrum.n, "Block length")->required();
  spectrum_cmd->add_option("--r-grid", spectrum.r_grid, "Rate grid lo:hi:step")
      ->required();

  SimulateOptions simulate;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Build and evaluate two-stage codecs");
  add_common(simulate_cmd, simulate.common);
  simulate_cmd->add_option("--n", simulate.n, "Block length (<= 63)")->required();
  simulate_cmd->add_option("--m", simulate.m_values, "Per-stage codeword budgets")
      ->delimiter(',');
  simulate_cmd->add_option("--rate", simulate.rates,
                           "Rates R; M = floor(2^(n R)) per value")
      ->delimiter(',');
  simulate_cmd->add_option("--lossy-method", simulate.method,
                           "random | greedy-cover | type-quantize")
      ->capture_default_str();
  simulate_cmd->add_option("--samples", simulate.samples,
                           "Monte Carlo draws when n exceeds the exact cap")
      ->capture_default_str();
  simulate_cmd->add_option("--seed", simulate.seed, "RNG seed")->capture_default_str();
  simulate_cmd->add_option("--exact-cap", simulate.exact_cap,
                           "Largest n evaluated by full enumeration (<= 24)")
      ->capture_default_str();
  simulate_cmd->add_option("--tail", simulate.tail,
                           "Tail probability for the distortion quantile")
      ->capture_default_str();
  simulate_cmd->add_option("--workers", simulate.workers,
                           "Worker threads (0 = hardware; RDP_WORKERS overrides)");

  OracleOptions oracle;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "Exhaustive finite-n (D, sigma) Pareto frontier");
  add_common(oracle_cmd, oracle.common);
  oracle_cmd->add_option("--n", oracle.n, "Block length (<= 3 exhaustive)")->required();
  oracle_cmd->add_option("--m", oracle.m, "Reconstruction budget")->required();
  oracle_cmd->add_flag("--heuristic", oracle.heuristic,
                       "Allow n = 4 via local search (flagged non-exhaustive)");
  oracle_cmd->add_option("--seed", oracle.seed, "RNG seed for heuristic restarts")
      ->capture_default_str();
  oracle_cmd->add_option("--workers", oracle.workers,
                         "Worker threads (0 = hardware; RDP_WORKERS overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*curves_cmd) return run_curves(curves);
    if (*spectrum_cmd) return run_spectrum(spectrum);
    if (*simulate_cmd) return run_simulate(simulate);
    if (*oracle_cmd) return run_oracle(oracle);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("rdp");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace rdp::cli
