/*
 * Copyright 2026 The kip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// kip: classify, inspect, aggregate and anonymize IPv6 activity logs.
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kip/aggregate.h"
#include "kip/analysis.h"
#include "kip/anonymize.h"
#include "kip/errors.h"
#include "kip/logio.h"
#include "kip/synth.h"

namespace {

using namespace kip;

// Log input that may have to be read more than once; stdin is buffered.
class Source {
 public:
  explicit Source(std::string path) : path_(std::move(path)) {
    if (path_ == "-") {
      buffer_.assign(std::istreambuf_iterator<char>(std::cin),
                     std::istreambuf_iterator<char>());
    }
  }

  std::unique_ptr<std::istream> open() const {
    if (path_ == "-") return std::make_unique<std::istringstream>(buffer_);
    auto in = std::make_unique<std::ifstream>(path_, std::ios::binary);
    if (!*in) throw std::runtime_error("cannot open " + path_);
    return in;
  }

 private:
  std::string path_;
  std::string buffer_;
};

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct GridFlags {
  std::string start;
  std::int64_t interval_seconds = 3600;
  int intervals = 168;
  bool auto_grid = false;

  void add(CLI::App* app) {
    app->add_option("--start", start,
                    "window start, epoch seconds or ISO-8601 UTC");
    app->add_option("--interval-seconds", interval_seconds, "interval length i")
        ->capture_default_str();
    app->add_option("--intervals", intervals, "number of intervals w")
        ->capture_default_str();
    app->add_flag("--auto-grid", auto_grid,
                  "derive start and w from the log's first and last timestamps");
  }

  TimeGrid resolve(const Source& source) const {
    if (interval_seconds <= 0) throw UsageError("--interval-seconds must be positive");
    if (auto_grid) {
      auto in = source.open();
      auto grid = derive_grid(*in, interval_seconds);
      if (!grid) throw UsageError("--auto-grid: the log has no parseable timestamps");
      return *grid;
    }
    if (start.empty()) throw UsageError("--start is required unless --auto-grid is given");
    auto t = parse_timestamp(start);
    if (!t) throw UsageError("--start: cannot parse '" + start + "'");
    if (intervals < 1) throw UsageError("--intervals must be >= 1");
    return TimeGrid(*t, interval_seconds, intervals);
  }
};

struct AnalysisFlags {
  std::string input = "-";
  GridFlags grid;
  double confidence = 0.99;
  bool bridge_all = false;
  bool quiet = false;

  void add(CLI::App* app) {
    app->add_option("--input,-i", input, "activity log, '-' for stdin")
        ->capture_default_str();
    grid.add(app);
    app->add_option("--confidence", confidence,
                    "confidence for the IID randomness test")
        ->capture_default_str();
    app->add_flag("--bridge-all", bridge_all,
                  "bridge quiet intervals for every address class");
    app->add_flag("--quiet,-q", quiet, "do not report line counters");
  }

  AnalysisOptions options() const { return {bridge_all}; }
};

struct KipFlags {
  Count k = 2;
  std::string stat = "min";
  std::string mode = "prefix";
  std::string residual = "suppress";
  int max_emit_length = 64;

  void add(CLI::App* app) {
    app->add_option("--k", k, "anonymity threshold")->capture_default_str();
    app->add_option("--stat", stat, "min, max or median")->capture_default_str();
    app->add_option("--mode", mode, "prefix or address")->capture_default_str();
    app->add_option("--residual", residual, "suppress or root")->capture_default_str();
    app->add_option("--max-emit-length", max_emit_length,
                    "longest prefix an aggregate may have")
        ->capture_default_str();
  }

  KipConfig config() const {
    KipConfig cfg;
    cfg.k = k;
    cfg.stat = stat_from_string(stat);
    cfg.mode = count_mode_from_string(mode);
    cfg.residual = residual_kind_from_string(residual);
    cfg.max_emit_length = max_emit_length;
    cfg.validate();
    return cfg;
  }
};

void report(const LogStats& s, bool quiet) {
  if (quiet) return;
  std::cerr << "kip: lines " << s.lines << ", parsed " << s.parsed << ", malformed "
            << s.malformed << ", out-of-window " << s.out_of_window << '\n';
}

struct Ingested {
  NetworkAnalysis analysis;
  LogStats stats;
};

Ingested ingest(const Source& source, const AnalysisFlags& flags) {
  if (!(flags.confidence > 0 && flags.confidence < 1)) {
    throw UsageError("--confidence must lie strictly between 0 and 1");
  }
  const TimeGrid grid = flags.grid.resolve(source);
  ActivityIndex index(grid);
  auto in = source.open();
  LogStats stats = read_log(*in, grid, [&](const LogEvent& e) { index.add(e.address, e.time); });
  report(stats, flags.quiet);
  RandomnessPolicy policy(flags.confidence);
  return {analyze(std::move(index), policy, flags.options()), stats};
}

void require_fenceposts(const NetworkAnalysis& a) {
  if (a.grid.intervals < 2) {
    throw UsageError("--intervals must be >= 2 for aggregation (w = 1 has no fenceposts)");
  }
}

AggregateSet load_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_aggregate_set(in);
}

std::vector<std::uint64_t> observed_64s(const std::string& path, const TimeGrid& grid,
                                        bool quiet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::set<std::uint64_t> seen;
  report(read_log(in, grid, [&](const LogEvent& e) { seen.insert(e.address.subnet64()); }),
         quiet);
  return {seen.begin(), seen.end()};
}

void report_anon(const AnonymizeStats& s, bool quiet) {
  if (quiet) return;
  std::cerr << "kip: anonymized " << s.anonymized << ", caught " << s.caught
            << ", suppressed " << s.suppressed << ", malformed " << s.malformed << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"k-anonymous IPv6 prefix aggregation and log anonymization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // classify
  AnalysisFlags classify_flags;
  std::string classify_out = "-";
  auto* classify = app.add_subcommand("classify", "IID class, DPL and stable days per address");
  classify_flags.add(classify);
  classify->add_option("--output,-o", classify_out, "output file")->capture_default_str();

  // matrix
  AnalysisFlags matrix_flags;
  std::string matrix_out = "-";
  std::string matrix_view = "inferred";
  std::string matrix_subnet;
  auto* matrix = app.add_subcommand("matrix", "render per-/64 activity matrices");
  matrix_flags.add(matrix);
  matrix->add_option("--view", matrix_view, "raw or inferred")->capture_default_str();
  matrix->add_option("--subnet", matrix_subnet, "only this /64");
  matrix->add_option("--output,-o", matrix_out, "output file")->capture_default_str();

  // summarize
  AnalysisFlags summarize_flags;
  std::string summarize_out = "-";
  auto* summarize_cmd = app.add_subcommand("summarize", "network-wide counts and bounds");
  summarize_flags.add(summarize_cmd);
  summarize_cmd->add_option("--output,-o", summarize_out, "output file")->capture_default_str();

  // aggregate
  AnalysisFlags aggregate_flags;
  KipFlags aggregate_kip;
  std::string aggregate_out = "-";
  auto* aggregate_cmd = app.add_subcommand("aggregate", "synthesize k-anonymous aggregates");
  aggregate_flags.add(aggregate_cmd);
  aggregate_kip.add(aggregate_cmd);
  aggregate_cmd->add_option("--output,-o", aggregate_out, "aggregate set file")
      ->capture_default_str();

  // anon
  std::string anon_set;
  std::string anon_in = "-";
  std::string anon_out = "-";
  AnonymizeOptions anon_options;
  bool anon_quiet = false;
  auto* anon = app.add_subcommand("anon", "rewrite the address column of a log");
  anon->add_option("--aggregates,-a", anon_set, "aggregate set file")->required();
  anon->add_option("--input,-i", anon_in, "log to rewrite")->capture_default_str();
  anon->add_option("--output,-o", anon_out, "output file")->capture_default_str();
  anon->add_option("--field", anon_options.field, "1-based address column")
      ->capture_default_str();
  anon->add_flag("--append-length", anon_options.append_length, "write addr/len");
  anon->add_option("--sentinel", anon_options.sentinel, "replacement for suppressed addresses")
      ->capture_default_str();
  anon->add_flag("--quiet,-q", anon_quiet, "do not report counters");

  // eval
  std::string eval_set;
  std::string eval_weighting = "aggregate";
  std::string eval_log;
  std::string eval_out = "-";
  bool eval_quiet = false;
  auto* eval = app.add_subcommand("eval", "aggregate length histogram and CDF");
  eval->add_option("--aggregates,-a", eval_set, "aggregate set file")->required();
  eval->add_option("--weighting", eval_weighting, "aggregate or covered64")
      ->capture_default_str();
  eval->add_option("--log", eval_log, "activity log supplying the /64s (covered64)");
  eval->add_option("--output,-o", eval_out, "output file")->capture_default_str();
  eval->add_flag("--quiet,-q", eval_quiet, "do not report line counters");

  // pipeline
  AnalysisFlags pipe_flags;
  KipFlags pipe_kip;
  std::string pipe_aggregates;
  std::string pipe_anon;
  std::string pipe_summary;
  std::string pipe_classify;
  std::string pipe_lengths;
  AnonymizeOptions pipe_anon_options;
  auto* pipeline = app.add_subcommand("pipeline", "classify, infer, aggregate and anonymize");
  pipe_flags.add(pipeline);
  pipe_kip.add(pipeline);
  pipeline->add_option("--aggregates-out", pipe_aggregates, "aggregate set file");
  pipeline->add_option("--anon-out", pipe_anon, "anonymized log");
  pipeline->add_option("--summary-out", pipe_summary, "network summary");
  pipeline->add_option("--classify-out", pipe_classify, "per-address classification");
  pipeline->add_option("--lengths-out", pipe_lengths, "aggregate length CDF");
  pipeline->add_option("--field", pipe_anon_options.field, "1-based address column")
      ->capture_default_str();
  pipeline->add_flag("--append-length", pipe_anon_options.append_length, "write addr/len");
  pipeline->add_option("--sentinel", pipe_anon_options.sentinel,
                       "replacement for suppressed addresses")
      ->capture_default_str();

  // synth
  SynthParams synth_params;
  std::string synth_preset = "dispersed";
  std::string synth_start = "2017-03-20T00:00:00Z";
  std::string synth_log = "-";
  std::string synth_truth;
  std::string synth_manifest;
  auto* synth = app.add_subcommand("synth", "generate a synthetic scenario and its truth");
  synth->add_option("--preset", synth_preset, "jp, dispersed or meeting")->capture_default_str();
  synth->add_option("--hosts", synth_params.hosts, "host count")->capture_default_str();
  synth->add_option("--seed", synth_params.seed, "generator seed")->capture_default_str();
  synth->add_option("--max-hosts-per-subnet", synth_params.max_hosts_per_subnet)
      ->capture_default_str();
  synth->add_option("--lifetime-hours", synth_params.mean_lifetime_hours,
                    "mean temporary address lifetime")
      ->capture_default_str();
  synth->add_option("--overlap", synth_params.overlap_fraction,
                    "largest fraction of a lifetime a successor overlaps")
      ->capture_default_str();
  synth->add_option("--gap-probability", synth_params.gap_probability)->capture_default_str();
  synth->add_option("--gap-hours", synth_params.mean_gap_hours)->capture_default_str();
  synth->add_option("--rate", synth_params.activity_per_hour, "activity events per hour")
      ->capture_default_str();
  synth->add_option("--max-addresses", synth_params.max_addresses_per_host,
                    "addresses per host, 0 for unlimited")
      ->capture_default_str();
  synth->add_option("--events-per-address", synth_params.activity_per_address,
                    "fixed event count per address instead of a rate")
      ->capture_default_str();
  synth->add_option("--start", synth_start, "window start")->capture_default_str();
  synth->add_option("--interval-seconds", synth_params.grid.interval_seconds)
      ->capture_default_str();
  synth->add_option("--intervals", synth_params.grid.intervals)->capture_default_str();
  synth->add_option("--log-out", synth_log, "log file")->capture_default_str();
  synth->add_option("--truth-out", synth_truth, "oracle truth file");
  synth->add_option("--manifest-out", synth_manifest, "scenario manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*classify) {
    Source source(classify_flags.input);
    Ingested r = ingest(source, classify_flags);
    Sink out(classify_out);
    write_classification(out.stream(), r.analysis);
  } else if (*matrix) {
    const MatrixView view = matrix_view_from_string(matrix_view);
    std::optional<std::uint64_t> only;
    if (!matrix_subnet.empty()) {
      Prefix p = parse_prefix(matrix_subnet);
      if (p.length() != 64) throw UsageError("--subnet must be a /64");
      only = p.base().subnet64();
    }
    Source source(matrix_flags.input);
    Ingested r = ingest(source, matrix_flags);
    if (r.analysis.subnets.empty()) throw std::runtime_error("no in-window events");
    Sink out(matrix_out);
    bool first = true;
    for (const SubnetAnalysis& s : r.analysis.subnets) {
      if (only && s.subnet != *only) continue;
      if (!first) out.stream() << '\n';
      first = false;
      out.stream() << render_subnet_matrix(r.analysis, s, view, matrix_flags.options());
    }
    if (first) throw std::runtime_error("--subnet matched no active /64");
  } else if (*summarize_cmd) {
    Source source(summarize_flags.input);
    Ingested r = ingest(source, summarize_flags);
    Sink out(summarize_out);
    write_summary(out.stream(), summarize(r.analysis));
  } else if (*aggregate_cmd) {
    const KipConfig cfg = aggregate_kip.config();
    Source source(aggregate_flags.input);
    Ingested r = ingest(source, aggregate_flags);
    require_fenceposts(r.analysis);
    SynthesisResult result = aggregate(r.analysis, cfg);
    Sink out(aggregate_out);
    write_aggregate_set(out.stream(), result.set);
  } else if (*anon) {
    const AggregateSet set = load_set(anon_set);
    const PrefixMatcher matcher = build_matcher(set);
    Source source(anon_in);
    auto in = source.open();
    Sink out(anon_out);
    report_anon(anonymize_stream(*in, out.stream(), matcher, set.residual, anon_options),
                anon_quiet);
  } else if (*eval) {
    const Weighting weighting = weighting_from_string(eval_weighting);
    const AggregateSet set = load_set(eval_set);
    std::vector<std::uint64_t> active;
    if (weighting == Weighting::kPerCovered64) {
      if (eval_log.empty()) throw UsageError("--weighting covered64 needs --log");
      active = observed_64s(eval_log, set.grid, eval_quiet);
    }
    Sink out(eval_out);
    write_lengths(out.stream(), eval_lengths(set, weighting, active));
  } else if (*pipeline) {
    const KipConfig cfg = pipe_kip.config();
    Source source(pipe_flags.input);
    if (!pipe_flags.grid.auto_grid && pipe_flags.grid.intervals < 2) {
      throw UsageError("--intervals must be >= 2 for aggregation (w = 1 has no fenceposts)");
    }
    Ingested r = ingest(source, pipe_flags);
    require_fenceposts(r.analysis);
    if (!pipe_classify.empty()) {
      Sink out(pipe_classify);
      write_classification(out.stream(), r.analysis);
    }
    if (!pipe_summary.empty()) {
      Sink out(pipe_summary);
      write_summary(out.stream(), summarize(r.analysis));
    }
    SynthesisResult result = aggregate(r.analysis, cfg);
    if (!pipe_aggregates.empty()) {
      Sink out(pipe_aggregates);
      write_aggregate_set(out.stream(), result.set);
    }
    if (!pipe_lengths.empty()) {
      Sink out(pipe_lengths);
      write_lengths(out.stream(), eval_lengths(result.set, Weighting::kPerAggregate));
    }
    if (!pipe_anon.empty()) {
      const PrefixMatcher matcher = build_matcher(result.set);
      auto in = source.open();
      Sink out(pipe_anon);
      report_anon(anonymize_stream(*in, out.stream(), matcher, result.set.residual,
                                   pipe_anon_options),
                  pipe_flags.quiet);
    }
  } else if (*synth) {
    synth_params.practice = subnet_practice_from_string(synth_preset);
    auto t = parse_timestamp(synth_start);
    if (!t) throw UsageError("--start: cannot parse '" + synth_start + "'");
    if (synth_params.grid.interval_seconds <= 0 || synth_params.grid.intervals < 1) {
      throw UsageError("--interval-seconds and --intervals must be positive");
    }
    synth_params.grid =
        TimeGrid(*t, synth_params.grid.interval_seconds, synth_params.grid.intervals);
    const Scenario scenario = generate(synth_params);
    {
      Sink out(synth_log);
      write_log(out.stream(), scenario);
    }
    if (!synth_truth.empty()) {
      Sink out(synth_truth);
      write_truth(out.stream(), scenario, oracle_truth(scenario));
    }
    if (!synth_manifest.empty()) {
      Sink out(synth_manifest);
      write_manifest(out.stream(), scenario);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const kip::UsageError& e) {
    std::cerr << "kip: usage error: " << e.what() << '\n';
    return 2;
  } catch (const kip::UnsupportedWindow& e) {
    std::cerr << "kip: usage error: " << e.what() << '\n';
    return 2;
  } catch (const kip::ContractViolation& e) {
    std::cerr << "kip: usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kip: error: " << e.what() << '\n';
    return 1;
  }
}
