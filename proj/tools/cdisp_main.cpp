// cdisp - contextual dispersion scores for corpus target expressions.
//
// Subcommands:
//   count     parse + filter a vertical corpus and count window contexts
//   score     turn a counts table into entropy/frequency/types scores
//   evaluate  compare scores against a labeled gold set
//   run       count, score and evaluate in one go

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cdisp/config.hpp"
#include "cdisp/errors.hpp"
#include "cdisp/pipeline.hpp"
#include "cdisp/textutil.hpp"

namespace {

struct CliOptions {
  cdisp::config::RunConfig config;
  std::string match_field = "surface";
  std::vector<std::string> stop_pos;
  std::string config_file;
  std::string corpus_path;
  std::string gold_path;
  std::string counts_path;
  std::string scores_path;
};

void add_config_flags(CLI::App& cmd, CliOptions& opts) {
  cmd.add_option("--window", opts.config.window, "Context window size in tokens per side")
      ->capture_default_str()
      ->check(CLI::PositiveNumber)
      ->envname("CDISP_WINDOW");
  cmd.add_option("--min-count", opts.config.min_count,
                 "Keep only lemma:POS keys with at least this corpus count")
      ->capture_default_str()
      ->envname("CDISP_MIN_COUNT");
  cmd.add_option("--stop-pos", opts.stop_pos,
                 "Comma-separated POS tags to delete (default: STTS function-word tags)")
      ->delimiter(',')
      ->envname("CDISP_STOP_POS");
  cmd.add_option("--log-base", opts.config.log_base, "Logarithm base for entropy")
      ->capture_default_str()
      ->check(CLI::Range(1.0 + 1e-9, 1e9))
      ->envname("CDISP_LOG_BASE");
  cmd.add_option("--match-field", opts.match_field, "Token field targets are matched on")
      ->capture_default_str()
      ->check(CLI::IsMember({"surface", "lemma"}))
      ->envname("CDISP_MATCH_FIELD");
  cmd.add_flag("--case-fold,!--no-case-fold", opts.config.case_fold,
               "Case-fold lemmas and match keys (default: on)")
      ->capture_default_str()
      ->envname("CDISP_CASE_FOLD");
  cmd.add_flag("--include-missing,!--no-include-missing", opts.config.include_missing,
               "Evaluate targets that never occurred with no-data scores (default: on)")
      ->capture_default_str()
      ->envname("CDISP_INCLUDE_MISSING");
  cmd.add_option("--threads", opts.config.threads,
                 "Worker threads for counting (0 = all hardware threads)")
      ->capture_default_str()
      ->envname("CDISP_THREADS");
  cmd.add_option("--output-dir", opts.config.output_dir, "Directory for output artifacts")
      ->capture_default_str()
      ->envname("CDISP_OUTPUT_DIR");
  cmd.add_option("--config", opts.config_file,
                 "key=value file with defaults for the flags above; explicit flags "
                 "and environment variables win")
      ->envname("CDISP_CONFIG");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  throw cdisp::DomainError("config file: bad boolean for " + key + ": " + value);
}

// Applies a key=value config file underneath whatever was set on the command
// line or through the environment (both of which CLI11 counts).
void apply_config_file(const CLI::App& cmd, CliOptions& opts) {
  if (opts.config_file.empty()) return;
  std::ifstream in(opts.config_file);
  if (!in) throw cdisp::FileError(opts.config_file);

  const auto unset = [&](const std::string& flag) { return cmd.count(flag) == 0; };
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = cdisp::strip_cr(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw cdisp::MalformedLine(line_number, "config file: expected key=value");
    }
    const std::string key(text.substr(0, eq));
    const std::string value(text.substr(eq + 1));
    if (key == "window") {
      if (unset("--window")) opts.config.window = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "min-count") {
      if (unset("--min-count")) opts.config.min_count = std::stoull(value);
    } else if (key == "stop-pos") {
      if (unset("--stop-pos")) {
        opts.stop_pos.clear();
        for (const auto tag : cdisp::split(value, ',')) opts.stop_pos.emplace_back(tag);
      }
    } else if (key == "log-base") {
      if (unset("--log-base")) opts.config.log_base = std::stod(value);
    } else if (key == "match-field") {
      if (unset("--match-field")) opts.match_field = value;
    } else if (key == "case-fold") {
      if (unset("--case-fold")) opts.config.case_fold = parse_bool(key, value);
    } else if (key == "include-missing") {
      if (unset("--include-missing")) opts.config.include_missing = parse_bool(key, value);
    } else if (key == "threads") {
      if (unset("--threads")) opts.config.threads = static_cast<unsigned>(std::stoul(value));
    } else if (key == "output-dir") {
      if (unset("--output-dir")) opts.config.output_dir = value;
    } else {
      throw cdisp::DomainError("config file line " + std::to_string(line_number) +
                               ": unknown key: " + key);
    }
  }
}

void finalize_config(const CLI::App& cmd, CliOptions& opts) {
  apply_config_file(cmd, opts);
  opts.config.match_field = cdisp::targets::parse_match_field(opts.match_field);
  if (!opts.stop_pos.empty()) {
    opts.config.stop_pos.clear();
    for (auto& tag : opts.stop_pos) {
      if (!tag.empty()) opts.config.stop_pos.insert(tag);
    }
  }
  opts.config.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual dispersion measures (entropy, frequency, context types)\n"
               "over window co-occurrence counts, with rank-correlation and\n"
               "average-precision evaluation against a labeled gold set."};
  app.require_subcommand(1);

  CliOptions opts;

  auto* count = app.add_subcommand("count", "Count window contexts of all gold targets");
  count->add_option("--corpus", opts.corpus_path, "Vertical corpus file (surface TAB lemma TAB pos)")
      ->required();
  count->add_option("--gold", opts.gold_path, "Gold TSV (form TAB degree)")->required();
  add_config_flags(*count, opts);

  auto* score = app.add_subcommand("score", "Score a counts table");
  score->add_option("--counts", opts.counts_path, "counts.tsv produced by `count`")->required();
  add_config_flags(*score, opts);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate scores against the gold set");
  evaluate->add_option("--scores", opts.scores_path, "scores.tsv produced by `score`")
      ->required();
  evaluate->add_option("--gold", opts.gold_path, "Gold TSV (form TAB degree)")->required();
  add_config_flags(*evaluate, opts);

  auto* run = app.add_subcommand("run", "Count, score and evaluate in one go");
  run->add_option("--corpus", opts.corpus_path, "Vertical corpus file (surface TAB lemma TAB pos)")
      ->required();
  run->add_option("--gold", opts.gold_path, "Gold TSV (form TAB degree)")->required();
  add_config_flags(*run, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    const CLI::App* active = app.get_subcommands().front();
    finalize_config(*active, opts);
    namespace pl = cdisp::pipeline;
    if (count->parsed()) {
      pl::run_count(opts.corpus_path, opts.gold_path, opts.config);
    } else if (score->parsed()) {
      const std::filesystem::path tsv = opts.counts_path;
      std::filesystem::path meta = tsv;
      meta.replace_extension();  // counts.tsv -> counts
      meta += ".meta.json";
      pl::run_score(tsv, meta, opts.config);
    } else if (evaluate->parsed()) {
      pl::run_evaluate(opts.scores_path, opts.gold_path, opts.config);
    } else if (run->parsed()) {
      pl::run_pipeline(opts.corpus_path, opts.gold_path, opts.config);
    }
  } catch (const cdisp::FileError& e) {
    std::cerr << "cdisp: " << e.what() << "\n";
    return 2;
  } catch (const cdisp::Error& e) {
    std::cerr << "cdisp: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "cdisp: unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
