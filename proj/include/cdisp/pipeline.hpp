#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cdisp/config.hpp"
#include "cdisp/cooc.hpp"
#include "cdisp/corpus.hpp"
#include "cdisp/errors.hpp"
#include "cdisp/evalreport.hpp"
#include "cdisp/fingerprint.hpp"
#include "cdisp/measures.hpp"
#include "cdisp/targets.hpp"

namespace cdisp::pipeline {

namespace fs = std::filesystem;

struct ArtifactPaths {
  fs::path counts_tsv;
  fs::path counts_meta;
  fs::path scores_tsv;
  fs::path report_tsv;
  fs::path report_json;
};

inline ArtifactPaths artifact_paths(const fs::path& output_dir) {
  return ArtifactPaths{output_dir / "counts.tsv", output_dir / "counts.meta.json",
                       output_dir / "scores.tsv", output_dir / "report.tsv",
                       output_dir / "report.json"};
}

inline std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path.string());
  return in;
}

inline std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError(path.string());
  return out;
}

// Every text artifact starts with this block: kind, fingerprints, and the
// full resolved configuration.
inline void write_header(std::ostream& out, std::string_view kind,
                         const config::RunConfig& cfg, std::uint64_t corpus_digest) {
  out << "# cdisp " << kind << "\n";
  out << "# config_fingerprint=" << to_hex(cfg.fingerprint()) << "\n";
  out << "# corpus_digest=" << to_hex(corpus_digest) << "\n";
  std::istringstream lines(cfg.canonical());
  std::string line;
  while (std::getline(lines, line)) out << "# " << line << "\n";
}

// Reads the leading '#' block of an artifact into key=value pairs.
inline std::map<std::string, std::string> read_header(std::istream& in) {
  std::map<std::string, std::string> header;
  while (in.peek() == '#') {
    std::string line;
    std::getline(in, line);
    std::string_view text = strip_cr(line);
    text.remove_prefix(1);
    if (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    const auto eq = text.find('=');
    if (eq != std::string_view::npos) {
      header.emplace(std::string(text.substr(0, eq)), std::string(text.substr(eq + 1)));
    }
  }
  return header;
}

inline void check_fingerprint(const std::map<std::string, std::string>& header,
                              const config::RunConfig& cfg, const std::string& what) {
  const auto it = header.find("config_fingerprint");
  if (it == header.end()) {
    throw FingerprintMismatch(what + ": missing config_fingerprint header");
  }
  if (parse_hex64(it->second) != cfg.fingerprint()) {
    throw FingerprintMismatch(what + ": artifact was produced under a different configuration (" +
                              it->second + " != " + to_hex(cfg.fingerprint()) + ")");
  }
}

namespace detail {

// Drives sharded fork-join processing of sentence batches. process(sentence)
// runs on worker threads against per-shard accumulators; results merge in
// shard order, so outputs never depend on the thread count.
template <typename Shard, typename ProcessFn, typename MergeFn>
void for_each_batch_sharded(corpus::VerticalReader& reader, unsigned threads,
                            std::vector<Shard>& shards, const ProcessFn& process,
                            const MergeFn& merge, Shard& into) {
  constexpr std::size_t kBatchSentences = 4096;
  std::vector<corpus::Sentence> batch;
  batch.reserve(kBatchSentences);
  corpus::Sentence s;
  bool more = true;
  while (more) {
    batch.clear();
    while (batch.size() < kBatchSentences && (more = reader.next(s))) {
      batch.push_back(std::move(s));
    }
    if (batch.empty()) break;
    const unsigned used = static_cast<unsigned>(
        std::min<std::size_t>(threads, std::max<std::size_t>(1, batch.size())));
    if (used <= 1) {
      for (const auto& sentence : batch) process(sentence, shards[0]);
    } else {
      std::vector<std::thread> workers;
      const std::size_t chunk = (batch.size() + used - 1) / used;
      for (unsigned t = 0; t < used; ++t) {
        const std::size_t begin = std::min(batch.size(), static_cast<std::size_t>(t) * chunk);
        const std::size_t end = std::min(batch.size(), begin + chunk);
        workers.emplace_back([&, t, begin, end] {
          for (std::size_t i = begin; i < end; ++i) process(batch[i], shards[t]);
        });
      }
      for (auto& w : workers) w.join();
    }
  }
  for (auto& shard : shards) {
    merge(into, shard);
    shard = Shard{};
  }
}

}  // namespace detail

// Corpus frequency pass (only needed when min_count > 1).
inline corpus::FrequencyTable build_frequency_table_file(const fs::path& corpus_path,
                                                         const config::RunConfig& cfg) {
  auto in = open_input(corpus_path);
  corpus::VerticalReader reader(in);
  const unsigned threads =
      cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  std::vector<corpus::FrequencyTable> shards(threads);
  corpus::FrequencyTable total;
  detail::for_each_batch_sharded(
      reader, threads, shards,
      [&](const corpus::Sentence& s, corpus::FrequencyTable& acc) {
        for (const auto& t : s.tokens) acc.add(corpus::normalize(t, cfg.case_fold));
      },
      [](corpus::FrequencyTable& into, const corpus::FrequencyTable& from) { into.merge(from); },
      total);
  return total;
}

// Filter + match + count in one streaming pass. Returns the finished table
// with the corpus digest recorded in its metadata.
inline cooc::CoocTable count_corpus_file(const fs::path& corpus_path,
                                         const targets::TargetLexicon& lexicon,
                                         const config::RunConfig& cfg) {
  cfg.validate();
  corpus::FrequencyTable freq;
  if (cfg.min_count > 1) freq = build_frequency_table_file(corpus_path, cfg);

  auto in = open_input(corpus_path);
  corpus::VerticalReader reader(in);
  const unsigned threads =
      cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  const auto pc = cfg.preprocess();
  const corpus::KeepPredicate protect = [&](const corpus::AnnotatedToken& t) {
    return lexicon.is_target_key(t);
  };

  cooc::TableMeta meta;
  meta.window = cfg.window;
  meta.config_fingerprint = cfg.fingerprint();
  std::vector<cooc::CoocTable> shards(threads);
  for (auto& shard : shards) shard.meta = meta;
  cooc::CoocTable table = cooc::make_empty_table(lexicon, meta);
  detail::for_each_batch_sharded(
      reader, threads, shards,
      [&](const corpus::Sentence& s, cooc::CoocTable& acc) {
        corpus::Sentence filtered = s;
        corpus::filter_sentence(filtered, pc, freq, protect);
        if (filtered.tokens.empty()) return;
        cooc::count_sentence(filtered, lexicon, cfg.window, cfg.case_fold, acc);
      },
      [](cooc::CoocTable& into, const cooc::CoocTable& from) { cooc::merge_into(into, from); },
      table);
  table.meta.corpus_digest = reader.digest();
  return table;
}

inline void write_counts_artifacts(const ArtifactPaths& paths, const cooc::CoocTable& table,
                                   const config::RunConfig& cfg) {
  auto tsv = open_output(paths.counts_tsv);
  write_header(tsv, "counts", cfg, table.meta.corpus_digest);
  cooc::write_counts_tsv(tsv, table);

  nlohmann::ordered_json meta;
  meta["kind"] = "counts-meta";
  meta["window"] = table.meta.window;
  meta["config_fingerprint"] = to_hex(table.meta.config_fingerprint);
  meta["corpus_digest"] = to_hex(table.meta.corpus_digest);
  nlohmann::ordered_json occ(nlohmann::json::value_t::object);
  std::map<std::string, std::uint64_t> sorted(table.occurrences.begin(),
                                              table.occurrences.end());
  for (const auto& [id, n] : sorted) occ[id] = n;
  meta["occurrences"] = std::move(occ);
  auto out = open_output(paths.counts_meta);
  out << meta.dump(2) << '\n';
}

inline cooc::CoocTable read_counts_artifacts(const fs::path& counts_tsv,
                                             const fs::path& counts_meta) {
  cooc::CoocTable table;
  {
    auto in = open_input(counts_meta);
    nlohmann::json meta = nlohmann::json::parse(in);
    table.meta.window = meta.at("window").get<std::uint32_t>();
    table.meta.config_fingerprint = parse_hex64(meta.at("config_fingerprint").get<std::string>());
    table.meta.corpus_digest = parse_hex64(meta.at("corpus_digest").get<std::string>());
    for (const auto& [id, n] : meta.at("occurrences").items()) {
      table.occurrences[id] = n.get<std::uint64_t>();
    }
  }
  auto in = open_input(counts_tsv);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = strip_cr(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split(text, '\t');
    if (fields.size() != 3) throw MalformedLine(line_number, "expected 3 count columns");
    std::uint64_t n = 0;
    try {
      n = std::stoull(std::string(fields[2]));
    } catch (const std::exception&) {
      throw MalformedLine(line_number, "unparseable count");
    }
    if (n == 0) throw MalformedLine(line_number, "zero count row");
    table.contexts[std::string(fields[0])][std::string(fields[1])] += n;
  }
  return table;
}

// count: corpus + gold -> counts.tsv + counts.meta.json
inline cooc::CoocTable run_count(const fs::path& corpus_path, const fs::path& gold_path,
                                 const config::RunConfig& cfg) {
  auto gold_in = open_input(gold_path);
  const auto gold = targets::load_goldset(gold_in);
  if (gold.empty()) throw EmptyGoldSet("gold set is empty: " + gold_path.string());
  const targets::TargetLexicon lexicon(gold, cfg.match_field, cfg.case_fold);
  auto table = count_corpus_file(corpus_path, lexicon, cfg);
  write_counts_artifacts(artifact_paths(cfg.output_dir), table, cfg);
  return table;
}

// score: counts artifacts -> scores.tsv
inline measures::ScoreTable run_score(const fs::path& counts_tsv, const fs::path& counts_meta,
                                      const config::RunConfig& cfg) {
  cfg.validate();
  {
    auto in = open_input(counts_tsv);
    check_fingerprint(read_header(in), cfg, "counts");
  }
  const auto table = read_counts_artifacts(counts_tsv, counts_meta);
  if (table.meta.config_fingerprint != cfg.fingerprint()) {
    throw FingerprintMismatch("counts metadata was produced under a different configuration");
  }
  const auto scores = measures::score_all(table, cfg.log_base);
  const auto paths = artifact_paths(cfg.output_dir);
  auto out = open_output(paths.scores_tsv);
  write_header(out, "scores", cfg, table.meta.corpus_digest);
  measures::write_scores_tsv(out, scores);
  return scores;
}

inline std::string format_stat(double v) { return measures::format_entropy(v); }

inline nlohmann::ordered_json report_to_json(const evalreport::EvalReport& report,
                                             const config::RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["kind"] = "report";
  j["config_fingerprint"] = to_hex(report.config_fingerprint);
  j["corpus_digest"] = to_hex(report.corpus_digest);
  nlohmann::ordered_json jcfg;
  {
    std::istringstream lines(cfg.canonical());
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find('=');
      jcfg[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  j["config"] = std::move(jcfg);
  j["n_evaluated"] = report.n_evaluated;
  j["n_no_data"] = report.n_no_data;

  nlohmann::ordered_json jrho;
  for (std::size_t m = 0; m < 3; ++m) {
    nlohmann::ordered_json cell;
    cell["degenerate"] = report.rho[m].degenerate;
    if (!report.rho[m].degenerate) {
      cell["rho"] = report.rho[m].rho;
      cell["p_two_tailed"] = report.rho[m].p;
    }
    jrho[std::string(evalreport::kMeasureNames[m])] = std::move(cell);
  }
  j["spearman_rho"] = std::move(jrho);

  nlohmann::ordered_json jap;
  nlohmann::ordered_json jap_ties;
  for (std::size_t pi = 0; pi < evalreport::kDegreePairs.size(); ++pi) {
    const std::string label = std::to_string(evalreport::kDegreePairs[pi].first) + "v" +
                              std::to_string(evalreport::kDegreePairs[pi].second);
    nlohmann::ordered_json row;
    nlohmann::ordered_json row_ties;
    for (std::size_t m = 0; m < 3; ++m) {
      row[std::string(evalreport::kMeasureNames[m])] = report.ap[pi][m].ap;
      row_ties[std::string(evalreport::kMeasureNames[m])] = report.ap[pi][m].expected_ties;
    }
    jap[label] = std::move(row);
    jap_ties[label] = std::move(row_ties);
  }
  j["average_precision"] = std::move(jap);
  j["average_precision_expected_ties"] = std::move(jap_ties);

  nlohmann::ordered_json jcmp = nlohmann::json::array();
  for (const auto& cmp : report.comparisons) {
    nlohmann::ordered_json c;
    c["measures"] = std::string(evalreport::kMeasureNames[cmp.measure_a]) + "_vs_" +
                    std::string(evalreport::kMeasureNames[cmp.measure_b]);
    c["available"] = cmp.available;
    if (cmp.available) {
      c["r1"] = cmp.result.r1;
      c["r2"] = cmp.result.r2;
      c["r12"] = cmp.result.r12;
      c["z"] = cmp.result.z_stat;
      c["p_two_tailed"] = cmp.result.p_two_tailed;
    }
    jcmp.push_back(std::move(c));
  }
  j["steiger_comparisons"] = std::move(jcmp);

  j["method"] = {
      {"rho_p", "t approximation with n-2 df, two-tailed, no tie adjustment"},
      {"steiger", "pooled mean correlation form, two-tailed"},
      {"ap_tie_break", "descending score, ties by ascending target id"},
      {"no_data_items", "scored (0, 0, 0) and ranked bottom"},
  };
  return j;
}

// evaluate: scores.tsv + gold -> report.tsv + report.json
inline evalreport::EvalReport run_evaluate(const fs::path& scores_tsv, const fs::path& gold_path,
                                           const config::RunConfig& cfg) {
  cfg.validate();
  std::uint64_t corpus_digest = 0;
  measures::ScoreTable scores;
  {
    auto in = open_input(scores_tsv);
    const auto header = read_header(in);
    check_fingerprint(header, cfg, "scores");
    if (const auto it = header.find("corpus_digest"); it != header.end()) {
      corpus_digest = parse_hex64(it->second);
    }
    in.seekg(0);
    scores = measures::read_scores_tsv(in, cfg.log_base);
  }
  auto gold_in = open_input(gold_path);
  const auto gold = targets::load_goldset(gold_in);
  if (gold.empty()) throw EmptyGoldSet("gold set is empty: " + gold_path.string());

  auto report = evalreport::build_report(scores, gold, cfg.include_missing);
  report.config_fingerprint = cfg.fingerprint();
  report.corpus_digest = corpus_digest;

  const auto paths = artifact_paths(cfg.output_dir);
  {
    auto out = open_output(paths.report_tsv);
    write_header(out, "report", cfg, corpus_digest);
    out << "# n_evaluated=" << report.n_evaluated << "\n";
    out << "# n_no_data=" << report.n_no_data << "\n";
    evalreport::write_report_tsv(out, report);
  }
  {
    auto out = open_output(paths.report_json);
    out << report_to_json(report, cfg).dump(2) << '\n';
  }
  return report;
}

struct PipelineResult {
  measures::ScoreTable scores;
  evalreport::EvalReport report;
};

// run = count -> score -> evaluate, chained through the written artifacts so
// its outputs are byte-identical to running the three stages separately.
inline PipelineResult run_pipeline(const fs::path& corpus_path, const fs::path& gold_path,
                                   const config::RunConfig& cfg) {
  cfg.validate();
  const auto paths = artifact_paths(cfg.output_dir);
  run_count(corpus_path, gold_path, cfg);
  PipelineResult result;
  result.scores = run_score(paths.counts_tsv, paths.counts_meta, cfg);
  result.report = run_evaluate(paths.scores_tsv, gold_path, cfg);
  return result;
}

}  // namespace cdisp::pipeline
