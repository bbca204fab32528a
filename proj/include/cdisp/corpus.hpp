#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cdisp/errors.hpp"
#include "cdisp/fingerprint.hpp"
#include "cdisp/textutil.hpp"

namespace cdisp::corpus {

struct AnnotatedToken {
  std::string surface;
  std::string lemma;
  std::string pos;

  bool operator==(const AnnotatedToken&) const = default;
};

struct Sentence {
  std::vector<AnnotatedToken> tokens;

  bool operator==(const Sentence&) const = default;
};

// Separator between lemma and POS in context keys; corpus fields cannot
// contain it unescaped because vertical input is tab-delimited, and the
// STTS tagset does not use ':'.
inline constexpr char kKeySeparator = ':';

// Context key of one token: lemma (optionally case-folded) + ':' + POS.
inline std::string normalize(const AnnotatedToken& token, bool case_fold) {
  std::string key = case_fold ? fold_case(token.lemma) : token.lemma;
  key.push_back(kKeySeparator);
  key += token.pos;
  return key;
}

// STTS function-word tags removed by default preprocessing.
inline const std::set<std::string>& default_stop_pos() {
  static const std::set<std::string> tags = {
      "ART",   "APPR",  "APPRART", "APPO",   "APZR",  "KON",    "KOUS",
      "KOUI",  "KOKOM", "PTKZU",   "PTKNEG", "PTKVZ", "PTKANT", "PTKA",
      "PPER",  "PRF",   "PPOSAT",  "PDAT",   "PIAT",  "PRELS",  "PWS",
      "PAV",   "VAFIN", "VAINF",   "VAIMP",  "VAPP"};
  return tags;
}

struct PreprocessConfig {
  std::set<std::string> stop_pos = default_stop_pos();
  std::uint64_t min_count = 1;  // keep keys whose corpus count >= min_count
  bool case_fold = true;
};

// Streaming reader of vertical text: one "surface<TAB>lemma<TAB>pos" token
// per line (extra columns ignored), blank line ends a sentence. Keeps an
// FNV digest of all consumed bytes.
class VerticalReader {
 public:
  explicit VerticalReader(std::istream& in) : in_(in) {}

  // Fills the next nonempty sentence; returns false at end of input.
  bool next(Sentence& out) {
    out.tokens.clear();
    std::string line;
    while (std::getline(in_, line)) {
      ++line_number_;
      digest_.update(line);
      digest_.update('\n');
      const std::string_view text = strip_cr(line);
      if (text.empty()) {
        if (!out.tokens.empty()) return true;
        continue;  // runs of blank lines produce no empty sentences
      }
      if (!valid_utf8(text)) throw InvalidEncoding(line_number_);
      const auto fields = split(text, '\t');
      if (fields.size() < 3) {
        throw MalformedLine(line_number_, "expected at least 3 tab-separated fields, got " +
                                              std::to_string(fields.size()));
      }
      if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
        throw MalformedLine(line_number_, "empty token field");
      }
      out.tokens.push_back(AnnotatedToken{std::string(fields[0]), std::string(fields[1]),
                                          std::string(fields[2])});
    }
    return !out.tokens.empty();  // trailing unterminated sentence
  }

  std::size_t line_number() const { return line_number_; }
  std::uint64_t digest() const { return digest_.digest(); }

 private:
  std::istream& in_;
  std::size_t line_number_ = 0;
  Fnv1a64 digest_;
};

inline std::vector<Sentence> parse_vertical(std::istream& in) {
  VerticalReader reader(in);
  std::vector<Sentence> sentences;
  Sentence s;
  while (reader.next(s)) sentences.push_back(std::move(s));
  return sentences;
}

inline void write_vertical(std::ostream& out, std::span<const Sentence> sentences) {
  bool first = true;
  for (const auto& s : sentences) {
    if (!first) out.put('\n');
    first = false;
    for (const auto& t : s.tokens) {
      out << t.surface << '\t' << t.lemma << '\t' << t.pos << '\n';
    }
  }
}

struct FrequencyTable {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  std::uint64_t count(const std::string& key) const {
    const auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
  }

  void add(const std::string& key) {
    ++counts[key];
    ++total;
  }

  void merge(const FrequencyTable& other) {
    for (const auto& [key, n] : other.counts) counts[key] += n;
    total += other.total;
  }
};

inline FrequencyTable build_frequency_table(std::span<const Sentence> sentences,
                                            bool case_fold = true) {
  FrequencyTable table;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) table.add(normalize(t, case_fold));
  }
  return table;
}

// Tokens for which this returns true bypass both the stop-POS and the
// low-frequency filter (used to protect gold-target tokens).
using KeepPredicate = std::function<bool(const AnnotatedToken&)>;

// In-place filter of one sentence; deleted tokens close gaps.
inline void filter_sentence(Sentence& sentence, const PreprocessConfig& config,
                            const FrequencyTable& freq, const KeepPredicate& keep_always = {}) {
  std::erase_if(sentence.tokens, [&](const AnnotatedToken& t) {
    if (keep_always && keep_always(t)) return false;
    if (config.stop_pos.contains(t.pos)) return true;
    if (config.min_count > 1 && freq.count(normalize(t, config.case_fold)) < config.min_count) {
      return true;
    }
    return false;
  });
}

// Applies stop-POS and low-frequency deletion; emptied sentences are dropped
// and surviving tokens keep their relative order.
inline std::vector<Sentence> apply_filters(std::span<const Sentence> sentences,
                                           const PreprocessConfig& config,
                                           const FrequencyTable& freq,
                                           const KeepPredicate& keep_always = {}) {
  std::vector<Sentence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    Sentence filtered = s;
    filter_sentence(filtered, config, freq, keep_always);
    if (!filtered.tokens.empty()) out.push_back(std::move(filtered));
  }
  return out;
}

}  // namespace cdisp::corpus
