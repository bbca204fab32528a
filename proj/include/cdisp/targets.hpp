#pragma once

#include <algorithm>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cdisp/corpus.hpp"
#include "cdisp/errors.hpp"
#include "cdisp/textutil.hpp"

namespace cdisp::targets {

struct GoldItem {
  std::vector<std::string> form;  // one or more match keys, in order
  int degree = 0;                 // 1 (low) .. 4 (high)
  std::string id;                 // canonical space-joined form

  bool operator==(const GoldItem&) const = default;
};

enum class MatchField { surface, lemma };

inline std::string_view to_string(MatchField f) {
  return f == MatchField::surface ? "surface" : "lemma";
}

inline MatchField parse_match_field(std::string_view s) {
  if (s == "surface") return MatchField::surface;
  if (s == "lemma") return MatchField::lemma;
  throw DomainError("unknown match field: " + std::string(s));
}

// One target occurrence: token positions [first, last], both inclusive.
struct TargetMatch {
  std::size_t item_index = 0;  // into the lexicon's item vector
  std::size_t first = 0;
  std::size_t last = 0;
};

// Gold file: UTF-8 TSV "form<TAB>degree", '#' comment lines ignored.
// Multi-token forms separate their tokens with single spaces.
inline std::vector<GoldItem> load_goldset(std::istream& in) {
  std::vector<GoldItem> items;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = strip_cr(line);
    if (text.empty() || text.front() == '#') continue;
    if (!valid_utf8(text)) throw InvalidEncoding(line_number);
    const auto fields = split(text, '\t');
    if (fields.size() != 2) {
      throw MalformedLine(line_number, "expected \"form<TAB>degree\"");
    }
    const std::string_view form = fields[0];
    const std::string_view degree_text = fields[1];
    if (form.empty()) throw MalformedLine(line_number, "empty form");

    int degree = 0;
    for (const char c : degree_text) {
      if (c < '0' || c > '9') throw BadDegree("line " + std::to_string(line_number) +
                                              ": degree is not an integer: " +
                                              std::string(degree_text));
      degree = degree * 10 + (c - '0');
      if (degree > 4) break;
    }
    if (degree_text.empty() || degree < 1 || degree > 4) {
      throw BadDegree("line " + std::to_string(line_number) + ": degree must be 1..4, got " +
                      std::string(degree_text));
    }

    GoldItem item;
    for (const auto part : split(form, ' ')) {
      if (part.empty()) throw MalformedLine(line_number, "form has consecutive spaces");
      item.form.emplace_back(part);
    }
    item.degree = degree;
    item.id = std::string(form);
    if (!seen_ids.insert(item.id).second) {
      throw DuplicateForm("line " + std::to_string(line_number) + ": duplicate form: " + item.id);
    }
    items.push_back(std::move(item));
  }
  return items;
}

// Immutable compiled matcher over a gold set. Matching scans left to right,
// is non-overlapping, and compares on the configured token field
// (case-folded when requested).
class TargetLexicon {
 public:
  explicit TargetLexicon(std::vector<GoldItem> items,
                         MatchField match_field = MatchField::surface, bool case_fold = true,
                         bool longest_match = true)
      : items_(std::move(items)),
        match_field_(match_field),
        case_fold_(case_fold),
        longest_match_(longest_match) {
    std::unordered_set<std::string> ids;
    for (const auto& item : items_) {
      if (item.form.empty()) throw DomainError("gold item with empty form: " + item.id);
      if (item.degree < 1 || item.degree > 4) throw BadDegree("gold item " + item.id);
      if (!ids.insert(item.id).second) throw DuplicateForm("duplicate id: " + item.id);
    }
    for (std::size_t i = 0; i < items_.size(); ++i) {
      std::vector<std::string> keys;
      keys.reserve(items_[i].form.size());
      for (const auto& part : items_[i].form) {
        keys.push_back(case_fold_ ? fold_case(part) : part);
      }
      for (const auto& k : keys) all_keys_.insert(k);
      entries_by_first_[keys.front()].push_back(Entry{std::move(keys), i});
    }
    for (auto& [first, entries] : entries_by_first_) {
      std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
        if (a.keys.size() != b.keys.size()) {
          return longest_match_ ? a.keys.size() > b.keys.size() : a.keys.size() < b.keys.size();
        }
        return items_[a.item_index].id < items_[b.item_index].id;
      });
    }
  }

  const std::vector<GoldItem>& items() const { return items_; }
  MatchField match_field() const { return match_field_; }
  bool case_fold() const { return case_fold_; }

  // The token field compared during matching, folded per configuration.
  std::string match_key(const corpus::AnnotatedToken& token) const {
    const std::string& raw = match_field_ == MatchField::surface ? token.surface : token.lemma;
    return case_fold_ ? fold_case(raw) : raw;
  }

  // True when the token's match key occurs in any gold form; such tokens
  // are exempt from corpus filtering so no target vanishes from the study.
  bool is_target_key(const corpus::AnnotatedToken& token) const {
    return all_keys_.contains(match_key(token));
  }

  std::vector<TargetMatch> match(const corpus::Sentence& sentence) const {
    std::vector<TargetMatch> matches;
    if (entries_by_first_.empty()) return matches;
    std::vector<std::string> keys;
    keys.reserve(sentence.tokens.size());
    for (const auto& t : sentence.tokens) keys.push_back(match_key(t));

    std::size_t i = 0;
    while (i < keys.size()) {
      const auto it = entries_by_first_.find(keys[i]);
      if (it == entries_by_first_.end()) {
        ++i;
        continue;
      }
      bool matched = false;
      for (const Entry& entry : it->second) {
        const std::size_t len = entry.keys.size();
        if (i + len > keys.size()) continue;
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
          if (keys[i + k] != entry.keys[k]) {
            ok = false;
            break;
          }
        }
        if (ok) {
          matches.push_back(TargetMatch{entry.item_index, i, i + len - 1});
          i += len;
          matched = true;
          break;
        }
      }
      if (!matched) ++i;
    }
    return matches;
  }

 private:
  struct Entry {
    std::vector<std::string> keys;
    std::size_t item_index;
  };

  std::vector<GoldItem> items_;
  MatchField match_field_;
  bool case_fold_;
  bool longest_match_;
  std::unordered_map<std::string, std::vector<Entry>> entries_by_first_;
  std::unordered_set<std::string> all_keys_;
};

}  // namespace cdisp::targets
