#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>

#include "cdisp/corpus.hpp"
#include "cdisp/errors.hpp"
#include "cdisp/fingerprint.hpp"
#include "cdisp/targets.hpp"
#include "cdisp/textutil.hpp"

namespace cdisp::config {

// Fully resolved pipeline configuration. The fingerprint covers every field
// that can change artifact content; threads and output_dir deliberately do
// not participate (outputs are identical for any thread count).
struct RunConfig {
  std::uint32_t window = 2;
  std::uint64_t min_count = 1;
  std::set<std::string> stop_pos = corpus::default_stop_pos();
  double log_base = 2.0;
  targets::MatchField match_field = targets::MatchField::surface;
  bool case_fold = true;
  bool include_missing = true;

  unsigned threads = 0;  // 0 = all hardware threads
  std::filesystem::path output_dir = "out";

  void validate() const {
    if (window < 1) throw DomainError("config: window must be >= 1");
    if (!(log_base > 1.0)) throw DomainError("config: log_base must be > 1");
  }

  corpus::PreprocessConfig preprocess() const {
    corpus::PreprocessConfig pc;
    pc.stop_pos = stop_pos;
    pc.min_count = min_count;
    pc.case_fold = case_fold;
    return pc;
  }

  // Canonical "key=value" lines in fixed order; the basis of the fingerprint
  // and of the header echoed into every output artifact.
  std::string canonical() const {
    std::string s;
    s += "case_fold=" + std::string(case_fold ? "1" : "0") + "\n";
    s += "include_missing=" + std::string(include_missing ? "1" : "0") + "\n";
    s += "log_base=" + format_double(log_base) + "\n";
    s += "match_field=" + std::string(targets::to_string(match_field)) + "\n";
    s += "min_count=" + std::to_string(min_count) + "\n";
    std::string tags;
    for (const auto& tag : stop_pos) {  // std::set iterates sorted
      if (!tags.empty()) tags.push_back(',');
      tags += tag;
    }
    s += "stop_pos=" + tags + "\n";
    s += "window=" + std::to_string(window) + "\n";
    return s;
  }

  std::uint64_t fingerprint() const { return fnv1a64(canonical()); }

 private:
  static std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
  }
};

}  // namespace cdisp::config
