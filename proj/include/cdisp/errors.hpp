#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdisp {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A nonblank corpus or gold-set line that does not fit the expected format.
class MalformedLine : public Error {
 public:
  MalformedLine(std::size_t line, const std::string& detail)
      : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input bytes that are not valid UTF-8.
class InvalidEncoding : public Error {
 public:
  explicit InvalidEncoding(std::size_t line)
      : Error("line " + std::to_string(line) + ": invalid UTF-8"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class BadDegree : public Error {
 public:
  using Error::Error;
};

class DuplicateForm : public Error {
 public:
  using Error::Error;
};

class NoContexts : public Error {
 public:
  using Error::Error;
};

class UnknownTarget : public Error {
 public:
  using Error::Error;
};

class DegenerateSample : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NoPositives : public Error {
 public:
  using Error::Error;
};

class EmptyClass : public Error {
 public:
  using Error::Error;
};

class EmptyGoldSet : public Error {
 public:
  using Error::Error;
};

class FingerprintMismatch : public Error {
 public:
  using Error::Error;
};

// Gold items that have no row in the score table being evaluated.
class MissingScores : public Error {
 public:
  explicit MissingScores(std::vector<std::string> ids)
      : Error(describe(ids)), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  static std::string describe(const std::vector<std::string>& ids) {
    std::string msg = "no scores for " + std::to_string(ids.size()) + " gold item(s):";
    for (const auto& id : ids) {
      msg += ' ';
      msg += id;
    }
    return msg;
  }
  std::vector<std::string> ids_;
};

// Unreadable or missing input file; the CLI maps this to exit status 2.
class FileError : public Error {
 public:
  explicit FileError(const std::string& path)
      : Error("cannot open file: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace cdisp
