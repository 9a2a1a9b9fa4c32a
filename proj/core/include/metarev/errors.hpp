#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace metarev {

/// One rule violation found while validating a record: where + why.
struct Violation {
    std::string path;
    std::string reason;
    bool operator==(const Violation&) const = default;
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// All violations found in a record, collected before throwing.
class ValidationError : public Error {
  public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(summarize(violations)), violations_(std::move(violations)) {}

    const std::vector<Violation>& violations() const { return violations_; }

    static std::string summarize(const std::vector<Violation>& vs) {
        std::string out = "validation failed";
        for (const auto& v : vs) {
            out += "; " + v.path + ": " + v.reason;
        }
        return out;
    }

  private:
    std::vector<Violation> violations_;
};

class DecodeError : public Error {
  public:
    DecodeError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

class IoError : public Error {
  public:
    using Error::Error;
};

class SpanError : public Error {
  public:
    using Error::Error;
};

class DanglingDocRef : public Error {
  public:
    explicit DanglingDocRef(const std::string& doc_id)
        : Error("annotation references unknown document: " + doc_id), doc_id_(doc_id) {}
    const std::string& doc_id() const { return doc_id_; }

  private:
    std::string doc_id_;
};

class EmptyInput : public Error {
  public:
    using Error::Error;
};

class InsufficientData : public Error {
  public:
    using Error::Error;
};

class DegenerateAgreement : public Error {
  public:
    using Error::Error;
};

class InsufficientRatings : public Error {
  public:
    using Error::Error;
};

class EmptyRatings : public Error {
  public:
    using Error::Error;
};

class LengthMismatch : public Error {
  public:
    using Error::Error;
};

class NoJudgements : public Error {
  public:
    using Error::Error;
};

class UnboundPlaceholder : public Error {
  public:
    explicit UnboundPlaceholder(const std::string& name)
        : Error("unbound placeholder: {{" + name + "}}"), name_(name) {}
    const std::string& name() const { return name_; }

  private:
    std::string name_;
};

class BackendError : public Error {
  public:
    using Error::Error;
};

class ReplayMiss : public BackendError {
  public:
    explicit ReplayMiss(const std::string& fingerprint)
        : BackendError("no recorded completion for request " + fingerprint),
          fingerprint_(fingerprint) {}
    const std::string& fingerprint() const { return fingerprint_; }

  private:
    std::string fingerprint_;
};

class UnparseableReply : public Error {
  public:
    using Error::Error;
};

}  // namespace metarev
