#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace botspot {

// Base of all recoverable toolkit errors. kind() is a stable machine-readable
// tag; the CLI prints failures as "error:<kind>: <message>".
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define BOTSPOT_ERROR_CLASS(Name, tag)                 \
  class Name : public Error {                          \
   public:                                             \
    explicit Name(const std::string& message)          \
        : Error(tag, message) {}                       \
  }

BOTSPOT_ERROR_CLASS(ParseError, "parse");
BOTSPOT_ERROR_CLASS(UnknownLabelError, "unknown_label");
BOTSPOT_ERROR_CLASS(DuplicateIdError, "duplicate_id");
BOTSPOT_ERROR_CLASS(InsufficientSamplesError, "insufficient_samples");
BOTSPOT_ERROR_CLASS(InsufficientClassesError, "insufficient_classes");
BOTSPOT_ERROR_CLASS(EmptyDatasetError, "empty_dataset");
BOTSPOT_ERROR_CLASS(EmptyCorpusError, "empty_corpus");
BOTSPOT_ERROR_CLASS(EmptyTextError, "empty_text");
BOTSPOT_ERROR_CLASS(EmptyInputError, "empty_input");
BOTSPOT_ERROR_CLASS(BadWeightsError, "bad_weights");
BOTSPOT_ERROR_CLASS(NonPositiveScoreError, "non_positive_score");
BOTSPOT_ERROR_CLASS(TooManyTokensError, "too_many_tokens");
BOTSPOT_ERROR_CLASS(LengthMismatchError, "length_mismatch");
BOTSPOT_ERROR_CLASS(InvalidArgumentError, "invalid_argument");
BOTSPOT_ERROR_CLASS(IoError, "io");
BOTSPOT_ERROR_CLASS(UsageError, "usage");

#undef BOTSPOT_ERROR_CLASS

}  // namespace botspot
