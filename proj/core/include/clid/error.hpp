#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clid {

enum class Errc {
  // embedding files
  MalformedHeader,
  WrongComponentCount,
  NonFiniteComponent,
  MalformedComponent,
  DuplicateToken,
  TruncatedEntry,
  EntryCountMismatch,
  TokenTooLong,
  OutOfVocabulary,
  // transcripts
  MalformedTranscript,
  UnknownSpeaker,
  EmptySession,
  // transport
  InvalidProblem,
  InfeasibleMarginals,
  TooLarge,
  SolverDidNotConverge,
  // coordination
  IndexOutOfRange,
  InsufficientTurns,
  InvalidArgument,
  // baselines
  DatabaseUnavailable,
  CyclicTaxonomy,
  // stats
  LengthMismatch,
  DegenerateInput,
  // cli / reports
  Io,
  NoSessions,
  NoOverlap,
  NoPairs,
  NonNumericRating,
  MissingColumn,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library. `line()` is set for file-parsing
/// failures (1-based); `subject()` carries the offending token or session.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::optional<std::size_t> line = std::nullopt,
        std::string subject = {});

  [[nodiscard]] Errc code() const noexcept { return code_; }
  [[nodiscard]] std::optional<std::size_t> line() const noexcept { return line_; }
  [[nodiscard]] const std::string& subject() const noexcept { return subject_; }

 private:
  Errc code_;
  std::optional<std::size_t> line_;
  std::string subject_;
};

}  // namespace clid
