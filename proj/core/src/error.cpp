#include "clid/error.hpp"

namespace clid {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::WrongComponentCount: return "WrongComponentCount";
    case Errc::NonFiniteComponent: return "NonFiniteComponent";
    case Errc::MalformedComponent: return "MalformedComponent";
    case Errc::DuplicateToken: return "DuplicateToken";
    case Errc::TruncatedEntry: return "TruncatedEntry";
    case Errc::EntryCountMismatch: return "EntryCountMismatch";
    case Errc::TokenTooLong: return "TokenTooLong";
    case Errc::OutOfVocabulary: return "OutOfVocabulary";
    case Errc::MalformedTranscript: return "MalformedTranscript";
    case Errc::UnknownSpeaker: return "UnknownSpeaker";
    case Errc::EmptySession: return "EmptySession";
    case Errc::InvalidProblem: return "InvalidProblem";
    case Errc::InfeasibleMarginals: return "InfeasibleMarginals";
    case Errc::TooLarge: return "TooLarge";
    case Errc::SolverDidNotConverge: return "SolverDidNotConverge";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::InsufficientTurns: return "InsufficientTurns";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DatabaseUnavailable: return "DatabaseUnavailable";
    case Errc::CyclicTaxonomy: return "CyclicTaxonomy";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::Io: return "Io";
    case Errc::NoSessions: return "NoSessions";
    case Errc::NoOverlap: return "NoOverlap";
    case Errc::NoPairs: return "NoPairs";
    case Errc::NonNumericRating: return "NonNumericRating";
    case Errc::MissingColumn: return "MissingColumn";
  }
  return "Unknown";
}

namespace {

std::string decorate(Errc code, const std::string& message, std::optional<std::size_t> line) {
  std::string out(to_string(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> line,
             std::string subject)
    : std::runtime_error(decorate(code, message, line)),
      code_(code),
      line_(line),
      subject_(std::move(subject)) {}

}  // namespace clid
