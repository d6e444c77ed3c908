#pragma once

#include <stdexcept>
#include <string>

namespace sshift {

// Every failure the library can signal deliberately. Code that catches
// Error switches on kind(); what() carries a human-readable detail line.
enum class ErrorKind {
  OutOfWindow,     // pattern support does not fit in the word / window
  BudgetExceeded,  // enumeration or search cap hit before an answer
  BudgetExhausted, // machine run out of steps; divergence suspected
  WindowTooSmall,  // window shorter than a sliding rule needs
  EmptySet,        // no admissible word at the requested level
  NoPatterns,      // operation needs at least one forbidden pattern
  HeaderMismatch,  // encoded stream header disagrees with expectation
  ZeroAlphabet,    // alphabet size 0 is never meaningful
  MalformedCode,   // undecodable integer code / stream
  NoCompleteCell,  // decoder window shows no complete coding cell
  SizeMismatch,    // two sequences that must agree in length do not
  CapExceeded,     // level search passed its configured ceiling
  NotBit,          // a 0/1 stream produced another value
  AlphabetTooLarge,// target alphabet does not fit the layer's letter budget
  NotSFT,          // operation needs a finite forbidden set
  BadArgument,     // CLI / manifest level misuse
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  const char* kind_name() const {
    switch (kind_) {
      case ErrorKind::OutOfWindow: return "OutOfWindow";
      case ErrorKind::BudgetExceeded: return "BudgetExceeded";
      case ErrorKind::BudgetExhausted: return "BudgetExhausted";
      case ErrorKind::WindowTooSmall: return "WindowTooSmall";
      case ErrorKind::EmptySet: return "EmptySet";
      case ErrorKind::NoPatterns: return "NoPatterns";
      case ErrorKind::HeaderMismatch: return "HeaderMismatch";
      case ErrorKind::ZeroAlphabet: return "ZeroAlphabet";
      case ErrorKind::MalformedCode: return "MalformedCode";
      case ErrorKind::NoCompleteCell: return "NoCompleteCell";
      case ErrorKind::SizeMismatch: return "SizeMismatch";
      case ErrorKind::CapExceeded: return "CapExceeded";
      case ErrorKind::NotBit: return "NotBit";
      case ErrorKind::AlphabetTooLarge: return "AlphabetTooLarge";
      case ErrorKind::NotSFT: return "NotSFT";
      case ErrorKind::BadArgument: return "BadArgument";
    }
    return "Unknown";
  }

private:
  ErrorKind kind_;
};

}  // namespace sshift
