#pragma once

#include <stdexcept>
#include <string>

namespace gcollatz {

enum class errc {
  invalid_triplet,
  not_well_formed,
  not_a_cycle,
  no_case_applies,
  invalid_parameters,
  bound_precondition,
  coprimality_violated,
  precision_exhausted,
  m_too_small,
  invalid_targets,
  shortcut_unsound,
  digest_mismatch,
  invalid_checkpoint,
  nothing_to_do,
  internal_defect,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_triplet: return "InvalidTriplet";
    case errc::not_well_formed: return "NotWellFormed";
    case errc::not_a_cycle: return "NotACycle";
    case errc::no_case_applies: return "NoCaseApplies";
    case errc::invalid_parameters: return "InvalidParameters";
    case errc::bound_precondition: return "PreconditionViolated";
    case errc::coprimality_violated: return "CoprimalityViolated";
    case errc::precision_exhausted: return "PrecisionExhausted";
    case errc::m_too_small: return "MTooSmall";
    case errc::invalid_targets: return "InvalidTargets";
    case errc::shortcut_unsound: return "ShortcutUnsound";
    case errc::digest_mismatch: return "DigestMismatch";
    case errc::invalid_checkpoint: return "InvalidCheckpoint";
    case errc::nothing_to_do: return "NothingToDo";
    case errc::internal_defect: return "InternalDefect";
  }
  return "Unknown";
}

// Every domain failure carries a machine-readable code; the CLI maps these to exit 1.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace gcollatz
