#include "courtvec/error.hpp"

namespace courtvec {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse_error";
    case ErrorKind::lineup: return "lineup_error";
    case ErrorKind::registry: return "registry_error";
    case ErrorKind::outcome: return "outcome_error";
    case ErrorKind::unmapped_event: return "unmapped_event";
    case ErrorKind::duplicate: return "duplicate_error";
    case ErrorKind::value: return "value_error";
    case ErrorKind::argument: return "argument_error";
    case ErrorKind::divergence: return "divergence_error";
    case ErrorKind::checkpoint: return "checkpoint_error";
    case ErrorKind::support: return "support_error";
    case ErrorKind::degenerate_dimension: return "degenerate_dimension";
    case ErrorKind::sample_size: return "sample_size_error";
    case ErrorKind::degenerate_model: return "degenerate_model";
    case ErrorKind::unknown_player: return "unknown_player";
    case ErrorKind::resolution: return "resolution_error";
    case ErrorKind::io: return "io_error";
  }
  return "error";
}

}  // namespace courtvec
