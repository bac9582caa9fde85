#include "mediabar/error.hpp"

namespace mediabar {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Io: return "io error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::Degenerate: return "degenerate result";
    case ErrorKind::Usage: return "usage error";
  }
  return "error";
}

}  // namespace mediabar
