#include "tsscale/error.hpp"

namespace tsscale {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::ingestion: return 3;
    case ErrorKind::numerical: return 4;
    case ErrorKind::internal: return 5;
  }
  return 5;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::ingestion: return "ingestion";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::internal: return "internal";
  }
  return "internal";
}

}  // namespace tsscale
