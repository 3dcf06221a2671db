#include "icegsa/error.hpp"

namespace icegsa {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension:
      return "dimension";
    case ErrorKind::input:
      return "input";
    case ErrorKind::parameter:
      return "parameter";
    case ErrorKind::config:
      return "config";
    case ErrorKind::ingestion:
      return "ingestion";
    case ErrorKind::fit:
      return "fit";
    case ErrorKind::degenerate_variance:
      return "degenerate-variance";
    case ErrorKind::compute:
      return "compute";
    case ErrorKind::io:
      return "io";
  }
  return "unknown";
}

}  // namespace icegsa
