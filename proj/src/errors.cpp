#include "fsi/errors.hpp"

#include <algorithm>

namespace fsi {

namespace {

std::string decorate(const std::string& message, const std::vector<Index>& fibers) {
  if (fibers.empty()) return message;
  std::string out = message + " [fibers:";
  const std::size_t shown = std::min<std::size_t>(fibers.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) out += " " + std::to_string(fibers[i]);
  if (shown < fibers.size()) out += " ...";
  return out + "]";
}

}  // namespace

Error::Error(ErrorKind kind, std::string code, const std::string& message,
             std::vector<Index> fibers)
    : std::runtime_error(decorate(message, fibers)),
      kind_(kind),
      code_(std::move(code)),
      fibers_(std::move(fibers)) {}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation:
    case ErrorKind::resource:
      return 2;
    case ErrorKind::infeasible:
      return 3;
    case ErrorKind::internal:
      return 4;
  }
  return 4;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::internal: return "internal";
    case ErrorKind::resource: return "resource";
  }
  return "internal";
}

}  // namespace fsi
