#include "bidfm/errors.hpp"

#include <sstream>

namespace bidfm {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::ostringstream out;
  out << "invalid parameters";
  for (std::size_t i = 0; i < violations.size(); ++i) out << (i == 0 ? ": " : "; ") << violations[i];
  return out.str();
}

std::string with_line(const std::string& what, long line) {
  if (line <= 0) return what;
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

ParseError::ParseError(const std::string& what, long line) : Error(with_line(what, line)), line_(line) {}

}  // namespace bidfm
