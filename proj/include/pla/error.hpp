#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pla {

// All failures surface as Error with a stable machine-readable kind tag
// (e.g. "MissingAttribute", "CsvSchemaError"). The CLI prints "<kind>: <msg>"
// on stderr and exits nonzero.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void raise(std::string kind, const std::string& msg) {
  throw Error(std::move(kind), msg);
}

}  // namespace pla
