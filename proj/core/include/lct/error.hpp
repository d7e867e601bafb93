#pragma once

#include <stdexcept>
#include <string>

namespace lct {

/// Contract or numerical rejection raised by any stage of the toolkit.
/// `stage()` carries a short tag ("solver", "lightray", ...) that the CLI prints.
class Rejected : public std::runtime_error {
 public:
  Rejected(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace lct
