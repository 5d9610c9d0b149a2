#pragma once

#include <stdexcept>
#include <string>

namespace isar {

/// Failure raised by one of the pipeline modules. `what()` is prefixed with the
/// module name so command-line messages point at the violated precondition.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

}  // namespace isar
