#ifndef STATFUSE_ERROR_HPP
#define STATFUSE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace statfuse {

// Every failure carries a short machine-readable code (e.g. "CorruptImage")
// next to the human message. The CLI prints "error: <code>: <message>" and
// maps InputError to exit 2, NumericError to exit 3.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class InputError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace statfuse

#endif
