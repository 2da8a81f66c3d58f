#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexsimp {

/// Base of every error raised by the toolkit. `kind()` is the stable name
/// used in structured CLI output and HTTP error bodies.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define LEXSIMP_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    };

LEXSIMP_DEFINE_ERROR(IoError)
LEXSIMP_DEFINE_ERROR(TemplateError)
LEXSIMP_DEFINE_ERROR(SpanError)
LEXSIMP_DEFINE_ERROR(TransportError)
LEXSIMP_DEFINE_ERROR(ScriptMissError)
LEXSIMP_DEFINE_ERROR(ConfigError)
LEXSIMP_DEFINE_ERROR(ArityError)
LEXSIMP_DEFINE_ERROR(EmptyOutputError)
LEXSIMP_DEFINE_ERROR(InputError)
LEXSIMP_DEFINE_ERROR(NotFound)
LEXSIMP_DEFINE_ERROR(IncompleteError)

#undef LEXSIMP_DEFINE_ERROR

/// Malformed input text. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message, std::size_t line = 0)
        : Error("ParseError",
                line == 0 ? message : "line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string subject, std::string field, const std::string& message)
        : Error("ValidationError", subject + " [" + field + "]: " + message),
          subject_(std::move(subject)),
          field_(std::move(field)) {}

    const std::string& subject() const noexcept { return subject_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string subject_;
    std::string field_;
};

/// A pipeline stage could not produce any voter output.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& message)
        : Error("StageError", stage + ": " + message), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

} // namespace lexsimp
