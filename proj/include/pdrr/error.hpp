#pragma once
// Error hierarchy shared by every pipeline stage.
//
// Each concrete error reports a stable class name through kind(); traces,
// run records, and the CLI use that name as the error class.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pdrr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual std::string_view kind() const noexcept { return "Error"; }
};

#define PDRR_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                              \
    public:                                                                  \
        using Error::Error;                                                  \
        std::string_view kind() const noexcept override { return #Name; }    \
    }

// kg_store
PDRR_DEFINE_ERROR(EmptyQuery);
PDRR_DEFINE_ERROR(RemoteUnavailable);
PDRR_DEFINE_ERROR(MissingBinding);

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
    std::string_view kind() const noexcept override { return "ParseError"; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// llm_gateway
PDRR_DEFINE_ERROR(MissingSlot);
PDRR_DEFINE_ERROR(ScriptMiss);
PDRR_DEFINE_ERROR(InvalidTemplate);

class BackendError : public Error {
public:
    BackendError(const std::string& what, bool retriable)
        : Error(what), retriable_(retriable) {}
    std::string_view kind() const noexcept override { return "BackendError"; }
    bool retriable() const noexcept { return retriable_; }

private:
    bool retriable_;
};

// plan
PDRR_DEFINE_ERROR(UnparseableType);
PDRR_DEFINE_ERROR(UnparseableDecomposition);
PDRR_DEFINE_ERROR(InvalidPlan);

// retrieve_reason
PDRR_DEFINE_ERROR(EntityNotFound);
PDRR_DEFINE_ERROR(NoCandidates);

class DeadEnd : public Error {
public:
    explicit DeadEnd(std::size_t hop)
        : Error("no candidates at hop " + std::to_string(hop)), hop_(hop) {}
    std::string_view kind() const noexcept override { return "DeadEnd"; }
    std::size_t hop() const noexcept { return hop_; }

private:
    std::size_t hop_;
};

// answer
PDRR_DEFINE_ERROR(UnparseableAnswer);

// eval / cli
PDRR_DEFINE_ERROR(FormatError);
PDRR_DEFINE_ERROR(Timeout);
PDRR_DEFINE_ERROR(ConfigError);

#undef PDRR_DEFINE_ERROR

}  // namespace pdrr
