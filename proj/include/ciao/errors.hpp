#pragma once

#include <stdexcept>
#include <string>

namespace ciao {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// repository flattening

class RepoNotFound : public Error {
public:
    using Error::Error;
};

class EmptyAfterFiltering : public Error {
public:
    using Error::Error;
};

class DuplicatePath : public Error {
public:
    using Error::Error;
};

// documentation template

class TemplateSyntax : public Error {
public:
    using Error::Error;
};

class TemplateInvalid : public Error {
public:
    using Error::Error;
};

// prompt building

class BudgetTooSmall : public Error {
public:
    using Error::Error;
};

// llm gateway

class AuthFailed : public Error {
public:
    using Error::Error;
};

/// Retryable condition: timeout, rate limit, 5xx-class response, network failure.
class TransientProviderError : public Error {
public:
    using Error::Error;
};

/// Non-retryable provider failure that is neither auth nor transient.
class ProviderError : public Error {
public:
    using Error::Error;
};

/// Raised after the retry budget is spent; carries the last underlying error text.
class ProviderExhausted : public Error {
public:
    using Error::Error;
};

class OutputEmpty : public Error {
public:
    using Error::Error;
};

class UnknownModelPrice : public Error {
public:
    using Error::Error;
};

// orchestration

class SectionGenerationFailed : public Error {
public:
    SectionGenerationFailed(std::string section_id, const std::string& cause)
        : Error("section '" + section_id + "' failed: " + cause),
          section_id_(std::move(section_id)) {}

    const std::string& section_id() const { return section_id_; }

private:
    std::string section_id_;
};

class MissingSection : public Error {
public:
    explicit MissingSection(int index)
        : Error("missing section with index " + std::to_string(index)), index_(index) {}

    int index() const { return index_; }

private:
    int index_;
};

class DuplicateSection : public Error {
public:
    explicit DuplicateSection(int index)
        : Error("duplicate section with index " + std::to_string(index)), index_(index) {}

    int index() const { return index_; }

private:
    int index_;
};

// diagram pipeline

class SpanMismatch : public Error {
public:
    using Error::Error;
};

// cli

class CloneFailed : public Error {
public:
    using Error::Error;
};

class ReportWriteFailed : public Error {
public:
    using Error::Error;
};

} // namespace ciao
