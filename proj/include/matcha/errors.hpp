#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace matcha {

// Root of every error the engine throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& reason)
        : Error("parse error at line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}
    std::size_t line() const { return line_; }
    const std::string& reason() const { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

class DuplicateId : public Error {
public:
    explicit DuplicateId(const std::string& id) : Error("duplicate id: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class UnknownGenre : public Error {
public:
    UnknownGenre(const std::string& id, const std::string& genre)
        : Error("unknown genre '" + genre + "' for game " + id), id_(id), genre_(genre) {}
    const std::string& id() const { return id_; }
    const std::string& genre() const { return genre_; }

private:
    std::string id_;
    std::string genre_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    explicit NotFound(const std::string& id) : Error("not found: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class InvalidDevice : public Error {
public:
    explicit InvalidDevice(const std::string& label) : Error("invalid device label: " + label) {}
};

class InvalidAgeGroup : public Error {
public:
    explicit InvalidAgeGroup(const std::string& label) : Error("invalid age group: " + label) {}
};

class QueryTooLong : public Error {
public:
    explicit QueryTooLong(std::size_t words)
        : Error("search query has " + std::to_string(words) + " words (max 3)") {}
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Provider-side failures.
class ProviderFailure : public Error {
public:
    using Error::Error;
};

class Timeout : public ProviderFailure {
public:
    Timeout(const std::string& provider_id, int attempts)
        : ProviderFailure("provider " + provider_id + " timed out after " + std::to_string(attempts) + " attempt(s)"),
          attempts_(attempts) {}
    int attempts() const { return attempts_; }

private:
    int attempts_;
};

class ProviderError : public ProviderFailure {
public:
    ProviderError(int status, const std::string& body)
        : ProviderFailure("provider error (status " + std::to_string(status) + "): " + body), status_(status), body_(body) {}
    int status() const { return status_; }
    const std::string& body() const { return body_; }

private:
    int status_;
    std::string body_;
};

class NoScript : public ProviderFailure {
public:
    explicit NoScript(const std::string& fingerprint)
        : ProviderFailure("no script for request fingerprint '" + fingerprint + "'"), fingerprint_(fingerprint) {}
    const std::string& fingerprint() const { return fingerprint_; }

private:
    std::string fingerprint_;
};

}  // namespace matcha
