#ifndef GLYPHRUN_ERRORS_HPP
#define GLYPHRUN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace glyphrun {

// Bad input data or violated preconditions. CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / stream failures. CLI maps this to exit code 1.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A document with zero mapped characters (or an empty code sequence).
class EmptyDocumentError : public ValidationError {
public:
    explicit EmptyDocumentError(const std::string& docId)
        : ValidationError("empty document: " + docId), docId_(docId) {}

    const std::string& docId() const { return docId_; }

private:
    std::string docId_;
};

} // namespace glyphrun

#endif
