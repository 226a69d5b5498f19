/*
   Copyright 2026 The ffuniv Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef FFUNIV_ERROR_HPP
#define FFUNIV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ffuniv {

enum class ErrorKind {
    Precondition,
    Domain,
    Capacity,
    Numeric,
    Unsupported,
    Parse,
    Construction,
};

/// Base of every exception thrown by the library. The C API maps `kind()`
/// onto its status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& w) : Error(ErrorKind::Precondition, w) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& w) : Error(ErrorKind::Domain, w) {}
};

class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& w) : Error(ErrorKind::Capacity, w) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& w) : Error(ErrorKind::Numeric, w) {}
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& w) : Error(ErrorKind::Unsupported, w) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& w) : Error(ErrorKind::Parse, w) {}
};

class ConstructionError : public Error {
public:
    explicit ConstructionError(const std::string& w) : Error(ErrorKind::Construction, w) {}
};

}  // namespace ffuniv

#endif  // FFUNIV_ERROR_HPP
