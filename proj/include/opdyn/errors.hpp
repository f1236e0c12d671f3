/*
 * Copyright (C) 2026 The opdyn authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef OPDYN_ERRORS_HPP
#define OPDYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace opdyn
{

/// Base class for every error raised by the library. The C API maps each
/// subclass onto one status code.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad field, violated constraint, unsupported subject.
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Transport failure that survived the retry budget.
class BackendError : public Error
{
public:
    BackendError(const std::string& what, int attempts)
        : Error(what)
        , m_attempts(attempts)
    {
    }
    int attempts() const
    {
        return m_attempts;
    }

private:
    int m_attempts;
};

/// The endpoint answered, but not with something we can read.
class ProtocolError : public Error
{
public:
    using Error::Error;
};

/// Strict-mode classification failure.
class ClassificationError : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

/// Broken internal invariant (ordering, empty history, ...).
class InternalError : public Error
{
public:
    using Error::Error;
};

} // namespace opdyn

#endif
