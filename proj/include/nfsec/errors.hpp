// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_ERRORS_HPP
#define NFSEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nfsec
{
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

#define NFSEC_DEFINE_ERROR(Name)         \
    class Name : public Error            \
    {                                    \
    public:                              \
        using Error::Error;              \
    };

    NFSEC_DEFINE_ERROR(CoincidentPosition)
    NFSEC_DEFINE_ERROR(RankDeficient)
    NFSEC_DEFINE_ERROR(IllConditioned)
    NFSEC_DEFINE_ERROR(Infeasible)
    NFSEC_DEFINE_ERROR(DomainError)
    NFSEC_DEFINE_ERROR(SeriesNotConverged)
    NFSEC_DEFINE_ERROR(QuadratureFailure)
    NFSEC_DEFINE_ERROR(ConditionViolated)
    NFSEC_DEFINE_ERROR(DegenerateNullSpace)
    NFSEC_DEFINE_ERROR(ValidationError)
    NFSEC_DEFINE_ERROR(IoError)

#undef NFSEC_DEFINE_ERROR

    // Config syntax errors carry the offending line (0 when unknown) and key path.
    class ParseError : public Error
    {
    public:
        ParseError(const std::string &what, std::size_t line, std::string key)
            : Error(what), line_(line), key_(std::move(key)) {}
        std::size_t line() const { return line_; }
        const std::string &key() const { return key_; }

    private:
        std::size_t line_;
        std::string key_;
    };
}

#endif
