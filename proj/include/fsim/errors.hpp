#pragma once

#include <stdexcept>
#include <string>

namespace fsim {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define FSIM_ERROR_TYPE(Name)                                       \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& what) : Error(what) {}     \
    }

FSIM_ERROR_TYPE(SchedulingInPast);
FSIM_ERROR_TYPE(OutOfRange);
FSIM_ERROR_TYPE(ConfigInvalid);
FSIM_ERROR_TYPE(LengthMismatch);
FSIM_ERROR_TYPE(TooShort);
FSIM_ERROR_TYPE(TooFewSamples);
FSIM_ERROR_TYPE(MalformedFrame);
FSIM_ERROR_TYPE(UnknownPath);
FSIM_ERROR_TYPE(UnreachableAgent);
FSIM_ERROR_TYPE(NoAlertInLog);
FSIM_ERROR_TYPE(ParseError);
FSIM_ERROR_TYPE(ValidationError);

#undef FSIM_ERROR_TYPE

} // namespace fsim
