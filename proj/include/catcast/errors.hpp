#pragma once

#include <stdexcept>
#include <string>

namespace catcast {

// All library errors derive from Error so the CLI can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : Error { using Error::Error; };   // malformed schema / vocabulary
struct FormatError : Error { using Error::Error; };   // file or artifact format problems
struct DataError   : Error { using Error::Error; };   // bad or empty data for an operation
struct EncodeError : Error { using Error::Error; };   // encoder precondition violated
struct ConfigError : Error { using Error::Error; };   // invalid hyperparameter / plan
struct UsageError  : Error { using Error::Error; };   // CLI misuse
struct IndexError  : Error { using Error::Error; };   // index outside a lookup table

} // namespace catcast
