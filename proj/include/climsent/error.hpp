#pragma once

#include <stdexcept>
#include <string>

namespace climsent {

/// Raised for every contract violation in the library (bad input files,
/// invalid arguments, shape mismatches).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace climsent
