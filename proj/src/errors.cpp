#include "nmar/errors.hpp"

namespace nmar {

void throw_config(const std::string& what) { throw ConfigError(what); }

}  // namespace nmar
