#include "palim/error.hpp"

namespace palim {

void throw_error(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace palim
