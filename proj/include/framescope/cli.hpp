#ifndef FRAMESCOPE_CLI_HPP
#define FRAMESCOPE_CLI_HPP

#include <string>
#include <vector>

namespace framescope {

/// Runs one CLI invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on runtime failure, 2 on usage errors.
int dispatch(const std::vector<std::string>& args);

}  // namespace framescope

#endif
