#pragma once

#include <string>
#include <vector>

namespace riskbandit {

// Entry point behind the `riskbandit` binary. args excludes argv[0].
// Returns 0 on success, 1 on usage errors, 2 on runtime errors; error
// messages go to stderr as one `error: ...` line.
int cli_main(const std::vector<std::string>& args);

}  // namespace riskbandit
