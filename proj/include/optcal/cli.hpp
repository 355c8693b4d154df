#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optcal {

/// Exit codes: 0 success, 1 runtime error, 2 bad command line.
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optcal
