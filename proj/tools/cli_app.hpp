#pragma once

#include <iosfwd>

namespace modgame::cli {

/// Exit codes: 0 success, 2 usage error, 1 protocol or runtime failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace modgame::cli
