#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pco::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Default output directory when --out is absent.
inline constexpr const char* kOutDirEnv = "PCO_OUT_DIR";

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pco::cli
