#pragma once
// Command-line front end: ask, eval, kg {match, relations, neighbors},
// cache {stats, clear}.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pdrr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPipeline = 1;
inline constexpr int kExitConfig = 2;

/// `args` excludes the program name. Results go to `out`, diagnostics to
/// `err`. `getenv` defaults to std::getenv.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::function<const char*(const char*)>& getenv = {});

}  // namespace pdrr::cli
