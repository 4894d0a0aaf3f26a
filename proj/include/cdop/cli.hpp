#ifndef CDOP_CLI_HPP
#define CDOP_CLI_HPP

#include <iosfwd>

namespace cdop::cli {

/// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kPrecondition = 2;
inline constexpr int kNumerical = 3;

/// Runs one command line. Artifacts land under --out-dir together with
/// manifest.json; diagnostics go to `err`, stdout-bound tables to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cdop::cli

#endif  // CDOP_CLI_HPP
