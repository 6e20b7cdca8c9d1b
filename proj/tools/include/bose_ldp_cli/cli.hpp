#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bose_ldp::cli {

// Exit codes: 0 success, 1 parameter error, 2 solver regime error,
// 3 a `verify` check failed.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParameter = 1;
inline constexpr int kExitRegime = 2;
inline constexpr int kExitVerifyFailed = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

// RFC-4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& s);
// %.17g, with "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

}  // namespace bose_ldp::cli
