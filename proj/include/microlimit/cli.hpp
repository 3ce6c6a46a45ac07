#pragma once

#include <complex>
#include <string>
#include <vector>

namespace microlimit {

/// Exit codes of the command-line runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitFail = 4;

/// Entry point of the `microlimit` tool; returns the process exit code.
int run_cli(int argc, char** argv);

/// "0.7+0.4i", "-1.5i", "2" -> complex. Throws InputError.
std::complex<double> parse_complex(const std::string& text);

/// Comma-separated complex literals.
std::vector<std::complex<double>> parse_complex_list(const std::string& text);

}  // namespace microlimit
