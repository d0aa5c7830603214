#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lshawkes {

// Command-line front end. Subcommands: simulate, theory, estimate-density,
// estimate-spectrum, analyze, validate. Returns 0 on success, 1 on a runtime
// error and 2 on a usage error; errors are reported as one line on err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

// "lo:hi:n" -> n evenly spaced values from lo to hi inclusive; a plain
// comma-separated list is accepted too.
std::vector<double> parse_axis(const std::string& spec);

} // namespace lshawkes
