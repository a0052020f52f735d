#ifndef DRESSING_CLI_HPP
#define DRESSING_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dressing/chain.hpp"

namespace dressing::cli {

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A validated subcommand invocation. `params` holds every declared option of the subcommand
/// (defaults filled in) as the text that was given.
struct ScenarioConfig {
    std::string command;
    std::map<std::string, std::string> params;
    std::string out;  // resolved data path; empty means stdout
    std::string format = "csv";
    std::uint64_t seed = 0;

    double number(const std::string& key) const;
    long long integer(const std::string& key) const;
    std::vector<double> list(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    bool flag(const std::string& key) const;
};

/// args[0] is the subcommand. `--config file` loads key=value lines first; flags given on the
/// command line win. Unknown keys, malformed numbers and out-of-range values raise UsageError.
ScenarioConfig parse_config(const std::vector<std::string>& args);

struct RunReport {
    nlohmann::json body;  // std::map-backed, so keys serialize sorted
    int exit_code = 0;
};

/// Runs one subcommand. Tabular data goes to `data` (the caller opens config.out).
RunReport run(const ScenarioConfig& config, std::ostream& data);

/// Full command-line behaviour including batch; returns the process exit code.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// %.17g
TChainField read_chain_csv(const std::string& path, const std::vector<double>& mu);

std::string format_double(double v);

void write_csv(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace dressing::cli

#endif
