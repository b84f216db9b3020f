#ifndef SDA_COMMANDS_HPP
#define SDA_COMMANDS_HPP

#include <iosfwd>
#include <string>

#include "sda/config.hpp"

namespace sda {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitInfeasible = 3, kExitNumerical = 4 };

// Each command writes its files into out_dir and a short summary to `log`.
// Return value is the process exit code; config and numerical errors propagate as exceptions.
int cmd_synth(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_table2(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_compose(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_radius_for_rein(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

}  // namespace sda

#endif  // SDA_COMMANDS_HPP
