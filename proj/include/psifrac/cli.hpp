#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace psifrac::cli {

// Flat configuration, one dotted key per line ("grid.t_max = 2"). Only keys
// known to the CLI are accepted. Effective values are layered: defaults,
// then the config file, then PSIFRAC_ATOL, then command-line flags.
class RunConfig {
 public:
  static RunConfig defaults();
  // '#' starts a comment; blank lines are ignored. Throws InvalidParameter.
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path);

  // Sorted "key = value" lines.
  std::string serialise() const;

  void set(const std::string& key, std::string value);
  void merge(const RunConfig& other);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;  // comma separated

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

const std::vector<std::string>& known_keys();

// args excludes the program name. Exit codes: 0 success, 1 invalid input,
// 2 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace psifrac::cli
