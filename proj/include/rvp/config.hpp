#pragma once

#include "rvp/lsv_models.hpp"
#include "rvp/mc_engine.hpp"
#include "rvp/vol_models.hpp"

#include <map>
#include <string>
#include <vector>

namespace rvp {

/// Flat dotted-key configuration. Every key has a documented default;
/// unknown keys are rejected at parse time.
class CliConfig {
  public:
    CliConfig();  // defaults only

    /// Parse `key = value` lines (# comments, blank lines allowed) over the
    /// defaults. Throws std::invalid_argument on unknown keys or bad syntax.
    static CliConfig from_file(const std::string& path);
    static CliConfig from_string(const std::string& text);

    const std::string& get(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    double get_double(const std::string& key) const;
    std::size_t get_size(const std::string& key) const;
    std::vector<std::size_t> get_size_list(const std::string& key) const;

    /// Serialized resolved configuration; parses back to an equal object.
    std::string echo() const;

    // typed views used by the commands
    LSVModel model() const;
    VolModelSpec vol_spec() const;
    Payoff payoff() const;
    RunConfig run_config() const;
    std::vector<double> report_grid() const;  // x-points for price curves

    bool operator==(const CliConfig& other) const { return values_ == other.values_; }

  private:
    std::map<std::string, std::string> values_;
};

} // namespace rvp
