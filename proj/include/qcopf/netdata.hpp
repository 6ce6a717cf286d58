#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qcopf {

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

class UnsupportedFeatureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Bus {
    int id = 0;
    double p_load = 0.0, q_load = 0.0;   // p.u. on the system base
    double g_shunt = 0.0, b_shunt = 0.0; // p.u. admittance
    double v_min = 0.0, v_max = 0.0;     // p.u. voltage magnitude
    bool is_reference = false;
};

struct Generator {
    int bus = 0;
    double p_min = 0.0, p_max = 0.0;
    double q_min = 0.0, q_max = 0.0;
    double cost_c2 = 0.0, cost_c1 = 0.0, cost_c0 = 0.0; // $/hr with power in p.u.
};

struct Branch {
    int id = 0;
    int from_bus = 0, to_bus = 0;
    double g = 0.0, b = 0.0;  // series admittance
    double b_charge = 0.0;    // total line-charging susceptance
    double tap = 1.0;
    double s_max = 0.0; // apparent-power limit, p.u.
    bool unlimited = false;
    double theta_min = 0.0, theta_max = 0.0; // radians
};

struct Network {
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Generator> generators;
    std::vector<Branch> branches;

    /// Index of the bus with the given external id; throws when unknown.
    int bus_index(int id) const;
    int reference_index() const;
};

Network parse_case(std::istream& in);
Network parse_case(const std::string& text);
Network parse_case_file(const std::string& path);

struct Diagnostic {
    enum class Level { warning, error };
    Level level;
    std::string message;
};

struct ValidateOptions {
    // applied when a branch angle bound is missing or reaches +-90 degrees
    double default_angle_bound = 1.0472; // radians
};

struct ValidationResult {
    std::vector<Diagnostic> diagnostics;
    Network network; // input with loose angle bounds clamped
    bool ok() const;
    std::size_t error_count() const;
};

ValidationResult validate(const Network& net, const ValidateOptions& opts = {});

nlohmann::json to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

} // namespace qcopf
