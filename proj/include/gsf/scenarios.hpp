#pragma once

#include "gsf/ode.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gsf {

// One [scenario.<id>] section. Physical parameters, initial conditions and the
// output sampling live in `values`; unknown keys are rejected by validate_config.
struct ScenarioConfig {
    std::string id;
    std::map<std::string, double> values;
    // b = drho^-b_exponent
    double b_exponent = 1.0;
    HeavisideVariant variant = HeavisideVariant::mollified;
    // the eps grid is chosen so that b runs geometrically from b_min to b_max
    std::size_t grid_n = 12;
    double b_min = 1e4;
    double b_max = 1e8;

    double get(const std::string& key) const;
    Ctx context() const;
};

const std::vector<std::string>& scenario_ids();
// InputError for an unknown id
ScenarioConfig default_config(const std::string& id);
void validate_config(const ScenarioConfig& cfg);

// Reads every [scenario.<id>] section; keys not given keep their defaults.
std::vector<ScenarioConfig> read_configs(std::istream& in);
ScenarioConfig read_config(std::istream& in, const std::string& id);
void write_config(std::ostream& os, const ScenarioConfig& cfg);

struct Event {
    std::size_t eps_index = 0;
    double time = 0.0;
    int crossing_id = 0;
};

struct ScenarioCheck {
    std::string name;
    bool passed = false;
    double achieved = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct NamedPath {
    std::string name;
    std::vector<std::string> columns;
    SolvedPath path;
};

struct ScenarioResult {
    ScenarioConfig cfg;
    std::vector<NamedPath> paths;
    std::vector<Event> events;
    std::vector<ScenarioCheck> checks;
    std::map<std::string, GenNum> quantities;

    bool passed() const;
    const ScenarioCheck& check(const std::string& name) const;
};

// singular variable length pendulum, Lambda = H(theta0 - theta) L1 + L2
ScenarioResult run_pendulum(const ScenarioConfig& cfg);
// pendulum with beta = beta1 + (H(theta + theta0) - H(theta - theta0)) (beta2 - beta1)
ScenarioResult run_two_media(const ScenarioConfig& cfg);
// x'' = F(x) / m with F = -k x - (F_n(x) - k x) H(x - x0)
ScenarioResult run_stress_strain(const ScenarioConfig& cfg);
// eikonal ray in the (x, z) plane, n = n1 + (n2 - n1) H(z - z0)
ScenarioResult run_snell(const ScenarioConfig& cfg);
// -psi''/2 + U0 H(x) psi = E psi with hbar = m = 1
ScenarioResult run_step_potential(const ScenarioConfig& cfg);

ScenarioResult run_scenario(const ScenarioConfig& cfg);

// epsilon, event_time, crossing_id
void export_events_csv(std::ostream& os, const ScenarioResult& r);
void write_report(std::ostream& os, const ScenarioResult& r);

} // namespace gsf
