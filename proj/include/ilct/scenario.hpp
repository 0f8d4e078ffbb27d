#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ilct/ilc.hpp"
#include "ilct/laplace.hpp"
#include "ilct/ratmat.hpp"
#include "ilct/trackability.hpp"

namespace ilct {

struct RationalPlantDef {
    RationalMatrix g1;
    RationalMatrix g2;
    ExogenousInput exo;
};

struct StateSpacePlantDef {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    Eigen::MatrixXd c;
    Eigen::VectorXd x0;
    SignalVector w;
};

struct CaseDef {
    std::string name;
    SignalVector yd;
    SignalVector u0;
    std::optional<SignalVector> ud2;
};

struct Scenario {
    std::string name;
    std::variant<RationalPlantDef, StateSpacePlantDef> plant_def;
    RationalMatrix gamma;  // Gamma(s) as given
    double horizon = 10.0;
    int nodes = 2001;
    int iterations = 100;
    std::optional<double> lambda;
    std::optional<DisturbanceModel> disturbance;
    std::uint64_t seed = 1;
    std::vector<CaseDef> cases;

    // Filled by finalize_scenario.
    Plant plant;
    GainOperator gain;

    Grid grid() const { return Grid(horizon, nodes); }
    const CaseDef& find_case(const std::string& name) const;
};

// Builds the plant and gain and checks dimensions; throws ConditionError
// (C1..C4, gain) or DimensionError.
void finalize_scenario(Scenario& s);

// Syntax errors raise ParseError with the 1-based line; schema errors name
// the offending JSON path.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

nlohmann::json scenario_to_json(const Scenario& s);
std::string serialize_scenario(const Scenario& s);

std::vector<std::string> builtin_names();
Scenario builtin_scenario(const std::string& name);
// A file path when one exists, otherwise a built-in name.
Scenario resolve_scenario(const std::string& name_or_path);

}  // namespace ilct
