#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "adisc/bishop.hpp"
#include "adisc/globevnik.hpp"
#include "adisc/twist.hpp"

namespace adisc::scenarios {

GraphManifold flat_manifold(int m, int n);
/// m = 1, n = 1, h = (1+beta)(Re w)^2 + (Im w)^2; beta = 0 is the plain
/// quadric |w|^2.
GraphManifold quadric_beta(double beta);

/// The distinguished Theta*sqrt(Lambda) frame of the disc family manifold R1
/// in closed form: available for flat manifolds of any (m, n) and for the
/// quadric-beta family. Powers are (1, 0, ..., 0).
ThetaFrame structured_base_theta(const GraphManifold& mf, double rho0, const BoundaryGrid& grid);

struct Step4Config {
    GraphManifold manifold;
    double rho0 = 0.1;
    std::vector<int> ells;  // defaults to (1, 2, ..., 2) when empty
    double eps = 0.8;
    double tol = 1e-11;
};

/// Everything the step4 checks consume: the twisted structured frame with
/// indices (4, ..., 4), the zoned attachment target (curved family glued to
/// its tangent planes and twisted near zeta = -1; purely affine for flat
/// manifolds), the reference disc on the common grid, and the masked
/// 2N-parameter disc family.
struct Step4Setup {
    std::shared_ptr<const BishopSolution> base;
    ThetaFrame twisted_theta;
    FrameLoop twisted_loop;
    std::shared_ptr<const AttachmentTarget> target;
    std::shared_ptr<const AnalyticDisc> base_disc;
    std::size_t n = 0;
    DiscFamily family;
};

Step4Setup build_step4(const Step4Config& cfg);

/// One pass/fail line of a scenario.
struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
};

struct ScenarioOutcome {
    bool pass = false;
    std::string results_json;                                  // canonical text
    std::vector<std::pair<std::string, std::string>> files;    // name -> content
};

/// Runs a named scenario on a JSON config text. Throws std::invalid_argument
/// on malformed configs (mapped to exit code 2 by the CLI).
ScenarioOutcome run_scenario(const std::string& name, const std::string& config_text);

}  // namespace adisc::scenarios
