#pragma once

#include "strad/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace strad {

enum class GradComponent {
    trend_paper,
    trend_monotone,
    seasonality,
    seasonality_real_imag,
    shape,
    mse,
    strad_paper,
    strad_monotone,
    model_mse,
    model_strad,
};

std::string to_string(GradComponent c);
std::optional<GradComponent> parse_grad_component(const std::string& name);
const std::vector<GradComponent>& all_grad_components();

struct GradcheckOptions {
    std::uint64_t seed = 0;
    int windows = 100;             // random (x, x_rec) pairs per loss component
    int models = 20;               // random small models per end-to-end check
    double step = 1e-5;            // central-difference step
    double kink_radius = 1e-6;     // coordinates this close to an L1 kink are skipped
    double tolerance = 1e-4;       // loss components and model + MSE
    double model_tolerance = 1e-3; // model + StrAD
    std::optional<GradComponent> perturb;  // test hook: corrupt one analytic gradient
};

struct ComponentReport {
    GradComponent component;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    std::int64_t checked = 0;   // coordinates compared
    std::int64_t excluded = 0;  // kink-adjacent coordinates skipped
    bool passed = false;
};

struct GradcheckReport {
    std::vector<ComponentReport> components;
    bool passed() const;
    std::string to_text() const;
};

// Central differences of f around x along every coordinate.
VectorXd central_difference(const std::function<double(const VectorXd&)>& f, const VectorXd& x, double step);

// ||a - b|| / (||a|| + ||b||), 0 when both vanish.
double relative_error(const VectorXd& a, const VectorXd& b);

GradcheckReport run_gradcheck(const GradcheckOptions& options);

} // namespace strad
