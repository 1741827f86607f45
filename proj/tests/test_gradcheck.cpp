#include "strad/gradcheck.hpp"

#include <doctest.h>

#include <cmath>

using namespace strad;

TEST_CASE("central_difference and relative_error") {
    VectorXd x(3);
    x << 0.5, -1.0, 2.0;
    const auto fd = central_difference([](const VectorXd& v) { return v.squaredNorm() + std::sin(v(0)); }, x, 1e-5);
    VectorXd exact = 2.0 * x;
    exact(0) += std::cos(0.5);
    CHECK(relative_error(fd, exact) < 1e-9);
    CHECK(relative_error(VectorXd(VectorXd::Zero(3)), VectorXd(VectorXd::Zero(3))) == 0.0);
    CHECK(relative_error(exact, VectorXd(-exact)) == doctest::Approx(1.0));
}

TEST_CASE("default gradcheck passes") {
    GradcheckOptions opt;
    const auto report = run_gradcheck(opt);
    CHECK(report.passed());
    CHECK(report.components.size() == all_grad_components().size());
    for (const auto& c : report.components) {
        INFO(to_string(c.component));
        CHECK(c.passed);
        CHECK(c.checked > 0);
        CHECK(c.max_rel_error < c.tolerance);
    }
    CHECK(report.to_text().find("gradcheck passed") != std::string::npos);
}

TEST_CASE("perturbing one gradient fails exactly that component") {
    for (auto target : {GradComponent::seasonality, GradComponent::trend_monotone, GradComponent::model_strad}) {
        GradcheckOptions opt;
        opt.windows = 20;
        opt.models = 4;
        opt.perturb = target;
        const auto report = run_gradcheck(opt);
        CHECK_FALSE(report.passed());
        for (const auto& c : report.components) CHECK(c.passed == (c.component != target));
        CHECK(report.to_text().find(to_string(target)) != std::string::npos);
    }
}

TEST_CASE("component names round-trip") {
    for (auto c : all_grad_components()) CHECK(parse_grad_component(to_string(c)) == c);
    CHECK_FALSE(parse_grad_component("bogus").has_value());
}
