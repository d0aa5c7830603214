#include "lshawkes/error.hpp"
#include "lshawkes/model.hpp"
#include "lshawkes/model_io.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace lshawkes;
using nlohmann::json;

namespace {

std::string data(const std::string& name) { return std::string(LSHAWKES_DATA_DIR) + "/" + name; }

} // namespace

TEST(ModelIo, BundledModelsLoadAndValidate) {
    for (const char* name : {"session_model.json", "stationary_exponential.json", "poisson.json",
                             "sinusoidal_exponential.json"}) {
        const auto m = load_model(data(name));
        EXPECT_TRUE(validate_model(m, 64).passed) << name;
    }
}

TEST(ModelIo, StationaryExponentialValues) {
    const auto m = load_model(data("stationary_exponential.json"));
    EXPECT_DOUBLE_EQ(local_mean_density(m, 0.5), 2.0);
    EXPECT_NEAR(m.fertility.density(1.0, 0.5), 0.5 * std::exp(-1.0), 1e-15);
}

TEST(ModelIo, RoundTripPreservesFunctions) {
    for (const char* name : {"session_model.json", "sinusoidal_exponential.json", "poisson.json"}) {
        const auto m = load_model(data(name));
        const auto back = model_from_json(model_to_json(m));
        for (double u : {0.0, 0.13, 0.5, 0.77, 1.0}) {
            EXPECT_DOUBLE_EQ(back.baseline(u), m.baseline(u)) << name;
            for (double s : {0.0, 0.3, 2.0}) {
                EXPECT_DOUBLE_EQ(back.fertility.density(s, u), m.fertility.density(s, u)) << name;
            }
        }
        EXPECT_EQ(model_to_json(back), model_to_json(m)) << name;
    }
}

TEST(ModelIo, GammaShapeAndTable) {
    const json j = {
        {"baseline", {{"form", "constant"}, {"params", {{"value", 1.0}}}}},
        {"fertility", {{"family", "gamma-shape"}, {"zeta_curve", 0.4}, {"params", {{"decay", 2.0}, {"shape", 3}}}}},
    };
    const auto m = model_from_json(j);
    EXPECT_NEAR(m.fertility.zeta(0.3), 0.4, 1e-15);
    // gamma(3, 2) density at s = 1: 2^3 s^2 e^{-2s} / 2
    EXPECT_NEAR(m.fertility.density(1.0, 0.3), 0.4 * 4.0 * std::exp(-2.0), 1e-14);
    const auto back = model_from_json(model_to_json(m));
    EXPECT_DOUBLE_EQ(back.fertility.density(1.0, 0.3), m.fertility.density(1.0, 0.3));
}

TEST(ModelIo, ParseErrors) {
    EXPECT_THROW(model_from_json(json::object()), ParseError);
    const json bad_family = {
        {"baseline", {{"form", "constant"}, {"params", {{"value", 1.0}}}}},
        {"fertility", {{"family", "weibull"}}},
    };
    EXPECT_THROW(model_from_json(bad_family), ParseError);
    const json bad_form = {
        {"baseline", {{"form", "spline"}, {"params", json::object()}}},
        {"fertility", {{"family", "zero"}}},
    };
    EXPECT_THROW(model_from_json(bad_form), ParseError);
    EXPECT_THROW(load_model("/nonexistent/model.json"), IoError);
}
