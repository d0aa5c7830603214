#include "lshawkes/model_io.hpp"

#include "lshawkes/error.hpp"

#include <fstream>

namespace lshawkes {

namespace {

BaselineCurve baseline_from_json(const nlohmann::json& j) {
    auto base = BaselineCurve::from_curve(Curve::from_json(j));
    if (j.is_object()) {
        if (j.contains("sup_bound")) {
            base.sup_bound = j.at("sup_bound").get<double>();
        }
        if (j.contains("holder")) {
            const auto& h = j.at("holder");
            base.holder_beta = h.value("beta", base.holder_beta);
            base.holder_const = h.value("const", base.holder_const);
        }
    }
    return base;
}

FertilityFamily fertility_from_json(const nlohmann::json& j) {
    const auto family = j.at("family").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    auto zeta = [&] { return Curve::from_json(j.at("zeta_curve")); };
    auto decay = [&] {
        return params.contains("decay") ? Curve::from_json(params.at("decay")) : Curve::constant(1.0);
    };
    FertilityFamily f;
    if (family == "zero") {
        f = FertilityFamily::zero();
    } else if (family == "exponential") {
        f = FertilityFamily::exponential(zeta(), decay());
    } else if (family == "gamma-shape") {
        f = FertilityFamily::gamma_shape(zeta(), decay(), params.value("shape", 2));
    } else if (family == "sampled-table") {
        f = FertilityFamily::sampled_table(zeta(), params.at("ds").get<double>(),
                                           params.at("values").get<std::vector<double>>());
    } else {
        throw ParseError("unknown fertility family \"" + family + "\"");
    }
    if (j.contains("tail")) {
        const auto& t = j.at("tail");
        f.set_tail(t.at("d").get<double>(), t.at("const").get<double>());
    }
    if (j.contains("holder_envelope_l1")) {
        f.set_holder_envelope_l1(j.at("holder_envelope_l1").get<double>());
    }
    return f;
}

} // namespace

LsHawkesModel model_from_json(const nlohmann::json& j) {
    try {
        LsHawkesModel m;
        m.beta = j.value("beta", 1.0);
        m.baseline = baseline_from_json(j.at("baseline"));
        if (!(j.contains("baseline") && j.at("baseline").is_object() &&
              j.at("baseline").contains("holder"))) {
            m.baseline.holder_beta = m.beta;
        }
        m.fertility = j.contains("fertility") ? fertility_from_json(j.at("fertility"))
                                              : FertilityFamily::zero();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model specification: ") + e.what());
    }
}

nlohmann::json model_to_json(const LsHawkesModel& model) {
    nlohmann::json base = model.baseline.curve.to_json();
    base["sup_bound"] = model.baseline.sup_bound;
    base["holder"] = {{"beta", model.baseline.holder_beta}, {"const", model.baseline.holder_const}};

    const auto& f = model.fertility;
    nlohmann::json fert;
    fert["family"] = to_string(f.kind());
    if (f.kind() != FertilityFamily::Kind::zero) {
        fert["zeta_curve"] = f.zeta_curve().to_json();
    }
    nlohmann::json params = nlohmann::json::object();
    switch (f.kind()) {
    case FertilityFamily::Kind::exponential:
        params["decay"] = f.decay_curve().to_json();
        break;
    case FertilityFamily::Kind::gamma_shape:
        params["decay"] = f.decay_curve().to_json();
        params["shape"] = f.shape();
        break;
    case FertilityFamily::Kind::sampled_table:
        params["ds"] = f.table_step();
        params["values"] = f.table_values();
        break;
    case FertilityFamily::Kind::zero:
        break;
    }
    fert["params"] = params;
    fert["tail"] = {{"d", f.tail_rate()}, {"const", f.tail_const()}};
    if (const auto l1 = f.holder_envelope_l1()) {
        fert["holder_envelope_l1"] = *l1;
    }
    return {{"baseline", base}, {"fertility", fert}, {"beta", model.beta}};
}

LsHawkesModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open model file " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return model_from_json(j);
}

} // namespace lshawkes
