#include "nsk/config.hpp"

#include <fstream>

#include "nsk/error.hpp"

namespace nsk {

namespace {

double number(const json& obj, const char* key) {
    if (!obj.contains(key)) throw Error(ErrorKind::config, std::string("missing key '") + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number()) throw Error(ErrorKind::config, std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, std::string("bad value for '") + key + "': " + e.what());
    }
}

const json& section(const json& doc, const char* key) {
    static const json empty = json::object();
    if (!doc.contains(key)) return empty;
    const json& s = doc.at(key);
    if (!s.is_object()) throw Error(ErrorKind::config, std::string("section '") + key + "' must be an object");
    return s;
}

CoefficientLaw coefficient_from_json(const json& spec, const char* what) {
    if (spec.is_null()) return CoefficientLaw::constant(1.0);
    if (spec.is_number()) return CoefficientLaw::constant(spec.get<double>());
    if (!spec.is_object()) throw Error(ErrorKind::config, std::string(what) + " must be an object or a number");
    std::string form = "constant";
    double coef = 1.0, exponent = 0.0;
    read(spec, "form", form);
    read(spec, "coef", coef);
    read(spec, "exponent", exponent);
    if (form == "constant") return CoefficientLaw::constant(coef);
    if (form == "power") return CoefficientLaw::power(coef, exponent);
    if (form == "eulerian_power") return CoefficientLaw::eulerian_power(coef, exponent);
    throw Error(ErrorKind::config, std::string("unknown ") + what + " form '" + form + "'");
}

}  // namespace

json canonical_model_json() {
    return json{{"law", "adiabatic"},
                {"params", {{"R_theta", 1.0}, {"gamma", 2.0}}},
                {"C0", 10.0},
                {"mu", {{"form", "constant"}, {"coef", 1.0}}},
                {"kappa", {{"form", "constant"}, {"coef", 1.0}}}};
}

FluidModel model_from_json(const json& spec) {
    if (!spec.is_object()) throw Error(ErrorKind::config, "model must be a JSON object");
    if (!spec.contains("law") || !spec.at("law").is_string()) throw Error(ErrorKind::config, "model needs a 'law'");
    const std::string law = spec.at("law").get<std::string>();
    const json& params = section(spec, "params");
    const double c0 = number(spec, "C0");
    TransportLaws transport;
    transport.viscosity = coefficient_from_json(spec.value("mu", json()), "mu");
    transport.capillarity = coefficient_from_json(spec.value("kappa", json()), "kappa");
    if (law == "adiabatic") {
        return make_adiabatic_model(number(params, "R_theta"), number(params, "gamma"), c0, transport);
    }
    if (law == "vdw") {
        return make_vdw_model(number(params, "a"), number(params, "b"), number(params, "R"), number(params, "theta"),
                              c0, transport);
    }
    if (law == "custom-power") {
        return make_power_model(number(params, "A"), number(params, "gamma"), c0, transport);
    }
    throw Error(ErrorKind::config, "unknown law '" + law + "'");
}

RunConfig run_config_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::config, "run file must be a JSON object");
    RunConfig cfg;
    if (doc.contains("model")) cfg.model = doc.at("model");

    const json& eq = section(doc, "equilibrium");
    read(eq, "v_bar", cfg.v_bar);
    read(eq, "u_bar", cfg.u_bar);

    SimulationConfig& sim = cfg.simulation;
    const json& grid = section(doc, "grid");
    read(grid, "L", sim.length);
    read(grid, "N", sim.points);
    const json& init = section(doc, "init");
    if (init.contains("shape")) {
        std::string shape;
        read(init, "shape", shape);
        sim.init.shape = parse_shape(shape);
    }
    read(init, "amplitude", sim.init.amplitude);
    read(init, "width", sim.init.width);
    read(init, "seed", cfg.seed);
    const json& time = section(doc, "time");
    read(time, "dt", sim.dt);
    read(time, "T", sim.t_final);
    read(time, "save_every", sim.save_every);
    read(doc, "s", sim.s);
    if (doc.contains("fit_window")) {
        std::vector<double> w;
        read(doc, "fit_window", w);
        if (w.size() != 2) throw Error(ErrorKind::config, "fit_window must be [t_lo, t_hi]");
        sim.fit_lo = w[0];
        sim.fit_hi = w[1];
    }
    read(doc, "amplitude_cap", sim.amplitude_cap);

    const json& lin = section(doc, "linear_decay");
    read(lin, "L", cfg.linear_decay.length);
    read(lin, "N", cfg.linear_decay.points);
    read(lin, "width", cfg.linear_decay.width);
    read(lin, "orders", cfg.linear_decay.orders);
    read(lin, "t_lo", cfg.linear_decay.t_lo);
    read(lin, "t_hi", cfg.linear_decay.t_hi);
    read(lin, "samples", cfg.linear_decay.samples);
    read(lin, "slack", cfg.linear_decay.slack);

    const json& env = section(doc, "envelope");
    read(env, "t", cfg.envelope.times);
    read(env, "min_k", cfg.envelope.min_k);
    read(env, "max_C", cfg.envelope.max_C);

    const json& integ = section(doc, "integrals");
    read(integ, "t", cfg.integrals.times);
    read(integ, "orders", cfg.integrals.orders);
    read(integ, "k", cfg.integrals.k);
    read(integ, "c1", cfg.integrals.c1);

    const json& debug = section(doc, "debug");
    read(debug, "zero_dissipation", cfg.zero_dissipation);
    read(doc, "seed", cfg.seed);
    sim.init.seed = cfg.seed;
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::config, "config " + path.string() + " is not valid JSON: " + e.what());
    }
    return run_config_from_json(doc);
}

}  // namespace nsk
