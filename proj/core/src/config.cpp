#include "helmecs/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace helmecs {

namespace {

using nlohmann::json;

std::string kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::mp1: return "mp1";
        case ModelKind::mp2: return "mp2";
        case ModelKind::mp3: return "mp3";
        case ModelKind::custom: return "custom";
    }
    return "custom";
}

ModelKind kind_from(const std::string& s) {
    if (s == "mp1") return ModelKind::mp1;
    if (s == "mp2") return ModelKind::mp2;
    if (s == "mp3") return ModelKind::mp3;
    if (s == "custom") return ModelKind::custom;
    throw ConfigError("unknown model kind: " + s);
}

std::string rhs_name(RhsKind k) {
    switch (k) {
        case RhsKind::centered_delta: return "centered_delta";
        case RhsKind::gaussian: return "gaussian";
        case RhsKind::custom: return "custom";
    }
    return "custom";
}

RhsKind rhs_from(const std::string& s) {
    if (s == "centered_delta") return RhsKind::centered_delta;
    if (s == "gaussian") return RhsKind::gaussian;
    if (s == "custom") return RhsKind::custom;
    throw ConfigError("unknown rhs kind: " + s);
}

std::string precond_name(PreconditionerKind k) {
    switch (k) {
        case PreconditionerKind::none: return "none";
        case PreconditionerKind::laplacian: return "laplacian";
        case PreconditionerKind::csl: return "csl";
        case PreconditionerKind::csg: return "csg";
        case PreconditionerKind::qd: return "qd";
    }
    return "none";
}

PreconditionerKind precond_from(const std::string& s) {
    if (s == "none") return PreconditionerKind::none;
    if (s == "laplacian") return PreconditionerKind::laplacian;
    if (s == "csl") return PreconditionerKind::csl;
    if (s == "csg") return PreconditionerKind::csg;
    if (s == "qd") return PreconditionerKind::qd;
    throw ConfigError("unknown preconditioner kind: " + s);
}

std::string method_name(Lambda0Method m) {
    switch (m) {
        case Lambda0Method::dense_2d: return "dense_2d";
        case Lambda0Method::one_d_composition: return "one_d_composition";
        case Lambda0Method::config: return "config";
    }
    return "dense_2d";
}

Lambda0Method method_from(const std::string& s) {
    if (s == "dense_2d") return Lambda0Method::dense_2d;
    if (s == "one_d_composition") return Lambda0Method::one_d_composition;
    if (s == "config") return Lambda0Method::config;
    throw ConfigError("unknown lambda0 method: " + s);
}

std::string smoother_name(SmootherKind s) {
    return s == SmootherKind::jacobi ? "jacobi" : "rb_jacobi";
}

SmootherKind smoother_from(const std::string& s) {
    if (s == "jacobi") return SmootherKind::jacobi;
    if (s == "rb_jacobi") return SmootherKind::rb_jacobi;
    throw ConfigError("unknown smoother: " + s);
}

json axis_to_json(const AxisSpec& a) {
    return json{{"n", a.n},     {"m_lo", a.m_lo}, {"m_hi", a.m_hi},
                {"a", a.a},     {"w", a.w},       {"theta", a.theta}};
}

AxisSpec axis_from_json(const json& j) {
    AxisSpec a;
    a.n = j.at("n").get<int>();
    a.m_lo = j.at("m_lo").get<int>();
    a.m_hi = j.at("m_hi").get<int>();
    a.a = j.at("a").get<double>();
    a.w = j.at("w").get<double>();
    a.theta = j.at("theta").get<double>();
    return a;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) {
    json j;
    j["label"] = c.label;
    j["model"] = json{{"kind", kind_name(c.model.kind)},
                      {"k", c.model.k},
                      {"nu", c.model.nu},
                      {"l1", c.model.l1},
                      {"l2", c.model.l2},
                      {"rhs", json{{"kind", rhs_name(c.model.rhs)}, {"sign", c.model.rhs_sign}}},
                      {"grid", json{{"x", axis_to_json(c.model.x)}, {"y", axis_to_json(c.model.y)}}}};

    json p;
    p["kind"] = precond_name(c.preconditioner.kind);
    p["beta1"] = c.preconditioner.beta1;
    p["beta2"] = c.preconditioner.beta2;
    p["theta_alpha"] = c.preconditioner.theta_alpha;
    if (c.preconditioner.lambda0)
        p["lambda0"] = json::array({c.preconditioner.lambda0->real(), c.preconditioner.lambda0->imag()});
    else
        p["lambda0"] = nullptr;
    p["lambda0_method"] = method_name(c.preconditioner.lambda0_method);
    p["qd_use_modulus"] = c.preconditioner.qd_use_modulus;
    j["preconditioner"] = p;

    j["multigrid"] = json{{"nu1", c.mg.nu1},
                          {"nu2", c.mg.nu2},
                          {"gamma_f", c.mg.gamma_f},
                          {"gamma_c", c.mg.gamma_c},
                          {"smoother", smoother_name(c.mg.smoother)},
                          {"omega", c.mg.omega},
                          {"coarse_cap", c.mg.coarse_cap},
                          {"max_coarse_level", c.mg.max_coarse_level},
                          {"tol", c.mg.tol},
                          {"max_cycles", c.mg.max_cycles},
                          {"literal_swap", c.mg.literal_swap}};

    j["krylov"] = json{{"tol", c.krylov.tol},
                       {"max_iter", c.krylov.max_iter},
                       {"warm_start", c.krylov.warm_start},
                       {"warm_start_tol", c.krylov.warm_start_tol}};

    j["outputs"] = json{{"report", c.outputs.report},
                        {"field", c.outputs.field},
                        {"spectrum", c.outputs.spectrum}};
    return j.dump(2) + "\n";
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        ExperimentConfig c;
        c.label = j.value("label", std::string{});

        const json& m = j.at("model");
        c.model.kind = kind_from(m.at("kind").get<std::string>());
        c.model.k = m.at("k").get<double>();
        c.model.nu = m.value("nu", 0.0);
        c.model.l1 = m.value("l1", 0);
        c.model.l2 = m.value("l2", 0);
        if (m.contains("rhs")) {
            c.model.rhs = rhs_from(m.at("rhs").at("kind").get<std::string>());
            c.model.rhs_sign = m.at("rhs").value("sign", -1.0);
        }
        c.model.x = axis_from_json(m.at("grid").at("x"));
        c.model.y = axis_from_json(m.at("grid").at("y"));

        if (j.contains("preconditioner")) {
            const json& p = j.at("preconditioner");
            c.preconditioner.kind = precond_from(p.at("kind").get<std::string>());
            c.preconditioner.beta1 = p.value("beta1", -1.0);
            c.preconditioner.beta2 = p.value("beta2", -0.3);
            c.preconditioner.theta_alpha = p.value("theta_alpha", 0.0);
            if (p.contains("lambda0") && !p.at("lambda0").is_null()) {
                const json& l = p.at("lambda0");
                c.preconditioner.lambda0 = cplx{l.at(0).get<double>(), l.at(1).get<double>()};
            }
            c.preconditioner.lambda0_method =
                method_from(p.value("lambda0_method", std::string{"dense_2d"}));
            c.preconditioner.qd_use_modulus = p.value("qd_use_modulus", false);
        }

        if (j.contains("multigrid")) {
            const json& g = j.at("multigrid");
            c.mg.nu1 = g.value("nu1", 1);
            c.mg.nu2 = g.value("nu2", 1);
            c.mg.gamma_f = g.value("gamma_f", 1);
            c.mg.gamma_c = g.value("gamma_c", 1);
            c.mg.smoother = smoother_from(g.value("smoother", std::string{"rb_jacobi"}));
            c.mg.omega = g.value("omega", 1.0);
            c.mg.coarse_cap = g.value("coarse_cap", std::size_t{1024});
            c.mg.max_coarse_level = g.value("max_coarse_level", 64);
            c.mg.tol = g.value("tol", 1e-6);
            c.mg.max_cycles = g.value("max_cycles", 100);
            c.mg.literal_swap = g.value("literal_swap", true);
        }

        if (j.contains("krylov")) {
            const json& k = j.at("krylov");
            c.krylov.tol = k.value("tol", 1e-6);
            c.krylov.max_iter = k.value("max_iter", 5000);
            c.krylov.warm_start = k.value("warm_start", false);
            c.krylov.warm_start_tol = k.value("warm_start_tol", 1e-2);
        }

        if (j.contains("outputs")) {
            const json& o = j.at("outputs");
            c.outputs.report = o.value("report", std::string{});
            c.outputs.field = o.value("field", std::string{});
            c.outputs.spectrum = o.value("spectrum", std::string{});
        }

        // Surface obvious parameter errors at parse time.
        if (c.model.k < 0.0) throw ConfigError("model.k must be >= 0");
        if (c.model.l1 < 0 || c.model.l2 < 0) throw ConfigError("angular momenta must be >= 0");
        if (c.model.kind == ModelKind::mp2 && c.model.nu < 0.0)
            throw ConfigError("mp2 requires nu >= 0");
        if (c.krylov.tol <= 0.0) throw ConfigError("krylov.tol must be positive");
        if (c.krylov.warm_start && c.krylov.warm_start_tol <= c.krylov.tol)
            throw ConfigError("warm_start_tol must exceed krylov.tol");
        if (c.mg.nu1 < 0 || c.mg.nu2 < 0 || c.mg.gamma_f < 1 || c.mg.gamma_c < 1)
            throw ConfigError("invalid multigrid cycle parameters");
        if (c.mg.omega <= 0.0) throw ConfigError("multigrid omega must be positive");
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void save_config_file(const ExperimentConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config file: " + path);
    out << serialize_config(config);
    if (!out) throw IoError("failed writing config file: " + path);
}

}  // namespace helmecs
