#include "observe/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "observe/history.hpp"

namespace observe {

namespace {

using json = nlohmann::json;

Matrix paper_x0() { return Matrix::column({1.0, 2.0}); }
Matrix paper_xi0() { return Matrix::column({0.0, 0.3, 1.0}); }

double sq(double v) { return v * v; }

Matrix json_column(const json& value, const char* key) {
    if (!value.is_array() || value.empty()) {
        throw ConfigError(std::string(key) + " must be a non-empty array of numbers");
    }
    std::vector<double> entries;
    for (const auto& item : value) {
        if (!item.is_number()) throw ConfigError(std::string(key) + " must contain only numbers");
        entries.push_back(item.get<double>());
    }
    return Matrix::column(entries);
}

double json_number(const json& value, const char* key) {
    if (!value.is_number()) throw ConfigError(std::string(key) + " must be a number");
    return value.get<double>();
}

std::string json_string(const json& value, const char* key) {
    if (!value.is_string()) throw ConfigError(std::string(key) + " must be a string");
    return value.get<std::string>();
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

void append_number(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

DelayCase parse_delay_case(std::string_view name) {
    if (name == "C1") return DelayCase::C1;
    if (name == "C2") return DelayCase::C2;
    if (name == "C3") return DelayCase::C3;
    if (name == "custom") return DelayCase::Custom;
    throw ConfigError("unknown delay case '" + std::string(name) + "' (expected C1, C2, C3 or custom)");
}

std::string to_string(DelayCase c) {
    switch (c) {
        case DelayCase::C1: return "C1";
        case DelayCase::C2: return "C2";
        case DelayCase::C3: return "C3";
        case DelayCase::Custom: return "custom";
    }
    return "custom";
}

void ScenarioConfig::validate() const {
    if (!(h > 0.0)) throw ConfigError("h must be positive");
    if (!(T > h)) throw ConfigError("T must exceed h");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
    if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("mu must be in (0,1)");
    if (x0.empty() || x0.cols() != 1) throw ConfigError("x0 must be a column vector");
    if (xi0.empty() || xi0.cols() != 1) throw ConfigError("xi0 must be a column vector");
    if (!x0.all_finite() || !xi0.all_finite()) throw ConfigError("x0 and xi0 must be finite");
}

DelayFunction paper_delay(DelayCase delay_case) {
    switch (delay_case) {
        case DelayCase::C1:
            return {[](double) { return 1.0; }, 1.0};
        case DelayCase::C2:
            return {[](double t) { return 1.0 + 0.25 * std::sin(t); }, 1.25};
        case DelayCase::C3:
            return {[](double t) { return 0.1 + sq(std::cos(3.0 * t)); }, 1.1};
        case DelayCase::Custom:
            break;
    }
    throw ConfigError("the built-in model has no custom delay profile");
}

std::pair<SystemModel, ScenarioConfig> paper_example(DelayCase delay_case) {
    SystemModel model;
    model.n = 2;
    model.m = 1;
    model.p = 1;
    model.q = 2;
    model.k = 3;
    model.matA = [](const Matrix&, const Matrix& y, double t) {
        return Matrix{{-sq(y[0]), 1.0}, {-sq(std::sin(t)), 0.0}};
    };
    model.matB = [](const Matrix& u, const Matrix& y, double) {
        return Matrix::column({0.0, y[0] * y[0] * y[0] * u[0]});
    };
    model.matD = [](const Matrix&, const Matrix& y, double t) {
        return Matrix{{-2.0 * std::sin(t), 0.0}, {0.0, -(y[0] * y[0] * y[0])}};
    };
    model.matC = [](double) { return Matrix{{1.0, 0.0}}; };
    model.matH = [](double) { return Matrix{{1.0, 0.0, 1.0}, {0.0, 1.0, 1.0}}; };
    model.matGamma = [](double) {
        return Matrix{{0.0, 1.0, 0.0}, {-9.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    };
    model.input = [](double) { return Matrix::column({-1.0}); };
    model.delay = paper_delay(delay_case);

    ScenarioConfig config;
    config.x0 = paper_x0();
    config.xi0 = paper_xi0();
    config.delay_case = delay_case;
    return {std::move(model), std::move(config)};
}

ScenarioConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error at line " + std::to_string(line_of(json_text, e.byte)) +
                          ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    static const std::set<std::string> known = {"model_id", "x0", "xi0",        "h",
                                                "T",        "lambda", "gamma", "mu",
                                                "delay_case", "out_path", "seed"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }

    ScenarioConfig c;
    if (doc.contains("model_id")) c.model_id = json_string(doc["model_id"], "model_id");
    if (c.model_id != "paper") {
        throw ConfigError("model_id '" + c.model_id +
                          "' cannot be loaded from a file; only 'paper' is built in");
    }
    c.x0 = doc.contains("x0") ? json_column(doc["x0"], "x0") : paper_x0();
    c.xi0 = doc.contains("xi0") ? json_column(doc["xi0"], "xi0") : paper_xi0();
    if (doc.contains("h")) c.h = json_number(doc["h"], "h");
    if (doc.contains("T")) c.T = json_number(doc["T"], "T");
    if (doc.contains("lambda")) c.lambda = json_number(doc["lambda"], "lambda");
    if (doc.contains("gamma")) c.gamma = json_number(doc["gamma"], "gamma");
    if (doc.contains("mu")) c.mu = json_number(doc["mu"], "mu");
    if (doc.contains("delay_case")) {
        c.delay_case = parse_delay_case(json_string(doc["delay_case"], "delay_case"));
        if (c.delay_case == DelayCase::Custom) {
            throw ConfigError("delay_case 'custom' needs a model built in code");
        }
    }
    if (doc.contains("out_path")) c.out_path = json_string(doc["out_path"], "out_path");
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    c.validate();
    if (c.x0.rows() != 2 || c.xi0.rows() != 3) {
        throw ConfigError("the built-in model needs x0 of length 2 and xi0 of length 3");
    }
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

SystemModel model_for(const ScenarioConfig& config) {
    if (config.model_id != "paper") {
        throw ConfigError("model_id '" + config.model_id + "' is not built in");
    }
    return paper_example(config.delay_case).first;
}

RunResult run_scenario(const SystemModel& model, const ScenarioConfig& config,
                       const StepProbe& probe) {
    model.validate();
    config.validate();
    if (config.x0.rows() != model.n) throw ConfigError("x0 length does not match the model");
    if (config.xi0.rows() != model.k) throw ConfigError("xi0 length does not match the model");

    const std::size_t dim = model.n + model.k;
    const double h = config.h;
    const double t0 = model.t0;
    const auto steps = static_cast<std::size_t>(std::llround(config.T / h));
    const double retain = model.delay.d_max + 2.0 * h;

    PlantState plant{config.x0, config.xi0};
    SignalHistory x_hist;
    x_hist.append(t0, plant.x);
    PeboObserver obs(model, config.zeta0, config.G0);
    DremState drem = make_drem_state(dim, config.lambda);
    FctState fct = make_fct_state(dim, config.gamma, config.mu, config.theta_hat0);
    const Measurement y = delayed_measurement(model, x_hist);

    Matrix y_now = y(t0);
    Regression reg = regressor(model, obs, y_now, t0);
    Mixed mixed = mix(drem);

    RunResult result;
    result.records.reserve(steps + 1);
    SignalBounds& b = result.bounds;

    for (std::size_t i = 0;; ++i) {
        const double t = t0 + static_cast<double>(i) * h;
        const PeboFilters& f = obs.filters();

        b.x = std::max(b.x, plant.x.norm());
        b.xi = std::max(b.xi, plant.xi.norm());
        b.zeta = std::max(b.zeta, f.zeta.norm());
        b.G = std::max(b.G, f.G.norm());
        b.PhiA = std::max(b.PhiA, f.PhiA.norm());
        b.PhiGamma = std::max(b.PhiGamma, f.PhiGamma.norm());
        b.Y = std::max(b.Y, drem.Y.norm());
        b.Omega = std::max(b.Omega, drem.Omega.norm());

        EstimateRecord rec;
        rec.t = t;
        rec.x = plant.x;
        rec.eta = eta_of(model, t, plant.xi);
        rec.theta_fct = theta_fct(fct);
        rec.theta_hat = fct.theta_hat;
        StateEstimate est = reconstruct(f, model, rec.theta_fct, t);
        rec.x_hat = std::move(est.x_hat);
        rec.eta_hat = std::move(est.eta_hat);
        rec.w = fct.w;
        rec.Delta = mixed.Delta;
        rec.converged = fct.w <= 1.0 - fct.mu;
        if (!rec.theta_fct.all_finite() || !rec.x_hat.all_finite() || !rec.eta_hat.all_finite()) {
            throw NumericFailure("non-finite estimate", t);
        }
        result.records.push_back(std::move(rec));

        if (probe) probe(StepSnapshot{t, plant, f, y_now, reg, drem, mixed, fct});
        if (i == steps) break;

        const double t_next = t0 + static_cast<double>(i + 1) * h;
        const double t_mid = t + 0.5 * h;
        const std::array<Regression, 3> stages = {reg, regressor(model, obs, y(t_mid), t_mid),
                                                  regressor(model, obs, y(t + h), t + h)};

        CoupledState next = coupled_step(model, {plant, obs.filters()}, y, t, h);
        obs.commit(std::move(next.filters), t_next);
        drem = drem_step(drem, stages, h);
        plant = std::move(next.plant);
        x_hist.append(t_next, plant.x);

        Mixed mixed_next = mix(drem);
        if (!mixed_next.calY.all_finite() || !std::isfinite(mixed_next.Delta)) {
            throw NumericFailure("non-finite DREM signals", t_next);
        }
        fct = gradient_step(fct, mixed, mixed_next, h);
        result.saturated = result.saturated || fct.saturated;
        mixed = std::move(mixed_next);

        x_hist.discard_before(t_next - retain);
        obs.discard_before(t_next - retain);

        y_now = y(t_next);
        reg = regressor(model, obs, y_now, t_next);
    }
    return result;
}

ConvergenceMetrics convergence_metrics(const RunResult& run, const ScenarioConfig& config) {
    ConvergenceMetrics m;
    m.rho = ie_threshold(config.gamma, config.mu);
    m.bounds = run.bounds;
    const auto& recs = run.records;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (i > 0) {
            const double dt = recs[i].t - recs[i - 1].t;
            m.excitation_integral += 0.5 * dt * (sq(recs[i - 1].Delta) + sq(recs[i].Delta));
        }
        if (!m.t_c && recs[i].converged) m.t_c = recs[i].t;
        if (m.t_c) {
            m.max_state_error_after_tc =
                std::max(m.max_state_error_after_tc, (recs[i].x - recs[i].x_hat).norm());
            m.max_eta_error_after_tc =
                std::max(m.max_eta_error_after_tc, (recs[i].eta - recs[i].eta_hat).norm());
        }
    }
    m.interval_exciting = m.t_c.has_value();
    return m;
}

std::string csv_header(std::size_t n, std::size_t q, std::size_t dim) {
    std::string out = "t";
    auto group = [&](const char* prefix, std::size_t count) {
        for (std::size_t i = 1; i <= count; ++i) out += "," + std::string(prefix) + std::to_string(i);
    };
    group("x", n);
    group("xhat", n);
    group("eta", q);
    group("etahat", q);
    group("thetafct", dim);
    out += ",w,Delta,converged";
    return out;
}

void write_csv(std::ostream& os, const std::vector<EstimateRecord>& records) {
    if (records.empty()) return;
    const auto& first = records.front();
    os << csv_header(first.x.rows(), first.eta.rows(), first.theta_fct.rows()) << '\n';
    std::string line;
    for (const auto& r : records) {
        line.clear();
        append_number(line, r.t);
        for (const Matrix* m : {&r.x, &r.x_hat, &r.eta, &r.eta_hat, &r.theta_fct}) {
            for (double v : m->data()) {
                line += ',';
                append_number(line, v);
            }
        }
        line += ',';
        append_number(line, r.w);
        line += ',';
        append_number(line, r.Delta);
        line += r.converged ? ",1\n" : ",0\n";
        os << line;
    }
}

}  // namespace observe
