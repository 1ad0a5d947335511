#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace meanforce::cli {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

double parse_double(const std::string& key, const std::string& s) {
    double v = 0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v))
        throw ConfigError(key + ": expected a finite number, got '" + s + "'");
    return v;
}

long parse_long(const std::string& key, const std::string& s) {
    long v = 0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) throw ConfigError(key + ": expected an integer, got '" + s + "'");
    return v;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const auto& t : split_list(s)) out.push_back(parse_double(key, t));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& s) {
    std::vector<int> out;
    for (const auto& t : split_list(s)) out.push_back(static_cast<int>(parse_long(key, t)));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

// Consumes keys from a copy of the input so that leftovers can be reported as unknown.
class Reader {
public:
    explicit Reader(KeyValues kv) : kv_(std::move(kv)) {}

    std::optional<std::string> take(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        std::string v = it->second;
        kv_.erase(it);
        return v;
    }
    double number(const std::string& key, double def) {
        auto v = take(key);
        return v ? parse_double(key, *v) : def;
    }
    long integer(const std::string& key, long def) {
        auto v = take(key);
        return v ? parse_long(key, *v) : def;
    }
    std::string word(const std::string& key, const std::string& def, const std::set<std::string>& allowed) {
        auto v = take(key).value_or(def);
        if (!allowed.count(v)) {
            std::string opts;
            for (const auto& a : allowed) opts += (opts.empty() ? "" : "|") + a;
            throw ConfigError(key + ": expected one of " + opts + ", got '" + v + "'");
        }
        return v;
    }
    void finish() const {
        if (kv_.empty()) return;
        std::string keys;
        for (const auto& [k, v] : kv_) keys += (keys.empty() ? "" : ", ") + k;
        throw ConfigError("unknown or inapplicable keys: " + keys);
    }

private:
    KeyValues kv_;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

KeyValues read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_config(in);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    KeyValues kv;
    for (const auto& it : items) {
        if (it.name == "++" || it.name == "--") continue;
        if (it.parents.size() != 1)
            throw ConfigError(path + ": key '" + it.name + "' must sit in exactly one [section]");
        const std::string key = it.parents[0] + "." + it.name;
        if (kv.count(key)) throw ConfigError(path + ": duplicate key " + key);
        kv[key] = join(it.inputs);
    }
    return kv;
}

std::vector<double> SweepConfig::temperatures() const {
    std::vector<double> t(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double u = double(i) / (n_points - 1);
        t[i] = log_spacing ? t_min * std::pow(t_max / t_min, u) : t_min + (t_max - t_min) * u;
    }
    t.back() = t_max;
    return t;
}

RunConfig make_config(const KeyValues& kv) {
    Reader r(kv);
    RunConfig c;
    KeyValues& e = c.entries;

    const auto kind = r.word("model.kind", "v_system", {"spin_boson", "v_system", "two_qubit"});
    e["model.kind"] = kind;
    if (kind == "spin_boson") {
        models::SpinBoson s;
        s.omega_q = r.number("model.omega_q", s.omega_q);
        s.theta = r.number("model.theta", s.theta);
        require(s.omega_q > 0, "model.omega_q must be > 0");
        c.model = s;
        e["model.omega_q"] = fmt(s.omega_q);
        e["model.theta"] = fmt(s.theta);
    } else if (kind == "v_system") {
        models::VSystem v;
        v.omega_q = r.number("model.omega_q", v.omega_q);
        v.delta = r.number("model.delta", v.delta);
        require(v.omega_q > 0, "model.omega_q must be > 0");
        require(v.delta > 0 && v.delta < 2 * v.omega_q, "model.delta must lie in (0, 2 omega_q)");
        c.model = v;
        e["model.omega_q"] = fmt(v.omega_q);
        e["model.delta"] = fmt(v.delta);
    } else {
        models::TwoQubit t;
        t.omega_q = r.number("model.omega_q", t.omega_q);
        t.lambda_s = r.number("model.lambda_s", t.lambda_s);
        c.model = t;
        e["model.omega_q"] = fmt(t.omega_q);
        e["model.lambda_s"] = fmt(t.lambda_s);
    }

    const auto form = r.word("bath.form", "ohmic", {"ohmic", "tabulated", "discrete"});
    e["bath.form"] = form;
    if (form == "ohmic") {
        OhmicExponential o;
        o.q = r.number("bath.q", 10);
        o.tau_c = r.number("bath.tau_c", 1);
        c.bath = o;
        e["bath.q"] = fmt(o.q);
        e["bath.tau_c"] = fmt(o.tau_c);
    } else if (form == "tabulated") {
        auto g = r.take("bath.grid"), v = r.take("bath.values");
        require(g && v, "bath.form = tabulated needs bath.grid and bath.values");
        Tabulated t{parse_doubles("bath.grid", *g), parse_doubles("bath.values", *v), r.number("bath.s", 1)};
        c.bath = t;
        e["bath.grid"] = *g;
        e["bath.values"] = *v;
        e["bath.s"] = fmt(t.s);
    } else {
        auto w = r.take("bath.omega"), g = r.take("bath.g");
        require(w && g, "bath.form = discrete needs bath.omega and bath.g");
        c.bath = DiscreteModes{parse_doubles("bath.omega", *w), parse_doubles("bath.g", *g)};
        e["bath.omega"] = *w;
        e["bath.g"] = *g;
    }
    try {
        (void)c.spectral_density();
    } catch (const Error& ex) {
        throw ConfigError(std::string("bath: ") + ex.what());
    }

    c.lambda = r.number("coupling.lambda", 0.1);
    e["coupling.lambda"] = fmt(c.lambda);

    auto beta = r.take("state.beta"), temp = r.take("state.temperature");
    require(!(beta && temp), "give state.beta or state.temperature, not both");
    if (beta) c.beta = parse_double("state.beta", *beta);
    if (temp) {
        const double t = parse_double("state.temperature", *temp);
        require(t > 0, "state.temperature must be > 0");
        c.beta = 1 / t;
    }
    require(c.beta > 0, "state.beta must be > 0");
    e["state.beta"] = fmt(c.beta);
    c.normalization = r.word("state.normalization", "binomial", {"binomial", "exact"}) == "exact"
                          ? Normalization::Exact
                          : Normalization::Binomial;
    e["state.normalization"] = to_string(c.normalization);
    const auto regime = r.word("state.regime", "derived", {"derived", "conjectured"});
    c.regime = regime == "derived" ? models::Regime::UltrastrongDerived : models::Regime::UltrastrongConjectured;
    e["state.regime"] = regime;

    c.sweep.t_min = r.number("sweep.t_min", c.sweep.t_min);
    c.sweep.t_max = r.number("sweep.t_max", c.sweep.t_max);
    c.sweep.n_points = static_cast<int>(r.integer("sweep.n_points", c.sweep.n_points));
    c.sweep.log_spacing = r.word("sweep.spacing", "log", {"log", "linear"}) == "log";
    require(c.sweep.t_min > 0 && c.sweep.t_max > c.sweep.t_min, "sweep needs 0 < t_min < t_max");
    require(c.sweep.n_points >= 2 && c.sweep.n_points <= 100000, "sweep.n_points must be in [2, 100000]");
    e["sweep.t_min"] = fmt(c.sweep.t_min);
    e["sweep.t_max"] = fmt(c.sweep.t_max);
    e["sweep.n_points"] = std::to_string(c.sweep.n_points);
    e["sweep.spacing"] = c.sweep.log_spacing ? "log" : "linear";

    c.quadrature.abs_tol = r.number("quadrature.abs_tol", c.quadrature.abs_tol);
    c.quadrature.rel_tol = r.number("quadrature.rel_tol", c.quadrature.rel_tol);
    c.quadrature.max_intervals = static_cast<int>(r.integer("quadrature.max_intervals", c.quadrature.max_intervals));
    require(c.quadrature.abs_tol > 0 && c.quadrature.rel_tol > 0, "quadrature tolerances must be > 0");
    require(c.quadrature.max_intervals >= 1, "quadrature.max_intervals must be >= 1");
    e["quadrature.abs_tol"] = fmt(c.quadrature.abs_tol);
    e["quadrature.rel_tol"] = fmt(c.quadrature.rel_tol);
    e["quadrature.max_intervals"] = std::to_string(c.quadrature.max_intervals);

    c.validity.marginal = r.number("validity.marginal", c.validity.marginal);
    c.validity.invalid = r.number("validity.invalid", c.validity.invalid);
    require(c.validity.marginal > 0 && c.validity.invalid >= c.validity.marginal,
            "validity thresholds need 0 < marginal <= invalid");
    e["validity.marginal"] = fmt(c.validity.marginal);
    e["validity.invalid"] = fmt(c.validity.invalid);

    if (auto v = r.take("oracle.n_modes")) c.oracle.n_modes = parse_ints("oracle.n_modes", *v);
    if (auto v = r.take("oracle.cutoff")) c.oracle.cutoff = parse_ints("oracle.cutoff", *v);
    c.oracle.omega_max = r.number("oracle.omega_max", c.oracle.omega_max);
    c.oracle.dimension_cap = r.integer("oracle.dimension_cap", c.oracle.dimension_cap);
    for (int n : c.oracle.n_modes) require(n >= 1, "oracle.n_modes entries must be >= 1");
    for (int k : c.oracle.cutoff) require(k >= 2, "oracle.cutoff entries must be >= 2");
    require(c.oracle.omega_max >= 0, "oracle.omega_max must be >= 0 (0 selects the tail rule)");
    require(c.oracle.dimension_cap >= 2, "oracle.dimension_cap must be >= 2");
    std::vector<std::string> nm, ct;
    for (int n : c.oracle.n_modes) nm.push_back(std::to_string(n));
    for (int k : c.oracle.cutoff) ct.push_back(std::to_string(k));
    e["oracle.n_modes"] = join(nm);
    e["oracle.cutoff"] = join(ct);
    e["oracle.omega_max"] = fmt(c.oracle.omega_max);
    e["oracle.dimension_cap"] = std::to_string(c.oracle.dimension_cap);

    c.csv_path = r.take("output.csv").value_or("");
    c.json_path = r.take("output.json").value_or("");

    r.finish();
    c.threads = thread_budget();
    return c;
}

int thread_budget() {
    int n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MEANFORCE_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min<long>(n, cap);
    }
    return n;
}

}  // namespace meanforce::cli
