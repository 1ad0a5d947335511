#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "meanforce/serialize.hpp"
#include "meanforce/ultrastrong.hpp"

namespace meanforce::cli {

namespace {

using nlohmann::json;

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// results land in index order whatever the worker count
template <class T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& f) {
    std::vector<T> out;
    out.reserve(n);
    const std::size_t chunk = std::max(1, threads);
    for (std::size_t base = 0; base < n; base += chunk) {
        std::vector<std::future<T>> jobs;
        for (std::size_t i = base; i < std::min(n, base + chunk); ++i)
            jobs.push_back(std::async(chunk > 1 ? std::launch::async : std::launch::deferred, f, i));
        for (auto& j : jobs) out.push_back(j.get());
    }
    return out;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path);
}

std::string metadata(const std::string& command, const RunConfig& cfg) {
    std::ostringstream os;
    os << "# meanforce " << command << "\n";
    for (const auto& [k, v] : cfg.entries) os << "# " << k << " = " << v << "\n";
    return os.str();
}

json parameters(const RunConfig& cfg) {
    json p = json::object();
    for (const auto& [k, v] : cfg.entries) p[k] = v;
    return p;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

const SystemModel& single_bath(const SystemModel& m, const char* command) {
    if (m.couplings.size() != 1)
        throw UnsupportedCombination(std::string(command) + " needs a single-bath model (spin_boson or v_system)");
    return m;
}

double spectral_radius(const HermitianOperator& h) {
    const auto ev = hermitian_eigensystem(h).eigenvalues;
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

void caveat(const SystemModel& m, double beta, std::ostream& err) {
    if (beta * spectral_radius(m.hamiltonian) < 1e-3)
        err << "note: beta*||H_S|| < 1e-3. The ultrastrong state takes lambda -> infinity before beta -> 0 "
               "and does not reduce to the Gibbs state in this limit.\n";
}

int cmd_weak(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto model = models::build(cfg.model);
    WeakOptions opt{cfg.quadrature, 0, cfg.normalization, cfg.validity};
    const auto r = weak_mfg_state(single_bath(model, "weak"), cfg.spectral_density(), cfg.beta, cfg.lambda, opt);
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
    if (auto note = models::regime_note(cfg.model); !note.empty()) err << "note: " << note << "\n";
    json j{{"command", "weak"},
           {"parameters", parameters(cfg)},
           {"rho", operator_to_json(r.rho.matrix())},
           {"tau_s", operator_to_json(r.tau_s.matrix())},
           {"validity_margin", r.validity_margin},
           {"validity", to_string(r.validity)},
           {"coherence_norm", r.coherence_norm},
           {"quadrature_error_estimate", r.coefficients.quadrature_error_estimate},
           {"warnings", r.warnings}};
    emit(cfg.json_path, dump(j), out);
    return r.validity == Validity::Invalid ? kExitInvalidRegime : kExitOk;
}

int cmd_ultrastrong(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto model = models::build(cfg.model);
    const auto& m = single_bath(model, "ultrastrong");
    caveat(m, cfg.beta, err);
    const bool derived = cfg.regime == models::Regime::UltrastrongDerived;
    const auto rho = derived ? ultrastrong_mfg_state(m.hamiltonian, m.couplings[0], cfg.beta)
                             : conjecture_state(m.hamiltonian, m.couplings[0], cfg.beta);
    json j{{"command", "ultrastrong"},
           {"parameters", parameters(cfg)},
           {"regime", derived ? "derived" : "conjectured"},
           {"rho", operator_to_json(rho.matrix())},
           {"partitioned_hamiltonian",
            operator_to_json(partitioned_hamiltonian(m.hamiltonian, m.couplings[0]).matrix())}};
    emit(cfg.json_path, dump(j), out);
    return kExitOk;
}

int cmd_ultrastrong2(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto m = models::build(cfg.model);
    if (!m.two_bath()) throw UnsupportedCombination("ultrastrong2 needs a two-bath model (two_qubit)");
    caveat(m, cfg.beta, err);
    const bool derived = cfg.regime == models::Regime::UltrastrongDerived;
    const auto rho = derived ? ultrastrong_two_bath(m.hamiltonian, m.couplings[0], m.couplings[1], m.dims, cfg.beta)
                             : conjecture_two_bath(m.hamiltonian, m.couplings[0], m.couplings[1], m.dims, cfg.beta);
    json j{{"command", "ultrastrong2"},
           {"parameters", parameters(cfg)},
           {"regime", derived ? "derived" : "conjectured"},
           {"rho", operator_to_json(rho.matrix())}};
    emit(cfg.json_path, dump(j), out);
    return kExitOk;
}

int cmd_models(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    // the configured model stands in for its own kind, defaults for the others
    std::vector<models::ModelSpec> specs{models::SpinBoson{}, models::VSystem{}, models::TwoQubit{}};
    specs[cfg.model.index()] = cfg.model;
    json list = json::array();
    for (const auto& spec : specs) {
        const auto m = models::build(spec);
        json couplings = json::array();
        for (const auto& x : m.couplings) couplings.push_back(operator_to_json(x.matrix()));
        json states{{"derived", operator_to_json(
                                    models::closed_form_state(spec, cfg.beta, models::Regime::UltrastrongDerived).matrix())}};
        if (!std::holds_alternative<models::VSystem>(spec))
            states["conjectured"] = operator_to_json(
                models::closed_form_state(spec, cfg.beta, models::Regime::UltrastrongConjectured).matrix());
        json params = std::visit(
            [](const auto& s) -> json {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, models::SpinBoson>) return {{"omega_q", s.omega_q}, {"theta", s.theta}};
                if constexpr (std::is_same_v<S, models::VSystem>) return {{"omega_q", s.omega_q}, {"delta", s.delta}};
                if constexpr (std::is_same_v<S, models::TwoQubit>)
                    return {{"omega_q", s.omega_q}, {"lambda_s", s.lambda_s}};
            },
            spec);
        list.push_back({{"kind", models::name(spec)},
                        {"parameters", params},
                        {"dims", m.dims},
                        {"hamiltonian", operator_to_json(m.hamiltonian.matrix())},
                        {"couplings", couplings},
                        {"regime_note", models::regime_note(spec)},
                        {"closed_form_states", states}});
    }
    emit(cfg.json_path, dump({{"command", "models"}, {"beta", cfg.beta}, {"models", list}}), out);
    return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto model = models::build(cfg.model);
    std::vector<SweepPoint> grid;
    for (int n : cfg.oracle.n_modes)
        for (int c : cfg.oracle.cutoff) grid.push_back({n, c});
    SweepOptions so{cfg.oracle.omega_max, cfg.oracle.dimension_cap, cfg.threads, cfg.quadrature};
    const auto rows =
        convergence_sweep(single_bath(model, "oracle"), cfg.spectral_density(), cfg.beta, cfg.lambda, grid, so);

    std::ostringstream os;
    os << metadata("oracle", cfg);
    os << "# discretization: Gauss-Legendre modes on (0, omega_max], truncated Fock ladders; "
          "converged means truncation_diagnostic < "
       << num(kTruncationThreshold) << "\n";
    os << "# trace_distance_to_weak uses the second-order state of the same discrete bath\n";
    os << "n_modes,cutoff,lambda,beta,trace_distance_to_weak,trace_distance_to_ultrastrong,truncation_diagnostic\n";
    for (const auto& r : rows) {
        os << r.n_modes << ',' << r.fock_cutoff << ',' << num(r.lambda) << ',' << num(r.beta) << ','
           << num(r.trace_distance_to_weak) << ',' << num(r.trace_distance_to_ultrastrong) << ','
           << num(r.truncation_diagnostic) << '\n';
        if (!r.converged)
            err << "warning: n_modes=" << r.n_modes << " cutoff=" << r.fock_cutoff
                << " not converged (truncation diagnostic " << r.truncation_diagnostic << ")\n";
    }
    emit(cfg.csv_path, os.str(), out);
    return kExitOk;
}

std::string fig1_csv(const std::string& command, const RunConfig& cfg, const std::vector<Fig1Row>& rows,
                     const Fig1Summary& s) {
    std::ostringstream os;
    os << metadata(command, cfg);
    os << "T,lambda2_g,lambda2_f0,lambda2_f1,lambda2_f2,G,F0,F1,F2,validity_margin\n";
    for (const auto& r : rows)
        os << num(r.t) << ',' << num(r.lambda2_g) << ',' << num(r.lambda2_f0) << ',' << num(r.lambda2_f1) << ','
           << num(r.lambda2_f2) << ',' << num(r.g) << ',' << num(r.f0) << ',' << num(r.f1) << ',' << num(r.f2)
           << ',' << num(r.validity_margin) << '\n';
    os << "# summary.validity_window_t_min = " << num(s.window_t_min) << "\n";
    os << "# summary.marginal_t_min = " << num(s.marginal_t_min) << "\n";
    os << "# summary.lambda2_g_peak_t = " << num(s.peak_t) << "\n";
    os << "# summary.lambda2_g_peak = " << num(s.peak_lambda2_g) << "\n";
    return os.str();
}

void print_summary(const Fig1Summary& s, const ValidityThresholds& t, std::ostream& err) {
    if (std::isnan(s.window_t_min))
        err << "validity margin stays below " << t.invalid << " over the sweep\n";
    else
        err << "weak-coupling window: T > " << s.window_t_min << " (margin crosses " << t.invalid << ")\n";
    err << "lambda^2 g peaks at T = " << s.peak_t << (s.interior_peak ? "" : " (at the sweep edge)") << "\n";
}

int cmd_sweep(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (std::holds_alternative<models::VSystem>(cfg.model)) {
        const auto rows = fig1_table(cfg);
        const auto s = summarize(rows, cfg.validity);
        emit(cfg.csv_path, fig1_csv(command, cfg, rows, s), out);
        print_summary(s, cfg.validity, err);
        bool invalid = false;
        for (const auto& r : rows) invalid |= r.validity_margin >= cfg.validity.invalid;
        return invalid ? kExitInvalidRegime : kExitOk;
    }
    if (command == "fig1") throw UnsupportedCombination("fig1 is defined for the v_system model");

    const auto model = models::build(cfg.model);
    const auto& m = single_bath(model, "sweep");
    const auto j = cfg.spectral_density();
    const auto ts = cfg.sweep.temperatures();
    WeakOptions opt{cfg.quadrature, 0, cfg.normalization, cfg.validity};
    struct Row {
        double margin, coherence, weak_gap, ultra_gap;
    };
    const auto rows = parallel_map<Row>(ts.size(), cfg.threads, [&](std::size_t i) {
        const double beta = 1 / ts[i];
        const auto w = weak_mfg_state(m, j, beta, cfg.lambda, opt);
        const auto u = ultrastrong_mfg_state(m.hamiltonian, m.couplings[0], beta);
        return Row{w.validity_margin, w.coherence_norm, trace_distance(w.rho, w.tau_s), trace_distance(u, w.tau_s)};
    });
    std::ostringstream os;
    os << metadata(command, cfg);
    os << "T,validity_margin,coherence_norm,trace_distance_weak_to_gibbs,trace_distance_ultrastrong_to_gibbs\n";
    bool invalid = false;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto& r = rows[i];
        os << num(ts[i]) << ',' << num(r.margin) << ',' << num(r.coherence) << ',' << num(r.weak_gap) << ','
           << num(r.ultra_gap) << '\n';
        invalid |= r.margin >= cfg.validity.invalid;
    }
    emit(cfg.csv_path, os.str(), out);
    return invalid ? kExitInvalidRegime : kExitOk;
}

// flag -> config key; the same flags exist on every subcommand
struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--model", "model.kind", "spin_boson | v_system | two_qubit"},
    {"--omega-q", "model.omega_q", "qubit / excitation frequency"},
    {"--theta", "model.theta", "spin-boson coupling angle"},
    {"--delta", "model.delta", "V-system excited-pair splitting"},
    {"--lambda-s", "model.lambda_s", "two-qubit flip-flop strength"},
    {"--bath", "bath.form", "ohmic | tabulated | discrete"},
    {"--q", "bath.q", "reorganization energy of the Ohmic form"},
    {"--tau-c", "bath.tau_c", "Ohmic cutoff time"},
    {"--lambda", "coupling.lambda", "system-bath coupling strength"},
    {"--beta", "state.beta", "inverse temperature"},
    {"--temperature", "state.temperature", "temperature (k_B = 1)"},
    {"--normalization", "state.normalization", "binomial | exact"},
    {"--regime", "state.regime", "derived | conjectured (ultrastrong)"},
    {"--t-min", "sweep.t_min", "lowest sweep temperature"},
    {"--t-max", "sweep.t_max", "highest sweep temperature"},
    {"--n-points", "sweep.n_points", "number of sweep temperatures"},
    {"--spacing", "sweep.spacing", "log | linear"},
    {"--abs-tol", "quadrature.abs_tol", "absolute quadrature tolerance"},
    {"--rel-tol", "quadrature.rel_tol", "relative quadrature tolerance"},
    {"--marginal", "validity.marginal", "margin flagged as marginal"},
    {"--invalid", "validity.invalid", "margin flagged as invalid"},
    {"--n-modes", "oracle.n_modes", "bath mode counts, comma separated"},
    {"--cutoff", "oracle.cutoff", "Fock cutoffs, comma separated"},
    {"--omega-max", "oracle.omega_max", "discretization upper frequency (0: tail rule)"},
    {"--dimension-cap", "oracle.dimension_cap", "largest total Hilbert-space dimension"},
    {"--csv", "output.csv", "CSV output path (default stdout)"},
    {"--json", "output.json", "JSON output path (default stdout)"},
};

}  // namespace

std::vector<Fig1Row> fig1_table(const RunConfig& cfg) {
    const auto* v = std::get_if<models::VSystem>(&cfg.model);
    if (!v) throw UnsupportedCombination("the figure table is defined for the v_system model");
    const auto model = models::build(cfg.model);
    const auto j = cfg.spectral_density();
    const auto ts = cfg.sweep.temperatures();
    const double l2 = cfg.lambda * cfg.lambda;
    WeakOptions opt{cfg.quadrature, 0, cfg.normalization, cfg.validity};
    return parallel_map<Fig1Row>(ts.size(), cfg.threads, [&](std::size_t i) {
        const double beta = 1 / ts[i];
        const auto c = models::v_system_weak_coefficients(v->omega_q, v->delta, j, beta, cfg.quadrature);
        const Matrix u = ultrastrong_mfg_state(model.hamiltonian, model.couplings[0], beta).matrix();
        const Matrix tau = gibbs_state(model.hamiltonian, beta).matrix();
        return Fig1Row{ts[i],
                       l2 * c.g,
                       l2 * c.f0,
                       l2 * c.f1,
                       l2 * c.f2,
                       2 * u(1, 2).real(),
                       (u(0, 0) - tau(0, 0)).real(),
                       (u(1, 1) - tau(1, 1)).real(),
                       (u(2, 2) - tau(2, 2)).real(),
                       weak_validity_margin(model, j, beta, cfg.lambda, opt)};
    });
}

Fig1Summary summarize(const std::vector<Fig1Row>& rows, const ValidityThresholds& t) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    // walk down from the hottest point; interpolate the first crossing in log T
    auto crossing = [&](double level) {
        for (std::size_t i = rows.size(); i-- > 1;) {
            const auto &hi = rows[i], &lo = rows[i - 1];
            if (hi.validity_margin < level && lo.validity_margin >= level) {
                const double s = (level - hi.validity_margin) / (lo.validity_margin - hi.validity_margin);
                return std::exp(std::log(hi.t) + s * (std::log(lo.t) - std::log(hi.t)));
            }
            if (hi.validity_margin >= level) return hi.t;
        }
        return nan;
    };
    Fig1Summary s{crossing(t.invalid), crossing(t.marginal), nan, -std::numeric_limits<double>::infinity(), false};
    std::size_t k = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].lambda2_g > s.peak_lambda2_g) s.peak_lambda2_g = rows[i].lambda2_g, k = i;
    if (!rows.empty()) s.peak_t = rows[k].t;
    s.interior_peak = k > 0 && k + 1 < rows.size();
    return s;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean force Gibbs states of open quantum systems", "meanforce"};
    app.require_subcommand(1);

    KeyValues overrides;
    std::string config_path;
    struct Command {
        const char* name;
        const char* help;
    };
    const Command commands[] = {
        {"weak", "second-order state at one temperature (JSON)"},
        {"ultrastrong", "single-bath ultrastrong state (JSON)"},
        {"ultrastrong2", "two-bath ultrastrong state (JSON)"},
        {"models", "model operators and closed-form states (JSON)"},
        {"oracle", "exact finite-bath convergence sweep (CSV)"},
        {"sweep", "temperature sweep (CSV)"},
        {"fig1", "V-system temperature sweep of weak and ultrastrong quantities (CSV)"},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("-c,--config", config_path, "configuration file")->check(CLI::ExistingFile);
        for (const auto& f : kFlags) {
            const std::string key = f.key;
            sub->add_option_function<std::string>(
                f.flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, f.help);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        KeyValues kv = config_path.empty() ? KeyValues{} : read_config_file(config_path);
        for (const auto& [k, v] : overrides) kv[k] = v;
        cfg = make_config(kv);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (command == "weak") return cmd_weak(cfg, out, err);
        if (command == "ultrastrong") return cmd_ultrastrong(cfg, out, err);
        if (command == "ultrastrong2") return cmd_ultrastrong2(cfg, out, err);
        if (command == "models") return cmd_models(cfg, out, err);
        if (command == "oracle") return cmd_oracle(cfg, out, err);
        return cmd_sweep(command, cfg, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace meanforce::cli
