// acceptance.cpp - end-to-end acceptance checks, one verdict line per criterion
//
// Usage: acceptance --criterion N   (N in 1..12, 10a, 10b) or acceptance --all.
// Exit status is 0 only when every selected criterion passes. Every state produced
// along the way is checked for Hermiticity and unit trace (criterion 6).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "meanforce/models.hpp"
#include "meanforce/oracle.hpp"
#include "meanforce/ultrastrong.hpp"
#include "meanforce/weak.hpp"

using namespace meanforce;
namespace mm = meanforce::models;

namespace {

constexpr double kPi = std::numbers::pi;

// --- criterion 6 bookkeeping -------------------------------------------------

constexpr double kStateTol = 1e-12;

struct StateAudit {
    long states{0};
    double worst_hermiticity{0};
    double worst_trace{0};
    bool ok() const { return worst_hermiticity <= kStateTol && worst_trace <= kStateTol; }
} audit;

void check_state(const Matrix& m) {
    ++audit.states;
    audit.worst_hermiticity = std::max(audit.worst_hermiticity, hermiticity_residual(m));
    audit.worst_trace = std::max(audit.worst_trace, std::abs(m.trace() - 1.0));
}
void check_state(const DensityMatrix& r) { check_state(r.matrix()); }
void check_state(const WeakMfgResult& w) {
    check_state(w.rho);
    check_state(w.tau_s);
    // the assembly itself, before the final symmetrization and renormalization
    audit.worst_hermiticity = std::max(audit.worst_hermiticity, w.hermiticity_residual);
    audit.worst_trace = std::max(audit.worst_trace, w.trace_residual);
}

// --- reporting -----------------------------------------------------------------

struct Verdict {
    bool pass{true};
    std::vector<std::string> lines;

    [[gnu::format(printf, 3, 4)]] void require(bool ok, const char* fmt, ...) {
        std::va_list ap;
        va_start(ap, fmt);
        add(ok ? "  ok    " : "  FAIL  ", fmt, ap);
        va_end(ap);
        pass = pass && ok;
    }
    [[gnu::format(printf, 2, 3)]] void note(const char* fmt, ...) {
        std::va_list ap;
        va_start(ap, fmt);
        add("        ", fmt, ap);
        va_end(ap);
    }

private:
    void add(const char* prefix, const char* fmt, std::va_list ap) {
        char buf[512];
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        lines.emplace_back(std::string(prefix) + buf);
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return v;
}

// the bath used for the weak-coupling figure
SpectralDensity fig1_bath() { return SpectralDensity(OhmicExponential{10, 1}); }

std::mt19937_64 rng(20240601);
double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// --- criteria ------------------------------------------------------------------

Verdict ultrastrong_single_qubit() {
    Verdict v;
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const mm::SpinBoson s{uniform(0.5, 5), uniform(0, kPi)};
        const double beta = uniform(0.1, 10);
        const auto m = mm::build(s);
        const auto generic = ultrastrong_mfg_state(m.hamiltonian, m.couplings[0], beta);
        const auto closed = mm::closed_form_state(s, beta, mm::Regime::UltrastrongDerived);
        check_state(generic);
        check_state(closed);
        worst = std::max(worst, trace_distance(generic, closed));
    }
    v.require(worst < 1e-12, "max trace distance generic vs closed form %.3g < 1e-12 (20 random points)", worst);
    return v;
}

Verdict ultrastrong_two_qubit() {
    Verdict v;
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const mm::TwoQubit s{uniform(0.5, 5), uniform(0, 3)};
        const double beta = uniform(0.1, 10);
        const auto m = mm::build(s);
        const auto generic = ultrastrong_two_bath(m.hamiltonian, m.couplings[0], m.couplings[1], m.dims, beta);
        const auto closed = mm::closed_form_state(s, beta, mm::Regime::UltrastrongDerived);
        check_state(generic);
        check_state(closed);
        worst = std::max(worst, trace_distance(generic, closed));
    }
    v.require(worst < 1e-12, "max trace distance two-bath pipeline vs closed form %.3g < 1e-12 (20 random points)",
              worst);
    return v;
}

Verdict ultrastrong_v_system() {
    Verdict v;
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const mm::VSystem s{uniform(0.5, 5), uniform(0.01, 0.5)};
        const double beta = uniform(0.1, 10);
        const auto m = mm::build(s);
        const auto generic = ultrastrong_mfg_state(m.hamiltonian, m.couplings[0], beta);
        const auto closed = mm::closed_form_state(s, beta, mm::Regime::UltrastrongDerived);
        check_state(generic);
        check_state(closed);
        worst = std::max(worst, trace_distance(generic, closed));
    }
    v.require(worst < 1e-12, "max trace distance generic vs closed form %.3g < 1e-12 (20 random points)", worst);
    return v;
}

Verdict weak_spin_boson() {
    Verdict v;
    const auto j = fig1_bath();
    const double lambda = 0.1;
    double worst = 0;
    int n = 0;
    for (double theta : {0.2, kPi / 4, 1.3, 2.2, 2.9})
        for (double beta : {0.5, 2.0}) {
            const auto m = mm::build(mm::SpinBoson{1, theta});
            const auto w = weak_mfg_state(m, j, beta, lambda);
            check_state(w);
            const Matrix r = w.rho.matrix(), t = w.tau_s.matrix();
            const double sx = (r * ops::sigma_x()).trace().real();
            const double sy = (r * ops::sigma_y()).trace().real();
            const double dz = ((r - t) * ops::sigma_z()).trace().real();
            const auto cf = mm::spin_boson_weak_closed_form(1, theta, j, beta, lambda);
            const double err = std::max({std::abs(sx - cf.sigma_x), std::abs(sy), std::abs(dz - cf.sigma_z_shift)});
            worst = std::max(worst, err);
            ++n;
        }
    v.require(n == 10 && worst < 1e-7, "max Bloch-component difference %.3g < 1e-7 over %d (theta, beta) points", worst,
              n);
    return v;
}

Verdict weak_v_system() {
    Verdict v;
    const auto j = fig1_bath();
    const double lambda = 0.1, omega_q = 3, delta = 0.1;
    const auto m = mm::build(mm::VSystem{omega_q, delta});
    double worst_state = 0, worst_coeff = 0;
    bool all_valid = true;
    const auto temps = log_grid(1, 50, 20);
    for (double t : temps) {
        const double beta = 1 / t;
        const auto w = weak_mfg_state(m, j, beta, lambda);
        check_state(w);
        all_valid = all_valid && w.validity == Validity::Valid;
        const auto closed = mm::v_system_weak_state(omega_q, delta, j, beta, lambda);
        check_state(closed);
        worst_state = std::max(worst_state, max_abs(w.rho.matrix() - closed.matrix()));
        const auto c = mm::v_system_weak_coefficients(omega_q, delta, j, beta);
        const Matrix d = (w.rho.matrix() - w.tau_s.matrix()) / (lambda * lambda);
        worst_coeff = std::max({worst_coeff, std::abs(d(0, 0).real() - c.f0), std::abs(d(1, 1).real() - c.f1),
                                std::abs(d(2, 2).real() - c.f2), std::abs(d(1, 2).real() - c.g),
                                std::abs(d(0, 1)), std::abs(d(0, 2))});
    }
    v.require(all_valid, "all 20 temperatures in [1, 50] classified valid");
    v.require(worst_state < 1e-7, "max entrywise |rho_generic - rho_closed| %.3g < 1e-7", worst_state);
    v.require(worst_coeff < 1e-7, "max coefficient difference (rho - tau)/lambda^2 vs f_p, g: %.3g < 1e-7",
              worst_coeff);
    return v;
}

Verdict state_audit_only() {
    // reruns the fast producers so the audit has something to look at on its own
    ultrastrong_single_qubit();
    ultrastrong_two_qubit();
    ultrastrong_v_system();
    weak_v_system();
    const auto j = SpectralDensity(OhmicExponential{1, 1});
    const auto m = mm::build(mm::SpinBoson{1, kPi / 4});
    auto bath = discretize_bath(j, 2, 4);
    bath.fock_cutoff = 6;
    for (double lambda : {0.1, 1.0}) check_state(oracle_state(m, bath, 1, lambda).rho_exact);
    const auto tq = mm::build(mm::TwoQubit{});
    check_state(conjecture_two_bath(tq.hamiltonian, tq.couplings[0], tq.couplings[1], tq.dims, 1));
    return {};
}

Verdict high_temperature() {
    Verdict v;
    const auto j = fig1_bath();
    const auto m = mm::build(mm::SpinBoson{1, kPi / 4});
    const auto betas = log_grid(1e-3, 1e-1, 5);
    auto bath = discretize_bath(j, 3);
    bath.fock_cutoff = 4;
    for (double lambda : {0.1, 1.0}) {
        std::vector<double> weak, exact;
        double trunc = 0;
        for (double beta : betas) {
            const auto w = weak_mfg_state(m, j, beta, lambda);
            check_state(w);
            weak.push_back(trace_distance(w.rho, w.tau_s));
            const auto o = oracle_state(m, bath, beta, lambda);
            check_state(o.rho_exact);
            exact.push_back(trace_distance(o.rho_exact, gibbs_state(m.hamiltonian, beta)));
            trunc = std::max(trunc, o.truncation_diagnostic);
        }
        const double sw = loglog_slope(betas, weak), so = loglog_slope(betas, exact);
        v.require(sw >= 1.9, "lambda=%g second-order slope %.4f >= 1.9 (deviation %.3g .. %.3g)", lambda, sw,
                  weak.front(), weak.back());
        v.require(so >= 1.9, "lambda=%g oracle slope %.4f >= 1.9 (deviation %.3g .. %.3g)", lambda, so, exact.front(),
                  exact.back());
        v.note("lambda=%g oracle: 3 modes, cutoff 4, max truncation diagnostic %.3g", lambda, trunc);
    }
    return v;
}

Verdict quartic_residual() {
    Verdict v;
    const auto j = fig1_bath();
    const auto m = mm::build(mm::SpinBoson{1, kPi / 4});
    auto bath = discretize_bath(j, 4, 30);
    bath.fock_cutoff = 5;
    const auto discrete = bath.as_spectral_density();
    std::vector<double> residual;
    for (double lambda : {0.1, 0.05}) {
        const auto o = oracle_state(m, bath, 1, lambda);
        const auto w = weak_mfg_state(m, discrete, 1, lambda);
        check_state(o.rho_exact);
        check_state(w);
        residual.push_back(trace_distance(o.rho_exact, w.rho));
        v.note("lambda=%g residual %.4g, truncation diagnostic %.3g", lambda, residual.back(),
               o.truncation_diagnostic);
    }
    const double ratio = residual[0] / residual[1];
    v.require(ratio >= 8 && ratio <= 32, "residual ratio %.3f in [8, 32]", ratio);
    return v;
}

Verdict ultrastrong_approach() {
    Verdict v;
    const mm::SpinBoson s{1, kPi / 4};
    const double beta = 2.0 / 3;
    const auto m = mm::build(s);
    const auto j = SpectralDensity(OhmicExponential{1, 1});
    auto bath = discretize_bath(j, 1, 4);
    bath.fock_cutoff = 40;
    const auto target = mm::closed_form_state(s, beta, mm::Regime::UltrastrongDerived);
    double prev = INFINITY, worst_trunc = 0;
    bool decreasing = true;
    for (double lambda : {1.0, 2.0, 4.0, 8.0}) {
        const auto o = oracle_state(m, bath, beta, lambda);
        check_state(o.rho_exact);
        const double d = trace_distance(o.rho_exact, target);
        v.note("lambda=%g trace distance to the ultrastrong state %.4g, truncation diagnostic %.3g", lambda, d,
               o.truncation_diagnostic);
        decreasing = decreasing && d < prev;
        prev = d;
        worst_trunc = std::max(worst_trunc, o.truncation_diagnostic);
    }
    v.require(decreasing, "trace distance strictly decreasing along lambda = 1, 2, 4, 8");
    v.require(worst_trunc < 1e-4, "max truncation diagnostic %.3g < 1e-4 (1 mode on (0, 4], cutoff 40)", worst_trunc);
    return v;
}

std::pair<DensityMatrix, DensityMatrix> two_qubit_pair(double t) {
    const mm::TwoQubit s{1, 1.55};
    return {mm::closed_form_state(s, 1 / t, mm::Regime::UltrastrongDerived),
            mm::closed_form_state(s, 1 / t, mm::Regime::UltrastrongConjectured)};
}

Verdict gap_high_temperature() {
    Verdict v;
    const auto [derived, conjectured] = two_qubit_pair(1.5);
    check_state(derived);
    check_state(conjectured);
    const double f = fidelity(derived, conjectured);
    v.require(f > 0.9995, "T=1.5 fidelity %.6f > 0.9995 (trace distance %.4g)", f,
              trace_distance(derived, conjectured));
    return v;
}

Verdict gap_low_temperature() {
    Verdict v;
    const auto [derived, conjectured] = two_qubit_pair(0.2);
    check_state(derived);
    check_state(conjectured);
    const double d = trace_distance(derived, conjectured);
    v.require(d > 0.05, "T=0.2 trace distance %.4g > 0.05 (fidelity %.6f)", d, fidelity(derived, conjectured));
    // context only: the same temperature with a weaker flip-flop term
    const mm::TwoQubit weaker{1, 1.0};
    v.note("lambda_S=1.0 at T=0.2: trace distance %.4g",
           trace_distance(mm::closed_form_state(weaker, 5, mm::Regime::UltrastrongDerived),
                          mm::closed_form_state(weaker, 5, mm::Regime::UltrastrongConjectured)));
    return v;
}

Verdict figure_sweep() {
    Verdict v;
    const auto cfg = cli::make_config({});
    const auto rows = cli::fig1_table(cfg);
    const auto s = cli::summarize(rows, cfg.validity);
    const auto model = mm::build(cfg.model);
    for (const auto& r : rows) {
        check_state(ultrastrong_mfg_state(model.hamiltonian, model.couplings[0], 1 / r.t));
        check_state(mm::v_system_weak_state(3, 0.1, cfg.spectral_density(), 1 / r.t, cfg.lambda));
    }

    v.require(s.interior_peak, "(a) lambda^2 g peaks inside the sweep at T=%.4g (value %.4g)", s.peak_t,
              s.peak_lambda2_g);

    // decays monotonically above the peak and ends far below it
    bool decaying = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].t > s.peak_t) decaying = decaying && rows[i].lambda2_g < rows[i - 1].lambda2_g;
    const double tail = rows.back().lambda2_g / s.peak_lambda2_g;
    v.require(decaying && tail < 0.01, "(b) lambda^2 g falls monotonically above the peak; at T=%g it is %.3g of the peak",
              rows.back().t, tail);

    double worst = INFINITY;
    int valid = 0;
    for (const auto& r : rows)
        if (r.validity_margin < cfg.validity.invalid) {
            worst = std::min(worst, std::abs(r.g) / std::abs(r.lambda2_g));
            ++valid;
        }
    v.require(valid > 0 && worst >= 1, "(c) |G| >= |lambda^2 g| on all %d valid points (min ratio %.3g)", valid, worst);

    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        monotone = monotone && rows[i].validity_margin <= rows[i - 1].validity_margin;
    v.require(monotone && rows.front().validity_margin >= 1 && rows.back().validity_margin < 1 &&
                  std::isfinite(s.window_t_min),
              "(d) margin %.3g at T=%g falls monotonically through 1 at T=%.4g to %.3g at T=%g",
              rows.front().validity_margin, rows.front().t, s.window_t_min, rows.back().validity_margin,
              rows.back().t);
    return v;
}

Verdict validity_bound() {
    Verdict v;
    const auto j = fig1_bath();
    const auto betas = log_grid(0.05, 20, 25);
    double worst_scaling = 0;
    bool monotone = true;
    for (double theta : {0.3, kPi / 4, 1.2, 2.5}) {
        const auto m = mm::build(mm::SpinBoson{1, theta});
        double prev = -1;
        for (double beta : betas) {
            const double base = weak_validity_margin(m, j, beta, 1);
            for (double lambda : {0.01, 0.1, 0.5, 2.0}) {
                const double r = weak_validity_margin(m, j, beta, lambda) / (lambda * lambda);
                worst_scaling = std::max(worst_scaling, std::abs(r - base) / base);
            }
            monotone = monotone && base > prev;
            prev = base;
        }
        check_state(weak_mfg_state(m, j, betas.back(), 0.1));
    }
    v.require(worst_scaling < 1e-12, "max relative deviation of margin/lambda^2 from its lambda=1 value %.3g < 1e-12",
              worst_scaling);
    v.require(monotone, "margin strictly increasing along 25 betas in [0.05, 20] for 4 coupling angles");
    return v;
}

struct Criterion {
    const char* id;
    const char* title;
    double budget_seconds;
    std::function<Verdict()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list{
        {"1", "single-qubit ultrastrong closed form", 1, ultrastrong_single_qubit},
        {"2", "two-qubit ultrastrong closed form", 1, ultrastrong_two_qubit},
        {"3", "V-system ultrastrong closed form", 1, ultrastrong_v_system},
        {"4", "weak spin-boson vs integral closed forms", 30, weak_spin_boson},
        {"5", "weak V-system vs coefficient closed forms", 60, weak_v_system},
        {"6", "Hermiticity and unit trace of produced states", 60, state_audit_only},
        {"7", "high-temperature O(beta^2) approach to the Gibbs state", 120, high_temperature},
        {"8", "quartic residual of the second-order state", 300, quartic_residual},
        {"9", "approach to the ultrastrong state", 600, ultrastrong_approach},
        {"10a", "derived vs conjectured two-qubit states at T=1.5", 1, gap_high_temperature},
        {"10b", "derived vs conjectured two-qubit states at T=0.2", 1, gap_low_temperature},
        {"11", "V-system temperature sweep features", 120, figure_sweep},
        {"12", "validity margin scaling and monotonicity", 60, validity_bound},
    };
    return list;
}

bool run_one(const Criterion& c) {
    audit = {};
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = c.run();
    } catch (const std::exception& e) {
        v.require(false, "threw: %s", e.what());
    }
    const double elapsed = seconds_since(t0);
    v.require(elapsed < c.budget_seconds, "runtime %.3f s < %g s", elapsed, c.budget_seconds);
    v.require(audit.ok(), "criterion 6 over %ld states: hermiticity %.2g, |Tr - 1| %.2g (tolerance %g)", audit.states,
              audit.worst_hermiticity, audit.worst_trace, kStateTol);
    std::printf("criterion %s: %s  %s\n", c.id, v.pass ? "PASS" : "FAIL", c.title);
    for (const auto& l : v.lines) std::printf("%s\n", l.c_str());
    std::fflush(stdout);
    return v.pass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meanforce acceptance checks"};
    std::vector<std::string> selected;
    bool all = false;
    std::vector<std::string> ids;
    for (const auto& c : criteria()) ids.emplace_back(c.id);
    app.add_option("-c,--criterion", selected, "criterion id")->check(CLI::IsMember(ids));
    app.add_flag("--all", all, "run every criterion");
    CLI11_PARSE(app, argc, argv);
    if (all || selected.empty()) selected = ids;

    bool pass = true;
    for (const auto& id : selected)
        for (const auto& c : criteria())
            if (id == c.id) pass = run_one(c) && pass;
    return pass ? 0 : 1;
}
