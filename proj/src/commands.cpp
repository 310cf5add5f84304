#include "nsk/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>

#include "nsk/fit.hpp"
#include "nsk/linear.hpp"
#include "nsk/nonlinear.hpp"
#include "nsk/quadrature.hpp"
#include "nsk/symbol.hpp"

namespace nsk {

namespace fs = std::filesystem;

namespace {

constexpr double kI2LimitRef = 5.2441;

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

class Csv {
public:
    Csv(const fs::path& path, const std::string& header) : path_(path), out_(path) {
        if (!out_) throw Error(ErrorKind::config, "cannot write " + path.string());
        out_ << header << '\n';
    }

    template <typename... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

    const fs::path& path() const { return path_; }

private:
    static std::string cell(double x) { return fmt(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(bool x) { return x ? "1" : "0"; }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }

    fs::path path_;
    std::ofstream out_;
};

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::config, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

json number_or_null(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

// Plot script reading only the CSV next to it.
void write_plot_script(const fs::path& path, const std::string& csv_name, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::config, "cannot write " + path.string());
    out << "#!/usr/bin/env python3\n"
           "# Renders "
        << csv_name
        << " next to this script.\n"
           "import csv\n"
           "import os\n"
           "import matplotlib\n"
           "matplotlib.use(\"Agg\")\n"
           "import matplotlib.pyplot as plt\n\n"
           "here = os.path.dirname(os.path.abspath(__file__))\n"
           "with open(os.path.join(here, \""
        << csv_name
        << "\")) as f:\n"
           "    rows = list(csv.DictReader(f))\n\n"
        << body;
}

struct Prepared {
    FluidModel model;
    EquilibriumState eq;
    Dissipation dissipation;
};

Prepared prepare(const RunConfig& cfg) {
    FluidModel model = model_from_json(cfg.model);
    EquilibriumState eq = make_equilibrium(model, cfg.v_bar, cfg.u_bar);
    return {std::move(model), eq, cfg.zero_dissipation ? Dissipation::suppressed : Dissipation::physical};
}

CommandResult failure(const fs::path& out_dir, const std::string& name, const Error& e) {
    CommandResult r;
    r.exit_code = exit_code_for(e.kind());
    r.reason = std::string(to_string(e.kind()));
    const fs::path path = out_dir / (name + ".json");
    write_json(path, json{{"ok", false}, {"reason", r.reason}, {"message", e.what()}});
    r.files.push_back(path);
    return r;
}

// Runs `body`, turning library errors into the error report and exit code.
CommandResult guarded(const CommandOptions& opts, const std::string& name,
                      const std::function<CommandResult()>& body) {
    fs::create_directories(opts.out_dir);
    try {
        return body();
    } catch (const Error& e) {
        return failure(opts.out_dir, name, e);
    }
}

json equilibrium_json(const EquilibriumState& eq) {
    return json{{"v_bar", eq.v_bar},   {"u_bar", eq.u_bar},         {"q_bar", eq.q_bar},
                {"mu_bar", eq.mu_bar}, {"kappa_bar", eq.kappa_bar}, {"phase_index", eq.phase_index}};
}

// Dispersion rows shared by check and dispersion.
fs::path write_dispersion_csv(const fs::path& path, const Prepared& p, double theta_bar) {
    Csv csv(path, "xi,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,theta_bar,coupled");
    for (const double xi : default_nonzero_xi_grid()) {
        const DispersionPoint d = dispersion(p.eq, xi, p.dissipation);
        const double one[] = {xi};
        const bool coupled = genuine_coupling_check(p.eq, one, p.dissipation).coupled;
        csv.row(xi, d.lambda_plus.real(), d.lambda_plus.imag(), d.lambda_minus.real(), d.lambda_minus.imag(),
                theta_bar, coupled);
    }
    return path;
}

std::string dispersion_plot(const std::string& png) {
    return "xi = [float(r[\"xi\"]) for r in rows]\n"
    "fig, ax = plt.subplots(1, 2, figsize=(10, 4))\n"
    "ax[0].plot(xi, [float(r[\"re_lambda_plus\"]) for r in rows], label=\"Re lambda+\")\n"
    "ax[0].plot(xi, [float(r[\"re_lambda_minus\"]) for r in rows], label=\"Re lambda-\")\n"
    "ax[0].set_xscale(\"symlog\")\n"
    "ax[0].set_xlabel(\"xi\")\n"
    "ax[0].legend()\n"
    "ax[1].plot(xi, [float(r[\"im_lambda_plus\"]) for r in rows], label=\"Im lambda+\")\n"
    "ax[1].plot(xi, [float(r[\"im_lambda_minus\"]) for r in rows], label=\"Im lambda-\")\n"
    "ax[1].set_xscale(\"symlog\")\n"
    "ax[1].set_xlabel(\"xi\")\n"
    "ax[1].legend()\n"
    "fig.tight_layout()\n"
    "fig.savefig(os.path.join(here, \"" + png + "\"), dpi=120)\n";
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::hyperbolicity: return 2;
        case ErrorKind::not_coupled: return 3;
        case ErrorKind::structural:
        case ErrorKind::not_dissipative: return 4;
        case ErrorKind::parameter:
        case ErrorKind::constitutive:
        case ErrorKind::config: return 5;
        case ErrorKind::root_finding:
        case ErrorKind::domain_violation:
        case ErrorKind::blow_up:
        case ErrorKind::grid_mismatch:
        case ErrorKind::fit: return 6;
    }
    return 1;
}

CommandResult cmd_check(const CommandOptions& opts) {
    return guarded(opts, "check", [&] {
        const Prepared p = prepare(opts.config);
        const auto xi = default_nonzero_xi_grid();
        CommandResult res;
        json report{{"equilibrium", equilibrium_json(p.eq)}, {"model", opts.config.model}};

        const CouplingReport coupling = genuine_coupling_check(p.eq, xi, p.dissipation);
        report["coupled"] = coupling.coupled;
        report["min_angle"] = coupling.min_angle;
        report["witness_xi"] = number_or_null(coupling.witness_xi);
        report["witness_vector"] =
            coupling.witness_vector ? json{(*coupling.witness_vector)[0], (*coupling.witness_vector)[1]} : json(nullptr);

        const FriedrichsReport fr = friedrichs_infeasibility(p.eq);
        report["friedrichs"] = {{"rank", fr.rank},
                                {"solution_dimension", static_cast<int>(fr.null_space.size())},
                                {"symmetrizable", fr.friedrichs_symmetrizable}};

        const double theta_bar = p.eq.mu_bar / (4.0 * p.eq.v_bar);
        report["theta_bar"] = theta_bar;
        if (!coupling.coupled) {
            res.exit_code = exit_code_for(ErrorKind::not_coupled);
            res.reason = std::string(to_string(ErrorKind::not_coupled));
        } else if (fr.friedrichs_symmetrizable) {
            res.exit_code = exit_code_for(ErrorKind::structural);
            res.reason = "friedrichs symmetrizable";
        } else {
            const CoercivityReport co = verify_coercivity(p.eq, xi);
            report["theta_bar"] = co.theta_bar;
            report["coercivity"] = {{"max_deviation", co.max_deviation}, {"min_eigenvalue", co.min_eigenvalue}};
            const DissipativityScan scan = strict_dissipativity_scan(p.eq, xi, p.dissipation);
            report["dissipativity"] = {{"c", scan.c}, {"max_re_lambda", scan.max_re_lambda}};
            const auto vectors = random_unit_vectors(20, opts.config.seed);
            const EnergyParams energy = select_delta(p.eq, xi, vectors);
            report["energy"] = {{"delta", energy.delta}, {"k", energy.k}, {"C1", energy.C1}};
        }
        report["ok"] = res.exit_code == 0;
        report["reason"] = res.reason.empty() ? json(nullptr) : json(res.reason);

        res.files.push_back(write_dispersion_csv(opts.out_dir / "check.csv", p, theta_bar));
        write_json(opts.out_dir / "check.json", report);
        res.files.push_back(opts.out_dir / "check.json");
        write_plot_script(opts.out_dir / "plot_check.py", "check.csv",
                          dispersion_plot("check.png"));
        res.files.push_back(opts.out_dir / "plot_check.py");
        return res;
    });
}

CommandResult cmd_dispersion(const CommandOptions& opts) {
    return guarded(opts, "dispersion", [&] {
        const Prepared p = prepare(opts.config);
        CommandResult res;
        res.files.push_back(write_dispersion_csv(opts.out_dir / "dispersion.csv", p, p.eq.mu_bar / (4.0 * p.eq.v_bar)));
        write_plot_script(opts.out_dir / "plot_dispersion.py", "dispersion.csv", dispersion_plot("dispersion.png"));
        res.files.push_back(opts.out_dir / "plot_dispersion.py");
        return res;
    });
}

CommandResult cmd_envelope(const CommandOptions& opts) {
    return guarded(opts, "envelope", [&] {
        const Prepared p = prepare(opts.config);
        const EnvelopeConfig& ec = opts.config.envelope;
        const auto xi = default_xi_grid();
        const EnvelopeReport rep = verify_pointwise_decay(p.eq, xi, ec.times);
        const auto samples = envelope_samples(p.eq, rep.v_form, xi, ec.times);
        CommandResult res;
        Csv csv(opts.out_dir / "envelope.csv", "xi,t,opnorm,bound,ok");
        bool all_ok = true;
        for (const auto& s : samples) {
            csv.row(s.xi, s.t, s.opnorm, s.bound, s.ok);
            all_ok = all_ok && s.ok;
        }
        const bool passed = all_ok && rep.v_form.k >= ec.min_k && rep.v_form.C <= ec.max_C;
        json summary{{"v_form", {{"C", rep.v_form.C}, {"k", rep.v_form.k}}},
                     {"u_form", {{"C", rep.u_form.C}, {"k", rep.u_form.k}}},
                     {"ladder", rep.ladder},
                     {"min_k", ec.min_k},
                     {"max_C", ec.max_C},
                     {"all_samples_ok", all_ok},
                     {"passed", passed}};
        write_json(opts.out_dir / "envelope.json", summary);
        write_plot_script(opts.out_dir / "plot_envelope.py", "envelope.csv",
                          "fig, ax = plt.subplots(figsize=(6, 4))\n"
                          "for t in sorted({r[\"t\"] for r in rows}, key=float):\n"
                          "    sel = [r for r in rows if r[\"t\"] == t]\n"
                          "    xi = [float(r[\"xi\"]) for r in sel]\n"
                          "    line, = ax.plot(xi, [float(r[\"opnorm\"]) for r in sel], label=\"t=\" + t)\n"
                          "    ax.plot(xi, [float(r[\"bound\"]) for r in sel], \"--\", color=line.get_color())\n"
                          "ax.set_xscale(\"symlog\")\n"
                          "ax.set_xlabel(\"xi\")\n"
                          "ax.set_ylabel(\"operator norm\")\n"
                          "ax.legend()\n"
                          "fig.tight_layout()\n"
                          "fig.savefig(os.path.join(here, \"envelope.png\"), dpi=120)\n");
        res.files = {csv.path(), opts.out_dir / "envelope.json", opts.out_dir / "plot_envelope.py"};
        if (!passed) {
            res.exit_code = 1;
            res.reason = "envelope";
        }
        return res;
    });
}

CommandResult cmd_linear_decay(const CommandOptions& opts) {
    return guarded(opts, "linear_decay", [&] {
        const Prepared p = prepare(opts.config);
        const LinearDecayConfig& lc = opts.config.linear_decay;
        const SpectralGrid grid(lc.length, lc.points);
        const Fft fft(grid.size());
        InitialData init;
        init.amplitude = 1.0;
        init.width = lc.width;
        const PerturbationState s0 = make_initial_state(grid, init);
        auto times = log_space(1.0, lc.t_hi, lc.samples);
        times.insert(times.begin(), 0.0);
        const NormTrace tr = linear_decay_experiment(p.eq, grid, fft, SpectralField{s0.v, s0.u}, lc.orders, times,
                                                     FitWindow{lc.t_lo, lc.t_hi});
        CommandResult res;
        Csv csv(opts.out_dir / "linear_decay.csv", "t,ell,norm,fit_slope");
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            for (std::size_t j = 0; j < tr.orders.size(); ++j) {
                csv.row(tr.times[i], tr.orders[j], tr.sobolev[i][j],
                        tr.slopes[j] ? fmt(*tr.slopes[j]) : std::string());
            }
        }
        bool passed = true;
        json slopes = json::array();
        for (std::size_t j = 0; j < tr.orders.size(); ++j) {
            const double target = -(tr.orders[j] / 2.0 + 0.25);
            const bool ok = tr.slopes[j] && *tr.slopes[j] <= target + lc.slack;
            passed = passed && ok;
            slopes.push_back({{"ell", tr.orders[j]},
                              {"slope", number_or_null(tr.slopes[j])},
                              {"expected_exponent", target},
                              {"ok", ok}});
        }
        write_json(opts.out_dir / "linear_decay.json",
                   json{{"fit_window", {lc.t_lo, lc.t_hi}}, {"slopes", slopes}, {"passed", passed}});
        write_plot_script(opts.out_dir / "plot_linear_decay.py", "linear_decay.csv",
                          "fig, ax = plt.subplots(figsize=(6, 4))\n"
                          "for ell in sorted({r[\"ell\"] for r in rows}, key=int):\n"
                          "    sel = [r for r in rows if r[\"ell\"] == ell and float(r[\"t\"]) > 0]\n"
                          "    ax.loglog([1 + float(r[\"t\"]) for r in sel], [float(r[\"norm\"]) for r in sel],\n"
                          "              label=\"l=\" + ell + \", slope \" + sel[0][\"fit_slope\"][:7])\n"
                          "ax.set_xlabel(\"1 + t\")\n"
                          "ax.set_ylabel(\"norm\")\n"
                          "ax.legend()\n"
                          "fig.tight_layout()\n"
                          "fig.savefig(os.path.join(here, \"linear_decay.png\"), dpi=120)\n");
        res.files = {csv.path(), opts.out_dir / "linear_decay.json", opts.out_dir / "plot_linear_decay.py"};
        if (!passed) {
            res.exit_code = 1;
            res.reason = "linear decay";
        }
        return res;
    });
}

CommandResult cmd_simulate(const CommandOptions& opts) {
    return guarded(opts, "simulate", [&] {
        const Prepared p = prepare(opts.config);
        const SimulationConfig& sc = opts.config.simulation;
        const SimulationResult r = simulate(p.model, p.eq, sc);
        CommandResult res;
        Csv csv(opts.out_dir / "simulate.csv", "t,norm_s_minus_1,norm_l2,E_s,triple");
        const auto ns1 = r.norm_s_minus_1();
        for (std::size_t i = 0; i < r.trace.times.size(); ++i) {
            csv.row(r.trace.times[i], ns1[i], r.trace.l2[i], r.trace.E_s[i], r.trace.triple[i]);
        }
        write_json(opts.out_dir / "simulate.json",
                   json{{"fit_window", {sc.fit_lo, sc.fit_hi}},
                        {"fitted_exponent", r.fit ? json(r.fit->slope) : json(nullptr)},
                        {"exponent_band", {sc.exponent_lo, sc.exponent_hi}},
                        {"passed", r.passed},
                        {"dt", r.dt},
                        {"steps", r.steps},
                        {"mean_drift", r.mean_drift},
                        {"max_high_mode_fraction", r.max_high_fraction},
                        {"max_imag_residue", r.max_imag_residue}});
        write_plot_script(opts.out_dir / "plot_simulate.py", "simulate.csv",
                          "t = [float(r[\"t\"]) for r in rows]\n"
                          "fig, ax = plt.subplots(figsize=(6, 4))\n"
                          "for key in (\"norm_s_minus_1\", \"norm_l2\", \"E_s\", \"triple\"):\n"
                          "    ax.loglog([1 + x for x in t], [float(r[key]) for r in rows], label=key)\n"
                          "ax.set_xlabel(\"1 + t\")\n"
                          "ax.legend()\n"
                          "fig.tight_layout()\n"
                          "fig.savefig(os.path.join(here, \"simulate.png\"), dpi=120)\n");
        res.files = {csv.path(), opts.out_dir / "simulate.json", opts.out_dir / "plot_simulate.py"};
        if (!r.passed) {
            res.exit_code = 1;
            res.reason = "decay exponent";
        }
        return res;
    });
}

CommandResult cmd_integrals(const CommandOptions& opts) {
    return guarded(opts, "integrals", [&] {
        const IntegralsConfig& ic = opts.config.integrals;
        std::vector<IntegralReport> reports;
        std::vector<std::string> names;
        for (const int l : ic.orders) {
            reports.push_back(I0_report(ic.times, l, ic.k));
            names.push_back("I0_l" + std::to_string(l));
        }
        reports.push_back(I1_report(ic.times, ic.c1));
        names.emplace_back("I1");
        reports.push_back(I2_report(ic.times));
        names.emplace_back("I2");

        CommandResult res;
        Csv csv(opts.out_dir / "integrals.csv", "name,t,value");
        json suprema = json::object(), changes = json::object();
        bool finite = true;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            for (std::size_t j = 0; j < reports[i].values.size(); ++j) {
                csv.row(names[i], reports[i].t_samples[j], reports[i].values[j]);
                finite = finite && std::isfinite(reports[i].values[j]) && reports[i].values[j] >= 0.0;
            }
            suprema[names[i]] = reports[i].sup;
            if (reports[i].values.size() >= 2) changes[names[i]] = last_decade_change(reports[i]);
        }
        const IntegralReport& i2 = reports.back();
        const double i2_last = i2.values.empty() ? 0.0 : i2.values.back();
        const double gap = std::abs(i2_last - kI2LimitRef) / kI2LimitRef;
        write_json(opts.out_dir / "integrals.json",
                   json{{"suprema", suprema},
                        {"last_decade_change", changes},
                        {"I2_limit_ref", kI2LimitRef},
                        {"I2_limit_computed", I2_limit()},
                        {"I2_at_last_t", i2_last},
                        {"I2_relative_gap", gap},
                        {"k", ic.k},
                        {"c1", ic.c1},
                        {"finite", finite}});
        write_plot_script(opts.out_dir / "plot_integrals.py", "integrals.csv",
                          "fig, ax = plt.subplots(figsize=(6, 4))\n"
                          "for name in sorted({r[\"name\"] for r in rows}):\n"
                          "    sel = [r for r in rows if r[\"name\"] == name]\n"
                          "    ax.semilogx([1 + float(r[\"t\"]) for r in sel], [float(r[\"value\"]) for r in sel],\n"
                          "                marker=\"o\", label=name)\n"
                          "ax.axhline(5.2441, color=\"k\", ls=\":\", label=\"4F(pi/2|-1)\")\n"
                          "ax.set_xlabel(\"1 + t\")\n"
                          "ax.legend()\n"
                          "fig.tight_layout()\n"
                          "fig.savefig(os.path.join(here, \"integrals.png\"), dpi=120)\n");
        res.files = {csv.path(), opts.out_dir / "integrals.json", opts.out_dir / "plot_integrals.py"};
        if (!finite) {
            res.exit_code = 1;
            res.reason = "integrals";
        }
        return res;
    });
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"check",       "dispersion", "envelope",
                                                "linear-decay", "simulate",   "integrals"};
    return names;
}

CommandResult run_command(const std::string& name, const CommandOptions& opts) {
    if (name == "check") return cmd_check(opts);
    if (name == "dispersion") return cmd_dispersion(opts);
    if (name == "envelope") return cmd_envelope(opts);
    if (name == "linear-decay") return cmd_linear_decay(opts);
    if (name == "simulate") return cmd_simulate(opts);
    if (name == "integrals") return cmd_integrals(opts);
    if (name == "all") return cmd_all(opts);
    throw Error(ErrorKind::config, "unknown command '" + name + "'");
}

CommandResult cmd_all(const CommandOptions& opts) {
    const auto& names = command_names();
    std::vector<CommandResult> results(names.size());
    const std::size_t jobs = static_cast<std::size_t>(std::max(1, opts.jobs));
    for (std::size_t start = 0; start < names.size(); start += jobs) {
        std::vector<std::future<CommandResult>> batch;
        for (std::size_t i = start; i < std::min(names.size(), start + jobs); ++i) {
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                       [&opts, &names, i] { return run_command(names[i], opts); }));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) results[start + i] = batch[i].get();
    }
    CommandResult all;
    for (auto& r : results) {
        all.files.insert(all.files.end(), r.files.begin(), r.files.end());
        if (all.exit_code == 0 && r.exit_code != 0) {
            all.exit_code = r.exit_code;
            all.reason = r.reason;
        }
    }
    return all;
}

}  // namespace nsk
