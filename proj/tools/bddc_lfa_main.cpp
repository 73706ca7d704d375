// Command-line front end: frequency sweeps, weight optimisation, eigenvalue
// histograms and finite-grid validation, with CSV/JSON output.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bddclfa/optimize.hpp"
#include "bddclfa/oracle.hpp"
#include "bddclfa/spectrum.hpp"
#include "json.hpp"

using namespace bddclfa;
using nlohmann::json;

namespace {

struct Options {
    std::string command;
    std::string stencil = "q1";
    std::vector<double> stencil_coeffs;
    std::vector<int> p{4};
    std::vector<int> n{8};
    std::vector<int> i{1};
    std::vector<int> j{0};
    std::string mult = "none";
    double omega = 0.0, omega1 = 0.0, omega2 = 0.0;
    std::string grid, grid2;
    int m = 4;
    std::uint64_t seed = 1234;
    int iters = 50;
    double bin_width = 0.1;
    std::string out;
    std::string format = "csv";
    std::string dump;  // full eigenvalue dump (JSON), sweep only
    int threads = 0;
    bool no_fold = false;
    bool ritz = false;
};

[[noreturn]] void config_error(const std::string& msg) {
    std::cerr << "config error: " << msg << "\n";
    std::exit(2);
}

SweepGrid parse_grid(const std::string& s, const SweepGrid& fallback) {
    if (s.empty()) return fallback;
    SweepGrid g;
    char c1 = 0, c2 = 0;
    std::istringstream is(s);
    if (!(is >> g.lo >> c1 >> g.hi >> c2 >> g.step) || c1 != ':' || c2 != ':')
        config_error("grid must be lo:hi:step, got '" + s + "'");
    try {
        g.validate();
    } catch (const std::exception& e) {
        config_error(e.what());
    }
    return g;
}

void load_config(const std::string& path, Options& o) {
    std::ifstream in(path);
    if (!in) config_error("cannot open config file " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const std::exception& e) {
        config_error(std::string("bad JSON: ") + e.what());
    }
    static const std::set<std::string> known{
        "command", "stencil", "p",     "n",     "i",      "j",    "mult",    "omega",
        "omega1",  "omega2",  "grid",  "grid2", "m",      "seed", "iters",   "bin_width",
        "out",     "format",  "dump",  "threads", "fold", "ritz"};
    for (const auto& [key, _] : cfg.items())
        if (!known.count(key)) config_error("unknown config key '" + key + "'");

    auto geti = [&](const char* k, auto& dst) {
        if (cfg.contains(k)) dst = cfg[k];
    };
    if (cfg.contains("command")) o.command = cfg["command"];
    if (cfg.contains("stencil")) {
        if (cfg["stencil"].is_string())
            o.stencil = cfg["stencil"];
        else if (cfg["stencil"].is_array()) {
            o.stencil = "custom";
            o.stencil_coeffs = cfg["stencil"].get<std::vector<double>>();
        } else
            config_error("stencil must be \"q1\" or an array of 9 coefficients");
    }
    auto get_list = [&](const char* k, std::vector<int>& dst) {
        if (!cfg.contains(k)) return;
        if (cfg[k].is_array())
            dst = cfg[k].get<std::vector<int>>();
        else
            dst = {cfg[k].get<int>()};
    };
    get_list("p", o.p);
    get_list("n", o.n);
    get_list("i", o.i);
    get_list("j", o.j);
    if (cfg.contains("mult")) o.mult = cfg["mult"];
    geti("omega", o.omega);
    geti("omega1", o.omega1);
    geti("omega2", o.omega2);
    if (cfg.contains("grid")) o.grid = cfg["grid"];
    if (cfg.contains("grid2")) o.grid2 = cfg["grid2"];
    geti("m", o.m);
    geti("seed", o.seed);
    geti("iters", o.iters);
    geti("bin_width", o.bin_width);
    if (cfg.contains("out")) o.out = cfg["out"];
    if (cfg.contains("format")) o.format = cfg["format"];
    if (cfg.contains("dump")) o.dump = cfg["dump"];
    geti("threads", o.threads);
    if (cfg.contains("fold")) o.no_fold = !cfg["fold"].get<bool>();
    if (cfg.contains("ritz")) o.ritz = cfg["ritz"].get<bool>();
}

Stencil9 make_stencil(const Options& o) {
    if (o.stencil == "q1") return Stencil9::q1_laplacian();
    if (o.stencil == "custom") {
        if (o.stencil_coeffs.size() != 9) config_error("custom stencil needs 9 coefficients");
        std::array<double, 9> c{};
        std::copy(o.stencil_coeffs.begin(), o.stencil_coeffs.end(), c.begin());
        try {
            return Stencil9::from_coefficients(c);
        } catch (const std::exception& e) {
            config_error(e.what());
        }
    }
    config_error("unknown stencil '" + o.stencil + "'");
}

PreconditionerSpec make_spec(const Options& o, int i, int j) {
    PreconditionerSpec sp;
    sp.fine_variant = i;
    sp.coarse_variant = j;
    sp.mult = mult_mode_from_string(o.mult);
    sp.omega = o.omega;
    sp.omega1 = o.omega1;
    sp.omega2 = o.omega2;
    sp.validate();
    return sp;
}

int single(const std::vector<int>& v, const char* what) {
    if (v.size() != 1) config_error(std::string(what) + " takes a single value here");
    return v.front();
}

std::string fmt6(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string timestamp() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof buf, "%F %T", std::gmtime(&t));
    return buf;
}

class Writer {
  public:
    Writer(const std::string& path, const std::string& command) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) config_error("cannot open output file " + path);
        }
        os() << "# bddc-lfa " << command << " generated " << timestamp() << "\n";
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

void write_json(const std::string& path, const json& doc) {
    if (path.empty()) {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) config_error("cannot open output file " + path);
    out << doc.dump(2) << "\n";
}

SweepOptions sweep_options(const Options& o, bool full = false) {
    SweepOptions s;
    s.threads = o.threads;
    s.fold = !o.no_fold;
    s.full_spectrum = full;
    return s;
}

int cmd_sweep(const Options& o) {
    const Stencil9 st = make_stencil(o);
    if (!o.dump.empty() && (o.i.size() * o.j.size() * o.p.size() * o.n.size()) != 1)
        config_error("--dump needs a single (i, j, p, n) combination");
    json rows = json::array();
    Writer w(o.format == "csv" ? o.out : "/dev/null", "sweep");
    if (o.format == "csv")
        w.os() << "p,n,i,j,mult,omega,omega1,omega2,value,lambda_min,lambda_max,max_imag,mode,seconds\n";
    for (int i : o.i) {
        for (int j : o.j) {
            const PreconditionerSpec spec = make_spec(o, i, j);
            for (int p : o.p) {
                for (int n : o.n) {
                    if (n < 1) config_error("n must be >= 1");
                    const auto t0 = std::chrono::steady_clock::now();
                    const SpectrumReport rep =
                        sweep(st, p, spec, SamplingPlan(n), sweep_options(o, !o.dump.empty()));
                    const double secs =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    const bool real = rep.mode == SpectrumMode::real;
                    const double value = real ? rep.kappa() : rep.ratio();
                    if (o.format == "csv") {
                        w.os() << p << ',' << n << ',' << i << ',' << j << ',' << o.mult << ','
                               << fmt6(o.omega) << ',' << fmt6(o.omega1) << ',' << fmt6(o.omega2) << ','
                               << fmt6(value) << ',' << fmt6(rep.lambda_min()) << ','
                               << fmt6(rep.lambda_max()) << ',' << fmt6(rep.max_imag()) << ','
                               << (real ? "real" : "magnitude") << ',' << fmt6(secs) << "\n";
                    } else {
                        rows.push_back({{"p", p},
                                        {"n", n},
                                        {"i", i},
                                        {"j", j},
                                        {"mult", o.mult},
                                        {"value", value},
                                        {"lambda_min", rep.lambda_min()},
                                        {"lambda_max", rep.lambda_max()},
                                        {"max_imag", rep.max_imag()},
                                        {"mode", real ? "real" : "magnitude"},
                                        {"seconds", secs}});
                    }
                    if (!o.dump.empty()) {
                        json freqs = json::array();
                        for (const auto& ts : rep.per_theta) {
                            json evs = json::array();
                            for (const auto& ev : ts.eigenvalues) evs.push_back({ev.real(), ev.imag()});
                            freqs.push_back({{"theta", {ts.theta.t1, ts.theta.t2}},
                                             {"multiplicity", ts.multiplicity},
                                             {"eigenvalues", evs}});
                        }
                        write_json(o.dump, json{{"generated", timestamp()},
                                                {"p", p},
                                                {"n", n},
                                                {"spec", spec.label()},
                                                {"frequencies", freqs}});
                    }
                }
            }
        }
    }
    if (o.format != "csv")
        write_json(o.out, json{{"generated", timestamp()}, {"command", "sweep"}, {"rows", rows}});
    return 0;
}

int cmd_optimize(const Options& o) {
    const Stencil9 st = make_stencil(o);
    Options od = o;  // template weights come from the grid; placeholders pass validation
    if (od.omega <= 0) od.omega = 1.0;
    const bool fixed_w1 = o.omega1 > 0;
    if (od.omega1 <= 0) od.omega1 = 1.0;
    if (od.omega2 <= 0) od.omega2 = 1.0;
    json rows = json::array();
    Writer w(o.format == "csv" ? o.out : "/dev/null", "optimize");
    if (o.format == "csv") w.os() << "p,n,i,j,mult,omega1,omega2,objective,max_imag,best\n";
    for (int i : o.i) {
        for (int j : o.j) {
            const PreconditionerSpec spec = make_spec(od, i, j);
            for (int p : o.p) {
                for (int n : o.n) {
                    OptimizationResult res;
                    const bool two_weight = spec.mult == MultMode::fine_coarse ||
                                            (spec.mult == MultMode::sym_coarse && fixed_w1);
                    if (two_weight) {
                        // fc always scans (omega1, omega2); sc does so when omega1 is pinned,
                        // otherwise it scans a single weight used on both sides
                        const SweepGrid g1 = parse_grid(o.grid, SweepGrid{0.5, 5.0, 0.1});
                        const SweepGrid g2 = parse_grid(o.grid2, SweepGrid{0.1, 3.0, 0.1});
                        res = optimize_2d(st, p, spec,
                                          fixed_w1 ? SweepGrid{o.omega1, o.omega1, 0.1} : g1, g2,
                                          SamplingPlan(n), sweep_options(o));
                    } else {
                        const SweepGrid g = parse_grid(o.grid, SweepGrid{0.1, 3.0, 0.1});
                        res = optimize_1d(st, p, spec, g, SamplingPlan(n), sweep_options(o));
                    }
                    for (const auto& pt : res.curve) {
                        const bool best = pt.omega1 == res.best_omega1 && pt.omega2 == res.best_omega2;
                        if (o.format == "csv")
                            w.os() << p << ',' << n << ',' << i << ',' << j << ',' << o.mult << ','
                                   << fmt6(pt.omega1) << ',' << fmt6(pt.omega2) << ','
                                   << fmt6(pt.objective) << ',' << fmt6(pt.max_imag) << ','
                                   << (best ? 1 : 0) << "\n";
                        else
                            rows.push_back({{"p", p},
                                            {"n", n},
                                            {"i", i},
                                            {"j", j},
                                            {"omega1", pt.omega1},
                                            {"omega2", pt.omega2},
                                            {"objective", pt.objective},
                                            {"max_imag", pt.max_imag},
                                            {"best", best}});
                    }
                    std::cerr << "(" << i << "," << j << ") p=" << p << " n=" << n << " best "
                              << (two_weight ? "(" + fmt6(res.best_omega1) + ", " + fmt6(res.best_omega2) + ")"
                                             : fmt6(res.best_omega1))
                              << " objective " << fmt6(res.best_objective) << "\n";
                }
            }
        }
    }
    if (o.format != "csv")
        write_json(o.out, json{{"generated", timestamp()}, {"command", "optimize"}, {"rows", rows}});
    return 0;
}

int cmd_histogram(const Options& o) {
    const Stencil9 st = make_stencil(o);
    const PreconditionerSpec spec = make_spec(o, single(o.i, "i"), single(o.j, "j"));
    if (!spec.real_spectrum()) config_error("histogram requires a real-spectrum variant (plain or f)");
    if (o.p.size() != 1 || o.n.size() != 1) config_error("histogram takes a single p and n");
    const SpectrumReport rep = sweep(st, o.p[0], spec, SamplingPlan(o.n[0]), sweep_options(o, true));
    const Histogram h = rep.histogram(o.bin_width);
    Writer w(o.out, "histogram");
    w.os() << "bin_lo,bin_hi,count,density\n";
    const auto dens = h.densities();
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        w.os() << fmt6(h.lo + h.bin_width * static_cast<double>(b)) << ','
               << fmt6(h.lo + h.bin_width * static_cast<double>(b + 1)) << ',' << h.counts[b] << ','
               << fmt6(dens[b]) << "\n";
    std::cerr << "total " << h.total() << " eigenvalues\n";
    return 0;
}

int cmd_validate(const Options& o) {
    const Stencil9 st = make_stencil(o);
    Options od = o;
    if (!od.grid.empty() && od.omega <= 0) od.omega = 1.0;  // the grid supplies weights
    const PreconditionerSpec spec = make_spec(od, single(o.i, "i"), single(o.j, "j"));
    if (o.p.size() != 1) config_error("validate takes a single p");
    const int p = o.p[0];
    if (spec.levels() == 3 && o.m % p != 0) config_error("three-level validation needs p | m");
    const AssembledSystem sys(st, p, o.m);
    if (!o.grid.empty()) {
        // ratio-vs-omega curve from the finite grid (Ritz estimates)
        const SweepGrid g = parse_grid(o.grid, SweepGrid{0.1, 3.0, 0.1});
        Writer w(o.out, "validate");
        w.os() << "omega,ratio,iterations\n";
        for (double om : g.values()) {
            PreconditionerSpec sp = spec;
            sp.omega = om;
            if (sp.mult == MultMode::none) sp.mult = MultMode::fine;
            const RitzResult r = ritz_estimate(sys, sp, o.iters, 1e-12, o.seed);
            w.os() << fmt6(om) << ',' << fmt6(r.ratio) << ',' << r.iterations << "\n";
        }
        return 0;
    }
    json doc{{"generated", timestamp()}, {"command", "validate"}, {"p", p}, {"m", o.m},
             {"spec", spec.label()}};
    if (o.ritz) {
        const RitzResult r = ritz_estimate(sys, spec, o.iters, 1e-12, o.seed);
        doc["ritz_ratio"] = r.ratio;
        doc["iterations"] = r.iterations;
    } else {
        const MatchReport rep = spectra_match(sys, spec);
        doc["max_deviation"] = rep.max_deviation;
        doc["n_compared"] = rep.n_compared;
        doc["finite_kappa"] = rep.finite_kappa;
        doc["lfa_kappa"] = rep.lfa_kappa;
        std::cerr << "max spectral deviation " << rep.max_deviation << "\n";
    }
    write_json(o.out, doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Local Fourier analysis of two- and three-level BDDC preconditioners"};
    app.require_subcommand(0, 1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its fields");

    auto add_common = [&](CLI::App* c) {
        c->add_option("--stencil", o.stencil, "q1 or custom");
        c->add_option("--stencil-coeffs", o.stencil_coeffs, "9 coefficients, row-major")->expected(9);
        c->add_option("--p", o.p, "subdomain size(s)");
        c->add_option("--n", o.n, "sampling half-resolution(s)");
        c->add_option("--i", o.i, "fine variant: 1 lumped, 2 Dirichlet");
        c->add_option("--j", o.j, "coarse variant: 0 exact, 1/2 recursive");
        c->add_option("--mult", o.mult, "none|f|c|sc|fc");
        c->add_option("--omega", o.omega, "weight for f/c modes");
        c->add_option("--omega1", o.omega1, "first weight (sc, fc)");
        c->add_option("--omega2", o.omega2, "second weight (sc, fc)");
        c->add_option("--out", o.out, "output file (default stdout)");
        c->add_option("--format", o.format, "csv|json");
        c->add_option("--threads", o.threads, "worker threads (0 = all cores)");
        c->add_flag("--no-fold", o.no_fold, "disable frequency-symmetry folding");
    };
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "condition numbers over a frequency sweep");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--dump", o.dump, "write full eigenvalue data (JSON)");
    CLI::App* opt_cmd = app.add_subcommand("optimize", "grid search over relaxation weights");
    add_common(opt_cmd);
    opt_cmd->add_option("--grid", o.grid, "lo:hi:step for omega (or omega1)");
    opt_cmd->add_option("--grid2", o.grid2, "lo:hi:step for omega2 (fc)");
    CLI::App* hist_cmd = app.add_subcommand("histogram", "eigenvalue density histogram");
    add_common(hist_cmd);
    hist_cmd->add_option("--bin", o.bin_width, "bin width (default 0.1)");
    CLI::App* val_cmd = app.add_subcommand("validate", "finite periodic-grid cross-check");
    add_common(val_cmd);
    val_cmd->add_option("--m", o.m, "subdomains per axis");
    val_cmd->add_option("--seed", o.seed, "random seed for the Ritz start");
    val_cmd->add_option("--iters", o.iters, "Arnoldi iteration cap");
    val_cmd->add_flag("--ritz", o.ritz, "Ritz estimate instead of dense comparison");
    val_cmd->add_option("--grid", o.grid, "omega grid lo:hi:step for a ratio curve");

    // config file first, then flags override
    for (int a = 1; a < argc - 1; ++a)
        if (std::string(argv[a]) == "--config") load_config(argv[a + 1], o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::string cmd = o.command;
    for (const auto* sub : {sweep_cmd, opt_cmd, hist_cmd, val_cmd})
        if (sub->parsed()) cmd = sub->get_name();
    if (cmd.empty()) config_error("no command given (sweep|optimize|histogram|validate)");

    try {
        if (cmd == "sweep") return cmd_sweep(o);
        if (cmd == "optimize") return cmd_optimize(o);
        if (cmd == "histogram") return cmd_histogram(o);
        if (cmd == "validate") return cmd_validate(o);
        config_error("unknown command '" + cmd + "'");
    } catch (const SweepError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const SingularMatrixError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const EigenFailureError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
