#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qhalo/qhalo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qhalo;

namespace {

constexpr const char* kVersion = "qhalo 0.1.0";

enum Exit { ok = 0, config_error = 1, tolerance_breach = 2, numerical_failure = 3 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- config access with field-level messages ----

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ConfigError(where + "." + k + ": unknown field");
}

json section(const json& cfg, const std::string& key) {
    if (!cfg.contains(key)) return json::object();
    if (!cfg[key].is_object()) throw ConfigError(key + ": expected an object");
    return cfg[key];
}

double number(const json& obj, const std::string& key, double def, const std::string& where) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj[key].get<double>();
}

long integer(const json& obj, const std::string& key, long def, const std::string& where) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    return obj[key].get<long>();
}

std::vector<double> numbers(const json& obj, const std::string& key, std::vector<double> def, const std::string& where) {
    if (!obj.contains(key)) return def;
    const auto& v = obj[key];
    if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where + "." + key + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Complex complex_field(const json& obj, const std::string& key, Complex def, const std::string& where) {
    if (!obj.contains(key)) return def;
    const auto& v = obj[key];
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(where + "." + key + ": expected a number or [re, im]");
}

PhaseSpacePoint point_field(const json& obj, const std::string& key, PhaseSpacePoint def, const std::string& where) {
    if (!obj.contains(key)) return def;
    const auto& v = obj[key];
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(where + "." + key + ": expected [x, p]");
}

SimParams read_params(const json& cfg) {
    const json p = section(cfg, "params");
    check_keys(p, {"omega", "mass", "hbar", "D"}, "params");
    SimParams out;
    out.omega = number(p, "omega", 1.0, "params");
    out.mass = number(p, "mass", 1.0, "params");
    out.hbar = number(p, "hbar", 1.0, "params");
    out.D = number(p, "D", 0.0, "params");
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    return out;
}

// ---- output ----

struct Run {
    json cfg;
    SimParams params;
    fs::path out_dir;
    std::size_t jobs{1};
    std::string command;
};

std::string g17(double v) { return io::format_double(v); }

std::vector<std::string> provenance(const Run& run) {
    return {std::string(kVersion),
            "command " + run.command,
            "omega " + g17(run.params.omega),
            "mass " + g17(run.params.mass),
            "hbar " + g17(run.params.hbar),
            "D " + g17(run.params.D),
            "config " + run.cfg.dump()};
}

std::ofstream open_output(const Run& run, const std::string& name) {
    std::error_code ec;
    fs::create_directories(run.out_dir, ec);
    const fs::path path = run.out_dir / name;
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path.string());
    return f;
}

void write_table(const Run& run, const std::string& name, io::Table t) {
    auto head = provenance(run);
    head.insert(head.end(), t.header.begin(), t.header.end());
    t.header = head;
    auto f = open_output(run, name);
    io::write_table(f, t);
}

void write_summary(const Run& run, json summary) {
    summary["tool"] = kVersion;
    summary["command"] = run.command;
    summary["config"] = run.cfg;
    auto f = open_output(run, run.command + "_summary.json");
    f << summary.dump(2) << '\n';
}

/// Re ρ and |ρ| in scaled units (ρ·√(ħ/MΩ)), axes in units of √(ħ/MΩ).
void write_dm_grids(const Run& run, const std::string& stem, const std::string& label, const NumericDM& dm,
                    const SimParams& p) {
    const double ell = p.length_scale();
    auto head = provenance(run);
    head.push_back("panel " + label);
    head.push_back("axes Q/sqrt(hbar/(M*Omega)) from " + g17(dm.grid.at(0) / ell) + " to " +
                   g17(dm.grid.at(dm.grid.points - 1) / ell) + ", " + std::to_string(dm.grid.points) +
                   " points; rows Q, columns Q'");
    const Eigen::MatrixXcd r = dm.rho * ell;
    {
        auto h = head;
        h.push_back("quantity Re rho (scaled)");
        auto f = open_output(run, stem + "_re.txt");
        io::write_grid(f, h, r.real());
    }
    {
        auto h = head;
        h.push_back("quantity |rho| (scaled)");
        auto f = open_output(run, stem + "_abs.txt");
        io::write_grid(f, h, r.cwiseAbs());
    }
}

// ---- commands ----

int cmd_evolve(const Run& run) {
    const json e = section(run.cfg, "evolve");
    check_keys(e, {"C", "center", "times", "t_max", "steps"}, "evolve");
    const Complex C = complex_field(e, "C", {1.0, 0.0}, "evolve");
    const PhaseSpacePoint center = point_field(e, "center", {}, "evolve");
    std::vector<double> times = numbers(e, "times", {}, "evolve");
    if (times.empty()) {
        const double t_max = number(e, "t_max", 2.0 * kPi / run.params.omega, "evolve");
        const long steps = integer(e, "steps", 64, "evolve");
        if (!(t_max > 0.0) || steps < 1) throw ConfigError("evolve: t_max must be > 0 and steps >= 1");
        for (long k = 0; k <= steps; ++k) times.push_back(t_max * static_cast<double>(k) / static_cast<double>(steps));
    }
    for (double t : times)
        if (!(t >= 0.0)) throw ConfigError("evolve.times: entries must be >= 0");
    if (!(C.real() > 0.0)) throw ConfigError("evolve.C: Re C must be positive");

    const GaussianDM start = translate(make_squeezed(SqueezeParam(C), run.params), center);
    io::Table t;
    t.header = {"state C " + g17(C.real()) + " " + g17(C.imag()) + ", center " + g17(center.x) + " " + g17(center.p)};
    t.columns = {"t", "a", "b", "c", "center_x", "center_p", "S", "purity", "linear_entropy"};
    for (double time : times) {
        const GaussianDM dm = evolve(start, time, run.params);
        t.add_row({time, dm.a, dm.b, dm.c, dm.center_x, dm.center_p, von_neumann_entropy(dm), purity(dm),
                   linear_entropy(dm)});
    }
    write_table(run, "evolve.csv", t);
    write_summary(run, {{"rows", times.size()}, {"files", {"evolve.csv"}}});
    std::cout << "evolve: " << times.size() << " rows -> " << (run.out_dir / "evolve.csv").string() << '\n';
    return ok;
}

int cmd_sieve(const Run& run) {
    const json s = section(run.cfg, "sieve");
    check_keys(s, {"times", "tol", "max_iterations", "scan"}, "sieve");
    const std::vector<double> times =
        numbers(s, "times", {kPi / 4, kPi / 2, 1.0, kPi, 2.0 * kPi, 10.0 * kPi}, "sieve");
    SieveOptions opt;
    opt.tol = number(s, "tol", 1e-8, "sieve");
    opt.max_iterations = static_cast<std::size_t>(integer(s, "max_iterations", 5000, "sieve"));
    for (double t : times)
        if (!(t > 0.0)) throw ConfigError("sieve.times: entries must be > 0");
    if (!(opt.tol > 0.0)) throw ConfigError("sieve.tol: must be > 0");

    const bool degenerate = run.params.D == 0.0;
    if (degenerate)
        std::cerr << "warning: D = 0 makes the entropy objective identically zero; no minimizer is selected\n";

    io::Table t;
    t.columns = {"t", "C_star_re", "C_star_im", "sigma_re", "sigma_im", "deviation", "S_min", "iterations", "converged"};
    std::vector<SieveResult> results(times.size());
    if (!degenerate) parallel_for(times.size(), run.jobs, [&](std::size_t i) { results[i] = sieve_minimize(times[i], run.params, opt); });
    std::size_t unconverged = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Complex sigma = optimal_squeezing(times[i], run.params);
        if (degenerate) {
            const double nan = std::nan("");
            t.add_row({times[i], nan, nan, sigma.real(), sigma.imag(), nan, 0.0, 0.0, 0.0});
            continue;
        }
        const auto& r = results[i];
        const double dev = std::abs(r.C_star - sigma);
        worst = std::max(worst, dev);
        if (!r.converged) {
            ++unconverged;
            std::cerr << "warning: sieve did not converge at t = " << times[i] << '\n';
        }
        t.add_row({times[i], r.C_star.real(), r.C_star.imag(), sigma.real(), sigma.imag(), dev, r.S_min,
                   static_cast<double>(r.iterations), r.converged ? 1.0 : 0.0});
    }
    write_table(run, "sieve.csv", t);
    json files = {"sieve.csv"};

    if (s.contains("scan")) {
        const json sc = s["scan"];
        check_keys(sc, {"t", "re", "im"}, "sieve.scan");
        const double ts = number(sc, "t", kPi / 2 / run.params.omega, "sieve.scan");
        const auto re = numbers(sc, "re", {0.2, 3.0, 41}, "sieve.scan");
        const auto im = numbers(sc, "im", {-2.0, 2.0, 41}, "sieve.scan");
        if (re.size() != 3 || im.size() != 3) throw ConfigError("sieve.scan.re/im: expected [lo, hi, points]");
        const ScanRange rr{re[0], re[1], static_cast<std::size_t>(re[2])};
        const ScanRange ir{im[0], im[1], static_cast<std::size_t>(im[2])};
        if (!(rr.lo > 0.0) || rr.points < 2 || ir.points < 2) throw ConfigError("sieve.scan: need Re C > 0 and >= 2 points");
        const EntropySurface surf = sieve_scan(ts, run.params, rr, ir, run.jobs);
        auto head = provenance(run);
        head.push_back("entropy surface S(Re C, Im C) at t " + g17(ts));
        head.push_back("rows Re C from " + g17(rr.lo) + " to " + g17(rr.hi) + ", " + std::to_string(rr.points) + " points");
        head.push_back("columns Im C from " + g17(ir.lo) + " to " + g17(ir.hi) + ", " + std::to_string(ir.points) + " points");
        auto f = open_output(run, "sieve_surface.txt");
        io::write_grid(f, head, surf.S);
        files.push_back("sieve_surface.txt");
    }
    write_summary(run, {{"rows", times.size()},
                        {"degenerate_objective", degenerate},
                        {"unconverged_rows", unconverged},
                        {"max_deviation", degenerate ? json(nullptr) : json(worst)},
                        {"files", files}});
    std::cout << "sieve: " << times.size() << " rows, max |C* - sigma| = " << worst << '\n';
    return ok;
}

GridSpec grid_from(const json& obj, const std::string& where, double half_width, std::size_t points, const SimParams& p) {
    const json g = obj.contains("grid") ? obj["grid"] : json::object();
    check_keys(g, {"half_width", "points"}, where + ".grid");
    GridSpec out{0.0, number(g, "half_width", half_width, where + ".grid") * p.length_scale(),
                 static_cast<std::size_t>(integer(g, "points", static_cast<long>(points), where + ".grid"))};
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ".grid: " + e.what());
    }
    return out;
}

CatSpec cat_from(const json& c, const SimParams& p) {
    const CatSpec def = fig1_cat(p);
    CatSpec out;
    out.c1 = complex_field(c, "c1", def.c1, "cat");
    out.c2 = complex_field(c, "c2", def.c2, "cat");
    out.s1 = point_field(c, "s1", def.s1, "cat");
    out.s2 = point_field(c, "s2", def.s2, "cat");
    return out;
}

int cmd_cat(const Run& run) {
    const json c = section(run.cfg, "cat");
    check_keys(c, {"c1", "c2", "s1", "s2", "n_max", "emit_grids", "grid"}, "cat");
    const CatSpec cat = cat_from(c, run.params);
    const long n_max = integer(c, "n_max", 10, "cat");
    if (n_max < 1) throw ConfigError("cat.n_max: must be >= 1");
    const bool emit = c.value("emit_grids", false);
    const double d2 = separation(cat, run.params);
    if (d2 <= 1.0) std::cerr << "warning: Δ² = " << d2 << " <= 1, the branches lie inside each other's halo\n";

    io::Table t;
    t.header = {"cat c1 " + g17(cat.c1.real()) + " " + g17(cat.c1.imag()) + ", c2 " + g17(cat.c2.real()) + " " +
                g17(cat.c2.imag()) + ", s1 " + g17(cat.s1.x) + " " + g17(cat.s1.p) + ", s2 " + g17(cat.s2.x) + " " +
                g17(cat.s2.p)};
    t.columns = {"n", "t", "visibility", "minus_log_visibility", "trace"};
    for (long n = 0; n <= n_max; ++n) {
        const CatDM dm = cat_dm_stroboscopic(cat, static_cast<int>(n), run.params);
        const double v = visibility(dm);
        t.add_row({static_cast<double>(n), dm.t, v, -std::log(v), dm.trace().real()});
    }
    write_table(run, "cat_visibility.csv", t);
    json files = {"cat_visibility.csv"};
    if (emit) {
        const GridSpec grid = grid_from(c, "cat", 6.0, 128, run.params);
        for (long n : {0L, n_max}) {
            const std::string stem = "cat_n" + std::to_string(n);
            write_dm_grids(run, stem, "cat at n = " + std::to_string(n),
                           position_dm_grid(cat_dm_stroboscopic(cat, static_cast<int>(n), run.params), grid, run.params),
                           run.params);
            files.push_back(stem + "_re.txt");
            files.push_back(stem + "_abs.txt");
        }
    }
    const auto tD = decoherence_time(cat, run.params);
    const double t_last = 2.0 * kPi * static_cast<double>(n_max) / run.params.omega;
    const double radius = halo_radius(t_last, run.params);
    json summary = {{"delta2", d2},
                    {"inside_halo", d2 <= 1.0},
                    {"t_D", tD ? json(*tD) : json("divergent")},
                    {"halo_radius", std::isfinite(radius) ? json(radius) : json("infinite")},
                    {"halo_t_max", t_last},
                    {"superselection_margin", superselection_valid(run.params.D, t_last, run.params).margin},
                    {"files", files}};
    if (run.params.D > 0.0 && n_max >= 2) {
        const auto fit = fit_visibility_decay(cat, run.params, 1, static_cast<int>(std::min<long>(n_max, 5)));
        summary["fitted_decay_rate"] = fit.rate;
        if (tD) summary["rate_ratio_fit_over_inverse_tD"] = fit.rate * *tD;
    }
    write_summary(run, summary);
    std::cout << "cat: Δ² = " << d2 << ", t_D = " << (tD ? g17(*tD) : std::string("divergent")) << '\n';
    return ok;
}

int cmd_fig1(const Run& run) {
    const json c = section(run.cfg, "fig1");
    check_keys(c, {"two_n_pi_D", "n", "grid"}, "fig1");
    const double strength = number(c, "two_n_pi_D", 0.05, "fig1");
    const long n = integer(c, "n", 1, "fig1");
    if (n < 1) throw ConfigError("fig1.n: must be >= 1");
    if (!(strength >= 0.0)) throw ConfigError("fig1.two_n_pi_D: must be >= 0");
    SimParams p = run.params;
    p.D = strength / (2.0 * kPi * static_cast<double>(n));
    const GridSpec grid = grid_from(c, "fig1", 8.0, 128, p);

    const CatSpec cat = fig1_cat(p);
    const CatDM a = cat_dm_initial(cat, p);
    const CatDM b = cat_dm_stroboscopic(cat, static_cast<int>(n), p);
    const FockDemo fock = halo_demo_fock(static_cast<int>(n), p.D, p, grid);

    const NumericDM ga = position_dm_grid(a, grid, p);
    const NumericDM gb = position_dm_grid(b, grid, p);
    write_dm_grids(run, "fig1a", "1a: cat, Δ² = 2, t = 0", ga, p);
    write_dm_grids(run, "fig1b", "1b: cat, Δ² = 2, t = 2nπ/Ω", gb, p);
    write_dm_grids(run, "fig1a_prime", "1a': (|0> + |1>)/sqrt 2, t = 0", fock.initial, p);
    write_dm_grids(run, "fig1b_prime", "1b': (|0> + |1>)/sqrt 2, t = 2nπ/Ω", fock.final_state, p);

    const double vis_a = visibility(a);
    const double vis_b = visibility(b);
    const double herm = std::max({ga.hermiticity_error(), gb.hermiticity_error(), fock.initial.hermiticity_error(),
                                  fock.final_state.hermiticity_error()});
    json files = json::array();
    for (const char* s : {"fig1a", "fig1b", "fig1a_prime", "fig1b_prime"}) {
        files.push_back(std::string(s) + "_re.txt");
        files.push_back(std::string(s) + "_abs.txt");
    }
    const bool ordered = vis_b < fock.retention && fock.retention > 0.95;
    write_summary(run, {{"D", p.D},
                        {"n", n},
                        {"two_n_pi_D", strength},
                        {"cat_visibility_t0", vis_a},
                        {"cat_visibility", vis_b},
                        {"fock_retention", fock.retention},
                        {"fock_coherence_amplitude_ratio", fock.amplitude_ratio},
                        {"cat_below_fock_retention", ordered},
                        {"max_hermiticity_error", herm},
                        {"files", files}});
    std::cout << "fig1: cat visibility " << vis_b << ", |0>+|1> retention " << fock.retention << '\n';
    return ok;
}

int cmd_medium(const Run& run) {
    const json m = section(run.cfg, "medium");
    check_keys(m, {"spectrum", "lorentz", "beta", "density", "coupling", "cutoff", "omega", "tolerance"}, "medium");
    const auto range = numbers(m, "omega", {1e-3, 1e2, 200}, "medium");
    if (range.size() != 3 || !(range[0] > 0.0) || !(range[1] > range[0]) || range[2] < 2)
        throw ConfigError("medium.omega: expected [lo, hi, points] with 0 < lo < hi");

    if (m.contains("lorentz")) {
        const json l = m["lorentz"];
        check_keys(l, {"wp2", "w0", "width"}, "medium.lorentz");
        const oracle::LorentzModel model{number(l, "wp2", 0.5, "medium.lorentz"), number(l, "w0", 1.0, "medium.lorentz"),
                                         number(l, "width", 0.5, "medium.lorentz")};
        try {
            model.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("medium.lorentz: ") + e.what());
        }
        const double tol = number(m, "tolerance", 1e-3, "medium");
        const auto omega = medium::frequency_grid(range[0], range[1], static_cast<std::size_t>(range[2]));
        medium::KKOptions opt;
        opt.breakpoints = {model.w0};
        io::Table t;
        t.header = {"lorentz wp2 " + g17(model.wp2) + " w0 " + g17(model.w0) + " width " + g17(model.width)};
        t.columns = {"omega", "ImK", "ReK", "ReK_exact", "rel_error", "n_re", "n_im"};
        double worst = 0.0;
        for (double w : omega) {
            const auto re = medium::re_K([&](double x) { return model.im(x); }, w, opt);
            const double exact = model.re(w);
            const double err = std::abs(re.value - exact) / std::abs(exact);
            worst = std::max(worst, err);
            const Complex n = medium::refractive_index({re.value, model.im(w)});
            t.add_row({w, model.im(w), re.value, exact, err, n.real(), n.imag()});
        }
        write_table(run, "medium.csv", t);
        const bool pass = worst < tol;
        write_summary(run, {{"mode", "lorentz"}, {"max_rel_error", worst}, {"tolerance", tol}, {"pass", pass},
                            {"files", {"medium.csv"}}});
        std::cout << "medium (lorentz): max relative error " << worst << '\n';
        return pass ? ok : tolerance_breach;
    }

    if (!m.contains("spectrum") || !m["spectrum"].is_string())
        throw ConfigError("medium.spectrum: path to a spectrum file is required (or give medium.lorentz)");
    const std::string path = m["spectrum"].get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError("medium.spectrum: cannot open " + path);
    medium::MolecularSpectrum spec;
    try {
        spec = medium::parse_spectrum(in);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    medium::MediumSpec ms;
    ms.beta = number(m, "beta", 1.0, "medium");
    ms.density = number(m, "density", 1.0, "medium");
    ms.coupling = number(m, "coupling", 1.0, "medium");
    ms.cutoff = number(m, "cutoff", 1.0, "medium");
    ms.hbar = run.params.hbar;
    std::vector<std::string> warnings;
    try {
        warnings = ms.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("medium: ") + e.what());
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    const auto omega = medium::frequency_grid(range[0], range[1], static_cast<std::size_t>(range[2]), spec, ms.hbar);
    medium::KKOptions opt;
    opt.omega_max = std::max(1e4, 100.0 * range[1]);
    const auto K = medium::dielectric_function(spec, ms, omega, opt);
    io::Table t;
    t.header = {"spectrum " + path, "beta " + g17(ms.beta) + " density " + g17(ms.density) + " coupling " +
                                        g17(ms.coupling) + " cutoff " + g17(ms.cutoff)};
    t.columns = {"omega", "I", "ImK", "ReK", "n_re", "n_im", "degraded"};
    std::size_t degraded = 0;
    for (std::size_t i = 0; i < K.omega.size(); ++i) {
        degraded += K.degraded[i];
        t.add_row({K.omega[i], K.spectral[i], K.im_K[i], K.re_K[i], K.n[i].real(), K.n[i].imag(), K.degraded[i] ? 1.0 : 0.0});
    }
    write_table(run, "medium.csv", t);
    write_summary(run, {{"mode", "spectrum"}, {"levels", spec.energies.size()}, {"lines", spec.lines.size()},
                        {"warnings", warnings}, {"degraded_points", degraded}, {"files", {"medium.csv"}}});
    std::cout << "medium: " << K.omega.size() << " frequencies, " << spec.lines.size() << " lines\n";
    return ok;
}

int cmd_oracle_check(const Run& run) {
    const json o = section(run.cfg, "oracle");
    check_keys(o, {"half_width", "points", "tolerance", "include_cat"}, "oracle");
    oracle::MatrixOptions opt;
    opt.base = run.params;
    opt.half_width = number(o, "half_width", opt.half_width, "oracle");
    opt.points = static_cast<std::size_t>(integer(o, "points", static_cast<long>(opt.points), "oracle"));
    opt.tolerance = number(o, "tolerance", opt.tolerance, "oracle");
    opt.include_cat = o.value("include_cat", true);
    opt.jobs = run.jobs;
    if (opt.points < GridSpec::kMinPoints) throw ConfigError("oracle.points: at least 64 required");
    if (!(opt.half_width > 0.0)) throw ConfigError("oracle.half_width: must be > 0");

    const auto rep = oracle::run_matrix(opt);
    io::Table t;
    t.header = {"grid half_width " + g17(opt.half_width) + " points " + std::to_string(opt.points),
                "tolerance " + g17(opt.tolerance) + " trace_tolerance " + g17(opt.trace_tolerance)};
    t.columns = {"C_re", "C_im", "phase", "D", "distance", "trace_error", "pass", "numerical_failure"};
    json rows = json::array();
    for (const auto& c : rep.cases) {
        const double nan = std::nan("");
        t.add_row({c.C.real(), c.C.imag(), c.phase, c.D, c.numerical_failure ? nan : c.distance,
                   c.numerical_failure ? nan : c.trace_error, c.pass ? 1.0 : 0.0, c.numerical_failure ? 1.0 : 0.0});
        std::printf("%-4s %-32s dist %-11.3e trace %-11.3e %s\n", c.pass ? "ok" : "FAIL", c.label.c_str(), c.distance,
                    c.trace_error, c.error.c_str());
        rows.push_back({{"label", c.label}, {"pass", c.pass}, {"distance", c.distance}, {"error", c.error}});
    }
    write_table(run, "oracle_report.csv", t);
    write_summary(run, {{"cases", rows}, {"all_pass", rep.all_pass()}, {"files", {"oracle_report.csv"}}});
    if (rep.any_numerical_failure()) {
        std::cerr << "oracle-check: resolution failure; refine the grid (oracle.points / oracle.half_width)\n";
        return numerical_failure;
    }
    return rep.all_pass() ? ok : tolerance_breach;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoherence of a damped field mode: Gaussian evolution, predictability sieve, cats, media"};
    app.require_subcommand(1);
    app.fallthrough();  // subcommands inherit this: global flags may follow the subcommand
    app.set_version_flag("--version", kVersion);

    std::string config_path;
    std::string out_dir;
    std::size_t jobs = 1;
    double D = 0.0, omega = 1.0, mass = 1.0, hbar = 1.0;
    app.add_option("-c,--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    auto* o_out = app.add_option("-o,--output-dir", out_dir, "output directory (default $QHALO_OUTPUT_DIR or ./qhalo_out)");
    auto* o_jobs = app.add_option("-j,--jobs", jobs, "worker threads for scans")->check(CLI::PositiveNumber);
    auto* o_D = app.add_option("-D,--decoherence", D, "decoherence strength D = 8γk_BT/(ħΩ²)");
    auto* o_omega = app.add_option("--omega", omega, "mode frequency Ω");
    auto* o_mass = app.add_option("--mass", mass, "mode mass M");
    auto* o_hbar = app.add_option("--hbar", hbar, "ħ");

    auto* evolve = app.add_subcommand("evolve", "evolve a squeezed or coherent state; table of (t, a, b, c, S, purity)");
    double C_re = 1.0, C_im = 0.0, x0 = 0.0, p0 = 0.0, t_max = 0.0;
    long steps = 0;
    std::vector<double> ev_times;
    auto* o_cre = evolve->add_option("--C-re", C_re, "Re C");
    auto* o_cim = evolve->add_option("--C-im", C_im, "Im C");
    auto* o_x0 = evolve->add_option("--x0", x0, "initial center Q");
    auto* o_p0 = evolve->add_option("--p0", p0, "initial center P");
    auto* o_tmax = evolve->add_option("--t-max", t_max, "last time of a uniform list");
    auto* o_steps = evolve->add_option("--steps", steps, "intervals of the uniform list");
    auto* o_evt = evolve->add_option("--times", ev_times, "explicit time list");

    auto* sieve = app.add_subcommand("sieve", "entropy-minimizing initial squeezing against the optimal-squeezing law");
    std::vector<double> sv_times;
    double tol = 1e-8;
    auto* o_svt = sieve->add_option("--times", sv_times, "final times");
    auto* o_tol = sieve->add_option("--tol", tol, "simplex tolerance");

    auto* cat = app.add_subcommand("cat", "two-branch cat: visibility against n, t_D, Δ², halo radius");
    long n_max = 10;
    bool emit = false;
    auto* o_nmax = cat->add_option("--n-max", n_max, "last stroboscopic index");
    auto* o_emit = cat->add_flag("--emit-grids", emit, "write density-matrix grids at n = 0 and n_max");

    auto* fig1 = app.add_subcommand("fig1", "four density-matrix panels: cat and |0>+|1> before and after");
    double strength = 0.05;
    long fig_n = 1;
    auto* o_str = fig1->add_option("--two-n-pi-D", strength, "2nπD of the final panels");
    auto* o_fn = fig1->add_option("--n", fig_n, "number of periods n");

    auto* med = app.add_subcommand("medium", "spectral density, Im K, Re K (Kramers-Kronig) and n(ω)");
    std::string spectrum;
    bool lorentz = false;
    auto* o_spec = med->add_option("--spectrum", spectrum, "spectrum file")->check(CLI::ExistingFile);
    auto* o_lor = med->add_flag("--lorentz", lorentz, "Lorentz-oscillator fixture instead of a spectrum");
    std::vector<double> freq;
    auto* o_freq = med->add_option("--frequencies", freq, "lo hi points of the log-spaced frequency grid")->expected(3);

    auto* orc = app.add_subcommand("oracle-check", "closed forms against brute-force quadrature");
    double ohw = 0.0;
    long opts = 0;
    auto* o_ohw = orc->add_option("--half-width", ohw, "grid half-width in units of sqrt(ħ/MΩ)");
    auto* o_opts = orc->add_option("--points", opts, "grid points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_error;
    }

    Run run;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            try {
                run.cfg = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ConfigError(config_path + ": " + e.what());
            }
            if (!run.cfg.is_object()) throw ConfigError(config_path + ": top level must be an object");
        } else {
            run.cfg = json::object();
        }
        check_keys(run.cfg, {"params", "output_dir", "jobs", "evolve", "sieve", "cat", "fig1", "medium", "oracle"}, "config");

        // flags win over the file
        if (o_D->count()) run.cfg["params"]["D"] = D;
        if (o_omega->count()) run.cfg["params"]["omega"] = omega;
        if (o_mass->count()) run.cfg["params"]["mass"] = mass;
        if (o_hbar->count()) run.cfg["params"]["hbar"] = hbar;
        if (o_jobs->count()) run.cfg["jobs"] = jobs;
        if (o_out->count()) run.cfg["output_dir"] = out_dir;
        if (o_cre->count() || o_cim->count()) {
            const Complex C0 = complex_field(section(run.cfg, "evolve"), "C", {1.0, 0.0}, "evolve");
            run.cfg["evolve"]["C"] = {o_cre->count() ? C_re : C0.real(), o_cim->count() ? C_im : C0.imag()};
        }
        if (o_x0->count() || o_p0->count()) {
            const auto c0 = point_field(section(run.cfg, "evolve"), "center", {}, "evolve");
            run.cfg["evolve"]["center"] = {o_x0->count() ? x0 : c0.x, o_p0->count() ? p0 : c0.p};
        }
        if (o_tmax->count()) run.cfg["evolve"]["t_max"] = t_max;
        if (o_steps->count()) run.cfg["evolve"]["steps"] = steps;
        if (o_evt->count()) run.cfg["evolve"]["times"] = ev_times;
        if (o_svt->count()) run.cfg["sieve"]["times"] = sv_times;
        if (o_tol->count()) run.cfg["sieve"]["tol"] = tol;
        if (o_nmax->count()) run.cfg["cat"]["n_max"] = n_max;
        if (o_emit->count()) run.cfg["cat"]["emit_grids"] = emit;
        if (o_str->count()) run.cfg["fig1"]["two_n_pi_D"] = strength;
        if (o_fn->count()) run.cfg["fig1"]["n"] = fig_n;
        if (o_spec->count()) run.cfg["medium"]["spectrum"] = spectrum;
        if (o_lor->count() && lorentz && !section(run.cfg, "medium").contains("lorentz"))
            run.cfg["medium"]["lorentz"] = json::object();
        if (o_freq->count()) run.cfg["medium"]["omega"] = freq;
        if (o_ohw->count()) run.cfg["oracle"]["half_width"] = ohw;
        if (o_opts->count()) run.cfg["oracle"]["points"] = opts;

        run.params = read_params(run.cfg);
        const long j = integer(run.cfg, "jobs", 1, "config");
        if (j < 1) throw ConfigError("config.jobs: must be >= 1");
        run.jobs = static_cast<std::size_t>(j);
        if (run.cfg.contains("output_dir")) {
            if (!run.cfg["output_dir"].is_string()) throw ConfigError("config.output_dir: expected a string");
            run.out_dir = run.cfg["output_dir"].get<std::string>();
        } else if (const char* env = std::getenv("QHALO_OUTPUT_DIR"); env && *env) {
            run.out_dir = env;
        } else {
            run.out_dir = "qhalo_out";
        }

        if (*evolve) return run.command = "evolve", cmd_evolve(run);
        if (*sieve) return run.command = "sieve", cmd_sieve(run);
        if (*cat) return run.command = "cat", cmd_cat(run);
        if (*fig1) return run.command = "fig1", cmd_fig1(run);
        if (*med) return run.command = "medium", cmd_medium(run);
        if (*orc) return run.command = "oracle-check", cmd_oracle_check(run);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    }
    return config_error;
}
