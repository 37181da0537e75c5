#pragma once

// Command-line front end. run() is the whole program minus process setup, so tests can
// drive it in-process with string streams.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixnls/mixnls.hpp"

namespace mixnls::cli {

using ordered_json = nlohmann::ordered_json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

struct RunConfig {
    Params prm;
    double a = 0.5;
    double b = 0.5;
    double x_max = 200.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double eps = 1e-4;
    double window = 20.0;
    double stride = 0.05;
    std::size_t grid = 20;
    std::vector<double> u_range{0.0, 1.6};
    std::vector<double> v_range{0.0, 1.6};
    unsigned threads = 0;
    std::size_t n = 0;
    double clip = 0.0;
    double delta = 0.1;
    std::vector<double> center{1.0, 0.0, 1.0, 0.0};
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::string out;
    std::string config;
};

/// Decimal with 17 significant digits.
inline std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

struct Binding {
    std::string key;
    CLI::Option* opt = nullptr;
    std::function<void(const nlohmann::json&)> set;
};

template <class T>
CLI::Option* add_bound(CLI::App* sub, std::vector<Binding>& bs, const std::string& flag, const std::string& key, T& target,
          const std::string& help)
{
    CLI::Option* o = sub->add_option(flag, target, help)->capture_default_str();
    bs.push_back({key, o, [&target](const nlohmann::json& j) { target = j.get<T>(); }});
    return o;
}

inline void bind_params(CLI::App* sub, std::vector<Binding>& bs, RunConfig& c)
{
    add_bound(sub, bs, "--p", "p", c.prm.p, "nonlinearity exponent p");
    add_bound(sub, bs, "--omega", "omega", c.prm.omega, "frequency omega");
    add_bound(sub, bs, "--lambda", "lambda", c.prm.lambda, "coupling lambda");
    add_bound(sub, bs, "--sigma1", "sigma1", c.prm.sigma1, "dispersion of u");
    add_bound(sub, bs, "--sigma2", "sigma2", c.prm.sigma2, "dispersion of v");
}

inline void bind_integration(CLI::App* sub, std::vector<Binding>& bs, RunConfig& c)
{
    add_bound(sub, bs, "--x-max", "x_max", c.x_max, "integration length");
    add_bound(sub, bs, "--rel-tol", "rel_tol", c.rel_tol, "relative tolerance");
    add_bound(sub, bs, "--abs-tol", "abs_tol", c.abs_tol, "absolute tolerance");
    add_bound(sub, bs, "--eps", "eps", c.eps, "limit detector radius");
    add_bound(sub, bs, "--window", "window", c.window, "limit detector window");
}

inline void bind_output(CLI::App* sub, std::vector<Binding>& bs, RunConfig& c, bool with_format)
{
    add_bound(sub, bs, "--out", "out", c.out, "output path (stdout if empty)");
    if (with_format) {
        CLI::Option* o = sub->add_option("--format", c.format, "csv or json")
                             ->check(CLI::IsMember({"csv", "json"}))
                             ->capture_default_str();
        bs.push_back({"format", o, [&c](const nlohmann::json& j) {
                          c.format = j.get<std::string>();
                          if (c.format != "csv" && c.format != "json")
                              throw InvalidParams("config: format must be csv or json");
                      }});
    }
    sub->add_option("--config", c.config, "JSON config file; flags override its values");
}

inline IntegratorOptions integrator_options(const RunConfig& c)
{
    IntegratorOptions o;
    o.x_max = c.x_max;
    o.rel_tol = c.rel_tol;
    o.abs_tol = c.abs_tol;
    o.limit_eps = c.eps;
    o.limit_window = c.window;
    o.output_stride = c.stride;
    return o;
}

inline void check_options(const RunConfig& c)
{
    if (!(c.eps > 0.0)) throw InvalidParams("eps must be > 0");
    if (!(c.window > 0.0)) throw InvalidParams("window must be > 0");
    if (!(c.stride > 0.0)) throw InvalidParams("stride must be > 0");
}

inline ordered_json params_json(const Params& p)
{
    return {{"p", p.p}, {"omega", p.omega}, {"lambda", p.lambda}, {"sigma1", p.sigma1}, {"sigma2", p.sigma2}};
}

inline ordered_json integration_json(const RunConfig& c)
{
    return {{"x_max", c.x_max}, {"rel_tol", c.rel_tol}, {"abs_tol", c.abs_tol},
            {"eps", c.eps},     {"window", c.window},   {"stride", c.stride}};
}

inline ordered_json merge(ordered_json a, const ordered_json& b)
{
    for (auto it = b.begin(); it != b.end(); ++it) a[it.key()] = it.value();
    return a;
}

inline ordered_json point_json(Point q) { return ordered_json::array({q.u, q.v}); }

inline ordered_json verdict_json(const LimitVerdict& v)
{
    ordered_json j{{"kind", v.name()}};
    switch (v.kind) {
    case LimitVerdict::Kind::ConvergedTo: j["vertex"] = to_string(v.vertex); break;
    case LimitVerdict::Kind::Unbounded: j["escape_x"] = v.escape_x; break;
    case LimitVerdict::Kind::BoundedOscillation:
        j["u_range"] = {v.u_min, v.u_max};
        j["v_range"] = {v.v_min, v.v_max};
        j["du_sign_changes"] = v.du_sign_changes;
        break;
    case LimitVerdict::Kind::Undecided: j["du_sign_changes"] = v.du_sign_changes; break;
    }
    return j;
}

/// Where output goes: the --out file, or the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback)
    {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw std::runtime_error("cannot open output file " + path);
        }
    }
    std::ostream& os() { return path_.empty() ? fallback_ : file_; }

private:
    std::string path_;
    std::ostream& fallback_;
    std::ofstream file_;
};

inline void write_json_file(const std::string& path, const ordered_json& j)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

inline int cmd_curves(const RunConfig& c, const ordered_json& cfg, std::ostream& out)
{
    validate(c.prm);
    const std::size_t n = c.n ? c.n : 400;
    std::vector<Polyline> lines;
    for (Curve k : {Curve::Gamma, Curve::GammaStar, Curve::Lambda})
        for (auto& pl : sample_curve(k, c.prm, n, c.clip)) lines.push_back(std::move(pl));

    const FixedPoints fx = vertices(c.prm);
    const AxisPoints ax = axis_points(c.prm);
    ordered_json side{{"version", version}, {"config", cfg}, {"l", fx.l}};
    ordered_json vj = ordered_json::object();
    for (Vertex v : all_vertices) vj[to_string(v)] = point_json(fx.at(v));
    side["vertices"] = vj;
    ordered_json aj = ordered_json::object();
    for (const auto& np : ax.all()) aj[np.name] = point_json(np.point);
    side["axis_points"] = aj;
    side["omega_p"] = ax.omega_p;
    side["omega_3"] = ax.omega_3;

    Sink sink(c.out, out);
    if (c.format == "json") {
        ordered_json cj = ordered_json::object();
        for (const auto& pl : lines) {
            ordered_json pts = ordered_json::array();
            for (Point q : pl.points) pts.push_back(point_json(q));
            cj[pl.id] = {{"closed", pl.closed}, {"points", pts}};
        }
        side["curves"] = cj;
        sink.os() << side.dump(2) << '\n';
        return exit_ok;
    }
    auto& os = sink.os();
    os << "# config: " << cfg.dump() << '\n';
    os << "# version: " << version << '\n';
    os << "curve_id,u,v\n";
    for (const auto& pl : lines)
        for (Point q : pl.points) os << pl.id << ',' << num(q.u) << ',' << num(q.v) << '\n';
    if (!c.out.empty()) write_json_file(c.out + ".json", side);
    return exit_ok;
}

inline int cmd_simulate(const RunConfig& c, const ordered_json& cfg, std::ostream& out)
{
    validate(c.prm);
    check_options(c);
    const Trajectory tr = integrate(c.a, c.b, c.prm, integrator_options(c));
    const Region region = classify_point(c.a, c.b, c.prm);

    ordered_json rec{{"version", version}, {"config", cfg}, {"region", region.name()}};
    ordered_json ev = ordered_json::array();
    for (const auto& e : tr.events) ev.push_back({{"x", e.x}, {"curve", to_string(e.curve)}});
    rec["events"] = ev;
    rec["energy_drift"] = tr.energy_drift;
    rec["verdict"] = verdict_json(tr.verdict);
    rec["termination"] = to_string(tr.termination);
    rec["x_end"] = tr.x_end();
    rec["accepted_steps"] = tr.accepted_steps;
    rec["rejected_steps"] = tr.rejected_steps;

    Sink sink(c.out, out);
    if (c.format == "json") {
        sink.os() << rec.dump(2) << '\n';
        return exit_ok;
    }
    auto& os = sink.os();
    os << "# config: " << cfg.dump() << '\n';
    os << "# version: " << version << '\n';
    os << "x,u,v,du,dv,E\n";
    for (const auto& s : tr.samples)
        os << num(s.x) << ',' << num(s.u) << ',' << num(s.v) << ',' << num(s.du) << ',' << num(s.dv) << ','
           << num(energy(s, c.prm).total) << '\n';
    if (!c.out.empty()) write_json_file(c.out + ".json", rec);
    return exit_ok;
}

inline ordered_json sweep_summary_json(const SweepResult& res)
{
    ordered_json regions = ordered_json::object();
    for (const auto& [name, s] : res.summary) {
        auto rate = [&](std::size_t k) { return s.count ? double(k) / double(s.count) : 0.0; };
        ordered_json r{{"count", s.count}, {"with_prediction", s.with_prediction}};
        r["agreement"] = {{"sign_u2", rate(s.agree_sign_u2)},
                          {"sign_v2", rate(s.agree_sign_v2)},
                          {"initial_u", rate(s.agree_initial_u)},
                          {"initial_v", rate(s.agree_initial_v)},
                          {"mono_u", rate(s.agree_mono_u)},
                          {"mono_v", rate(s.agree_mono_v)},
                          {"attractor", rate(s.agree_attractor)},
                          {"confinement", rate(s.agree_confinement)}};
        r["stated_matches_initial"] = s.stated_matches_initial;
        ordered_json vj = ordered_json::object();
        for (const auto& [k, cnt] : s.verdicts) vj[k] = cnt;
        r["verdicts"] = vj;
        regions[name] = r;
    }
    return regions;
}

inline std::string attractor_name(const TheoremReport& r)
{
    if (!r.predicted) return "-";
    if (r.predicted->attractor) return to_string(*r.predicted->attractor);
    return r.predicted->region.is_edge() || r.predicted->not_simultaneously_monotone ? "any" : "-";
}

inline int cmd_sweep(const RunConfig& c, const ordered_json& cfg, std::ostream& out)
{
    validate(c.prm);
    check_options(c);
    if (!c.prm.canonical())
        throw InvalidParams("sweep requires sigma1 = sigma2 = lambda = 1; run `scale` for the canonical omega");
    if (c.u_range.size() != 2 || c.v_range.size() != 2) throw InvalidParams("u_range and v_range take two values");
    if (c.grid < 1) throw InvalidParams("grid must be >= 1");

    const SweepResult res = sweep({c.u_range[0], c.u_range[1]}, {c.v_range[0], c.v_range[1]}, c.grid, c.grid, c.prm,
                                  integrator_options(c), c.threads);

    ordered_json rec{{"version", version}, {"config", cfg}, {"points", res.points.size()},
                     {"failures", res.failures}};
    rec["regions"] = sweep_summary_json(res);

    Sink sink(c.out, out);
    if (c.format == "json") {
        sink.os() << rec.dump(2) << '\n';
        return exit_ok;
    }
    auto& os = sink.os();
    os << "# config: " << cfg.dump() << '\n';
    os << "# version: " << version << '\n';
    os << "a,b,region,sign_u2,sign_v2,agree_mono_u,agree_mono_v,verdict,attractor,agree_initial_u,agree_initial_v,"
          "agree_attractor,error\n";
    for (const auto& pt : res.points) {
        os << num(pt.a) << ',' << num(pt.b) << ',';
        if (!pt.report) {
            os << "-,0,0,0,0,-,-,0,0,0," << '"' << pt.error << '"' << '\n';
            continue;
        }
        const auto& r = *pt.report;
        os << r.region.name() << ',' << r.observed.sign_u2 << ',' << r.observed.sign_v2 << ','
           << int(r.agreement.mono_u) << ',' << int(r.agreement.mono_v) << ',' << r.observed.verdict.name() << ','
           << attractor_name(r) << ',' << int(r.agreement.initial_u) << ',' << int(r.agreement.initial_v) << ','
           << int(r.agreement.attractor) << ',';
        if (!pt.error.empty()) os << '"' << pt.error << '"';
        os << '\n';
    }
    if (!c.out.empty()) write_json_file(c.out + ".json", rec);
    return exit_ok;
}

inline int cmd_scale(const RunConfig& c, const ordered_json& cfg, std::ostream& out)
{
    const ScalingConstants k = reduction_constants(c.prm);
    ordered_json rec{{"version", version},
                     {"config", cfg},
                     {"alpha", k.alpha},
                     {"beta", k.beta},
                     {"k1", k.k1},
                     {"k2", k.k2},
                     {"a_lambda", k.a_lambda},
                     {"b_lambda", k.b_lambda},
                     {"residuals", k.residuals},
                     {"closed_form_disagreed", k.closed_form_disagreed},
                     {"omega_canonical", k.omega_canonical}};
    Sink sink(c.out, out);
    sink.os() << rec.dump(2) << '\n';
    return exit_ok;
}

inline int cmd_lipschitz(const RunConfig& c, const ordered_json& cfg, std::ostream& out)
{
    if (c.center.size() != 4) throw InvalidParams("center takes four values (u, du, v, dv)");
    const Vec4 ctr{c.center[0], c.center[1], c.center[2], c.center[3]};
    const LipschitzEstimate e = lipschitz_estimate(ctr, c.delta, c.n ? c.n : 10000, c.prm, c.seed);
    ordered_json rec{{"version", version}, {"config", cfg},         {"center", e.center},
                     {"delta", e.delta},   {"n_pairs", e.n_pairs}, {"max_ratio", e.max_ratio},
                     {"seed", e.seed}};
    Sink sink(c.out, out);
    sink.os() << rec.dump(2) << '\n';
    return exit_ok;
}

inline int cmd_lemma_area(const RunConfig& c, const ordered_json& cfg, std::ostream& out)
{
    const std::size_t n = c.n ? c.n : 10000;
    const double worst = check_area_bound(c.prm.p, n);
    const double bound = 1.0 + 1e-6;
    auto end_point = [&](double theta) {
        const auto r = lambda_polar_radius(theta, c.prm.p);
        const auto [co, si] = mixnls::detail::clean_cos_sin(theta);
        return r ? point_json({*r * co, *r * si}) : ordered_json(nullptr);
    };
    ordered_json rec{{"version", version}, {"config", cfg}, {"p", c.prm.p}, {"n", n}, {"max_coordinate", worst},
                     {"bound", bound},     {"pass", worst <= bound}};
    rec["theta_0"] = end_point(0.0);
    rec["theta_half_pi"] = end_point(0.5 * std::numbers::pi);
    Sink sink(c.out, out);
    sink.os() << rec.dump(2) << '\n';
    return exit_ok;
}

inline void apply_config(const std::string& path, const std::vector<Binding>& bs)
{
    std::ifstream f(path);
    if (!f) throw InvalidParams("cannot read config file " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParams(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidParams("config file must hold a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto b = std::find_if(bs.begin(), bs.end(), [&](const Binding& x) { return x.key == it.key(); });
        if (b == bs.end()) throw InvalidParams("unknown config key '" + it.key() + "'");
        if (b->opt->count() > 0) continue; // the flag wins
        try {
            b->set(it.value());
        } catch (const nlohmann::json::exception&) {
            throw InvalidParams("config key '" + it.key() + "' has the wrong type");
        }
    }
}

} // namespace detail

/// Runs one invocation. args excludes the program name. Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    using namespace detail;
    RunConfig c;
    CLI::App app{"Steady states of a coupled NLS system: curves, trajectories, sweeps, scaling."};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    std::vector<Binding> curves_b, sim_b, sweep_b, scale_b, lip_b, area_b;

    auto* curves = app.add_subcommand("curves", "sample Gamma, Gamma* and Lambda; vertices and axis points");
    bind_params(curves, curves_b, c);
    add_bound(curves, curves_b, "--n", "n", c.n, "samples per curve (0: 400)");
    add_bound(curves, curves_b, "--clip", "clip", c.clip, "half-width of the box for the diagonals (0: automatic)");
    bind_output(curves, curves_b, c, true);

    auto* sim = app.add_subcommand("simulate", "integrate from (a, b, 0, 0)");
    bind_params(sim, sim_b, c);
    add_bound(sim, sim_b, "--a", "a", c.a, "u(0)");
    add_bound(sim, sim_b, "--b", "b", c.b, "v(0)");
    bind_integration(sim, sim_b, c);
    add_bound(sim, sim_b, "--stride", "stride", c.stride, "output sample spacing");
    bind_output(sim, sim_b, c, true);

    auto* sw = app.add_subcommand("sweep", "theorem reports over a grid of initial data");
    bind_params(sw, sweep_b, c);
    bind_integration(sw, sweep_b, c);
    add_bound(sw, sweep_b, "--grid", "grid", c.grid, "points per axis");
    add_bound(sw, sweep_b, "--u-range", "u_range", c.u_range, "a range: lo hi")->expected(2);
    add_bound(sw, sweep_b, "--v-range", "v_range", c.v_range, "b range: lo hi")->expected(2);
    add_bound(sw, sweep_b, "--threads", "threads", c.threads, "worker threads (0: hardware)");
    add_bound(sw, sweep_b, "--seed", "seed", c.seed, "recorded for reproducibility; the sweep is deterministic");
    bind_output(sw, sweep_b, c, true);

    auto* sc = app.add_subcommand("scale", "reduction constants to the canonical problem");
    bind_params(sc, scale_b, c);
    bind_output(sc, scale_b, c, false);

    auto* lip = app.add_subcommand("lipschitz", "Monte-Carlo local Lipschitz estimate of the vector field");
    bind_params(lip, lip_b, c);
    add_bound(lip, lip_b, "--center", "center", c.center, "ball center (u, du, v, dv)")->expected(4);
    add_bound(lip, lip_b, "--delta", "delta", c.delta, "ball radius");
    add_bound(lip, lip_b, "--n", "n", c.n, "number of pairs (0: 10000)");
    add_bound(lip, lip_b, "--seed", "seed", c.seed, "sampling seed");
    bind_output(lip, lip_b, c, false);

    auto* area = app.add_subcommand("lemma-area", "largest coordinate of the closed Lambda branch");
    add_bound(area, area_b, "--p", "p", c.prm.p, "nonlinearity exponent p");
    add_bound(area, area_b, "--n", "n", c.n, "number of polar angles (0: 10000)");
    bind_output(area, area_b, c, false);

    std::vector<std::string> argv_s{"mixnls"};
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_s) argv.push_back(s.data());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_usage;
    }

    try {
        const std::vector<Binding>* bs = nullptr;
        if (curves->parsed()) bs = &curves_b;
        else if (sim->parsed()) bs = &sim_b;
        else if (sw->parsed()) bs = &sweep_b;
        else if (sc->parsed()) bs = &scale_b;
        else if (lip->parsed()) bs = &lip_b;
        else bs = &area_b;
        if (!c.config.empty()) apply_config(c.config, *bs);

        ordered_json cfg{{"command", app.get_subcommands().front()->get_name()}};
        if (area->parsed()) {
            cfg["p"] = c.prm.p;
        } else {
            cfg = merge(cfg, params_json(c.prm));
        }
        if (curves->parsed()) {
            cfg["n"] = c.n ? c.n : 400;
            cfg["clip"] = c.clip;
        } else if (sim->parsed()) {
            cfg["a"] = c.a;
            cfg["b"] = c.b;
            cfg = merge(cfg, integration_json(c));
        } else if (sw->parsed()) {
            cfg = merge(cfg, integration_json(c));
            cfg["grid"] = c.grid;
            cfg["u_range"] = c.u_range;
            cfg["v_range"] = c.v_range;
            cfg["seed"] = c.seed;
        } else if (lip->parsed()) {
            cfg["center"] = c.center;
            cfg["delta"] = c.delta;
            cfg["n"] = c.n ? c.n : 10000;
            cfg["seed"] = c.seed;
        } else if (area->parsed()) {
            cfg["n"] = c.n ? c.n : 10000;
        }
        if (bs == &curves_b || bs == &sim_b || bs == &sweep_b) cfg["format"] = c.format;

        if (curves->parsed()) return cmd_curves(c, cfg, out);
        if (sim->parsed()) return cmd_simulate(c, cfg, out);
        if (sw->parsed()) return cmd_sweep(c, cfg, out);
        if (sc->parsed()) return cmd_scale(c, cfg, out);
        if (lip->parsed()) return cmd_lipschitz(c, cfg, out);
        return cmd_lemma_area(c, cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

} // namespace mixnls::cli
