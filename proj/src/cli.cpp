#include "fle/cli.hpp"

#include "fle/acceptance.hpp"
#include "fle/blowup_lab.hpp"
#include "fle/bubbles.hpp"
#include "fle/greens.hpp"
#include "fle/nonlinear_solver.hpp"
#include "fle/params.hpp"
#include "fle/phi.hpp"
#include "fle/serialization.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <ostream>

namespace fle {

namespace {

// Options shared by the subcommands that build a problem.
struct ProblemOptions {
    int N = 1;
    double s = 0.25;
    std::string flavor = "spectral";
    int grid = 1024;
    double length = 1.0;
    double height = 1.0;
    double origin = 0.0;
    unsigned threads = 0;

    ModelDomain domain() const {
        if (N == 1) return ModelDomain::interval(length, grid, origin);
        if (N == 2) return ModelDomain::rectangle(length, height, grid);
        throw InvalidArgument("grids are available for N = 1 and N = 2 only");
    }
};

void add_constants_options(CLI::App* app, ProblemOptions& o) {
    app->add_option("--n", o.N, "dimension N")->capture_default_str();
    app->add_option("--s", o.s, "fractional order s")->capture_default_str();
}

void add_problem_options(CLI::App* app, ProblemOptions& o) {
    add_constants_options(app, o);
    app->add_option("--flavor", o.flavor, "spectral or restricted")->capture_default_str();
    app->add_option("--grid", o.grid, "interior nodes per axis")->capture_default_str();
    app->add_option("--length", o.length, "domain length (x axis)")->capture_default_str();
    app->add_option("--height", o.height, "domain height (N = 2)")->capture_default_str();
    app->add_option("--origin", o.origin, "left end of the interval (N = 1)")->capture_default_str();
    app->add_option("--threads", o.threads, "worker threads, 0 = hardware concurrency")->capture_default_str();
}

// Writes to the named file, or to out when the name is empty or "-".
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
    if (path.empty() || path == "-") {
        write(out);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open " + path + " for writing");
    write(f);
    if (!f) throw NumericalFailure("write to " + path + " failed");
}

std::vector<Point> points_from(const std::vector<double>& flat, int N) {
    if (flat.empty() || flat.size() % N != 0) throw InvalidArgument("--x needs a multiple of N coordinates");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < flat.size(); i += N) {
        Point p(N);
        for (int k = 0; k < N; ++k) p(k) = flat[i + k];
        pts.push_back(p);
    }
    return pts;
}

int cmd_constants(const ProblemOptions& o, bool as_json, std::ostream& out) {
    const auto k = sharp_constants(o.N, o.s);
    const Json j = to_json(k);
    if (as_json) {
        out << dump(j);
        return 0;
    }
    for (const auto& [key, value] : j.items()) out << key << ' ' << (value.is_number() ? format_double(value.get<double>()) : value.dump()) << '\n';
    return 0;
}

int cmd_green(const ProblemOptions& o, int probes, const std::string& path, std::ostream& out) {
    const auto d = o.domain();
    const GreenFunction g(d, parse_flavor(o.flavor), o.s);
    const auto table = make_green_table(g, default_probes(d, probes), o.threads);
    emit(path, out, [&](std::ostream& f) { write_csv(f, table); });
    return 0;
}

int cmd_bubble(const ProblemOptions& o, double lambda, std::ostream& out) {
    const auto params = make_params(o.N, o.s, 0.0, Flavor::Spectral);
    const auto k = sharp_constants(params);
    Json j;
    j["params"] = to_json(params);
    const auto sob = sobolev_ratio(bubble_profile(k, lambda), params);
    j["sobolev"] = {{"lambda", lambda}, {"ratio", sob.ratio}, {"S", k.S_Ns}, {"relative_error", std::abs(sob.ratio / k.S_Ns - 1.0)},
                    {"tail_fraction", sob.tail_fraction}};

    double kel = 0.0;
    const Point origin = Point::Zero(o.N);
    for (double mu : {0.5, 2.0})
        for (double r : {0.1, 1.0, 7.0}) {
            Point x = origin;
            x(0) = r;
            const BubbleParams bp{lambda, origin};
            const double image = bubble_eval(kelvin(bp, mu), x, k);
            kel = std::max(kel, std::abs(kelvin_transform(bp, mu, x, k) - image) / image);
        }
    j["kelvin_max_relative_error"] = kel;

    // Remainder of P w - w + c1 lambda^a H(., xi) at probes away from xi,
    // for halving lambda; its decay exponent should exceed a.
    const auto d = o.domain();
    const auto op = make_operator(d, params);
    const GreenFunction g(d, params);
    const double a = 0.5 * k.decay();
    Point center(o.N);
    for (int i = 0; i < o.N; ++i) center(i) = d.origin[i] + 0.5 * d.lengths[i];
    Json rows = Json::array();
    double previous = 0.0;
    for (double lam = 0.04; lam > 0.004; lam *= 0.5) {
        const auto pb = project_bubble({lam, center}, *op, k);
        double rem = 0.0;
        for (Eigen::Index j2 = 0; j2 < d.size(); ++j2) {
            const Point x = d.node(j2);
            if ((x - center).norm() < 0.25 * d.lengths[0] || d.boundary_distance(x) < 0.1 * d.lengths[0]) continue;
            rem = std::max(rem, std::abs(pb.pw.values(j2) - pb.w.values(j2) + k.c1 * std::pow(lam, a) * g.regular(x, center)));
        }
        Json row{{"lambda", lam}, {"remainder", rem}};
        row["exponent"] = previous > 0.0 ? std::log2(previous / rem) : std::numeric_limits<double>::quiet_NaN();
        previous = rem;
        rows.push_back(row);
    }
    j["expansion"] = {{"leading_exponent", a}, {"rows", rows}};
    out << dump(j);
    return 0;
}

int cmd_solve(const ProblemOptions& o, double eps, const std::string& csv, const std::string& json, std::ostream& out) {
    const auto params = make_params(o.N, o.s, eps, parse_flavor(o.flavor));
    const auto op = make_operator(o.domain(), params);
    NewtonOptions newton;
    newton.pre_iteration_tolerance = 1e-4;
    const auto r = newton_solve(*op, params, nehari_init(*op, params), newton);
    emit(csv, out, [&](std::ostream& f) { write_field_csv(f, r.u); });
    if (!json.empty()) emit(json, out, [&](std::ostream& f) { f << dump(to_json(r)); });
    return 0;
}

struct SweepFlags {
    double eps_start = 1.0;
    double ratio = 0.8;
    double eps_min = 1e-4;
    double min_cells = 5.0;
    std::string json;
    std::string csv;
};

int cmd_sweep(const ProblemOptions& o, const SweepFlags& f, std::ostream& out) {
    SweepOptions so;
    so.schedule.eps_start = f.eps_start;
    so.schedule.ratio = f.ratio;
    so.schedule.eps_min = f.eps_min;
    so.schedule.min_cells = f.min_cells;
    so.threads = o.threads;
    const auto sweep = run_sweep(o.domain(), make_params(o.N, o.s, f.eps_start, parse_flavor(o.flavor)), so);
    emit(f.json, out, [&](std::ostream& s) { s << dump(to_json(sweep)); });
    if (!f.csv.empty()) emit(f.csv, out, [&](std::ostream& s) { write_sweep_csv(s, sweep); });
    return 0;
}

int cmd_phi(const ProblemOptions& o, const std::vector<double>& xs, std::vector<double> bs, double b0, std::ostream& out) {
    const auto params = make_params(o.N, o.s, 0.0, parse_flavor(o.flavor));
    const GreenFunction g(o.domain(), params);
    PhiPoint p;
    p.x = points_from(xs, o.N);
    if (bs.empty()) bs.assign(p.x.size(), 1.0);
    if (bs.size() != p.x.size()) throw InvalidArgument("--b needs one weight per point");
    p.b = Eigen::Map<const Vector>(bs.data(), static_cast<Eigen::Index>(bs.size()));
    p.b0 = b0;
    out << dump(to_json(phi_critical(p, g, sharp_constants(params))));
    return 0;
}

int cmd_verify(bool quick, unsigned threads, const std::vector<int>& criteria, std::ostream& out) {
    AcceptanceOptions a;
    a.quick = quick;
    a.threads = threads;
    a.criteria = criteria;
    bool ok = true;
    run_acceptance(a, [&](const CriterionReport& r) {
        print_report(out, r);
        out.flush();
        ok = ok && r.passed();
    });
    return ok ? 0 : 1;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

// Appends "--key=value" for every config-file key whose flag is absent from
// the command line.  Array values are joined with commas.
std::vector<std::string> with_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    auto out = args;
    for (const auto& item : CLI::ConfigTOML().from_config(in)) {
        if (!item.parents.empty() || item.name == "config") continue;
        const std::string flag = "--" + item.name;
        if (has_flag(args, flag)) continue;
        std::string value;
        for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
        out.push_back(flag + "=" + value);
    }
    return out;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional Lane-Emden-Fowler blow-up laboratory", "fle"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fle 1.0");

    ProblemOptions po;
    bool as_json = false;
    auto* constants = app.add_subcommand("constants", "print the sharp constants for (N, s)");
    add_constants_options(constants, po);
    constants->add_flag("--json", as_json, "JSON instead of a table");

    int probes = 33;
    std::string path;
    auto* green = app.add_subcommand("green", "Green function table as CSV");
    add_problem_options(green, po);
    green->add_option("--probes", probes, "probe points per axis")->capture_default_str();
    green->add_option("--out", path, "output file, default stdout");

    double lambda = 1.0;
    auto* bubble = app.add_subcommand("bubble", "Sobolev, Kelvin and projected-bubble expansion checks (JSON)");
    add_problem_options(bubble, po);
    bubble->add_option("--lambda", lambda, "bubble scale for the Sobolev ratio")->capture_default_str();

    double eps = 0.5;
    std::string json_path;
    auto* solve = app.add_subcommand("solve", "solve at one eps; CSV field plus optional JSON sidecar");
    add_problem_options(solve, po);
    solve->add_option("--eps", eps, "subcriticality eps")->capture_default_str();
    solve->add_option("--out", path, "CSV output, default stdout");
    solve->add_option("--json", json_path, "JSON sidecar with solve metadata");

    SweepFlags sf;
    auto* sweep = app.add_subcommand("sweep", "eps continuation with blow-up diagnostics; JSON record and CSV rows");
    add_problem_options(sweep, po);
    sweep->add_option("--eps-start", sf.eps_start)->capture_default_str();
    sweep->add_option("--ratio", sf.ratio)->capture_default_str();
    sweep->add_option("--eps-min", sf.eps_min)->capture_default_str();
    sweep->add_option("--min-cells", sf.min_cells, "stop when the peak scale drops below this many cells")->capture_default_str();
    sweep->add_option("--json", sf.json, "JSON output, default stdout");
    sweep->add_option("--csv", sf.csv, "CSV rows output");

    std::vector<double> xs, bs;
    double b0 = 1.0;
    auto* phi = app.add_subcommand("phi", "critical point of the reduced energy from a starting configuration");
    add_problem_options(phi, po);
    phi->add_option("--x", xs, "initial peak coordinates, N per peak")->required()->delimiter(',');
    phi->add_option("--b", bs, "initial weights, default 1")->delimiter(',');
    phi->add_option("--b0", b0, "eps-coupling weight")->capture_default_str();

    bool quick = false;
    std::vector<int> criteria;
    auto* verify = app.add_subcommand("verify", "run the acceptance suite; exit 1 on any failed check");
    verify->add_flag("--quick", quick, "reduced grids");
    verify->add_option("--threads", po.threads)->capture_default_str();
    verify->add_option("--criteria", criteria, "subset of criteria 1-8")->delimiter(',')->check(CLI::Range(1, 8));

    std::string config_path;
    for (auto* sub : {constants, green, bubble, solve, sweep, phi, verify})
        sub->add_option("--config", config_path, "flat key = value file mirroring the flags; flags override it");

    try {
        const auto expanded = with_config(args);
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*constants) return cmd_constants(po, as_json, out);
        if (*green) return cmd_green(po, probes, path, out);
        if (*bubble) return cmd_bubble(po, lambda, out);
        if (*solve) return cmd_solve(po, eps, path, json_path, out);
        if (*sweep) return cmd_sweep(po, sf, out);
        if (*phi) return cmd_phi(po, xs, bs, b0, out);
        if (*verify) return cmd_verify(quick, po.threads, criteria, out);
    } catch (const InvalidArgument& e) {
        err << "fle: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "fle: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace fle
