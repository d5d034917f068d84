// bec: certification, sweeps, exact verification and random-sum bounds.
//
// Exit codes: 0 all checks pass, 2 a bound is violated, 1 operational error.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bec/bec.hpp"
#include "bec/serialize.hpp"

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Output {
    bec::json doc;
    std::string csv;
    bool pass = true;
};

struct Globals {
    std::string format = "json";
    std::string out;
    unsigned parallelism = 1;
    std::optional<double> tol;
};

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("cannot parse " + what + ": '" + s + "'");
    }
    if (used != s.size()) throw UsageError("cannot parse " + what + ": '" + s + "'");
    return v;
}

// "name:a=1,b=2" or "name:1,2" with positional keys.
std::map<std::string, double> parse_params(const std::string& body, const std::vector<std::string>& keys,
                                           const std::string& name) {
    std::map<std::string, double> out;
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    std::size_t pos = 0;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        std::string key;
        std::string value;
        if (eq == std::string::npos) {
            if (pos >= keys.size()) throw UsageError(name + ": too many parameters");
            key = keys[pos];
            value = item;
        } else {
            key = item.substr(0, eq);
            value = item.substr(eq + 1);
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                throw UsageError(name + ": unknown parameter '" + key + "'");
            }
        }
        out[key] = parse_double(value, name + "." + key);
        ++pos;
    }
    return out;
}

double require_param(const std::map<std::string, double>& p, const std::string& key, const std::string& name) {
    const auto it = p.find(key);
    if (it == p.end()) throw UsageError(name + ": missing parameter '" + key + "'");
    return it->second;
}

std::pair<std::string, std::string> split_preset(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) return {spec, ""};
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

// {"atoms": [{"x": -1.0, "p": 0.5}, {"x": 1.0, "p": 0.5}]}
bec::LatticeDistribution read_distribution_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open distribution file '" + path + "'");
    bec::json doc;
    try {
        in >> doc;
    } catch (const bec::json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
    if (!doc.contains("atoms") || !doc["atoms"].is_array() || doc["atoms"].empty()) {
        throw UsageError(path + ": expected a nonempty \"atoms\" array");
    }
    std::vector<bec::Atom> atoms;
    for (const auto& a : doc["atoms"]) {
        if (!a.is_object() || !a.contains("x") || !a.contains("p") || !a["x"].is_number() || !a["p"].is_number()) {
            throw UsageError(path + ": every atom needs numeric \"x\" and \"p\"");
        }
        atoms.push_back({a["x"].get<double>(), a["p"].get<double>()});
    }
    return bec::LatticeDistribution(std::move(atoms));
}

bec::LatticeDistribution parse_distribution(const std::string& spec) {
    const auto [name, body] = split_preset(spec);
    if (name == "rademacher" && body.empty()) return bec::rademacher();
    if (name == "two_point") {
        const auto p = parse_params(body, {"p"}, "two_point");
        return bec::two_point(require_param(p, "p", "two_point"));
    }
    return read_distribution_file(spec);
}

bec::CertifierOptions certifier_options(const Globals& g) {
    bec::CertifierOptions o;
    if (g.tol) o.tol = *g.tol;
    return o;
}

void progress(const std::string& line) { std::cerr << line << std::endl; }

Output cmd_constants() {
    Output o;
    o.doc = bec::constants_json();
    bec::CsvTable t({"name", "value"});
    for (const char* key : {"theta0", "kappa", "esseen_lower", "bhattacharya_bound"}) {
        t.row().cell(key).cell(o.doc[key].get<double>());
    }
    o.csv = t.str();
    return o;
}

void certificate_row(bec::CsvTable& t, const std::string& label, const bec::Certificate& c, double target, bool pass) {
    t.row()
        .cell(label)
        .cell(c.k)
        .cell(c.epsilon)
        .cell(c.n_mode.is_uniform() ? "uniform" : "finite")
        .cell(c.n_mode.n)
        .cell(c.t0)
        .cell(c.T)
        .cell(c.D)
        .cell(c.quad_error)
        .cell(c.C)
        .cell(target)
        .cell(pass);
}

const std::vector<std::string> kCertificateHeader = {"label", "k", "epsilon", "n_kind", "n", "t0", "T",
                                                     "D", "quad_error", "C", "target", "pass"};

const std::vector<std::string> kCellHeader = {"eps_lo", "eps_hi", "c_hi", "bracket", "depth", "pass"};

std::string sweep_csv(const bec::SweepReport& r) {
    bec::CsvTable t(kCellHeader);
    for (const auto& c : r.cells) {
        t.row().cell(c.eps_lo).cell(c.eps_hi).cell(c.c_hi).cell(c.bracket).cell(c.depth).cell(c.pass);
    }
    return t.str();
}

Output cmd_certify(int theorem, const std::string& mode, std::optional<double> target, const Globals& g) {
    bec::TheoremOptions opt;
    if (mode == "spot") {
        opt.mode = bec::CertifyMode::spot;
    } else if (mode == "full") {
        opt.mode = bec::CertifyMode::full;
    } else {
        throw UsageError("--mode must be spot or full");
    }
    opt.target = target;
    opt.threads = g.parallelism;
    opt.certifier = certifier_options(g);
    opt.progress = progress;
    const bec::TheoremReport r = theorem == 1 ? bec::certify_theorem1(opt) : bec::certify_theorem2(opt);
    if (!r.valid) throw std::runtime_error("quadrature did not converge for at least one certificate");

    Output o;
    o.doc = bec::to_json(r);
    o.pass = r.pass;
    bec::CsvTable t(kCertificateHeader);
    for (const auto& s : r.spots) certificate_row(t, s.label, s.certificate, s.target, s.pass);
    o.csv = t.str();
    if (r.sweep) o.csv += "\n" + sweep_csv(*r.sweep);
    if (!r.pass) {
        for (const auto& s : r.spots) {
            if (!s.pass) std::cerr << "violated: " << s.label << " C=" << s.certificate.C << " > " << s.target << '\n';
        }
        for (const auto& x : r.regimes) {
            if (!x.holds) std::cerr << "violated: " << x.label << " " << x.value << " > " << x.limit << '\n';
        }
        if (r.sweep) {
            for (const auto& c : r.sweep->failing_cells()) {
                std::cerr << "violated cell: [" << c.eps_lo << ", " << c.eps_hi << "] bracket=" << c.bracket << '\n';
            }
        }
    }
    return o;
}

struct SweepArgs {
    double k = 1.0;
    double eps_lo = 0.1;
    double eps_hi = 1.78;
    double target = bec::kTheorem2Constant;
    int cells = 25;
    int max_depth = 6;
    std::int64_t N = 200;
    std::string paths = "uniform";
};

Output cmd_sweep(const SweepArgs& a, const Globals& g) {
    bec::SweepPolicy p;
    p.cells = a.cells;
    p.max_depth = a.max_depth;
    p.threads = g.parallelism;
    p.mode = a.paths;
    p.progress = progress;
    bool finite = false;
    bool uniform = false;
    if (a.paths == "uniform") {
        uniform = true;
    } else if (a.paths == "finite") {
        finite = true;
    } else if (a.paths == "both") {
        finite = uniform = true;
    } else {
        throw UsageError("--paths must be uniform, finite or both");
    }
    const std::int64_t N = a.N;
    p.n_policy = [=](double) { return bec::NPolicy{N, finite, uniform}; };
    const bec::SweepReport r = bec::sweep(a.k, a.eps_lo, a.eps_hi, a.target, p, certifier_options(g));
    for (const auto& c : r.extremal_points) {
        if (!c.valid) throw std::runtime_error("quadrature did not converge at the extremal point");
    }
    Output o;
    o.doc = bec::to_json(r);
    o.pass = r.pass;
    o.csv = sweep_csv(r);
    for (const auto& c : r.failing_cells()) {
        std::cerr << "violated cell: [" << c.eps_lo << ", " << c.eps_hi << "] bracket=" << c.bracket << '\n';
    }
    return o;
}

Output cmd_empirical(const std::string& dist, std::int64_t n_max, const std::string& bound, const Globals& g) {
    const bec::LatticeDistribution d = bec::standardize(parse_distribution(dist));
    std::vector<bec::BoundSpec> bounds;
    if (bound == "theorem1" || bound == "both") bounds.push_back({bec::BoundSpec::Kind::theorem1});
    if (bound == "theorem2" || bound == "both") bounds.push_back({bec::BoundSpec::Kind::theorem2});
    if (bounds.empty()) throw UsageError("--bound must be theorem1, theorem2 or both");

    Output o;
    o.doc = bec::json{{"distribution", dist}, {"beta3", bec::moments(d).beta3}, {"rows", bec::json::array()}};
    bec::CsvTable t({"bound", "n", "distance", "bound_value", "margin", "pass"});
    for (const auto& b : bounds) {
        for (const auto& row : bec::verify_inequality(d, n_max, b, g.parallelism)) {
            bec::json j = bec::to_json(row);
            j["bound_kind"] = b.name();
            o.doc["rows"].push_back(j);
            t.row().cell(b.name()).cell(row.n).cell(row.distance).cell(row.bound).cell(row.margin).cell(row.pass);
            o.pass = o.pass && row.pass;
        }
    }
    o.doc["pass"] = o.pass;
    o.csv = t.str();
    return o;
}

Output cmd_poisson(const std::string& dist, const std::vector<double>& lambdas, double tail_tol, const Globals& g) {
    const bec::LatticeDistribution d = parse_distribution(dist);
    const bec::MomentProfile m = bec::moments(d);
    struct Row {
        double lambda, distance, truncation_mass, bound, margin;
        bool pass;
    };
    const auto rows = bec::parallel_map(
        lambdas.size(),
        [&](std::size_t i) {
            const double lambda = lambdas[i];
            const bec::CompoundPoissonResult cp = bec::compound_poisson(d, lambda, tail_tol);
            Row r{};
            r.lambda = lambda;
            r.distance = bec::kolmogorov_to_normal(cp.law);
            r.truncation_mass = cp.truncation_mass;
            r.bound = bec::poisson_be_bound(m, lambda);
            // The untruncated distance is at most distance + truncation_mass.
            r.margin = r.bound - (r.distance + r.truncation_mass);
            r.pass = r.margin > 0.0;
            return r;
        },
        g.parallelism);

    Output o;
    o.doc = bec::json{{"distribution", dist},
                      {"moments", {{"mu", m.mu}, {"sigma2", m.sigma2}, {"beta3", m.beta3}}},
                      {"tail_tol", tail_tol},
                      {"rows", bec::json::array()}};
    bec::CsvTable t({"lambda", "distance", "truncation_mass", "bound", "margin", "pass"});
    for (const Row& r : rows) {
        o.doc["rows"].push_back(bec::json{{"lambda", r.lambda},
                                          {"distance", r.distance},
                                          {"truncation_mass", r.truncation_mass},
                                          {"bound", r.bound},
                                          {"margin", r.margin},
                                          {"pass", r.pass}});
        t.row().cell(r.lambda).cell(r.distance).cell(r.truncation_mass).cell(r.bound).cell(r.margin).cell(r.pass);
        o.pass = o.pass && r.pass;
    }
    o.doc["pass"] = o.pass;
    o.csv = t.str();
    return o;
}

Output cmd_mixed(const std::string& scenario, const bec::MomentProfile& m) {
    const auto [name, body] = split_preset(scenario);
    bec::json row{{"scenario", scenario}};
    double bound = 0.0;
    std::optional<double> eps;
    double delta = 0.0;
    double t = 0.0;
    if (name == "gamma" || name == "exponential") {
        if (m.mu != 0.0) throw UsageError(name + " scenario covers zero-mean summands only (pass --mu 0)");
        const auto p = name == "gamma" ? parse_params(body, {"r", "t"}, name) : parse_params(body, {"t"}, name);
        const double r = name == "gamma" ? require_param(p, "r", name) : 1.0;
        t = require_param(p, "t", name);
        const double beta3 = m.beta3 / std::pow(m.sigma2, 1.5);
        const double inv = bec::gamma_inverse_sqrt_moment(r, t);
        bound = bec::theorem5_bound(beta3, inv, 0.0);
        row["r"] = r;
        row["inv_sqrt_moment"] = inv;
    } else if (name == "heavy") {
        const auto p = parse_params(body, {"alpha", "t"}, name);
        const bec::HeavyTailStructure h(require_param(p, "alpha", name));
        t = require_param(p, "t", name);
        delta = h.delta_hat(t);
        const double mad = h.mean_abs_dev(t);
        const auto r = bec::theorem8_bound(m, h.abs_mean(), mad, delta, t);
        bound = r.value;
        eps = r.epsilon;
        row["alpha"] = h.alpha();
        row["E_abs_V"] = h.abs_mean();
        row["mean_abs_dev"] = mad;
    } else if (name == "general") {
        const auto p = parse_params(body, {"ell", "s", "ev", "delta", "t"}, name);
        bec::StructuralSpec s;
        s.ell = require_param(p, "ell", name);
        s.s = require_param(p, "s", name);
        s.E_abs_V = require_param(p, "ev", name);
        s.delta_t = p.count("delta") ? p.at("delta") : 0.0;
        t = require_param(p, "t", name);
        const auto r = bec::theorem6_bound(m, s, t);
        bound = r.value;
        eps = r.epsilon;
        delta = s.delta_t;
        row["ell"] = s.ell;
        row["s"] = s.s;
        row["E_abs_V"] = s.E_abs_V;
    } else {
        throw UsageError("unknown scenario '" + name + "' (gamma, exponential, heavy, general)");
    }
    row["t"] = t;
    row["delta"] = delta;
    row["epsilon"] = eps ? bec::json(*eps) : bec::json(nullptr);
    row["bound"] = bound;
    row["pass"] = std::isfinite(bound);

    Output o;
    o.doc = bec::json{{"moments", {{"mu", m.mu}, {"sigma2", m.sigma2}, {"beta3", m.beta3}}},
                      {"rows", bec::json::array({row})}};
    o.pass = std::isfinite(bound);
    o.doc["pass"] = o.pass;
    bec::CsvTable tab({"scenario", "t", "delta", "epsilon", "bound", "pass"});
    tab.row().cell(scenario).cell(t).cell(delta);
    if (eps) {
        tab.cell(*eps);
    } else {
        tab.cell("");
    }
    tab.cell(bound).cell(o.pass);
    o.csv = tab.str();
    return o;
}

void emit(const Output& o, const Globals& g) {
    const std::string text = g.format == "csv" ? o.csv : o.doc.dump(2) + "\n";
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + g.out + "'");
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Berry-Esseen constant certification and random-sum bounds"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", g.out, "Write the report to this path instead of stdout");
    app.add_option("--parallelism", g.parallelism, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option_function<double>("--tol", [&](double v) { g.tol = v; }, "Quadrature tolerance")
        ->check(CLI::PositiveNumber);

    auto* constants = app.add_subcommand("constants", "Universal constants");

    auto* certify = app.add_subcommand("certify", "Certify a theorem constant");
    int theorem = 1;
    std::string mode = "spot";
    std::optional<double> target;
    certify->add_option("--theorem", theorem, "1 or 2")->required()->check(CLI::IsMember({1, 2}));
    certify->add_option("--mode", mode, "spot or full")->check(CLI::IsMember({"spot", "full"}));
    certify->add_option_function<double>("--target", [&](double v) { target = v; }, "Override the target constant");

    auto* sweep = app.add_subcommand("sweep", "Bracketed sweep of C(eps) over an interval");
    SweepArgs sa;
    sweep->add_option("--k", sa.k, "Shift k in [0, 1]");
    sweep->add_option("--eps-lo", sa.eps_lo, "Lower end of the eps interval");
    sweep->add_option("--eps-hi", sa.eps_hi, "Upper end of the eps interval");
    sweep->add_option("--target", sa.target, "Target constant");
    sweep->add_option("--cells", sa.cells, "Initial geometric cells")->check(CLI::PositiveNumber);
    sweep->add_option("--max-depth", sa.max_depth, "Bisection depth for failing cells")->check(CLI::NonNegativeNumber);
    sweep->add_option("--N", sa.N, "Threshold N of the uniform-in-n bound")->check(CLI::PositiveNumber);
    sweep->add_option("--paths", sa.paths, "uniform, finite or both")
        ->check(CLI::IsMember({"uniform", "finite", "both"}));

    auto* empirical = app.add_subcommand("empirical", "Exact Kolmogorov distances of standardized sums");
    std::string dist = "rademacher";
    std::int64_t n_max = 20;
    std::string bound = "both";
    empirical->add_option("--dist", dist, "rademacher, two_point:p=P or a JSON atoms file");
    empirical->add_option("--n-max", n_max, "Largest n")->check(CLI::PositiveNumber);
    empirical->add_option("--bound", bound, "theorem1, theorem2 or both")
        ->check(CLI::IsMember({"theorem1", "theorem2", "both"}));

    auto* poisson = app.add_subcommand("poisson", "Exact distances of compound Poisson sums");
    std::vector<double> lambdas;
    double tail_tol = 1e-10;
    poisson->add_option("--dist", dist, "rademacher, two_point:p=P or a JSON atoms file");
    poisson->add_option("--lambda", lambdas, "Poisson intensity (repeatable)")->required();
    poisson->add_option("--tail-tol", tail_tol, "Poisson truncation tail bound");

    auto* mixed = app.add_subcommand("mixed", "Bounds for mixed Poisson random sums");
    std::string scenario;
    bec::MomentProfile mp{0.0, 1.0, 1.0};
    mixed->add_option("--scenario", scenario, "gamma:r=R,t=T | exponential:t=T | heavy:alpha=A,t=T | "
                                              "general:ell=L,s=S,ev=E,delta=D,t=T")
        ->required();
    mixed->add_option("--beta3", mp.beta3, "E|X|^3");
    mixed->add_option("--mu", mp.mu, "E X");
    mixed->add_option("--sigma2", mp.sigma2, "D X");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        Output o;
        if (*constants) {
            o = cmd_constants();
        } else if (*certify) {
            o = cmd_certify(theorem, mode, target, g);
        } else if (*sweep) {
            o = cmd_sweep(sa, g);
        } else if (*empirical) {
            o = cmd_empirical(dist, n_max, bound, g);
        } else if (*poisson) {
            for (double l : lambdas) {
                if (!(l > 0.0)) throw UsageError("--lambda must be positive");
            }
            o = cmd_poisson(dist, lambdas, tail_tol, g);
        } else if (*mixed) {
            o = cmd_mixed(scenario, mp);
        }
        emit(o, g);
        return o.pass ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
