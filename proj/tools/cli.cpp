#include "lvelab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lvelab/errors.hpp"
#include "lvelab/forest.hpp"
#include "lvelab/io.hpp"
#include "lvelab/lve.hpp"
#include "lvelab/oracle.hpp"
#include "lvelab/propagator.hpp"
#include "lvelab/ribbon.hpp"
#include "lvelab/wick.hpp"

namespace lvelab::cli {

namespace {

using io::Json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw UsageError(message);
}

enum class Format { Json, Csv, Pretty };

struct Report {
    Json result;
    std::string csv;
    std::string pretty;
    /// Computed, but the result failed its own check (exit 1).
    bool failed = false;
};

struct Command {
    CLI::App* app = nullptr;
    Format default_format = Format::Json;
    std::function<Json()> config;
    std::function<void()> validate;
    std::function<Report(const WorkerPool&)> execute;
};

struct Globals {
    std::string format;
    std::string output;
    int jobs = 1;
    std::uint64_t seed = 42;
};

std::string num(double v, int precision = 10) {
    std::ostringstream out;
    out << std::setprecision(precision) << v;
    return out.str();
}

// Settings that a module would reject are usage errors when caught here.
template <class F>
void checked(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

std::string series_rows(const SeriesInN& s, int max_order) {
    std::ostringstream out;
    for (int k = 1; k <= max_order; ++k) out << "order " << k << ": " << s.coefficient(k).pretty() << '\n';
    return out.str();
}

// ---------------------------------------------------------------- forests

Command forests_command(CLI::App& app) {
    auto* sub = app.add_subcommand("forests", "Enumerate forests or spanning trees over n labeled vertices");
    struct Options {
        int n = 0;
        bool trees_only = false;
        int cap = forest::kDefaultEnumerationCap;
    };
    auto o = std::make_shared<Options>();
    sub->add_option("--n", o->n, "Vertex count")->required();
    sub->add_flag("--trees-only", o->trees_only, "Spanning trees only");
    sub->add_option("--cap", o->cap, "Enumeration cap")->capture_default_str();

    Command c;
    c.app = sub;
    c.config = [o] { return Json{{"n", o->n}, {"trees_only", o->trees_only}, {"cap", o->cap}}; };
    c.validate = [o] {
        require(o->cap >= 1 && o->cap <= forest::kMaxVertices,
                "--cap must lie in [1, " + std::to_string(forest::kMaxVertices) + "]");
        require(o->n >= 1, "--n must be positive");
        require(o->n <= o->cap, "--n " + std::to_string(o->n) + " exceeds the enumeration cap " + std::to_string(o->cap));
    };
    c.execute = [o](const WorkerPool&) {
        const auto forests = forest::enumerate_forests(o->n, o->trees_only, {o->cap});
        Report r;
        Json list = Json::array();
        std::ostringstream csv, pretty;
        csv << "index,edges\n";
        pretty << forests.size() << (o->trees_only ? " trees" : " forests") << " over " << o->n << " vertices\n";
        for (std::size_t k = 0; k < forests.size(); ++k) {
            list.push_back(io::to_json(forests[k]));
            csv << k << ',';
            bool first = true;
            for (auto e : forests[k].edges()) {
                csv << (first ? "" : ";") << int(e.i) << '-' << int(e.j);
                first = false;
            }
            csv << '\n';
            pretty << forest::to_string(forests[k]) << '\n';
        }
        r.result = Json{{"count", forests.size()}, {"forests", list}};
        r.csv = csv.str();
        r.pretty = pretty.str();
        return r;
    };
    return c;
}

// ----------------------------------------------------------------- ribbon

std::pair<int, int> parse_pair(const std::string& text) {
    const auto colon = text.find(':');
    require(colon != std::string::npos, "--pair expects SLOT:SLOT, got '" + text + "'");
    try {
        std::size_t used_a = 0, used_b = 0;
        const int a = std::stoi(text.substr(0, colon), &used_a);
        const int b = std::stoi(text.substr(colon + 1), &used_b);
        require(used_a == colon && used_b == text.size() - colon - 1, "--pair expects SLOT:SLOT, got '" + text + "'");
        return {a, b};
    } catch (const std::logic_error&) {
        throw UsageError("--pair expects SLOT:SLOT, got '" + text + "'");
    }
}

Command ribbon_command(CLI::App& app) {
    auto* sub = app.add_subcommand("ribbon", "Ribbon-graph invariants of one pairing, or the census of all vacuum pairings");
    struct Options {
        int n = 1;
        std::vector<std::string> pairs;
        std::vector<int> external;
        bool census = false;
        std::string model = "ordinary";
    };
    auto o = std::make_shared<Options>();
    sub->add_option("--n", o->n, "Number of quartic vertices")->capture_default_str();
    sub->add_option("--pair", o->pairs, "Contraction SLOT:SLOT (repeatable); slots 4v-3..4v carry Phi, Phi+, Phi, Phi+");
    sub->add_option("--external", o->external, "External (unpaired) slots")->delimiter(',');
    sub->add_flag("--census", o->census, "Face histogram of all (2n)! vacuum pairings");
    sub->add_option("--model", o->model, "Propagator class for the divergence degree")->capture_default_str();

    Command c;
    c.app = sub;
    c.config = [o] {
        Json cfg{{"n", o->n}, {"census", o->census}};
        if (!o->census) {
            Json pairs = Json::array();
            for (const auto& p : o->pairs) {
                auto [a, b] = parse_pair(p);
                pairs.push_back(Json::array({a, b}));
            }
            cfg["pairing"] = pairs;
            cfg["external"] = o->external;
            cfg["model"] = o->model;
        }
        return cfg;
    };
    c.validate = [o] {
        require(o->n >= 1, "--n must be positive");
        if (o->census) {
            require(o->n <= wick::kDefaultOrderCap, "--census supports n <= " + std::to_string(wick::kDefaultOrderCap));
            require(o->pairs.empty() && o->external.empty(), "--census takes no --pair or --external");
            return;
        }
        for (const auto& p : o->pairs) parse_pair(p);
        checked([&] { propagator::class_from_string(o->model); });
    };
    c.execute = [o](const WorkerPool& pool) {
        Report r;
        std::ostringstream pretty, csv;
        if (o->census) {
            const auto census = wick::pairing_census(o->n, pool);
            r.result = io::to_json(census);
            pretty << "order " << census.order << ": " << census.total << " pairings, " << census.connected
                   << " connected\n";
            csv << "faces,all,connected\n";
            for (auto [f, count] : census.all_by_faces) {
                auto it = census.connected_by_faces.find(f);
                const std::uint64_t connected = it == census.connected_by_faces.end() ? 0 : it->second;
                pretty << "  F = " << f << ": " << count << " pairings, " << connected << " connected\n";
                csv << f << ',' << count << ',' << connected << '\n';
            }
            r.pretty = pretty.str();
            r.csv = csv.str();
            return r;
        }
        std::vector<std::pair<int, int>> pairs;
        for (const auto& p : o->pairs) pairs.push_back(parse_pair(p));
        const auto g = ribbon::RibbonGraph::from_pairing(o->n, pairs, o->external);
        const auto inv = ribbon::invariants(g);
        Json faces = Json::array();
        for (const auto& f : ribbon::faces(g)) faces.push_back(f);
        r.result = Json{{"invariants", io::to_json(inv)}, {"faces", faces}};
        pretty << "V=" << inv.vertices << " E=" << inv.edges << " F=" << inv.faces << " g=" << inv.genus
               << " B=" << inv.broken_faces << " ext=" << inv.external_legs
               << " connected=" << (inv.connected ? "yes" : "no") << '\n';
        if (inv.connected) {
            const auto d = ribbon::divergence_degree(inv, propagator::class_from_string(o->model));
            r.result["divergence"] = io::to_json(d);
            pretty << "omega=" << d.omega << (d.two_broken_four_point ? " (two broken faces, four-point)" : "")
                   << (d.unclassified_broken_faces ? " (B > 2 unclassified)" : "") << '\n';
        } else {
            r.result["divergence"] = nullptr;
        }
        csv << "V,E,F,genus,B,ext,components,connected\n"
            << inv.vertices << ',' << inv.edges << ',' << inv.faces << ',' << inv.genus << ',' << inv.broken_faces
            << ',' << inv.external_legs << ',' << inv.components << ',' << (inv.connected ? 1 : 0) << '\n';
        r.pretty = pretty.str();
        r.csv = csv.str();
        return r;
    };
    return c;
}

// ----------------------------------------------------------------- series

Command series_command(CLI::App& app) {
    auto* sub = app.add_subcommand("series", "Exact perturbative coefficients of Z or log Z by Wick enumeration");
    struct Options {
        int order = 4;
        std::string kind = "logz";
        int N = 0;
        bool genus = false;
        bool borel = false;
        double residual_tol = lve::BorelConfig{}.residual_tol;
    };
    auto o = std::make_shared<Options>();
    sub->add_option("--order", o->order, "Highest order in lambda")->capture_default_str();
    sub->add_option("--kind", o->kind, "logz or z")->capture_default_str();
    sub->add_option("--N", o->N, "Evaluate at this matrix size (0 keeps N symbolic)")->capture_default_str();
    sub->add_flag("--genus", o->genus, "Split log Z coefficients by genus");
    sub->add_flag("--borel", o->borel, "Factorial-growth fit of |c_n|/n! at the given N");
    sub->add_option("--residual-tol", o->residual_tol, "Borel residual bound")->capture_default_str();

    Command c;
    c.app = sub;
    c.default_format = Format::Pretty;
    c.config = [o] {
        Json cfg{{"order", o->order}, {"kind", o->kind}, {"N", o->N}, {"genus", o->genus}, {"borel", o->borel}};
        if (o->borel) cfg["residual_tol"] = o->residual_tol;
        return cfg;
    };
    c.validate = [o] {
        require(o->order >= 1 && o->order <= wick::kDefaultOrderCap,
                "--order must lie in [1, " + std::to_string(wick::kDefaultOrderCap) + "]");
        require(o->kind == "logz" || o->kind == "z", "--kind must be logz or z");
        require(o->N >= 0, "--N must be non-negative");
        require(!o->genus || o->kind == "logz", "--genus applies to log Z only");
        if (o->borel) {
            require(o->N >= 1, "--borel needs a matrix size --N");
            require(o->order >= 4, "--borel needs --order >= 4");
            require(o->residual_tol > 0.0, "--residual-tol must be positive");
        }
    };
    c.execute = [o](const WorkerPool& pool) {
        const SeriesInN s = o->kind == "z" ? wick::z_series(o->order, {}, pool) : wick::log_z_series(o->order, {}, pool);
        Report r;
        r.result = Json{{"series", io::to_json(s)}};
        std::ostringstream pretty;
        pretty << series_rows(s, o->order);
        r.csv = wick::to_csv(s);
        if (o->N > 0) {
            Json values = Json::array();
            std::ostringstream csv;
            csv << "order,N,coefficient,value\n";
            pretty << "at N = " << o->N << ":\n";
            for (int k = 1; k <= o->order; ++k) {
                const Rational v = s.coefficient(k).at(o->N);
                values.push_back(Json{{"order", k}, {"coefficient", to_fraction_string(v)}, {"value", v.get_d()}});
                csv << k << ',' << o->N << ',' << to_fraction_string(v) << ',' << num(v.get_d(), 17) << '\n';
                pretty << "order " << k << ": " << v.get_str() << " (" << num(v.get_d()) << ")\n";
            }
            r.result["at_N"] = values;
            r.csv = csv.str();
        }
        if (o->genus) {
            const auto split = wick::genus_split(s);
            r.result["genus"] = io::to_json(split);
            for (const auto& [g, orders] : split)
                for (const auto& [k, coef] : orders)
                    pretty << "genus " << g << ", order " << k << ": " << coef.get_str() << '\n';
        }
        if (o->borel) {
            std::vector<Rational> coefficients;
            for (int k = 1; k <= o->order; ++k) coefficients.push_back(s.coefficient(k).at(o->N));
            const auto fit = lve::borel_growth_check(coefficients, {o->residual_tol});
            r.result["borel"] = io::to_json(fit);
            pretty << "Borel fit: C = " << num(fit.C) << ", K = " << num(fit.K)
                   << ", max residual = " << num(fit.max_residual) << (fit.pass ? " (pass)" : " (FAIL)") << '\n';
            r.failed = !fit.pass;
        }
        r.pretty = pretty.str();
        return r;
    };
    return c;
}

// -------------------------------------------------------------------- lve

struct IntegratorOptions {
    std::string kind;  // empty: quadrature at N = 1, Monte Carlo otherwise
    std::uint64_t samples = McConfig{}.samples;
    double abs_tol = 0.0;
    double rel_tol = 0.0;

    std::string resolved(int N) const { return kind.empty() ? (N == 1 ? "quadrature" : "mc") : kind; }

    lve::Integrator build(int N, std::uint64_t seed) const {
        if (resolved(N) == "mc") return McConfig{seed, samples, N};
        QuadratureConfig q;
        q.abs_tol = abs_tol;
        q.rel_tol = rel_tol;
        return q;
    }

    Json config(int N, std::uint64_t seed) const {
        if (resolved(N) == "mc") return Json{{"kind", "mc"}, {"samples", samples}, {"seed", seed}};
        return Json{{"kind", "quadrature"}, {"abs_tol", abs_tol}, {"rel_tol", rel_tol}};
    }

    void add_to(CLI::App* sub) {
        sub->add_option("--integrator", kind, "quadrature or mc (default: quadrature at N = 1, mc otherwise)");
        sub->add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();
        sub->add_option("--abs-tol", abs_tol, "Quadrature absolute tolerance")->capture_default_str();
        sub->add_option("--rel-tol", rel_tol, "Quadrature relative tolerance")->capture_default_str();
    }

    void validate(int N) const {
        require(kind.empty() || kind == "quadrature" || kind == "mc", "--integrator must be quadrature or mc");
        if (resolved(N) == "mc") {
            require(samples >= 2, "--samples must be at least 2");
        } else {
            require(abs_tol > 0.0 && rel_tol > 0.0, "quadrature tolerances must be positive");
        }
    }
};

Command lve_command(CLI::App& app, const Globals& globals) {
    auto* sub = app.add_subcommand("lve", "Loop vertex expansion of log Z, order by order, against the oracle");
    struct Options {
        double lambda = std::numeric_limits<double>::quiet_NaN();
        int N = 1;
        int orders = lve::kDefaultTreeCap;
        bool symbolic = false;
        IntegratorOptions integrator;
    };
    auto o = std::make_shared<Options>();
    o->integrator.abs_tol = 1e-6;
    o->integrator.rel_tol = 1e-4;
    sub->add_option("--lambda", o->lambda, "Coupling (real, >= 0)");
    sub->add_option("--N", o->N, "Matrix size")->capture_default_str();
    sub->add_option("--orders", o->orders, "Highest tree order n")->capture_default_str();
    sub->add_flag("--symbolic", o->symbolic, "Exact lambda-series of the tree expansion with N symbolic");
    o->integrator.add_to(sub);

    Command c;
    c.app = sub;
    c.config = [o, &globals] {
        if (o->symbolic) return Json{{"symbolic", true}, {"orders", o->orders}};
        return Json{{"symbolic", false},
                    {"lambda", o->lambda},
                    {"N", o->N},
                    {"orders", o->orders},
                    {"integrator", o->integrator.config(o->N, globals.seed)}};
    };
    c.validate = [o] {
        if (o->symbolic) {
            require(o->orders >= 1 && o->orders <= lve::kDefaultSymbolicCap,
                    "--symbolic supports --orders in [1, " + std::to_string(lve::kDefaultSymbolicCap) + "]");
            return;
        }
        require(!std::isnan(o->lambda), "--lambda is required");
        checked([&] { lve::LoopVertexModel{o->N, o->lambda}.validate(); });
        require(o->orders >= 1 && o->orders <= lve::kDefaultTreeCap,
                "--orders must lie in [1, " + std::to_string(lve::kDefaultTreeCap) + "]");
        o->integrator.validate(o->N);
        if (o->integrator.resolved(o->N) == "quadrature") require(o->N == 1, "quadrature needs --N 1; use --integrator mc");
        else require(o->N <= 3, "Monte Carlo tree amplitudes support N <= 3");
    };
    c.execute = [o, &globals](const WorkerPool& pool) {
        Report r;
        std::ostringstream pretty, csv;
        if (o->symbolic) {
            const SeriesInN s = lve::lve_series(o->orders, pool);
            r.result = Json{{"series", io::to_json(s)}};
            r.pretty = series_rows(s, o->orders);
            r.csv = wick::to_csv(s);
            return r;
        }
        const lve::LoopVertexModel model{o->N, o->lambda};
        const auto estimate = lve::lve_sum(model, o->orders, o->integrator.build(o->N, globals.seed), pool);
        r.result = io::to_json(estimate);
        csv << "n,t_n,error,trees,partial_sum\n";
        pretty << "lambda = " << num(o->lambda) << ", N = " << o->N << '\n';
        pretty << std::left << std::setw(4) << "n" << std::setw(20) << "t_n" << std::setw(14) << "error"
               << std::setw(10) << "trees" << "partial sum\n";
        for (std::size_t k = 0; k < estimate.orders.size(); ++k) {
            const auto& t = estimate.orders[k];
            csv << t.n << ',' << num(t.t_n, 17) << ',' << num(t.error, 17) << ',' << t.trees << ','
                << num(estimate.partial_sums[k], 17) << '\n';
            pretty << std::left << std::setw(4) << t.n << std::setw(20) << num(t.t_n) << std::setw(14)
                   << num(t.error, 3) << std::setw(10) << t.trees << num(estimate.partial_sums[k]) << '\n';
        }
        if (estimate.oracle) {
            pretty << "log Z oracle = " << num(estimate.oracle->value) << " +- " << num(estimate.oracle->error, 3)
                   << ", difference = " << num(estimate.partial_sums.back() - estimate.oracle->value, 3) << '\n';
        }
        pretty << "resolvent audit: " << estimate.audit.samples << " samples, " << estimate.audit.violations
               << " violations, max norm " << num(estimate.audit.max_norm) << '\n';
        r.failed = estimate.audit.violations > 0;
        r.pretty = pretty.str();
        r.csv = csv.str();
        return r;
    };
    return c;
}

// ----------------------------------------------------------------- oracle

Command oracle_command(CLI::App& app, const Globals& globals) {
    auto* sub = app.add_subcommand("oracle", "Reference value of Z(lambda, N)");
    struct Options {
        double lambda = std::numeric_limits<double>::quiet_NaN();
        int N = 1;
        std::string route = "direct";
        IntegratorOptions integrator;
    };
    auto o = std::make_shared<Options>();
    o->integrator.abs_tol = 1e-12;
    o->integrator.rel_tol = 1e-12;
    sub->add_option("--lambda", o->lambda, "Coupling (real, >= 0)")->required();
    sub->add_option("--N", o->N, "Matrix size")->capture_default_str();
    sub->add_option("--route", o->route, "direct (Phi integral) or sigma (intermediate field)")->capture_default_str();
    o->integrator.add_to(sub);

    Command c;
    c.app = sub;
    c.config = [o, &globals] {
        return Json{{"lambda", o->lambda},
                    {"N", o->N},
                    {"route", o->route},
                    {"integrator", o->integrator.config(o->N, globals.seed)}};
    };
    c.validate = [o] {
        require(o->route == "direct" || o->route == "sigma", "--route must be direct or sigma");
        checked([&] { lve::LoopVertexModel{o->N, o->lambda}.validate(); });
        o->integrator.validate(o->N);
        const bool mc = o->integrator.resolved(o->N) == "mc";
        if (o->route == "direct") require(mc ? o->N <= 3 : o->N == 1, mc ? "direct Monte Carlo supports N <= 3"
                                                                        : "direct quadrature needs --N 1");
        else require(mc ? o->N <= 8 : o->N <= 4, mc ? "sigma Monte Carlo supports N <= 8"
                                                    : "sigma quadrature supports N <= 4");
    };
    c.execute = [o, &globals](const WorkerPool& pool) {
        const lve::Integrator integrator = o->integrator.build(o->N, globals.seed);
        Estimate z;
        if (o->route == "sigma") {
            z = lve::sigma_z({o->N, o->lambda}, integrator, pool);
        } else if (const auto* q = std::get_if<QuadratureConfig>(&integrator)) {
            z = oracle::z_reference(o->lambda, o->N, *q);
        } else {
            z = oracle::z_reference(o->lambda, std::get<McConfig>(integrator), pool);
        }
        Report r;
        r.result = Json{{"Z", io::to_json(z)}, {"log_Z", std::log(z.value)}};
        r.pretty = "Z(lambda = " + num(o->lambda) + ", N = " + std::to_string(o->N) + ") = " + num(z.value, 12) +
                   " +- " + num(z.error, 3) + "\n";
        r.csv = "lambda,N,value,error\n" + num(o->lambda, 17) + "," + std::to_string(o->N) + "," + num(z.value, 17) +
                "," + num(z.error, 17) + "\n";
        return r;
    };
    return c;
}

// ---------------------------------------------------------------- compare

SeriesInN load_series(const std::string& source, int order, const WorkerPool& pool) {
    if (source == "wick") return wick::log_z_series(order, {}, pool);
    if (source == "lve") return lve::lve_series(order, pool);
    std::ifstream in(source);
    if (!in) throw ContractViolation("cannot read series file '" + source + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ContractViolation("'" + source + "' is not valid JSON: " + e.what());
    }
    // A bare series or a report produced by `series --format json`.
    if (j.is_object() && j.contains("result")) j = j["result"];
    if (j.is_object() && j.contains("series")) j = j["series"];
    try {
        return io::series_from_json(j);
    } catch (const Json::exception& e) {
        throw ContractViolation("'" + source + "' is not a series: " + e.what());
    }
}

Command compare_command(CLI::App& app) {
    auto* sub = app.add_subcommand("compare", "Exact comparison of two log Z series");
    struct Options {
        int order = 4;
        std::string a = "lve";
        std::string b = "wick";
    };
    auto o = std::make_shared<Options>();
    sub->add_option("--order", o->order, "Highest order compared")->capture_default_str();
    sub->add_option("--a", o->a, "lve, wick or a series JSON file")->capture_default_str();
    sub->add_option("--b", o->b, "lve, wick or a series JSON file")->capture_default_str();

    Command c;
    c.app = sub;
    c.default_format = Format::Pretty;
    c.config = [o] { return Json{{"order", o->order}, {"a", o->a}, {"b", o->b}}; };
    c.validate = [o] {
        const int cap = std::min(wick::kDefaultOrderCap, lve::kDefaultSymbolicCap);
        require(o->order >= 1 && o->order <= cap, "--order must lie in [1, " + std::to_string(cap) + "]");
        for (const auto& s : {o->a, o->b})
            require(s == "wick" || s == "lve" || std::filesystem::is_regular_file(s),
                    "series source '" + s + "' is neither lve, wick nor a readable file");
    };
    c.execute = [o](const WorkerPool& pool) {
        const auto report =
            oracle::compare_series(load_series(o->a, o->order, pool), load_series(o->b, o->order, pool), o->order);
        Report r;
        r.result = io::to_json(report);
        r.pretty = oracle::to_table(report, o->a, o->b);
        std::ostringstream csv;
        csv << "order,N_power,a,b,equal\n";
        for (const auto& row : report.rows)
            csv << row.order << ',' << row.power << ',' << to_fraction_string(row.a) << ','
                << to_fraction_string(row.b) << ',' << (row.a == row.b ? 1 : 0) << '\n';
        r.csv = csv.str();
        r.failed = !report.equal;
        return r;
    };
    return c;
}

// ------------------------------------------------------------- propagator

Command propagator_command(CLI::App& app) {
    auto* sub = app.add_subcommand("propagator", "Propagator class and matrix-base kernel table");
    struct Options {
        std::string cls;
        double omega = 1.0;
        bool covariant = false;
        double A = 1.0;
        int size = 20;
    };
    auto o = std::make_shared<Options>();
    sub->add_option("--class", o->cls,
                    "ordinary, self-dual, covariant or self-dual-covariant (default: classified from --omega)");
    sub->add_option("--omega", o->omega, "Omega in (0, 1]")->capture_default_str();
    sub->add_flag("--covariant", o->covariant, "Covariant model (magnetic term)");
    sub->add_option("--A", o->A, "Mass constant A >= 0")->capture_default_str();
    sub->add_option("--size", o->size, "Kernel table size")->capture_default_str();

    auto spec_of = [o] {
        propagator::PropagatorSpec spec;
        spec.cls = o->cls.empty() ? propagator::classify(o->omega, o->covariant) : propagator::class_from_string(o->cls);
        spec.omega = o->omega;
        spec.mass_constant = o->A;
        return spec;
    };

    Command c;
    c.app = sub;
    c.config = [o] {
        Json cfg{{"omega", o->omega}, {"covariant", o->covariant}, {"A", o->A}, {"size", o->size}};
        cfg["class"] = o->cls.empty() ? Json(nullptr) : Json(o->cls);
        return cfg;
    };
    c.validate = [o, spec_of] {
        require(o->size >= 1 && o->size <= 1000, "--size must lie in [1, 1000]");
        checked([&] { spec_of().validate(); });
    };
    c.execute = [o, spec_of](const WorkerPool&) {
        const auto spec = spec_of();
        Report r;
        r.result = Json{{"spec", io::to_json(spec)},
                        {"continuum_form", std::string(propagator::continuum_form(spec.cls))},
                        {"matrix_base", propagator::has_matrix_base_form(spec.cls)}};
        std::ostringstream pretty, csv;
        pretty << "class " << propagator::to_string(spec.cls) << ", omega = " << num(spec.omega)
               << ", A = " << num(spec.mass_constant) << '\n'
               << "continuum form: " << propagator::continuum_form(spec.cls) << '\n';
        csv << "m,n,value\n";
        if (!propagator::has_matrix_base_form(spec.cls)) {
            r.result["kernel"] = nullptr;
            pretty << "no closed matrix-base kernel for this class\n";
        } else {
            Json rows = Json::array();
            for (int m = 0; m < o->size; ++m) {
                Json row = Json::array();
                for (int n = 0; n < o->size; ++n) {
                    const double v = propagator::kernel_value(spec, m, n);
                    row.push_back(v);
                    csv << m << ',' << n << ',' << num(v, 17) << '\n';
                    pretty << (n ? " " : "") << std::setw(10) << num(v, 6);
                }
                pretty << '\n';
                rows.push_back(row);
            }
            r.result["kernel"] = rows;
        }
        r.pretty = pretty.str();
        r.csv = csv.str();
        return r;
    };
    return c;
}

std::string render(const Report& report, Format format, const Json& config) {
    switch (format) {
        case Format::Csv: return report.csv;
        case Format::Pretty: return report.pretty;
        case Format::Json: break;
    }
    Json doc{{"config", config}, {"result", report.result}};
    return doc.dump(2) + "\n";
}

Json error_record(const std::string& kind, const std::string& message) {
    return Json{{"error", Json{{"kind", kind}, {"message", message}}}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Loop vertex expansion laboratory for the quartic complex matrix model", "lvelab"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    Globals globals;
    globals.jobs = WorkerPool::from_environment().jobs();
    app.add_option("--format", globals.format, "json, csv or pretty (default json; pretty for series and compare)")
        ->check(CLI::IsMember({"json", "csv", "pretty"}));
    app.add_option("--output", globals.output, "Write the report to this file instead of stdout");
    app.add_option("--jobs", globals.jobs, "Worker threads (default: LVELAB_JOBS or 1)")->check(CLI::Range(1, 1024));
    app.add_option("--seed", globals.seed, "Seed of the Monte Carlo streams")->capture_default_str();
    // Global flags are accepted after the subcommand name too.
    app.fallthrough();

    std::vector<Command> commands{forests_command(app),    ribbon_command(app),     series_command(app),
                                  lve_command(app, globals), oracle_command(app, globals), compare_command(app),
                                  propagator_command(app)};

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const Command* selected = nullptr;
    for (const auto& c : commands)
        if (c.app->parsed()) selected = &c;

    Json config;
    Format format = selected->default_format;
    try {
        if (globals.format == "json") format = Format::Json;
        if (globals.format == "csv") format = Format::Csv;
        if (globals.format == "pretty") format = Format::Pretty;
        selected->validate();
        // The worker count and output path never change a result; they stay
        // out of the report so reruns compare byte for byte.
        config = Json{{"command", selected->app->get_name()}, {"seed", globals.seed}};
        config.update(selected->config());
        config["format"] = format == Format::Json ? "json" : format == Format::Csv ? "csv" : "pretty";
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << selected->app->help();
        return kExitUsage;
    }

    std::ofstream file;
    if (!globals.output.empty()) {
        file.open(globals.output, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "error: cannot open output file '" << globals.output << "'\n";
            return kExitUsage;
        }
    }
    std::ostream& sink = globals.output.empty() ? out : file;

    try {
        const Report report = selected->execute(WorkerPool(globals.jobs));
        sink << render(report, format, config);
        sink.flush();
        if (report.failed) {
            err << "error: the computed result failed its own check\n";
            return kExitFailure;
        }
        return kExitOk;
    } catch (const AccuracyError& e) {
        Json record = error_record(e.kind(), e.what());
        record["error"]["estimate"] = e.estimate();
        record["error"]["achieved_error"] = e.achieved_error();
        sink << record.dump(2) << '\n';
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const Error& e) {
        sink << error_record(e.kind(), e.what()).dump(2) << '\n';
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace lvelab::cli
