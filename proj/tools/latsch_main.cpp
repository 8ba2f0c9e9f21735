// latsch: batch front door for the lattice spectral lab.
// Subcommands wire JSON configs to the library modules and emit deterministic
// CSV/JSON reports: identical config + seed means byte-identical outputs.

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>

#include "latsch/certificate.hpp"
#include "latsch/cone.hpp"
#include "latsch/counterexample.hpp"
#include "latsch/eigensolve.hpp"
#include "latsch/fermi.hpp"
#include "latsch/io.hpp"
#include "latsch/laplim.hpp"
#include "latsch/norms.hpp"
#include "latsch/spectral.hpp"
#include "latsch/stencil.hpp"
#include "latsch/sweep.hpp"

using namespace latsch;
using cd = std::complex<double>;
namespace fs = std::filesystem;

namespace {

struct CheckList {
    json checks = json::array();
    bool all_pass = true;

    void add(const std::string& name, bool pass, json details = {}) {
        json c;
        c["name"] = name;
        c["pass"] = pass;
        if (!details.is_null()) c["details"] = std::move(details);
        checks.push_back(std::move(c));
        all_pass = all_pass && pass;
    }
};

struct RunContext {
    json config;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;

    int thread_count() const {
        if (threads > 0) return threads;
        unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }
    std::string path(const std::string& name) const {
        return (fs::path(out_dir) / name).string();
    }
    double num(const std::string& key, double dflt) const {
        return config.contains(key) ? config.at(key).get<double>() : dflt;
    }
    int integer(const std::string& key, int dflt) const {
        return config.contains(key) ? config.at(key).get<int>() : dflt;
    }
    std::string str(const std::string& key, const std::string& dflt) const {
        return config.contains(key) ? config.at(key).get<std::string>() : dflt;
    }
};

/// index-parallel loop over independent jobs; results land by index so the
/// reports stay byte-identical whatever the thread count
template <class F>
void parallel_trials(int workers, size_t count, F&& body) {
    workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

int finish(const RunContext& ctx, const std::string& subcommand, CheckList& checks,
           json extra = {}) {
    json rep;
    rep["subcommand"] = subcommand;
    rep["seed"] = ctx.seed;
    rep["checks"] = checks.checks;
    rep["all_pass"] = checks.all_pass;
    if (!extra.is_null()) rep["results"] = std::move(extra);
    write_text_file(ctx.path("report.json"), rep.dump(2) + "\n");
    for (const auto& c : checks.checks)
        std::cout << (c.at("pass").get<bool>() ? "[PASS] " : "[FAIL] ")
                  << c.at("name").get<std::string>() << "\n";
    return checks.all_pass ? 0 : 2;
}

ExteriorDomain domain_from_config(const json& j) {
    if (j.contains("preset")) {
        std::string name = j.at("preset").get<std::string>();
        std::vector<int> params;
        if (j.contains("params")) params = j.at("params").get<std::vector<int>>();
        int dim = j.contains("dimension") ? j.at("dimension").get<int>() : 2;
        std::set<Site> obs = obstacle_preset(name, dim, params);
        int ext = 0;
        for (const Site& n : obs) ext = std::max(ext, n.norm_inf());
        int radius = j.contains("bounding_radius") ? j.at("bounding_radius").get<int>() : ext + 4;
        return classify_domain(dim, obs, radius);
    }
    return domain_from_json(j);
}

// ---------------------------------------------------------------------------
// ucp: nullspace certificates + zero-propagation sweep
// ---------------------------------------------------------------------------

int run_ucp(const RunContext& ctx) {
    reject_unknown_keys(ctx.config,
                        {"version", "seed", "dimension", "support_radius", "potential_radius",
                         "count", "lambda_min", "lambda_max", "svd_threshold", "propagation"},
                        "ucp config");
    int dim = ctx.integer("dimension", 2);
    int support_radius = ctx.integer("support_radius", 4);
    int pot_radius = ctx.integer("potential_radius", 2);
    int count = ctx.integer("count", 50);
    double lmin = ctx.num("lambda_min", 0.1), lmax = ctx.num("lambda_max", 1.9);
    double svd_threshold = ctx.num("svd_threshold", 1e-8);

    CounterRng rng(ctx.seed, "ucp/potentials");
    CsvWriter csv("trial,lambda,min_singular_value,scale,verdict");
    CheckList checks;
    bool all_trivial = true;
    double worst_margin = 1e300;
    for (int t = 0; t < count; ++t) {
        FieldR V(dim);
        Box::centered(dim, pot_radius).for_each([&](const Site& n) {
            V.set(n, rng.uniform(-1.0, 1.0));
        });
        double lambda = rng.uniform(lmin, lmax);
        NullspaceCertificate c =
            nullspace_certificate(V, lambda, Box::centered(dim, support_radius), svd_threshold);
        all_trivial = all_trivial && c.trivial;
        worst_margin = std::min(worst_margin, c.min_singular_value / c.scale);
        csv.row({std::to_string(t), fmt_g17(lambda), fmt_g17(c.min_singular_value),
                 fmt_g17(c.scale), c.trivial ? "trivial" : "witness"});
    }
    csv.save(ctx.path("certificates.csv"));
    checks.add("all certificates trivial", all_trivial,
               {{"count", count}, {"worst_margin", worst_margin}});

    json results;
    results["certificate"] = all_trivial ? "trivial" : "witness";
    results["min_singular_value_margin"] = worst_margin;

    if (ctx.config.contains("propagation")) {
        const json& pj = ctx.config.at("propagation");
        reject_unknown_keys(pj,
                            {"preset", "params", "dimension", "bounding_radius",
                             "known_zero_radius", "lambda", "obstacle"},
                            "ucp.propagation");
        ExteriorDomain dom = domain_from_config(pj);
        double known = pj.contains("known_zero_radius") ? pj.at("known_zero_radius").get<double>()
                                                        : dom.bounding_radius() - 3;
        double lambda = pj.contains("lambda") ? pj.at("lambda").get<double>() : 1.3;
        FieldC u(dom.dim());
        CounterRng urng(ctx.seed, "ucp/propagation-field");
        dom.window().for_each([&](const Site& n) {
            if (dom.contains(n)) u.set(n, {urng.uniform(-1, 1), urng.uniform(-1, 1)});
        });
        try {
            PropagationResult pr =
                propagate_zeros(dom, FieldR(dom.dim()), lambda, u, beyond_radius(known));
            checks.add("propagation clears the windowed domain", pr.all_zero_on_domain);
            json trace = json::array();
            for (auto [pass, forced] : pr.trace) trace.push_back({{"slab", pass}, {"nnz", forced}});
            results["sweep_trace"] = trace;
            results["domain"] = domain_to_json(dom);
            results["lambda"] = lambda;
            results["certificate"] = "trivial";
        } catch (const ConeConditionViolated&) {
            checks.add("propagation refused (cone condition violated)", true);
            results["certificate"] = "refused";
        }
    }
    return finish(ctx, "ucp", checks, results);
}

// ---------------------------------------------------------------------------
// cone: verdicts over presets
// ---------------------------------------------------------------------------

int run_cone(const RunContext& ctx) {
    reject_unknown_keys(ctx.config, {"version", "seed", "presets"}, "cone config");
    json presets = ctx.config.contains("presets")
                       ? ctx.config.at("presets")
                       : json::parse(R"([{"preset":"rectangle","expect":true},
                                         {"preset":"rhombus","expect":true},
                                         {"preset":"zigzag","expect":true},
                                         {"preset":"figure2_staircase","expect":false}])");
    CsvWriter csv("preset,satisfied,violating_sites");
    CheckList checks;
    json results = json::array();
    for (const auto& pj : presets) {
        reject_unknown_keys(pj, {"preset", "params", "dimension", "bounding_radius", "expect"},
                            "cone.presets[]");
        ExteriorDomain dom = domain_from_config(pj);
        ConeVerdict v = satisfies_cone_condition(dom);
        std::string name = pj.at("preset").get<std::string>();
        csv.row({name, v.satisfied ? "true" : "false", std::to_string(v.violating_sites.size())});
        json r;
        r["preset"] = name;
        r["satisfied"] = v.satisfied;
        json viol = json::array();
        for (const Site& s : v.violating_sites) {
            json c = json::array();
            for (int i = 0; i < s.dim(); ++i) c.push_back(s[i]);
            viol.push_back(c);
        }
        r["violating_sites"] = viol;
        results.push_back(r);
        if (pj.contains("expect"))
            checks.add("verdict(" + name + ")", v.satisfied == pj.at("expect").get<bool>(),
                       {{"satisfied", v.satisfied}});
    }
    csv.save(ctx.path("cone_verdicts.csv"));
    return finish(ctx, "cone", checks, results);
}

// ---------------------------------------------------------------------------
// counterexample: the staircase build + residual report
// ---------------------------------------------------------------------------

int run_counterexample(const RunContext& ctx) {
    reject_unknown_keys(ctx.config, {"version", "seed", "steps"}, "counterexample config");
    int steps = ctx.integer("steps", 3);
    Counterexample ce = build_counterexample(steps);

    Rational res = interior_residual_exact(ce.domain, ce.boundary_field, ce.lambda);
    double boundary_max = ce.boundary_field.norm_max();
    ConeVerdict cv = satisfies_cone_condition(ce.domain);

    bool lambda_free = true;
    for (Rational lambda : {Rational(1, 10), Rational(1, 2), Rational(19, 10)})
        lambda_free =
            lambda_free && interior_residual_exact(ce.domain, ce.boundary_field, lambda).is_zero();

    CheckList checks;
    checks.add("interior residual is exactly zero", res.is_zero());
    checks.add("boundary max equals 1", boundary_max == 1.0);
    checks.add("domain fails the cone condition", !cv.satisfied,
               {{"violating_sites", cv.violating_sites.size()}});
    checks.add("identity persists across lambda", lambda_free);

    FieldC as_complex(2);
    for (const auto& [n, v] : ce.boundary_field.entries()) as_complex.set(n, {v.to_double(), 0.0});
    write_text_file(ctx.path("counterexample_field.json"), field_to_json(as_complex).dump(2) + "\n");
    write_text_file(ctx.path("counterexample_domain.json"),
                    domain_to_json(ce.domain).dump(2) + "\n");

    json results;
    results["kernel_dimension"] = ce.kernel_dimension;
    results["boundary_support"] = ce.boundary_field.support_size();
    results["lambda"] = 0.5;
    results["interior_residual"] = res.is_zero() ? 0.0 : res.to_double();
    results["boundary_max"] = boundary_max;
    return finish(ctx, "counterexample", checks, results);
}

// ---------------------------------------------------------------------------
// spectrum: essential-spectrum probe + embedded scan + operator identities
// ---------------------------------------------------------------------------

FieldR potential_from_config(const json& j, CounterRng& rng, int dim) {
    std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : "none";
    if (kind == "none") return FieldR(dim);
    if (kind == "delta") {
        double amp = j.contains("amplitude") ? j.at("amplitude").get<double>() : 5.0;
        return FieldR::delta(Site(std::vector<int>(static_cast<size_t>(dim), 0)), amp);
    }
    if (kind == "random") {
        int radius = j.contains("radius") ? j.at("radius").get<int>() : 2;
        double amp = j.contains("amplitude") ? j.at("amplitude").get<double>() : 1.0;
        FieldR V(dim);
        Box::centered(dim, radius).for_each([&](const Site& n) {
            V.set(n, rng.uniform(-amp, amp));
        });
        return V;
    }
    throw UsageError("unknown potential kind: " + kind);
}

int run_spectrum(const RunContext& ctx) {
    reject_unknown_keys(ctx.config,
                        {"version", "seed", "dimension", "probe", "embedded", "green_check",
                         "symmetry_check", "export_operator"},
                        "spectrum config");
    int dim = ctx.integer("dimension", 2);
    CheckList checks;
    json results;

    if (ctx.config.contains("export_operator")) {
        const json& xj = ctx.config.at("export_operator");
        reject_unknown_keys(xj, {"box_size", "preset", "params", "bc", "file"},
                            "spectrum.export_operator");
        std::string bcs = xj.contains("bc") ? xj.at("bc").get<std::string>() : "whole_space_box";
        std::string file = xj.contains("file") ? xj.at("file").get<std::string>() : "operator.mtx";
        AssembledOperator op;
        if (xj.contains("preset")) {
            std::vector<int> params;
            if (xj.contains("params")) params = xj.at("params").get<std::vector<int>>();
            std::set<Site> obs = obstacle_preset(xj.at("preset").get<std::string>(), dim, params);
            int ext = 0;
            for (const Site& n : obs) ext = std::max(ext, n.norm_inf());
            ExteriorDomain dom = classify_domain(dim, obs, ext + 4);
            BcKind bc = bcs == "robin" ? BcKind::robin : BcKind::dirichlet;
            op = assemble(dom, FieldR(dim), bc,
                          bc == BcKind::robin ? uniform_robin(dom.windowed(), 0.0)
                                              : std::map<Site, double>{});
        } else {
            op = assemble_whole_space_box(dim, xj.contains("box_size") ? xj.at("box_size").get<int>() : 10,
                                          FieldR(dim));
        }
        write_text_file(ctx.path(file), to_matrix_market(op.matrix));
        results["exported_operator"] = {{"file", file}, {"size", op.size()}};
    }

    if (ctx.config.contains("probe")) {
        const json& pj = ctx.config.at("probe");
        reject_unknown_keys(pj, {"box_sizes", "bc", "bins", "potential", "preset", "params"},
                            "spectrum.probe");
        std::vector<int> boxes = pj.contains("box_sizes")
                                     ? pj.at("box_sizes").get<std::vector<int>>()
                                     : std::vector<int>{10, 20, 40};
        int bins = pj.contains("bins") ? pj.at("bins").get<int>() : 64;
        BcKind bc = BcKind::whole_space_box;
        if (pj.contains("bc")) {
            std::string s = pj.at("bc").get<std::string>();
            bc = s == "dirichlet" ? BcKind::dirichlet
                 : s == "robin"   ? BcKind::robin
                 : s == "whole_space_box"
                     ? BcKind::whole_space_box
                     : throw UsageError("unknown bc: " + s);
        }
        std::set<Site> obstacle;
        if (pj.contains("preset")) {
            std::vector<int> params;
            if (pj.contains("params")) params = pj.at("params").get<std::vector<int>>();
            obstacle = obstacle_preset(pj.at("preset").get<std::string>(), dim, params);
        }
        CounterRng rng(ctx.seed, "spectrum/probe-potential");
        FieldR V = pj.contains("potential") ? potential_from_config(pj.at("potential"), rng, dim)
                                            : FieldR(dim);
        SpectrumProbe probe = essential_spectrum_probe(dim, V, bc, boxes, bins,
                                                       obstacle.empty() ? nullptr : &obstacle);

        CsvWriter csv("box,bc,bin,occupancy");
        for (const auto& row : probe.rows)
            for (size_t b = 0; b < row.bin_occupancy.size(); ++b)
                csv.row({std::to_string(row.box_size), to_string(row.bc), std::to_string(b),
                         fmt_g17(row.bin_occupancy[b])});
        csv.save(ctx.path("spectrum_bins.csv"));

        bool decreasing = true;
        json disc = json::array();
        for (size_t i = 0; i < probe.rows.size(); ++i) {
            disc.push_back(probe.rows[i].ids_discrepancy);
            if (i > 0 && probe.rows[i].ids_discrepancy >= probe.rows[i - 1].ids_discrepancy)
                decreasing = false;
        }
        checks.add("IDS discrepancy strictly decreasing", decreasing, {{"sequence", disc}});
        results["probe_discrepancy"] = disc;
    }

    if (ctx.config.contains("embedded")) {
        const json& ej = ctx.config.at("embedded");
        reject_unknown_keys(ej,
                            {"box_sizes", "window", "probe_radius", "count", "potential_radius",
                             "amplitude", "monotone_tolerance", "final_threshold"},
                            "spectrum.embedded");
        std::vector<int> boxes = ej.contains("box_sizes")
                                     ? ej.at("box_sizes").get<std::vector<int>>()
                                     : std::vector<int>{20, 40, 80};
        std::vector<double> window = ej.contains("window")
                                         ? ej.at("window").get<std::vector<double>>()
                                         : std::vector<double>{0.5, 1.5};
        double probe_radius = ej.contains("probe_radius") ? ej.at("probe_radius").get<double>() : 6.0;
        int count = ej.contains("count") ? ej.at("count").get<int>() : 10;
        int pot_radius = ej.contains("potential_radius") ? ej.at("potential_radius").get<int>() : 2;
        double amp = ej.contains("amplitude") ? ej.at("amplitude").get<double>() : 1.0;
        double tol = ej.contains("monotone_tolerance") ? ej.at("monotone_tolerance").get<double>()
                                                       : 0.05;
        double final_thr = ej.contains("final_threshold") ? ej.at("final_threshold").get<double>()
                                                          : 0.5;

        std::vector<FieldR> pots;
        for (int t = 0; t < count; ++t) {
            CounterRng rng(ctx.seed, "spectrum/embedded-potential-" + std::to_string(t));
            FieldR V(dim);
            Box::centered(dim, pot_radius).for_each([&](const Site& n) {
                V.set(n, rng.uniform(-amp, amp));
            });
            pots.push_back(std::move(V));
        }

        std::vector<EmbeddedScan> scans(pots.size());
        parallel_trials(ctx.thread_count(), pots.size(), [&](size_t t) {
            scans[t] = embedded_scan(dim, pots[t], window[0], window[1], probe_radius, boxes);
        });

        CsvWriter csv("trial,box,pairs_in_window,max_localization");
        bool monotone = true, final_ok = true;
        json rows = json::array();
        for (size_t t = 0; t < scans.size(); ++t) {
            for (size_t r = 0; r < scans[t].rows.size(); ++r) {
                const auto& row = scans[t].rows[r];
                csv.row({std::to_string(t), std::to_string(row.box_size),
                         std::to_string(row.pairs_in_window), fmt_g17(row.max_localization)});
                if (r > 0 &&
                    row.max_localization > scans[t].rows[r - 1].max_localization + tol)
                    monotone = false;
            }
            double final_loc = scans[t].rows.back().max_localization;
            if (final_loc >= final_thr) final_ok = false;
            rows.push_back({{"trial", t}, {"final_localization", final_loc}});
        }
        csv.save(ctx.path("embedded_scan.csv"));
        checks.add("localization non-increasing within tolerance", monotone,
                   {{"tolerance", tol}});
        checks.add("final localization below threshold", final_ok,
                   {{"threshold", final_thr}});
        results["embedded"] = rows;
    }

    if (ctx.config.contains("green_check")) {
        const json& gj = ctx.config.at("green_check");
        reject_unknown_keys(gj, {"domains", "max_sites", "tolerance"}, "spectrum.green_check");
        int domains = gj.contains("domains") ? gj.at("domains").get<int>() : 100;
        int max_sites = gj.contains("max_sites") ? gj.at("max_sites").get<int>() : 400;
        double tol = gj.contains("tolerance") ? gj.at("tolerance").get<double>() : 1e-12;
        CounterRng rng(ctx.seed, "spectrum/green");
        double worst = 0;
        for (int t = 0; t < domains; ++t) {
            int target = 40 + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_sites - 40)));
            std::set<Site> sites;
            std::vector<Site> frontier{Site{0, 0}};
            sites.insert(Site{0, 0});
            while (static_cast<int>(sites.size()) < target) {
                Site base = frontier[rng.index(frontier.size())];
                auto nb = neighbors(base);
                Site cand = nb[rng.index(nb.size())];
                if (sites.insert(cand).second) frontier.push_back(cand);
            }
            ClassifiedSet omega = ClassifiedSet::from_sites(dim, sites);
            FieldC u(dim), v(dim);
            for (const Site& n : omega.sites()) {
                u.set(n, {rng.uniform(-1, 1), rng.uniform(-1, 1)});
                v.set(n, {rng.uniform(-1, 1), rng.uniform(-1, 1)});
            }
            double scaled = green_residual(omega, u, v) /
                            std::max(1.0, u.norm_l2() * v.norm_l2());
            worst = std::max(worst, scaled);
        }
        checks.add("green identity residual within tolerance", worst <= tol,
                   {{"worst", worst}, {"tolerance", tol}});
        results["green_worst_residual"] = worst;
    }

    if (ctx.config.contains("symmetry_check")) {
        const json& sj = ctx.config.at("symmetry_check");
        reject_unknown_keys(sj, {"instances"}, "spectrum.symmetry_check");
        int instances = sj.contains("instances") ? sj.at("instances").get<int>() : 50;
        CounterRng rng(ctx.seed, "spectrum/symmetry");
        double worst = 0;
        for (int t = 0; t < instances; ++t) {
            int hw = 1 + static_cast<int>(rng.index(3));
            std::set<Site> obstacle = obstacle_rectangle({hw, 1 + static_cast<int>(rng.index(3))});
            ExteriorDomain dom = classify_domain(dim, obstacle, hw + 5);
            FieldR V(dim);
            Box::centered(dim, 1).for_each([&](const Site& n) { V.set(n, rng.uniform(-1, 1)); });
            ClassifiedSet w = dom.windowed();
            std::map<Site, double> c;
            for (const Site& b : w.boundary_sites()) c[b] = rng.uniform(-1, 1);
            AssembledOperator robin = assemble(w, V, BcKind::robin, c);
            AssembledOperator diri = assemble(w, V, BcKind::dirichlet);
            worst = std::max({worst, robin.matrix.symmetry_defect(), diri.matrix.symmetry_defect()});
        }
        checks.add("assembled matrices exactly symmetric", worst == 0.0, {{"worst", worst}});
        results["symmetry_worst_defect"] = worst;
    }

    return finish(ctx, "spectrum", checks, results);
}

// ---------------------------------------------------------------------------
// fermi: surface sampling + singular sets + H_lambda residuals
// ---------------------------------------------------------------------------

int run_fermi(const RunContext& ctx) {
    reject_unknown_keys(ctx.config,
                        {"version", "seed", "dimension", "lambda", "resolution",
                         "identity_samples", "singular_checks", "identity_checks"},
                        "fermi config");
    int dim = ctx.integer("dimension", 2);
    double lambda = ctx.num("lambda", 1.0);
    int resolution = ctx.integer("resolution", 64);
    int id_samples = ctx.integer("identity_samples", 1000);

    FermiSample fsamp = sample_fermi(lambda, dim, resolution);

    CsvWriter csv([&] {
        std::string h;
        for (int i = 0; i < dim; ++i) h += "x" + std::to_string(i + 1) + ",";
        return h + "h_residual,is_singular";
    }());
    double worst = 0;
    for (const TorusPoint& p : fsamp.points) {
        std::vector<std::string> cells;
        for (int i = 0; i < dim; ++i) cells.push_back(fmt_g17(p[i]));
        double r = std::abs(h_eval(p) - lambda);
        worst = std::max(worst, r);
        cells.push_back(fmt_g17(r));
        cells.push_back("0");
        csv.row(cells);
    }
    for (const TorusPoint& p : fsamp.singular) {
        std::vector<std::string> cells;
        for (int i = 0; i < dim; ++i) cells.push_back(fmt_g17(p[i]));
        cells.push_back(fmt_g17(std::abs(h_eval(p) - lambda)));
        cells.push_back("1");
        csv.row(cells);
    }
    csv.save(ctx.path("fermi_points.csv"));

    CheckList checks;
    checks.add("sampled points satisfy |h - lambda| <= 1e-10", worst <= 1e-10,
               {{"worst", worst}, {"points", fsamp.points.size()}});

    CounterRng rng(ctx.seed, "fermi/identity");
    double worst_id = 0;
    for (int t = 0; t < id_samples; ++t) {
        std::vector<cd> z(static_cast<size_t>(dim));
        for (auto& v : z) v = {rng.uniform(-3.141592653589793, 3.141592653589793), rng.uniform(-1, 1)};
        worst_id = std::max(worst_id, h_identity_residual(dim, lambda, z));
    }
    checks.add("H_lambda identity residual <= 1e-12", worst_id <= 1e-12, {{"worst", worst_id}});

    json results;
    json sing = json::array();
    for (const TorusPoint& p : fsamp.singular) {
        json c = json::array();
        for (int i = 0; i < dim; ++i) c.push_back(p[i]);
        sing.push_back(c);
    }
    results["singular_points"] = sing;
    results["sample_count"] = fsamp.points.size();

    if (ctx.config.contains("singular_checks")) {
        bool all = true;
        for (const auto& sc : ctx.config.at("singular_checks")) {
            reject_unknown_keys(sc, {"dimension", "lambda", "expect_count"},
                                "fermi.singular_checks[]");
            int d = sc.at("dimension").get<int>();
            double l = sc.at("lambda").get<double>();
            size_t expect = sc.at("expect_count").get<size_t>();
            if (singular_points(l, d).size() != expect) all = false;
        }
        checks.add("singular-set cardinalities", all);
    }
    if (ctx.config.contains("identity_checks")) {
        double worst = 0;
        CounterRng rng2(ctx.seed, "fermi/identity-grid");
        for (const auto& ic : ctx.config.at("identity_checks")) {
            reject_unknown_keys(ic, {"dimension", "lambda", "samples"}, "fermi.identity_checks[]");
            int d = ic.at("dimension").get<int>();
            double l = ic.at("lambda").get<double>();
            int m = ic.contains("samples") ? ic.at("samples").get<int>() : 1000;
            for (int t = 0; t < m; ++t) {
                std::vector<cd> z(static_cast<size_t>(d));
                for (auto& v : z)
                    v = {rng2.uniform(-3.141592653589793, 3.141592653589793),
                         rng2.uniform(-1, 1)};
                worst = std::max(worst, h_identity_residual(d, l, z));
            }
        }
        checks.add("H_lambda identity over the (d, lambda) grid", worst <= 1e-12,
                   {{"worst", worst}});
    }
    return finish(ctx, "fermi", checks, results);
}

// ---------------------------------------------------------------------------
// rellich: forward vanishing + extrapolated recovery, the desk-scale test
// ---------------------------------------------------------------------------

int run_rellich(const RunContext& ctx) {
    reject_unknown_keys(ctx.config,
                        {"version", "seed", "dimension", "lambdas", "count", "g_radius",
                         "fermi_points", "tolerance_fermi", "tolerance_recovery", "settings",
                         "export_fields"},
                        "rellich config");
    int dim = ctx.integer("dimension", 2);
    if (dim != 2) throw UsageError("rellich: d = 2 only");
    std::vector<double> lambdas = ctx.config.contains("lambdas")
                                      ? ctx.config.at("lambdas").get<std::vector<double>>()
                                      : std::vector<double>{0.7, 1.0, 1.3};
    int count = ctx.integer("count", 20);
    int g_radius = ctx.integer("g_radius", 3);
    int fermi_points = ctx.integer("fermi_points", 10000);
    double tol_fermi = ctx.num("tolerance_fermi", 1e-10);
    double tol_recovery = ctx.num("tolerance_recovery", 1e-6);

    RecoverySettings settings;
    if (ctx.config.contains("settings")) {
        const json& sj = ctx.config.at("settings");
        reject_unknown_keys(sj,
                            {"n_grid_regular", "n_grid_threshold", "eps0_regular",
                             "eps0_threshold", "points_regular", "points_threshold", "ratio"},
                            "rellich.settings");
        if (sj.contains("n_grid_regular")) settings.n_grid_regular = sj.at("n_grid_regular");
        if (sj.contains("n_grid_threshold")) settings.n_grid_threshold = sj.at("n_grid_threshold");
        if (sj.contains("eps0_regular")) settings.eps0_regular = sj.at("eps0_regular");
        if (sj.contains("eps0_threshold")) settings.eps0_threshold = sj.at("eps0_threshold");
        if (sj.contains("points_regular")) settings.points_regular = sj.at("points_regular");
        if (sj.contains("points_threshold")) settings.points_threshold = sj.at("points_threshold");
        if (sj.contains("ratio")) settings.ratio = sj.at("ratio");
    }

    int resolution = std::max(16, fermi_points / (2 * dim));
    std::map<double, FermiSample> samples;
    for (double l : lambdas) samples.emplace(l, sample_fermi(l, dim, resolution));

    struct Trial {
        int index;
        double lambda;
        double max_f = 0, recovery = 0;
    };
    // heavier threshold (integer lambda) trials scheduled first
    std::vector<Trial> trials;
    for (int t = 0; t < count; ++t)
        for (double l : lambdas)
            if (is_integer_threshold(l)) trials.push_back({t, l});
    for (int t = 0; t < count; ++t)
        for (double l : lambdas)
            if (!is_integer_threshold(l)) trials.push_back({t, l});

    bool export_fields = ctx.config.contains("export_fields") &&
                         ctx.config.at("export_fields").get<bool>();
    auto run_trial = [&](Trial& tr) {
        CounterRng rng(ctx.seed, "rellich/g-" + std::to_string(tr.index));
        FieldC g(dim);
        Box::centered(dim, g_radius).for_each([&](const Site& n) {
            g.set(n, {rng.uniform(-1, 1), rng.uniform(-1, 1)});
        });
        FieldR V(dim);
        FieldC f = apply_schrodinger(V, cd{tr.lambda, 0.0}, g);
        tr.max_f = vanish_on_fermi(f, tr.lambda, samples.at(tr.lambda));
        RecoveryResult rec = recover_by_extrapolation(f, tr.lambda, g_radius + 1, settings);
        double err = 0;
        Box::centered(dim, g_radius + 1).for_each([&](const Site& n) {
            err = std::max(err, std::abs(rec.u_extrapolated.at(n) - g.at(n)));
        });
        tr.recovery = err;
        if (export_fields && tr.index == 0)
            write_text_file(ctx.path("recovered_lambda_" + fmt_g17(tr.lambda) + ".json"),
                            field_to_json(rec.u_extrapolated).dump(2) + "\n");
    };

    parallel_trials(ctx.thread_count(), trials.size(), [&](size_t t) { run_trial(trials[t]); });

    std::sort(trials.begin(), trials.end(), [](const Trial& x, const Trial& y) {
        return x.index != y.index ? x.index < y.index : x.lambda < y.lambda;
    });
    CsvWriter csv("trial,lambda,max_f_on_fermi,recovery_error");
    double worst_f = 0, worst_rec = 0;
    for (const Trial& tr : trials) {
        csv.row({std::to_string(tr.index), fmt_g17(tr.lambda), fmt_g17(tr.max_f),
                 fmt_g17(tr.recovery)});
        worst_f = std::max(worst_f, tr.max_f);
        worst_rec = std::max(worst_rec, tr.recovery);
    }
    csv.save(ctx.path("rellich.csv"));

    CheckList checks;
    checks.add("divisible sources vanish on the Fermi surface", worst_f <= tol_fermi,
               {{"worst", worst_f}, {"tolerance", tol_fermi}});
    checks.add("extrapolated recovery within tolerance", worst_rec <= tol_recovery,
               {{"worst", worst_rec}, {"tolerance", tol_recovery}});
    json results;
    results["worst_fermi_value"] = worst_f;
    results["worst_recovery_error"] = worst_rec;
    return finish(ctx, "rellich", checks, results);
}

// ---------------------------------------------------------------------------
// norms: decay curves + Besov tables
// ---------------------------------------------------------------------------

int run_norms(const RunContext& ctx) {
    reject_unknown_keys(ctx.config,
                        {"version", "seed", "dimension", "family", "exponent", "r_min", "r_max",
                         "expect_verdict", "slope_window", "families", "ratio_check",
                         "parseval_check"},
                        "norms config");
    int dim = ctx.integer("dimension", 2);
    double r_min = ctx.num("r_min", 64), r_max = ctx.num("r_max", 4096);

    // one block per family; the single-family keys are sugar for a list of one
    json families = json::array();
    if (ctx.config.contains("families"))
        families = ctx.config.at("families");
    else if (ctx.config.contains("family") || ctx.config.contains("exponent")) {
        json f;
        f["exponent"] = ctx.num("exponent", -1.5);
        if (ctx.config.contains("expect_verdict"))
            f["expect_verdict"] = ctx.config.at("expect_verdict");
        if (ctx.config.contains("slope_window")) f["slope_window"] = ctx.config.at("slope_window");
        families.push_back(f);
    }

    CheckList checks;
    json results;
    CsvWriter csv("exponent,R,decay_value");
    json family_results = json::array();
    for (const auto& fj : families) {
        reject_unknown_keys(fj, {"exponent", "expect_verdict", "slope_window", "flat_range"},
                            "norms.families[]");
        double exponent = fj.at("exponent").get<double>();
        DecayResult res =
            decay_condition_verdict(lazy_power_law(dim, exponent), geometric_schedule(r_min, r_max));
        for (const auto& [R, v] : res.curve)
            csv.row({fmt_g17(exponent), fmt_g17(R), fmt_g17(v)});
        std::string tag = " (exponent " + fmt_g17(exponent) + ")";
        if (fj.contains("expect_verdict"))
            checks.add("decay verdict" + tag,
                       to_string(res.verdict) == fj.at("expect_verdict").get<std::string>(),
                       {{"verdict", to_string(res.verdict)}, {"slope", res.fitted_slope}});
        if (fj.contains("slope_window")) {
            auto win = fj.at("slope_window").get<std::vector<double>>();
            checks.add("fitted slope inside window" + tag,
                       res.fitted_slope >= win[0] && res.fitted_slope <= win[1],
                       {{"slope", res.fitted_slope}});
        }
        if (fj.contains("flat_range")) {
            auto fr = fj.at("flat_range").get<std::vector<double>>();
            double lo = 1e300, hi = 0;
            for (const auto& [R, v] : res.curve)
                if (R >= fr[0] && R <= fr[1]) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            checks.add("curve flat within 10 percent" + tag, lo > 0 && hi / lo <= 1.1,
                       {{"ratio", hi / lo}});
        }
        family_results.push_back({{"exponent", exponent},
                                  {"verdict", to_string(res.verdict)},
                                  {"fitted_slope", res.fitted_slope}});
    }
    csv.save(ctx.path("decay_curve.csv"));
    results["families"] = family_results;

    if (ctx.config.contains("parseval_check")) {
        const json& pj = ctx.config.at("parseval_check");
        reject_unknown_keys(pj, {"count", "n_grid", "support_radius", "entries"},
                            "norms.parseval_check");
        int count = pj.contains("count") ? pj.at("count").get<int>() : 10;
        int n_grid = pj.contains("n_grid") ? pj.at("n_grid").get<int>() : 64;
        int radius = pj.contains("support_radius") ? pj.at("support_radius").get<int>() : 7;
        int entries = pj.contains("entries") ? pj.at("entries").get<int>() : 40;
        CounterRng rng(ctx.seed, "norms/parseval");
        double worst = 0;
        for (int t = 0; t < count; ++t) {
            FieldC u(dim);
            for (int e = 0; e < entries; ++e) {
                std::vector<int> c(static_cast<size_t>(dim));
                for (int i = 0; i < dim; ++i)
                    c[static_cast<size_t>(i)] = static_cast<int>(rng.uniform(-radius, radius + 1));
                u.set(Site(c), {rng.uniform(-1, 1), rng.uniform(-1, 1)});
            }
            TorusGrid g = synthesize(u, n_grid);
            worst = std::max(worst,
                             std::abs(g.norm_l2() - u.norm_l2()) / std::max(1.0, u.norm_l2()));
            FieldC back = coefficients(g, radius + 1);
            worst = std::max(worst, (back - u).norm_max());
        }
        checks.add("Parseval round trip within 1e-12", worst <= 1e-12, {{"worst", worst}});
        results["parseval_worst"] = worst;
    }

    if (ctx.config.contains("ratio_check")) {
        const json& rj = ctx.config.at("ratio_check");
        reject_unknown_keys(rj, {"count", "radius", "entries"}, "norms.ratio_check");
        int count = rj.contains("count") ? rj.at("count").get<int>() : 200;
        int radius = rj.contains("radius") ? rj.at("radius").get<int>() : 20;
        int entries = rj.contains("entries") ? rj.at("entries").get<int>() : 30;
        CounterRng rng(ctx.seed, "norms/ratio");
        double lo = 1e300, hi = 0;
        for (int t = 0; t < count; ++t) {
            FieldC u(dim);
            for (int e = 0; e < entries; ++e) {
                std::vector<int> c(static_cast<size_t>(dim));
                for (int i = 0; i < dim; ++i)
                    c[static_cast<size_t>(i)] = static_cast<int>(rng.uniform(-radius, radius + 1));
                u.set(Site(c), {rng.uniform(-1, 1), rng.uniform(-1, 1)});
            }
            NormReport rep = norms(lazy_from_field(u), {}, geometric_schedule(2, 2 * radius),
                                   2 * radius);
            double ratio = rep.bstar_sup / rep.bstar_dyadic;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        checks.add("sup/dyadic ratio inside [0.1, 10]", lo >= 0.1 && hi <= 10.0,
                   {{"min", lo}, {"max", hi}});
        results["ratio_range"] = {lo, hi};
    }
    return finish(ctx, "norms", checks, results);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice spectral lab: discrete Schrodinger operators, unique continuation, "
                 "Fermi surfaces, and torus-side decay functionals"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::uint64_t seed_override = 0;
    int threads = 0;
    app.add_option("--config", config_path, "JSON config path");
    app.add_option("--out", out_dir, "output directory (default: .)");
    auto* seed_opt = app.add_option("--seed", seed_override, "override the config seed");
    app.add_option("--threads", threads, "worker threads (default: hardware)");

    for (const char* name : {"ucp", "cone", "counterexample", "spectrum", "fermi", "rellich",
                             "norms"})
        app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunContext ctx;
        if (!config_path.empty()) {
            ctx.config = json::parse(read_text_file(config_path));
            if (!ctx.config.contains("version") || ctx.config.at("version").get<int>() != 1)
                throw UsageError("config must declare \"version\": 1");
        } else {
            ctx.config = json{{"version", 1}};
        }
        ctx.out_dir = out_dir;
        fs::create_directories(out_dir);
        ctx.threads = threads;
        ctx.seed = ctx.config.contains("seed") ? ctx.config.at("seed").get<std::uint64_t>() : 1;
        if (seed_opt->count() > 0) ctx.seed = seed_override;

        std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "ucp") return run_ucp(ctx);
        if (sub == "cone") return run_cone(ctx);
        if (sub == "counterexample") return run_counterexample(ctx);
        if (sub == "spectrum") return run_spectrum(ctx);
        if (sub == "fermi") return run_fermi(ctx);
        if (sub == "rellich") return run_rellich(ctx);
        if (sub == "norms") return run_norms(ctx);
        throw UsageError("unknown subcommand");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
