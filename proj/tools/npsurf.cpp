// Command-line driver.
//
// Exit codes are part of the interface:
//   0  every requested check passed
//   1  a mathematical check failed (a dimension that must vanish does not,
//      duality violated, or an internal consistency invariant broke)
//   2  configuration rejected (bad field, bad points, precondition not met)
//   3  a requested computation was refused by the size guard
//   4  the configured fields disagreed on a dimension or rank
//
// Every run prints a human summary and a JSON report to stdout; --output
// additionally writes the JSON to a file. The report echoes a resolved
// configuration that reproduces the run byte for byte.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "npsurf/config.hpp"
#include "npsurf/engine.hpp"
#include "npsurf/report.hpp"

namespace {

using namespace npsurf;
using nlohmann::json;

constexpr u32 kDefaultPrimes[2] = {2147483647u, 2147483629u};

struct Overrides {
    std::optional<i64> t;
    bool t_auto = false;
    std::optional<u64> p;
    std::optional<u64> seed;
    std::vector<u64> primes;
    std::optional<bool> rational;
    std::optional<std::string> output;
    std::optional<u64> max_dense_bytes;
    std::optional<std::string> cache_dir;
    std::optional<i64> q_max;
    std::optional<u64> i_max;
    std::optional<std::vector<i64>> t_range;
};

void merge(json& doc, const Overrides& o, const std::string& mode) {
    if (!mode.empty()) doc["mode"] = mode;
    if (o.t) doc["t"] = *o.t;
    if (o.t_auto) doc["t"] = "auto";
    if (o.p) doc["p"] = *o.p;
    if (o.seed) {
        if (!doc.contains("points") || !doc["points"].is_object() ||
            !doc["points"].contains("count"))
            throw ConfigError("--seed: only meaningful with generated points "
                              "(points.count in the config)");
        doc["points"]["seed"] = *o.seed;
    }
    if (!o.primes.empty()) doc["primes"] = o.primes;
    if (o.rational) doc["rational"] = *o.rational;
    if (o.output) doc["output"] = *o.output;
    if (o.max_dense_bytes) doc["max_dense_bytes"] = *o.max_dense_bytes;
    if (o.cache_dir) doc["cache_dir"] = *o.cache_dir;
    if (o.q_max) doc["q_max"] = *o.q_max;
    if (o.i_max) doc["i_max"] = *o.i_max;
    if (o.t_range) doc["t_range"] = *o.t_range;
}

void emit(const json& report, const RunConfig& cfg) {
    std::cout << report.dump(2) << '\n';
    if (!cfg.output.empty()) {
        std::ofstream os(cfg.output);
        if (!os) {
            std::cerr << "warning: cannot write " << cfg.output << '\n';
            return;
        }
        os << report.dump(2) << '\n';
    }
}

template <class F>
u64 agreed_sigma(const std::vector<F>& fields, const FatPointScheme& z,
                 const ElimLimits& lim) {
    u64 v0 = 0;
    for (size_t i = 0; i < fields.size(); ++i) {
        const u64 v = sigma(fields[i], z, lim);
        if (i == 0)
            v0 = v;
        else if (v != v0)
            throw PrimeDisagreement("sigma", field_characteristic(fields[0]),
                                    field_characteristic(fields[i]), v0, v);
    }
    return v0;
}

json field_block(const RunConfig& cfg) {
    json fields = json::array();
    if (cfg.rational)
        fields.push_back("rational");
    else
        for (u32 q : cfg.primes) fields.push_back(q);
    return json{{"fields", fields}, {"status", "agreed"}};
}

template <class F>
int run_sigma(const RunConfig& cfg, const std::vector<F>& fields,
              const FatPointScheme& z) {
    const u64 sg = agreed_sigma(fields, z, cfg.limits);
    json hil = json::array();
    std::ostringstream row;
    for (u64 n = 0; n <= sg; ++n) {
        u64 h = 0;
        for (size_t i = 0; i < fields.size(); ++i) {
            const u64 v = hilbert_quotient(fields[i], z, n, cfg.limits);
            if (i == 0)
                h = v;
            else if (v != h)
                throw PrimeDisagreement("hilbert function at degree " + std::to_string(n),
                                        field_characteristic(fields[0]),
                                        field_characteristic(fields[i]), h, v);
        }
        hil.push_back(h);
        row << (n ? " " : "") << h;
    }
    std::cout << "sigma = " << sg << " (n* = " << (sg == 0 ? 0 : sg - 1) << ")\n"
              << "deg Z = " << z.degree() << ", d = " << z.mult_sum() << "\n"
              << "hilbert function of the quotient, degrees 0.." << sg << ": "
              << row.str() << "\n";
    json rep{{"config", echo_config(cfg, z, 0)},
             {"sigma", sg},
             {"n_star", sg == 0 ? 0 : sg - 1},
             {"degZ", z.degree()},
             {"d", z.mult_sum()},
             {"hilbert_quotient", hil},
             {"field_agreement", field_block(cfg)},
             {"result", "ok"},
             {"exit_code", kExitPass}};
    emit(rep, cfg);
    return kExitPass;
}

template <class F>
int run_bound(const RunConfig& cfg, const std::vector<F>& fields,
              const FatPointScheme& z) {
    const u64 sg = agreed_sigma(fields, z, cfg.limits);
    const NpBound b = np_bound_from(sg, z.mult_sum(), cfg.p);
    const u64 naive = sg + cfg.p;
    std::cout << "t_min = " << b.t_min << " for p = " << cfg.p << " (binding term: "
              << binding_term_name(b.binding) << ")\n"
              << "sigma + p = " << naive << "\n";
    json rep{{"config", echo_config(cfg, z, 0)},
             {"bound", json_of(b)},
             {"sigma_plus_p", naive},
             {"field_agreement", field_block(cfg)},
             {"result", "ok"},
             {"exit_code", kExitPass}};
    emit(rep, cfg);
    return kExitPass;
}

template <class F>
i64 resolve_t(const RunConfig& cfg, const std::vector<F>& fields,
              const FatPointScheme& z) {
    if (cfg.t) return *cfg.t;
    const u64 sg = agreed_sigma(fields, z, cfg.limits);
    return static_cast<i64>(np_bound_from(sg, z.mult_sum(), cfg.p).t_min);
}

void print_checks(const NpVerification& v) {
    for (const auto& c : v.checks)
        std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name
                  << (c.detail.empty() ? "" : " [" + c.detail + "]") << '\n';
}

// Dump the differentials behind every nonzero required cell so a failure
// at or above the predicted bound can be audited offline.
template <class F>
json audit_failure(InstanceAnalysis<F>& an, const NpVerification& v,
                   const std::string& stem) {
    json files = json::array();
    for (const auto& c : v.cells)
        if (c.ok() && c.dim != 0)
            for (const auto& f : an.dump_cell(c.p, c.q, c.twisted, stem))
                files.push_back(f);
    return files;
}

template <class F>
int run_verify(const RunConfig& cfg, const std::vector<F>& fields,
               const FatPointScheme& z, i64 t) {
    EngineOptions opt{cfg.limits, cfg.q_max};
    InstanceAnalysis<F> an(fields, z, t, opt);
    if (!cfg.cache_dir.empty()) an.load_rank_cache(cfg.cache_dir);
    const NpVerification v = an.check_np(cfg.p);
    if (!cfg.cache_dir.empty()) an.save_rank_cache(cfg.cache_dir);

    std::cout << "N_" << cfg.p << " at t = " << t << " (bound t_min = "
              << v.bound.t_min << ", binding term: "
              << binding_term_name(v.bound.binding) << ", theorem "
              << (v.theorem_applies ? "applies" : "makes no prediction") << ")\n"
              << "instance: s = " << v.summary.s << ", d = " << v.summary.d
              << ", deg Z = " << v.summary.degz << ", sigma = " << v.summary.sigma
              << ", N = " << v.summary.big_n << "\n"
              << ascii_cells(v.cells, cfg.p, cfg.q_max);
    print_checks(v);
    std::cout << (v.pass ? "PASS" : (v.refused ? "REFUSED" : "FAIL")) << ": N_"
              << cfg.p << " at t = " << t << "\n";

    json rep{{"config", echo_config(cfg, z, t)},
             {"verification", json_of(v)},
             {"cells_ascii", ascii_cells(v.cells, cfg.p, cfg.q_max)},
             {"field_agreement", field_block(cfg)}};
    int code = kExitPass;
    if (v.pass) {
        rep["result"] = "pass";
    } else if (v.refused) {
        rep["result"] = "refused";
        code = kExitRefused;
    } else {
        rep["result"] = "fail";
        code = kExitMathFail;
        if (v.theorem_applies) {
            const std::string stem =
                (cfg.output.empty() ? std::string("npsurf_audit") : cfg.output + "_audit");
            rep["audit_files"] = audit_failure(an, v, stem);
            std::cout << "theorem-range failure: differentials dumped for audit\n";
        }
    }
    rep["exit_code"] = code;
    emit(rep, cfg);
    return code;
}

template <class F>
int run_betti(const RunConfig& cfg, const std::vector<F>& fields,
              const FatPointScheme& z, i64 t) {
    EngineOptions opt{cfg.limits, cfg.q_max};
    InstanceAnalysis<F> an(fields, z, t, opt);
    if (!cfg.cache_dir.empty()) an.load_rank_cache(cfg.cache_dir);
    const BettiResult b = an.betti(cfg.i_max, cfg.q_max);
    if (!cfg.cache_dir.empty()) an.save_rank_cache(cfg.cache_dir);

    std::cout << "graded Betti numbers at t = " << t << " (beta_{i,i+q} at row q, column i)\n"
              << ascii_betti(b);

    // The first column is pinned by the algebra: beta_{0,0} = 1 and the
    // column vanishes above it. A violation is an engine bug, not geometry.
    bool col0_ok = true;
    bool refused = false;
    for (i64 q = 0; q <= b.q_max; ++q)
        for (u64 i = 0; i <= b.i_max; ++i) {
            const BettiCell& c = b.cells[static_cast<size_t>(q)][i];
            if (!c.ok) refused = true;
        }
    if (b.cells[0][0].ok && b.cells[0][0].dim != 1) col0_ok = false;
    for (i64 q = 1; q <= b.q_max && col0_ok; ++q)
        if (b.cells[static_cast<size_t>(q)][0].ok && b.cells[static_cast<size_t>(q)][0].dim != 0)
            col0_ok = false;

    json rep{{"config", echo_config(cfg, z, t)},
             {"betti", json_of(b)},
             {"field_agreement", field_block(cfg)}};
    int code = kExitPass;
    if (!col0_ok) {
        std::cout << "FAIL: column i = 0 is not (1, 0, ..., 0)\n";
        rep["result"] = "fail";
        code = kExitMathFail;
    } else if (refused) {
        rep["result"] = "refused";
        code = kExitRefused;
    } else {
        rep["result"] = "ok";
    }
    rep["exit_code"] = code;
    emit(rep, cfg);
    return code;
}

template <class F>
int run_duality(const RunConfig& cfg, const std::vector<F>& fields,
                const FatPointScheme& z, i64 t) {
    EngineOptions opt{cfg.limits, cfg.q_max};
    InstanceAnalysis<F> an(fields, z, t, opt);
    if (!cfg.cache_dir.empty()) an.load_rank_cache(cfg.cache_dir);
    const DualityResult d = an.duality(cfg.p);
    if (!cfg.cache_dir.empty()) an.save_rank_cache(cfg.cache_dir);

    std::cout << "duality at t = " << t << ": dim K_{" << d.p
              << ",2} = " << (d.lhs.ok() ? std::to_string(d.lhs.dim) : "refused")
              << " vs dim K_{" << d.partner << ",1}(canonical twist) = "
              << (d.rhs.ok() ? std::to_string(d.rhs.dim) : "refused") << "\n"
              << (d.comparable ? (d.equal ? "PASS" : "FAIL") : "REFUSED")
              << ": pairing K_{p,2} with K_{N-2-p,1}\n";

    json rep{{"config", echo_config(cfg, z, t)},
             {"duality", json_of(d)},
             {"field_agreement", field_block(cfg)}};
    int code = kExitPass;
    if (!d.comparable) {
        rep["result"] = "refused";
        code = kExitRefused;
    } else if (!d.equal) {
        rep["result"] = "fail";
        code = kExitMathFail;
        const std::string stem =
            (cfg.output.empty() ? std::string("npsurf_audit") : cfg.output + "_audit");
        json files = json::array();
        for (const auto& f : an.dump_cell(d.p, 2, false, stem)) files.push_back(f);
        if (d.partner >= 0)
            for (const auto& f :
                 an.dump_cell(static_cast<u64>(d.partner), 1, true, stem))
                files.push_back(f);
        rep["audit_files"] = files;
    } else {
        rep["result"] = "pass";
    }
    rep["exit_code"] = code;
    emit(rep, cfg);
    return code;
}

template <class F>
int run_scan(const RunConfig& cfg, const std::vector<F>& fields,
             const FatPointScheme& z) {
    EngineOptions opt{cfg.limits, cfg.q_max};
    const ScanResult s = scan_np(fields, z, cfg.p, cfg.t_lo, cfg.t_hi, opt);
    std::cout << "scan for N_" << cfg.p << ", t in [" << cfg.t_lo << ", " << cfg.t_hi
              << "], bound t_min = " << s.bound.t_min << " (binding term: "
              << binding_term_name(s.bound.binding) << ")\n";
    for (const auto& r : s.rows)
        std::cout << "  t = " << r.t << ": " << scan_status_name(r.status) << '\n';
    std::cout << (s.predicted_all_pass ? "PASS" : "FAIL")
              << ": every t >= t_min in range has N_" << cfg.p << '\n';

    json rep{{"config", echo_config(cfg, z, 0)},
             {"scan", json_of(s)},
             {"field_agreement", field_block(cfg)}};
    int code = kExitPass;
    if (s.any_refused) {
        rep["result"] = "refused";
        code = kExitRefused;
    } else if (!s.predicted_all_pass) {
        rep["result"] = "fail";
        code = kExitMathFail;
    } else {
        rep["result"] = "pass";
    }
    rep["exit_code"] = code;
    emit(rep, cfg);
    return code;
}

template <class F>
int dispatch(const RunConfig& cfg, const std::vector<F>& fields) {
    const FatPointScheme z = cfg.scheme();
    switch (cfg.mode) {
        case RunMode::kSigma: return run_sigma(cfg, fields, z);
        case RunMode::kBound: return run_bound(cfg, fields, z);
        case RunMode::kScan:
            check_prime_vs_degrees(cfg, cfg.t_hi);
            return run_scan(cfg, fields, z);
        case RunMode::kBetti:
        case RunMode::kVerify:
        case RunMode::kDuality: {
            const i64 t = resolve_t(cfg, fields, z);
            check_prime_vs_degrees(cfg, t);
            if (cfg.mode == RunMode::kBetti) return run_betti(cfg, fields, z, t);
            if (cfg.mode == RunMode::kVerify) return run_verify(cfg, fields, z, t);
            return run_duality(cfg, fields, z, t);
        }
    }
    return kExitConfig;
}

int run(const std::string& config_path, const Overrides& o, const std::string& mode) {
    json doc;
    {
        std::ifstream is(config_path);
        if (!is) throw ConfigError("config: cannot open " + config_path);
        try {
            is >> doc;
        } catch (const json::parse_error& e) {
            throw ConfigError("config: " + std::string(e.what()));
        }
    }
    merge(doc, o, mode);
    RunConfig cfg = parse_config(doc);
    if (cfg.primes.empty()) {
        cfg.primes.push_back(kDefaultPrimes[0]);
        cfg.primes.push_back(kDefaultPrimes[1]);
    }
    if (cfg.rational) {
        std::vector<RationalField> fields{RationalField{}};
        return dispatch(cfg, fields);
    }
    std::vector<PrimeField> fields;
    for (u32 p : cfg.primes) fields.emplace_back(p);
    return dispatch(cfg, fields);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"npsurf: syzygies of fat-point linear systems on the plane"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides o;
    std::string forced_mode;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--t", o.t, "embedding degree (overrides config)");
        sub->add_flag("--t-auto", o.t_auto, "resolve t to the predicted bound");
        sub->add_option("--p", o.p, "syzygy index p");
        sub->add_option("--seed", o.seed, "generator seed (generated points only)");
        sub->add_option("--primes", o.primes, "one or two primes in (2^30, 2^31)")
            ->delimiter(',');
        sub->add_flag("--rational", [&](size_t) { o.rational = true; },
                      "exact rational arithmetic instead of primes");
        sub->add_option("--output", o.output, "also write the JSON report here");
        sub->add_option("--max-dense-bytes", o.max_dense_bytes,
                        "size-guard budget for one dense block");
        sub->add_option("--cache-dir", o.cache_dir, "rank cache directory");
        sub->add_option("--q-max", o.q_max, "largest internal degree checked");
        sub->add_option("--i-max", o.i_max, "largest homological index tabulated");
        sub->add_option("--t-range", o.t_range, "scan range lo,hi")->delimiter(',');
        return sub;
    };

    const char* modes[] = {"sigma", "bound", "betti", "verify", "scan", "duality"};
    const char* blurbs[] = {"regularity threshold of the point scheme",
                            "predicted least degree for property N_p",
                            "graded Betti table",
                            "check property N_p at one degree",
                            "check N_p across a degree range",
                            "compare K_{p,2} against its dual partner"};
    for (int i = 0; i < 6; ++i) {
        CLI::App* sub = add_common(app.add_subcommand(modes[i], blurbs[i]));
        sub->callback([&, i]() { forced_mode = modes[i]; });
    }
    CLI::App* runsub =
        add_common(app.add_subcommand("run", "mode taken from the config file"));
    runsub->callback([&]() { forced_mode = ""; });

    CLI11_PARSE(app, argc, argv);

    try {
        return run(config_path, o, forced_mode);
    } catch (const npsurf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return npsurf::kExitConfig;
    } catch (const npsurf::PrimeDisagreement& e) {
        std::cerr << "field disagreement: " << e.what() << '\n';
        return npsurf::kExitFieldDisagree;
    } catch (const npsurf::SizeGuard& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return npsurf::kExitRefused;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return npsurf::kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return npsurf::kExitConfig;
    } catch (const std::logic_error& e) {
        std::cerr << "internal check failed: " << e.what() << '\n';
        return npsurf::kExitMathFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return npsurf::kExitConfig;
    }
}
