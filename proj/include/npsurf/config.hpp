#pragma once
// Run configuration: JSON in, validated RunConfig out.
//
// Every rejection names the offending field, so a bad config is fixable
// from the error message alone. Validation here is static; degree-dependent
// prime checks re-run after t is resolved (t may be "auto").

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "divisor.hpp"
#include "fatpoints.hpp"
#include "elim.hpp"

namespace npsurf {

enum ExitCode : int {
    kExitPass = 0,
    kExitMathFail = 1,
    kExitConfig = 2,
    kExitRefused = 3,
    kExitFieldDisagree = 4,
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { kSigma, kBound, kBetti, kVerify, kScan, kDuality };

inline const char* mode_name(RunMode m) {
    switch (m) {
        case RunMode::kSigma: return "sigma";
        case RunMode::kBound: return "bound";
        case RunMode::kBetti: return "betti";
        case RunMode::kVerify: return "verify";
        case RunMode::kScan: return "scan";
        case RunMode::kDuality: return "duality";
    }
    return "?";
}

inline RunMode mode_from(const std::string& s) {
    if (s == "sigma") return RunMode::kSigma;
    if (s == "bound") return RunMode::kBound;
    if (s == "betti") return RunMode::kBetti;
    if (s == "verify") return RunMode::kVerify;
    if (s == "scan") return RunMode::kScan;
    if (s == "duality") return RunMode::kDuality;
    throw ConfigError("mode: unknown value \"" + s +
                      "\" (expected sigma|bound|betti|verify|scan|duality)");
}

struct RunConfig {
    RunMode mode = RunMode::kVerify;

    // Point scheme: exactly one of the three sources.
    bool empty_scheme = false;
    std::vector<std::array<i64, 3>> coords; // explicit [x:y:z]
    u64 gen_count = 0;                      // generator: count + seed
    u64 seed = 0;
    bool generated = false;
    std::vector<u32> mults;

    std::optional<i64> t; // absent means "auto" (resolved to the bound for p)
    u64 p = 1;
    i64 t_lo = 0, t_hi = -1; // scan range, inclusive

    std::vector<u32> primes; // one or two; empty selects the defaults
    bool rational = false;
    i64 q_max = 3;
    u64 i_max = 3;

    ElimLimits limits{};
    std::string cache_dir;
    std::string output;

    FatPointScheme scheme() const {
        if (empty_scheme) return FatPointScheme::empty();
        if (generated) return FatPointScheme(random_points(gen_count, seed), mults);
        std::vector<PointSpec> pts;
        pts.reserve(coords.size());
        for (const auto& c : coords) pts.push_back(PointSpec{c[0], c[1], c[2]});
        return FatPointScheme(pts, mults);
    }
};

namespace detail {

inline i64 want_int(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number_integer())
        throw ConfigError(field + ": expected an integer");
    return j.get<i64>();
}

inline u64 want_uint(const nlohmann::json& j, const std::string& field) {
    const i64 v = want_int(j, field);
    if (v < 0) throw ConfigError(field + ": must be nonnegative");
    return static_cast<u64>(v);
}

} // namespace detail

// Parses and validates. Throws ConfigError with the field name on any defect.
inline RunConfig parse_config(const nlohmann::json& j) {
    using detail::want_int;
    using detail::want_uint;
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    RunConfig c;

    if (j.contains("mode")) {
        if (!j["mode"].is_string()) throw ConfigError("mode: expected a string");
        c.mode = mode_from(j["mode"].get<std::string>());
    }

    if (!j.contains("points")) throw ConfigError("points: missing");
    const auto& pts = j["points"];
    if (!pts.is_object())
        throw ConfigError("points: expected an object with coords, count+seed, or empty");
    const int sources = int(pts.contains("coords")) + int(pts.contains("count")) +
                        int(pts.value("empty", false));
    if (sources != 1)
        throw ConfigError("points: give exactly one of coords, count (+seed), empty");

    if (pts.value("empty", false)) {
        c.empty_scheme = true;
    } else if (pts.contains("coords")) {
        const auto& arr = pts["coords"];
        if (!arr.is_array() || arr.empty())
            throw ConfigError("points.coords: expected a nonempty array");
        for (size_t i = 0; i < arr.size(); ++i) {
            const auto& p = arr[i];
            const std::string fld = "points.coords[" + std::to_string(i) + "]";
            if (!p.is_array() || p.size() != 3)
                throw ConfigError(fld + ": expected [x, y, z]");
            std::array<i64, 3> cc{};
            for (int k = 0; k < 3; ++k) {
                cc[static_cast<size_t>(k)] = want_int(p[static_cast<size_t>(k)], fld);
                if (std::abs(cc[static_cast<size_t>(k)]) >= (i64{1} << 30))
                    throw ConfigError(fld + ": coordinates must satisfy |c| < 2^30");
            }
            if (cc[0] == 0 && cc[1] == 0 && cc[2] == 0)
                throw ConfigError(fld + ": [0:0:0] is not a projective point");
            c.coords.push_back(cc);
        }
        // Name the colliding pair here; the scheme constructor would only say "not distinct".
        for (size_t a = 0; a < c.coords.size(); ++a)
            for (size_t b = a + 1; b < c.coords.size(); ++b) {
                const auto &P = c.coords[a], &Q = c.coords[b];
                const bool same = P[1] * Q[2] == P[2] * Q[1] &&
                                  P[2] * Q[0] == P[0] * Q[2] &&
                                  P[0] * Q[1] == P[1] * Q[0];
                if (same)
                    throw ConfigError("points.coords: points " + std::to_string(a) +
                                      " and " + std::to_string(b) +
                                      " coincide in the projective plane");
            }
    } else {
        c.generated = true;
        c.gen_count = want_uint(pts["count"], "points.count");
        if (c.gen_count == 0) throw ConfigError("points.count: must be positive");
        if (!pts.contains("seed")) throw ConfigError("points.seed: missing");
        c.seed = want_uint(pts["seed"], "points.seed");
    }

    const size_t npts = c.empty_scheme ? 0 : (c.generated ? c.gen_count : c.coords.size());
    if (c.empty_scheme) {
        if (j.contains("mults") && !j["mults"].empty())
            throw ConfigError("mults: must be absent or empty when points.empty is set");
    } else {
        if (!j.contains("mults")) throw ConfigError("mults: missing");
        const auto& ms = j["mults"];
        if (!ms.is_array() || ms.size() != npts)
            throw ConfigError("mults: expected an array of length " + std::to_string(npts));
        for (size_t i = 0; i < ms.size(); ++i) {
            const i64 m = want_int(ms[i], "mults[" + std::to_string(i) + "]");
            if (m < 1)
                throw ConfigError("mults[" + std::to_string(i) + "]: must be at least 1");
            c.mults.push_back(static_cast<u32>(m));
        }
    }

    if (j.contains("t")) {
        const auto& tv = j["t"];
        if (tv.is_string()) {
            if (tv.get<std::string>() != "auto")
                throw ConfigError("t: expected an integer or \"auto\"");
        } else {
            c.t = want_int(tv, "t");
            if (*c.t < 1) throw ConfigError("t: must be at least 1");
        }
    }

    if (j.contains("p")) c.p = want_uint(j["p"], "p");

    if (j.contains("t_range")) {
        const auto& r = j["t_range"];
        if (!r.is_array() || r.size() != 2)
            throw ConfigError("t_range: expected [lo, hi]");
        c.t_lo = want_int(r[0], "t_range[0]");
        c.t_hi = want_int(r[1], "t_range[1]");
        if (c.t_lo < 1) throw ConfigError("t_range[0]: must be at least 1");
        if (c.t_hi < c.t_lo) throw ConfigError("t_range: hi must be >= lo");
    }

    if (j.contains("q_max")) {
        c.q_max = want_int(j["q_max"], "q_max");
        if (c.q_max < 1 || c.q_max > 8) throw ConfigError("q_max: expected 1..8");
    }
    if (j.contains("i_max")) {
        c.i_max = want_uint(j["i_max"], "i_max");
        if (c.i_max > 61) throw ConfigError("i_max: expected at most 61");
    }

    if (j.contains("rational")) {
        if (!j["rational"].is_boolean()) throw ConfigError("rational: expected a boolean");
        c.rational = j["rational"].get<bool>();
    }

    if (j.contains("primes")) {
        const auto& ps = j["primes"];
        if (!ps.is_array() || ps.empty() || ps.size() > 2)
            throw ConfigError("primes: expected an array of one or two primes");
        for (size_t i = 0; i < ps.size(); ++i) {
            const std::string fld = "primes[" + std::to_string(i) + "]";
            const u64 v = want_uint(ps[i], fld);
            if (v >= (u64{1} << 31))
                throw ConfigError(fld + ": must lie below 2^31 (word-size arithmetic)");
            if (v <= (u64{1} << 30))
                throw ConfigError(fld + ": must exceed 2^30 so degree checks never bind");
            if (!is_prime_u64(v)) throw ConfigError(fld + ": " + std::to_string(v) +
                                                    " is not prime");
            c.primes.push_back(static_cast<u32>(v));
        }
        if (c.primes.size() == 2 && c.primes[0] == c.primes[1])
            throw ConfigError("primes: the two primes must differ");
    }

    if (j.contains("max_dense_bytes")) {
        const u64 v = want_uint(j["max_dense_bytes"], "max_dense_bytes");
        if (v < (u64{1} << 20))
            throw ConfigError("max_dense_bytes: below 1 MiB nothing useful fits");
        c.limits.max_dense_bytes = v;
    }
    if (j.contains("cache_dir")) {
        if (!j["cache_dir"].is_string()) throw ConfigError("cache_dir: expected a string");
        c.cache_dir = j["cache_dir"].get<std::string>();
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) throw ConfigError("output: expected a string");
        c.output = j["output"].get<std::string>();
    }

    // Mode-specific shape.
    switch (c.mode) {
        case RunMode::kSigma:
        case RunMode::kBound:
            break;
        case RunMode::kBetti:
        case RunMode::kVerify:
        case RunMode::kDuality:
            break; // t may be auto; resolved against the bound for p
        case RunMode::kScan:
            if (c.t_hi < c.t_lo || (c.t_lo == 0 && c.t_hi == -1))
                throw ConfigError("t_range: required for scan mode");
            break;
    }
    if (c.empty_scheme && c.mode == RunMode::kScan)
        throw ConfigError("points.empty: scan mode needs a nonempty scheme");

    return c;
}

// The degree-dependent prime check: strands reach degree (q_max + 1) * t, and
// derivative rows need the characteristic to exceed every degree in play.
inline void check_prime_vs_degrees(const RunConfig& c, i64 t_effective) {
    const i64 need = (c.q_max + 1) * t_effective;
    for (size_t i = 0; i < c.primes.size(); ++i)
        if (static_cast<i64>(c.primes[i]) <= need)
            throw ConfigError("primes[" + std::to_string(i) + "]: " +
                              std::to_string(c.primes[i]) +
                              " does not exceed the largest strand degree " +
                              std::to_string(need) + " at t = " +
                              std::to_string(t_effective));
}

// Resolved-config echo: anyone holding the report can reproduce the run.
// Generated points are echoed as explicit coordinates (the seed is kept for
// provenance); t is echoed as the resolved integer.
inline nlohmann::json echo_config(const RunConfig& c, const FatPointScheme& z,
                                  i64 t_effective) {
    nlohmann::json pj;
    if (c.empty_scheme) {
        pj = nlohmann::json{{"empty", true}};
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : z.points)
            arr.push_back(nlohmann::json::array({p.x, p.y, p.z}));
        pj = nlohmann::json{{"coords", arr}};
        if (c.generated) pj["seed"] = c.seed;
    }
    nlohmann::json j{{"mode", mode_name(c.mode)},
                     {"points", pj},
                     {"p", c.p},
                     {"q_max", c.q_max},
                     {"rational", c.rational},
                     {"max_dense_bytes", c.limits.max_dense_bytes}};
    if (!c.empty_scheme) {
        nlohmann::json ms = nlohmann::json::array();
        for (u32 m : z.mults) ms.push_back(m);
        j["mults"] = ms;
    }
    if (c.mode == RunMode::kScan)
        j["t_range"] = nlohmann::json::array({c.t_lo, c.t_hi});
    else if (c.mode == RunMode::kBetti || c.mode == RunMode::kVerify ||
             c.mode == RunMode::kDuality)
        j["t"] = t_effective;
    if (c.mode == RunMode::kBetti) j["i_max"] = c.i_max;
    if (!c.rational && !c.primes.empty()) {
        nlohmann::json ps = nlohmann::json::array();
        for (u32 q : c.primes) ps.push_back(q);
        j["primes"] = ps;
    }
    if (!c.cache_dir.empty()) j["cache_dir"] = c.cache_dir;
    if (!c.output.empty()) j["output"] = c.output;
    return j;
}

} // namespace npsurf
