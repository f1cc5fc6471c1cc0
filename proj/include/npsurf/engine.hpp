#pragma once
// Per-instance verification driver.
//
// Every dimension the driver reports is evaluated independently in each
// configured field (normally two primes near 2^31) and compared; a mismatch
// aborts the run, since it means some elimination saw a pivot vanish in one
// field only. Cell evaluations are size-guarded: a refusal marks the cell
// instead of failing the run, and callers decide whether a refused cell is
// acceptable for the check they are assembling.
//
// The N_p check at embedding degree t asks for
//   K_{0,q} = 0 for 1 <= q <= q_max, and
//   K_{i,q} = 0 for 1 <= i <= p and q in {0, 2, .., q_max},
// leaving the linear strand q = 1 free. The bound t_min = max(sigma + 1, d,
// 1 + (d+p)/3) predicts success; a failed check at t >= t_min is flagged as
// an engine bug candidate and the offending differentials are dumped.

#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "koszul.hpp"

namespace npsurf {

class PrimeDisagreement : public std::runtime_error {
public:
    PrimeDisagreement(const std::string& what_quantity, u64 char_a, u64 char_b,
                      u64 value_a, u64 value_b)
        : std::runtime_error("field disagreement on " + what_quantity + ": char " +
                             std::to_string(char_a) + " gives " + std::to_string(value_a) +
                             ", char " + std::to_string(char_b) + " gives " +
                             std::to_string(value_b) + "; at least one modulus is bad") {}
};

struct EngineOptions {
    ElimLimits limits{};
    i64 q_max = 3;
};

enum class CellStatus { kOk, kRefused };

struct CellResult {
    u64 p = 0;
    i64 q = 0;
    bool twisted = false;
    CellStatus status = CellStatus::kOk;
    u64 dim = 0;
    u64 rank_top = 0, rank_side = 0;
    DiffShape top_shape{0, 0}, side_shape{0, 0};
    double ms = 0.0;
    std::string note;

    bool ok() const { return status == CellStatus::kOk; }
};

struct CheckLine {
    std::string name;
    bool pass;
    std::string detail;
};

struct InstanceSummary {
    u64 s = 0, d = 0, degz = 0, sigma = 0, n_star = 0;
    i64 t = 0;
    u64 n_w = 0;
    i64 big_n = 0;
    i64 ambient_lower = 0;
    bool very_ample = false;
    std::optional<i64> rr_predicted, rr_direct;
    i64 h0_kd = 0;
};

struct NpVerification {
    u64 p = 0;
    NpBound bound{};
    bool theorem_applies = false;
    InstanceSummary summary{};
    std::vector<CellResult> cells;
    std::vector<CheckLine> checks;
    bool refused = false;
    bool pass = false;
};

struct BettiCell {
    bool ok = false;
    u64 dim = 0;
    std::string note;
};

struct BettiResult {
    u64 i_max = 0;
    i64 q_max = 0;
    // cells[q][i]
    std::vector<std::vector<BettiCell>> cells;
};

struct DualityResult {
    u64 p = 0;
    i64 partner = 0; // N - 2 - p; negative means the right side is 0 by range
    CellResult lhs, rhs;
    bool comparable = false; // both sides computed
    bool equal = false;
};

enum class ScanStatus { kNotVeryAmple, kPass, kFail, kRefused };

struct ScanRow {
    i64 t;
    ScanStatus status;
};

struct ScanResult {
    NpBound bound{};
    std::vector<ScanRow> rows;
    std::optional<i64> first_pass;
    bool any_refused = false;
    bool predicted_all_pass = true; // every scanned t >= bound passed
};

// One field's worth of models for a fixed (Z, t): the untwisted tower for
// the Betti/N_p cells and, on demand, the canonical twist for duality.
template <class F>
class FieldRun {
public:
    FieldRun(F f, const FatPointScheme& z, i64 t, ElimLimits lim)
        : f_(std::move(f)), z_(z), t_(t), lim_(lim), pts_(reduce_points(f_, z_.points)),
          plain_(f_, z_, t, zero_twist(z.size()), lim) {}

    FieldRun(const FieldRun&) = delete;
    FieldRun& operator=(const FieldRun&) = delete;

    const F& field() const { return f_; }

    KoszulModel<F>& model(bool twisted) {
        if (!twisted) return plain_;
        if (!twisted_)
            twisted_ = std::make_unique<KoszulModel<F>>(
                f_, z_, t_, DivisorClass::canonical(z_.size()), lim_);
        return *twisted_;
    }

    bool has_twisted() const { return twisted_ != nullptr; }

    u64 sigma_value() { return sigma(f_, z_, lim_); }

    u64 h0_of(const DivisorClass& d) { return h0(f_, pts_, d, lim_); }

    AmbientDim ambient() { return ambient_dim(f_, z_, static_cast<u64>(t_), lim_); }

private:
    F f_;
    FatPointScheme z_;
    i64 t_;
    ElimLimits lim_;
    std::vector<PointP2<F>> pts_;
    KoszulModel<F> plain_;
    std::unique_ptr<KoszulModel<F>> twisted_;
};

// The driver for one (Z, t): evaluates quantities in every field and
// enforces agreement. Cell results are cached, so overlapping checks
// (several p at one t, a table after a verification) pay once.
template <class F>
class InstanceAnalysis {
public:
    InstanceAnalysis(std::vector<F> fields, const FatPointScheme& z, i64 t,
                     EngineOptions opt = {})
        : z_(z), t_(t), opt_(opt) {
        if (fields.empty())
            throw std::invalid_argument("InstanceAnalysis: no fields configured");
        for (auto& f : fields)
            runs_.push_back(std::make_unique<FieldRun<F>>(std::move(f), z, t, opt.limits));
    }

    const FatPointScheme& scheme() const { return z_; }
    i64 t() const { return t_; }
    const EngineOptions& options() const { return opt_; }

    u64 sigma_checked() {
        if (!sigma_) sigma_ = agree("sigma", [](FieldRun<F>& r) { return r.sigma_value(); });
        return *sigma_;
    }

    u64 nw_checked() {
        if (!nw_)
            nw_ = agree("dim W", [](FieldRun<F>& r) { return r.model(false).nw(); });
        return *nw_;
    }

    u64 strand_dim_checked(i64 q, bool twisted) {
        return agree("dim B_" + std::to_string(q) + (twisted ? " (canonical twist)" : ""),
                     [&](FieldRun<F>& r) { return r.model(twisted).strand_dim(q); });
    }

    u64 h0_checked(const DivisorClass& d) {
        return agree("h0", [&](FieldRun<F>& r) { return r.h0_of(d); });
    }

    NpBound bound(u64 p) { return np_bound_from(sigma_checked(), z_.mult_sum(), p); }

    // dim K_{p,q} with agreement, timing, and refusal capture. Strand
    // dimensions are agreed on first, so the size guard fires identically
    // in every field and a refusal is recorded before any elimination.
    CellResult cell(u64 p, i64 q, bool twisted) {
        const auto key = std::make_tuple(p, q, twisted);
        auto it = cells_.find(key);
        if (it != cells_.end()) return it->second;

        CellResult res;
        res.p = p;
        res.q = q;
        res.twisted = twisted;
        strand_dim_checked(q, twisted);
        strand_dim_checked(q + 1, twisted);
        if (q >= 1) strand_dim_checked(q - 1, twisted);
        res.top_shape = runs_[0]->model(twisted).diff_shape(p, q);
        res.side_shape = runs_[0]->model(twisted).diff_shape(p + 1, q - 1);

        const auto t0 = std::chrono::steady_clock::now();
        try {
            res.dim = agree(cell_name(p, q, twisted), [&](FieldRun<F>& r) {
                return r.model(twisted).koszul_dim(p, q);
            });
            res.rank_top = agree("rank " + cell_name(p, q, twisted), [&](FieldRun<F>& r) {
                return r.model(twisted).rank_d(p, q);
            });
            res.rank_side = agree("rank(side) " + cell_name(p, q, twisted),
                                  [&](FieldRun<F>& r) {
                                      return r.model(twisted).rank_d(p + 1, q - 1);
                                  });
        } catch (const SizeGuard& g) {
            res.status = CellStatus::kRefused;
            res.note = g.what();
        }
        res.ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
        cells_.emplace(key, res);
        return res;
    }

    InstanceSummary summarize() {
        InstanceSummary s;
        s.s = z_.size();
        s.d = z_.mult_sum();
        s.degz = z_.degree();
        s.sigma = sigma_checked();
        s.n_star = s.sigma == 0 ? 0 : s.sigma - 1;
        s.t = t_;
        s.n_w = nw_checked();
        s.big_n = static_cast<i64>(s.n_w) - 1;
        const i64 n = agree("ambient N", [](FieldRun<F>& r) {
            return static_cast<u64>(r.ambient().n);
        });
        const auto amb = runs_[0]->ambient();
        s.ambient_lower = amb.lower_bound;
        s.very_ample = amb.very_ample;
        if (n != s.big_n)
            throw std::logic_error("engine: ambient N disagrees with dim W - 1");
        const DivisorClass kd = DivisorClass::canonical(z_.size())
                                    .plus(DivisorClass::embedding(t_, z_));
        s.h0_kd = static_cast<i64>(h0_checked(kd));
        if (static_cast<u64>(t_) >= s.d && t_ >= 0) {
            s.rr_predicted = riemann_roch_h0(static_cast<u64>(t_), z_);
            s.rr_direct = s.h0_kd;
        }
        return s;
    }

    // The full N_p verification at this t. Cells that the theorem requires
    // to vanish are listed in res.cells; res.pass demands every one of them
    // computed and zero.
    NpVerification check_np(u64 p) {
        NpVerification res;
        res.p = p;
        res.bound = bound(p);
        res.theorem_applies = t_ >= 0 && static_cast<u64>(t_) >= res.bound.t_min;
        res.summary = summarize();
        if (t_ < static_cast<i64>(res.bound.sigma) + 1)
            throw std::invalid_argument("check_np: t = " + std::to_string(t_) +
                                        " is below sigma + 1 = " +
                                        std::to_string(res.bound.sigma + 1) +
                                        "; the class is not known to be very ample");

        for (i64 q = 1; q <= opt_.q_max; ++q) res.cells.push_back(cell(0, q, false));
        for (u64 i = 1; i <= p; ++i) {
            res.cells.push_back(cell(i, 0, false));
            for (i64 q = 2; q <= opt_.q_max; ++q) res.cells.push_back(cell(i, q, false));
        }

        bool all_zero = true;
        for (const auto& c : res.cells) {
            if (!c.ok()) {
                res.refused = true;
                all_zero = false;
            } else if (c.dim != 0) {
                all_zero = false;
            }
        }

        res.checks.push_back(check_projective_normality(res.cells));
        if (p >= 1) res.checks.push_back(check_higher_strands(res.cells, p));
        res.checks.push_back(check_ambient(res.summary));
        res.checks.push_back(check_riemann_roch(res.summary));
        res.checks.push_back(check_intersection(res.summary));

        res.pass = all_zero;
        for (const auto& c : res.checks)
            if (!c.pass) res.pass = false;
        return res;
    }

    BettiResult betti(u64 i_max, i64 q_max) {
        const u64 sg = sigma_checked();
        if (t_ < static_cast<i64>(sg))
            throw std::invalid_argument("betti: t = " + std::to_string(t_) +
                                        " is below sigma = " + std::to_string(sg) +
                                        "; the section ring is not the coordinate ring");
        BettiResult r;
        r.i_max = i_max;
        r.q_max = q_max;
        r.cells.assign(static_cast<size_t>(q_max + 1),
                       std::vector<BettiCell>(i_max + 1));
        for (i64 q = 0; q <= q_max; ++q)
            for (u64 i = 0; i <= i_max; ++i) {
                const CellResult c = cell(i, q, false);
                BettiCell& b = r.cells[static_cast<size_t>(q)][i];
                b.ok = c.ok();
                b.dim = c.dim;
                b.note = c.note;
            }
        return r;
    }

    // Green duality: dim K_{p,2}(D_t) vs dim K_{N-2-p,1}(D_t, K).
    DualityResult duality(u64 p) {
        const u64 sg = sigma_checked();
        if (t_ < static_cast<i64>(sg) + 1)
            throw std::invalid_argument("duality: t must be at least sigma + 1");
        DualityResult r;
        r.p = p;
        r.partner = static_cast<i64>(nw_checked()) - 3 - static_cast<i64>(p);
        r.lhs = cell(p, 2, false);
        if (r.partner < 0) {
            r.rhs.p = 0;
            r.rhs.q = 1;
            r.rhs.twisted = true;
            r.rhs.dim = 0;
            r.rhs.note = "homological index below zero";
        } else {
            r.rhs = cell(static_cast<u64>(r.partner), 1, true);
        }
        r.comparable = r.lhs.ok() && r.rhs.ok();
        r.equal = r.comparable && r.lhs.dim == r.rhs.dim;
        return r;
    }

    // Optional on-disk rank cache, one plain-text file per field. Lines are
    // "<P|K> p q rank" (P: untwisted, K: canonical twist). Files are keyed by
    // an instance fingerprint plus the characteristic; they only ever replay
    // ranks the dual-field agreement already accepted, and deleting them is
    // always safe.
    std::string cache_stem() const {
        std::ostringstream os;
        os << t_ << ';';
        for (size_t i = 0; i < z_.points.size(); ++i)
            os << z_.points[i].x << ',' << z_.points[i].y << ',' << z_.points[i].z
               << ',' << z_.mults[i] << ';';
        u64 h = 0xcbf29ce484222325ull;
        for (unsigned char c : os.str()) h = (h ^ c) * 0x100000001b3ull;
        std::ostringstream hex;
        hex << "z" << std::hex << h;
        return hex.str();
    }

    void load_rank_cache(const std::string& dir) {
        for (auto& run : runs_) {
            std::ifstream is(cache_file(dir, *run));
            std::string tag;
            u64 p, r;
            i64 q;
            while (is >> tag >> p >> q >> r) {
                if (tag != "P" && tag != "K") break;
                run->model(tag == "K").preload_rank(p, q, r);
            }
        }
    }

    void save_rank_cache(const std::string& dir) {
        for (auto& run : runs_) {
            std::ofstream os(cache_file(dir, *run));
            for (const auto& [key, r] : run->model(false).rank_cache())
                os << "P " << key.first << ' ' << key.second << ' ' << r << '\n';
            if (run->has_twisted())
                for (const auto& [key, r] : run->model(true).rank_cache())
                    os << "K " << key.first << ' ' << key.second << ' ' << r << '\n';
        }
    }

    // Audit dump of one cell's differentials, one file per field.
    std::vector<std::string> dump_cell(u64 p, i64 q, bool twisted,
                                       const std::string& prefix) {
        std::vector<std::string> files;
        for (auto& run : runs_) {
            for (int side = 0; side < 2; ++side) {
                const u64 pp = p + static_cast<u64>(side);
                const i64 qq = q - side;
                if (pp == 0) continue;
                std::ostringstream name;
                name << prefix << "_d" << pp << "_" << qq << (twisted ? "_K" : "")
                     << "_char" << field_characteristic(run->field()) << ".sms";
                std::ofstream os(name.str());
                write_sms(os, run->model(twisted).differential(pp, qq));
                files.push_back(name.str());
            }
        }
        return files;
    }

private:
    std::string cache_file(const std::string& dir, const FieldRun<F>& run) const {
        return dir + "/" + cache_stem() + "_char" +
               std::to_string(field_characteristic(run.field())) + ".ranks";
    }

    static std::string cell_name(u64 p, i64 q, bool twisted) {
        return "dim K_{" + std::to_string(p) + "," + std::to_string(q) + "}" +
               (twisted ? " (canonical twist)" : "");
    }

    template <class Fn>
    u64 agree(const std::string& what, Fn&& fn) {
        const u64 v0 = static_cast<u64>(fn(*runs_[0]));
        for (size_t i = 1; i < runs_.size(); ++i) {
            const u64 vi = static_cast<u64>(fn(*runs_[i]));
            if (vi != v0)
                throw PrimeDisagreement(what, field_characteristic(runs_[0]->field()),
                                        field_characteristic(runs_[i]->field()), v0, vi);
        }
        return v0;
    }

    CheckLine check_projective_normality(const std::vector<CellResult>& cells) const {
        CheckLine line{"projective normality (K_{0,q} = 0, q >= 1)", true, ""};
        for (const auto& c : cells)
            if (c.p == 0) accumulate_zero(line, c);
        return line;
    }

    CheckLine check_higher_strands(const std::vector<CellResult>& cells, u64 p) const {
        CheckLine line{"strands q != 1 vanish for 1 <= i <= " + std::to_string(p), true, ""};
        for (const auto& c : cells)
            if (c.p >= 1) accumulate_zero(line, c);
        return line;
    }

    static void accumulate_zero(CheckLine& line, const CellResult& c) {
        if (!c.ok()) {
            line.pass = false;
            line.detail += "K_{" + std::to_string(c.p) + "," + std::to_string(c.q) +
                           "} refused; ";
        } else if (c.dim != 0) {
            line.pass = false;
            line.detail += "K_{" + std::to_string(c.p) + "," + std::to_string(c.q) +
                           "} = " + std::to_string(c.dim) + "; ";
        }
    }

    CheckLine check_ambient(const InstanceSummary& s) const {
        CheckLine line{"ambient dimension identity", true, ""};
        if (static_cast<u64>(s.t) >= s.sigma) {
            if (s.big_n != s.ambient_lower) {
                line.pass = false;
                line.detail = "N = " + std::to_string(s.big_n) + " but C(t+2,2)-degZ-1 = " +
                              std::to_string(s.ambient_lower);
            }
        } else {
            line.detail = "t < sigma, identity not expected";
        }
        return line;
    }

    CheckLine check_riemann_roch(const InstanceSummary& s) const {
        CheckLine line{"riemann-roch count of h0(K + D_t)", true, ""};
        if (s.rr_predicted) {
            if (*s.rr_predicted != *s.rr_direct) {
                line.pass = false;
                line.detail = "predicted " + std::to_string(*s.rr_predicted) + ", direct " +
                              std::to_string(*s.rr_direct);
            }
        } else {
            line.detail = "t < d, count not applicable";
        }
        return line;
    }

    CheckLine check_intersection(const InstanceSummary& s) const {
        CheckLine line{"(K + D_t).D_t > K.D_t", true, ""};
        if (static_cast<u64>(s.t) > s.d) {
            const DivisorClass dt = DivisorClass::embedding(s.t, z_);
            const DivisorClass k = DivisorClass::canonical(z_.size());
            const i64 lhs = intersect(k.plus(dt), dt);
            const i64 rhs = intersect(k, dt);
            if (!(lhs > rhs)) {
                line.pass = false;
                line.detail = std::to_string(lhs) + " vs " + std::to_string(rhs);
            }
        } else {
            line.detail = "t <= d, not asserted";
        }
        return line;
    }

    FatPointScheme z_;
    i64 t_;
    EngineOptions opt_;
    std::vector<std::unique_ptr<FieldRun<F>>> runs_;
    std::optional<u64> sigma_;
    std::optional<u64> nw_;
    std::map<std::tuple<u64, i64, bool>, CellResult> cells_;
};

// t-sweep of the N_p check. Degrees below sigma + 1 are recorded as not
// very ample rather than evaluated; refusals surface per row.
template <class F>
ScanResult scan_np(const std::vector<F>& fields, const FatPointScheme& z, u64 p,
                   i64 t_lo, i64 t_hi, const EngineOptions& opt = {}) {
    if (t_lo > t_hi) throw std::invalid_argument("scan: empty degree range");
    ScanResult res;
    bool bound_known = false;
    for (i64 t = t_lo; t <= t_hi; ++t) {
        std::unique_ptr<InstanceAnalysis<F>> an;
        try {
            an = std::make_unique<InstanceAnalysis<F>>(fields, z, t, opt);
        } catch (const std::invalid_argument&) {
            // too few sections to embed a surface at this degree
            res.rows.push_back({t, ScanStatus::kNotVeryAmple});
            continue;
        }
        const u64 sg = an->sigma_checked();
        if (!bound_known) {
            res.bound = an->bound(p);
            bound_known = true;
        }
        if (t < static_cast<i64>(sg) + 1) {
            res.rows.push_back({t, ScanStatus::kNotVeryAmple});
            continue;
        }
        const NpVerification v = an->check_np(p);
        ScanStatus st = v.pass ? ScanStatus::kPass
                               : (v.refused ? ScanStatus::kRefused : ScanStatus::kFail);
        res.rows.push_back({t, st});
        if (st == ScanStatus::kPass && !res.first_pass) res.first_pass = t;
        if (st == ScanStatus::kRefused) res.any_refused = true;
        if (static_cast<u64>(t) >= res.bound.t_min && st != ScanStatus::kPass)
            res.predicted_all_pass = false;
    }
    return res;
}

} // namespace npsurf
