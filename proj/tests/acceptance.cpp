// Release gate: every numbered check prints exactly one PASS/FAIL line and
// the process exits 0 only when all of them pass. The checks re-derive their
// expectations from classical geometry (scroll, Veronese-type resolutions)
// and from an independent dense rational elimination, so a regression in the
// sparse kernel, the strand bases, or the differential signs cannot slip
// through on the strength of its own arithmetic.

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "npsurf/engine.hpp"
#include "oracle.hpp"

using namespace npsurf;

namespace {

std::vector<PrimeField> two_primes() {
    return {PrimeField(2147483647ull), PrimeField(2147483629ull)};
}

const PointSpec E0{1, 0, 0}, E1{0, 1, 0}, E2{0, 0, 1}, U{1, 1, 1}, V{1, 2, 3};

struct Member {
    std::string name;
    FatPointScheme z;
    u64 p;
    u64 expect_tmin; // 0: derived from the live sigma only
};

struct Run {
    std::string name;
    u64 p;
    i64 t;
    NpVerification v;
};

// d_{p,q} o d_{p+1,q-1} applied to every domain basis vector.
template <class F>
bool chain_vanishes(KoszulModel<F>& m, u64 p, i64 q) {
    const F& f = m.field();
    const auto top = m.differential(p, q);
    const auto side = m.differential(p + 1, q - 1);
    if (top.rows() == 0 || side.cols() == 0) return true;
    std::vector<typename F::Element> v(side.cols(), F::zero());
    for (u64 k = 0; k < side.cols(); ++k) {
        std::fill(v.begin(), v.end(), F::zero());
        v[k] = f.one();
        const auto out = top.apply_dense(side.apply_dense(v));
        for (const auto& x : out)
            if (!f.is_zero(x)) return false;
    }
    return true;
}

} // namespace

int main() {
    bool all = true;
    auto line = [&](int n, bool ok, const std::string& what, const std::string& detail) {
        std::cout << (ok ? "PASS" : "FAIL") << " " << n << ": " << what
                  << (detail.empty() ? "" : " [" + detail + "]") << std::endl;
        if (!ok) all = false;
    };
    auto guarded = [&](int n, const std::string& what, auto&& body) {
        std::string detail;
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        line(n, ok, what, detail);
    };

    const auto fields = two_primes();
    const FatPointScheme scroll({E0}, {1});

    guarded(1, "cubic scroll table matches the classical resolution and the rational oracle",
            [&](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        InstanceAnalysis<PrimeField> an(fields, scroll, 2);
        const BettiResult b = an.betti(3, 3);
        RationalField fq;
        KoszulModel<RationalField> mq(fq, scroll, 2, zero_twist(1));
        bool ok = true;
        for (i64 q = 0; q <= 3; ++q)
            for (u64 i = 0; i <= 3; ++i) {
                const u64 expect = (q == 0 && i == 0) ? 1
                                   : (q == 1 && i == 1) ? 3
                                   : (q == 1 && i == 2) ? 2
                                                        : 0;
                const BettiCell& cell = b.cells[static_cast<size_t>(q)][i];
                i64 oracle = static_cast<i64>(choose(mq.nw(), i) * mq.strand_dim(q));
                if (i >= 1)
                    oracle -= static_cast<i64>(npsurf_test::oracle_rank(mq.differential(i, q)));
                oracle -= static_cast<i64>(npsurf_test::oracle_rank(mq.differential(i + 1, q - 1)));
                if (!cell.ok || cell.dim != expect || oracle != static_cast<i64>(expect)) {
                    ok = false;
                    detail = "entry (i=" + std::to_string(i) + ", q=" + std::to_string(q) +
                             "): table " + std::to_string(cell.dim) + ", oracle " +
                             std::to_string(oracle) + ", classical " + std::to_string(expect);
                }
            }
        const double sec = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
        if (detail.empty()) {
            std::ostringstream os;
            os.precision(2);
            os << std::fixed << sec << "s";
            detail = os.str();
        }
        return ok && sec < 10.0;
    });

    std::vector<Member> suite;
    suite.push_back({"m=(1) p=0", FatPointScheme({E0}, {1}), 0, 2});
    suite.push_back({"m=(1) p=2", FatPointScheme({E0}, {1}), 2, 2});
    suite.push_back({"m=(2) p=1", FatPointScheme({E0}, {2}), 1, 3});
    suite.push_back({"m=(2) p=2", FatPointScheme({E0}, {2}), 2, 3});
    suite.push_back({"m=(1,1) p=1", FatPointScheme({E0, E1}, {1, 1}), 1, 3});
    suite.push_back({"m=(1,1) p=2", FatPointScheme({E0, E1}, {1, 1}), 2, 3});
    suite.push_back({"m=(1,1,1) p=2", FatPointScheme({E0, E1, E2}, {1, 1, 1}), 2, 3});
    suite.push_back({"m=(2,1) p=1", FatPointScheme({E0, E1}, {2, 1}), 1, 4});
    suite.push_back({"m=(2,1,1) p=1", FatPointScheme({E0, E1, E2}, {2, 1, 1}), 1, 4});
    suite.push_back({"m=(1,1,1,1) p=1", FatPointScheme({E0, E1, E2, U}, {1, 1, 1, 1}), 1, 4});
    suite.push_back({"m=(2,2) p=1", FatPointScheme({E0, E1}, {2, 2}), 1, 5});
    suite.push_back({"m=(1,1,1,1,1) p=1", FatPointScheme({E0, E1, E2, U, V}, {1, 1, 1, 1, 1}), 1, 5});
    suite.push_back({"seeded4 p=1", FatPointScheme(random_points(4, 0x5eed2026ull), {1, 1, 1, 1}), 1, 0});

    std::vector<Run> runs;
    guarded(2, "every suite instance satisfies N_p at the predicted degree and one above",
            [&](std::string& detail) {
        bool ok = suite.size() >= 10;
        for (const auto& mb : suite) {
            const u64 sg = sigma(fields[0], mb.z);
            if (sigma(fields[1], mb.z) != sg) {
                ok = false;
                detail = mb.name + ": sigma disagrees between fields";
                continue;
            }
            const NpBound nb = np_bound_from(sg, mb.z.mult_sum(), mb.p);
            if (mb.expect_tmin != 0 && nb.t_min != mb.expect_tmin) {
                ok = false;
                detail = mb.name + ": predicted degree moved to " + std::to_string(nb.t_min);
                continue;
            }
            for (i64 t : {static_cast<i64>(nb.t_min), static_cast<i64>(nb.t_min) + 1}) {
                InstanceAnalysis<PrimeField> an(fields, mb.z, t);
                NpVerification v = an.check_np(mb.p);
                if (!(v.pass && !v.refused && v.theorem_applies)) {
                    ok = false;
                    if (detail.empty())
                        detail = mb.name + " at t=" + std::to_string(t) +
                                 (v.refused ? " refused" : " failed");
                }
                runs.push_back({mb.name, mb.p, t, std::move(v)});
            }
        }
        if (detail.empty())
            detail = std::to_string(suite.size()) + " instances, " +
                     std::to_string(runs.size()) + " verifications";
        return ok;
    });

    guarded(3, "projective normality: K_{0,q} = 0 for q in {2,3} on every verified instance",
            [&](std::string& detail) {
        u64 checked = 0;
        for (const auto& r : runs)
            for (const auto& c : r.v.cells)
                if (c.p == 0 && (c.q == 2 || c.q == 3)) {
                    ++checked;
                    if (!c.ok() || c.dim != 0) {
                        detail = r.name + " t=" + std::to_string(r.t) + " K_{0," +
                                 std::to_string(c.q) + "} = " + std::to_string(c.dim);
                        return false;
                    }
                }
        detail = std::to_string(checked) + " cells, all zero";
        return checked == 2 * runs.size() && !runs.empty();
    });

    guarded(4, "regularity strand: K_{i,3} = 0 for every computed i >= 1",
            [&](std::string& detail) {
        u64 checked = 0;
        for (const auto& r : runs)
            for (const auto& c : r.v.cells)
                if (c.p >= 1 && c.q == 3) {
                    ++checked;
                    if (!c.ok() || c.dim != 0) {
                        detail = r.name + " t=" + std::to_string(r.t) + " K_{" +
                                 std::to_string(c.p) + ",3} = " + std::to_string(c.dim);
                        return false;
                    }
                }
        detail = std::to_string(checked) + " cells, all zero";
        return checked > 0;
    });

    guarded(5, "Riemann-Roch section count equals the direct count whenever t >= d",
            [&](std::string& detail) {
        u64 checked = 0;
        for (const auto& r : runs) {
            const InstanceSummary& s = r.v.summary;
            if (r.t < static_cast<i64>(s.d)) continue;
            ++checked;
            if (!s.rr_predicted || !s.rr_direct || *s.rr_predicted != *s.rr_direct) {
                detail = r.name + " t=" + std::to_string(r.t);
                return false;
            }
        }
        detail = std::to_string(checked) + " instances";
        return checked == runs.size() && !runs.empty();
    });

    guarded(6, "ambient dimension equals C(t+2,2) - deg Z - 1 on every verified instance",
            [&](std::string& detail) {
        for (const auto& r : runs) {
            const InstanceSummary& s = r.v.summary;
            if (s.big_n != s.ambient_lower || !s.very_ample) {
                detail = r.name + " t=" + std::to_string(r.t) + ": N = " +
                         std::to_string(s.big_n) + " vs " + std::to_string(s.ambient_lower);
                return false;
            }
        }
        detail = std::to_string(runs.size()) + " instances";
        return !runs.empty();
    });

    guarded(7, "duality pairs agree on the cubic scroll for p in {0,1,2}",
            [&](std::string& detail) {
        InstanceAnalysis<PrimeField> an(fields, scroll, 2);
        for (u64 p : {u64{0}, u64{1}, u64{2}}) {
            const DualityResult d = an.duality(p);
            if (!d.comparable || !d.equal) {
                detail = "p=" + std::to_string(p) + ": " + std::to_string(d.lhs.dim) +
                         " vs " + std::to_string(d.rhs.dim);
                return false;
            }
        }
        return true;
    });

    guarded(8, "self-consistency: composites vanish; prime, rational, and oracle ranks agree",
            [&](std::string& detail) {
        const PrimeField f1(2147483647ull), f2(2147483629ull);
        RationalField fq;
        const FatPointScheme delpezzo({E0, E1, E2}, {1, 1, 1});
        KoszulModel<PrimeField> ms(f1, scroll, 2, zero_twist(1));
        KoszulModel<PrimeField> ms2(f2, scroll, 2, zero_twist(1));
        KoszulModel<RationalField> msq(fq, scroll, 2, zero_twist(1));
        KoszulModel<PrimeField> md(f1, delpezzo, 3, zero_twist(3));
        for (u64 p = 1; p <= 3; ++p)
            for (i64 q = 0; q <= 2; ++q)
                if (!chain_vanishes(ms, p, q) || !chain_vanishes(msq, p, q) ||
                    !chain_vanishes(md, p, q)) {
                    detail = "composite at (p=" + std::to_string(p) + ", q=" +
                             std::to_string(q) + ") is nonzero";
                    return false;
                }
        u64 compared = 0;
        for (u64 p = 1; p <= 4; ++p)
            for (i64 q = 0; q <= 3; ++q) {
                const u64 ra = ms.rank_d(p, q);
                const auto d = msq.differential(p, q);
                const u64 ro = (d.rows() && d.cols()) ? npsurf_test::oracle_rank(d) : 0;
                if (ra != ms2.rank_d(p, q) || ra != msq.rank_d(p, q) || ra != ro) {
                    detail = "rank of d_{" + std::to_string(p) + "," + std::to_string(q) +
                             "} differs between fields";
                    return false;
                }
                ++compared;
            }
        // Every engine value in the checks above was already accepted by the
        // dual-prime agreement layer, which throws on the first mismatch.
        detail = std::to_string(compared) + " ranks cross-checked in three arithmetics";
        return compared == 16;
    });

    guarded(9, "five-point syzygy bound stays strictly below sigma + p for p = 4..50",
            [&](std::string& detail) {
        const FatPointScheme five({E0, E1, E2, U, V}, {1, 1, 1, 1, 1});
        const u64 sg = sigma(fields[0], five);
        if (sigma(fields[1], five) != sg) {
            detail = "sigma disagrees between fields";
            return false;
        }
        for (u64 p = 4; p <= 50; ++p) {
            const NpBound nb = np_bound_from(sg, five.mult_sum(), p);
            if (nb.t_min != np_bound_value(sg, five.mult_sum(), p)) {
                detail = "bound forms disagree at p=" + std::to_string(p);
                return false;
            }
            if (nb.t_min >= sg + p) {
                detail = "p=" + std::to_string(p) + ": " + std::to_string(nb.t_min) +
                         " >= " + std::to_string(sg + p);
                return false;
            }
        }
        detail = "sigma=" + std::to_string(sg) + ", 47 values of p";
        return true;
    });

    std::cout << (all ? "ACCEPTANCE: all checks passed"
                      : "ACCEPTANCE: at least one check failed")
              << std::endl;
    return all ? 0 : 1;
}
