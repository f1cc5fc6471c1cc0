#pragma once
// Fat point schemes in the projective plane: points with multiplicities.
//
// Points carry integer homogeneous coordinates so one scheme can be reduced
// into any coefficient field. Coordinates are kept below 2^30 in absolute
// value; pairwise distinctness is then a cross-product check in 64 bits,
// and distinctness over the rationals survives reduction mod any modulus
// larger than twice the coordinate bound used by random_points.

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "field.hpp"

namespace npsurf {

struct PointSpec {
    i64 x, y, z;
};

inline bool proportional(const PointSpec& p, const PointSpec& q) {
    return p.y * q.z - p.z * q.y == 0 && p.z * q.x - p.x * q.z == 0 &&
           p.x * q.y - p.y * q.x == 0;
}

struct FatPointScheme {
    std::vector<PointSpec> points;
    std::vector<u32> mults;

    FatPointScheme(std::vector<PointSpec> pts, std::vector<u32> ms)
        : points(std::move(pts)), mults(std::move(ms)) {
        if (points.empty())
            throw std::invalid_argument("FatPointScheme: at least one point required "
                                        "(use FatPointScheme::empty() for the control case)");
        if (points.size() != mults.size())
            throw std::invalid_argument("FatPointScheme: points/mults size mismatch");
        constexpr i64 kCoordBound = 1ll << 30;
        for (const auto& p : points) {
            if (p.x == 0 && p.y == 0 && p.z == 0)
                throw std::invalid_argument("FatPointScheme: zero coordinate vector");
            if (std::abs(p.x) >= kCoordBound || std::abs(p.y) >= kCoordBound ||
                std::abs(p.z) >= kCoordBound)
                throw std::invalid_argument("FatPointScheme: coordinate too large");
        }
        for (u32 m : mults)
            if (m < 1) throw std::invalid_argument("FatPointScheme: multiplicity < 1");
        for (size_t i = 0; i < points.size(); ++i)
            for (size_t j = i + 1; j < points.size(); ++j)
                if (proportional(points[i], points[j]))
                    throw std::invalid_argument("FatPointScheme: points not distinct");
    }

    // The plane with no points blown up: the control case for comparing the
    // pipeline against classical Veronese resolutions. Kept behind a named
    // factory so an accidental empty instance cannot slip through the ctor.
    static FatPointScheme empty() { return FatPointScheme(Empty{}); }

    u64 size() const { return points.size(); }

    // Degree of the scheme: sum of C(m_i + 1, 2).
    u64 degree() const {
        u64 d = 0;
        for (u32 m : mults) d += static_cast<u64>(m) * (m + 1) / 2;
        return d;
    }

    u64 mult_sum() const {
        u64 s = 0;
        for (u32 m : mults) s += m;
        return s;
    }

    u32 max_mult() const {
        u32 m = 0;
        for (u32 v : mults) m = std::max(m, v);
        return m;
    }

private:
    struct Empty {};
    explicit FatPointScheme(Empty) {}
};

// splitmix64; the fixed-increment state walk keeps streams reproducible
// across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(u64 seed) : s_(seed) {}
    u64 next() {
        u64 z = (s_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    u64 s_;
};

// s distinct affine points [x : y : 1] with 0 <= x, y < 2^15. The bound
// keeps every 2x2 coordinate minor below 2^30, so distinct points stay
// distinct after reduction mod any admissible prime.
inline std::vector<PointSpec> random_points(u64 s, u64 seed) {
    SplitMix64 rng(seed);
    std::vector<PointSpec> pts;
    pts.reserve(s);
    while (pts.size() < s) {
        i64 x = static_cast<i64>(rng.next() & 0x7fff);
        i64 y = static_cast<i64>(rng.next() & 0x7fff);
        PointSpec p{x, y, 1};
        bool fresh = true;
        for (const auto& q : pts)
            if (proportional(p, q)) { fresh = false; break; }
        if (fresh) pts.push_back(p);
    }
    return pts;
}

// A point reduced into a field, normalized so its last nonzero coordinate
// is one. Normalization makes condition rows canonical per field.
template <class F>
struct PointP2 {
    typename F::Element c[3];

    PointP2(const F& f, const PointSpec& p) {
        c[0] = f.from_i64(p.x);
        c[1] = f.from_i64(p.y);
        c[2] = f.from_i64(p.z);
        int last = -1;
        for (int i = 2; i >= 0; --i)
            if (!f.is_zero(c[i])) { last = i; break; }
        if (last < 0) throw std::invalid_argument("PointP2: zero vector after reduction");
        auto s = f.inv(c[last]);
        for (int i = 0; i < 3; ++i) c[i] = f.mul(c[i], s);
    }
};

template <class F>
std::vector<PointP2<F>> reduce_points(const F& f, const std::vector<PointSpec>& pts) {
    std::vector<PointP2<F>> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.emplace_back(f, p);
    return out;
}

} // namespace npsurf
