#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "error.hpp"

namespace mkge {

// q = a + b*i + c*j + d*k with the usual Hamilton relations
// i^2 = j^2 = k^2 = ijk = -1.
struct Quaternion {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

inline Quaternion hamilton_product(const Quaternion& p, const Quaternion& q) {
    return Quaternion{
        p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    };
}

inline Quaternion conjugate(const Quaternion& q) {
    return Quaternion{q.a, -q.b, -q.c, -q.d};
}

inline double norm(const Quaternion& q) {
    return std::sqrt(q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d);
}

/// Sum over dimensions of Re(h_d * conj(t_d) * r_d), multiplied left to
/// right. The product is associative, so only the operand order matters.
inline double quat_trilinear_score(std::span<const Quaternion> h,
                                   std::span<const Quaternion> t,
                                   std::span<const Quaternion> r) {
    if (h.size() != t.size() || h.size() != r.size()) {
        throw Error(ErrorCode::runtime, "quat_trilinear_score: length mismatch");
    }
    double sum = 0.0;
    for (std::size_t d = 0; d < h.size(); ++d) {
        const Quaternion ht = hamilton_product(h[d], conjugate(t[d]));
        const Quaternion full = hamilton_product(ht, r[d]);
        sum += full.a;
    }
    return sum;
}

} // namespace mkge
