#pragma once

#include <cmath>
#include <optional>

namespace mftx {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    bool operator==(const Vec3&) const = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

struct MembraneHit {
    Vec3 point;            ///< intersection with the sphere |p| = radius
    double s = 0.0;        ///< segment parameter in (0, 1]
    double time_fraction;  ///< share of the step elapsed at the hit, s^2
};

/// Segment-sphere intersection for a step that starts inside the sphere of
/// the given radius (centered at the origin). Returns nothing when the end
/// point is strictly inside; |end| == radius counts as a hit. The elapsed
/// fraction of the step is s^2 since squared Brownian displacement grows
/// linearly in time. Throws NumericalError if no admissible root exists.
std::optional<MembraneHit> detect_membrane_hit(const Vec3& start, const Vec3& end, double radius);

}  // namespace mftx
