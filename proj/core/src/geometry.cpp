#include "mftx/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "mftx/errors.hpp"

namespace mftx {

std::optional<MembraneHit> detect_membrane_hit(const Vec3& start, const Vec3& end, double radius) {
    const double r2 = radius * radius;
    if (norm2(end) < r2) return std::nullopt;

    // |start + s d|^2 = r^2  ->  A s^2 + B s + C = 0 with C <= 0.
    const Vec3 d = end - start;
    const double a = norm2(d);
    const double b = 2.0 * dot(start, d);
    const double c = norm2(start) - r2;
    const double disc = b * b - 4.0 * a * c;
    double s = std::numeric_limits<double>::quiet_NaN();
    if (a > 0.0 && disc >= 0.0) {
        // Cancellation-free form of the larger root.
        const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
        const double root1 = q / a;
        const double root2 = q != 0.0 ? c / q : root1;
        s = std::max(root1, root2);
    }
    if (!(s > 0.0) || !(s <= 1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "membrane intersection failed: start |p| = " << norm(start)
            << ", end |p| = " << norm(end) << ", radius " << radius << ", s = " << s;
        throw NumericalError(msg.str());
    }
    s = std::min(s, 1.0);
    return MembraneHit{start + s * d, s, s * s};
}

}  // namespace mftx
