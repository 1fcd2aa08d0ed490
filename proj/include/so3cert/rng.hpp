#pragma once

#include <cmath>
#include <cstdint>

#include "so3cert/so3.hpp"

namespace so3cert {

/// Small deterministic random source (splitmix64 core).
///
/// The standard-library distributions are implementation-defined, which would
/// make seeded Monte-Carlo outputs differ across toolchains; this generator
/// produces identical streams everywhere. Substreams for parallel runs are
/// derived by hashing (seed, index) so each run is independent of ordering.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Independent substream k of a root seed, for per-sample determinism.
    static Rng substream(std::uint64_t seed, std::uint64_t k) {
        Rng mix(seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
        mix.next_u64();
        return mix;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (polar rejection avoided for
    /// determinism; the log/cos form consumes exactly two uniforms).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = std::max(uniform01(), 0x1.0p-60);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vec3 normal_vec3() { return Vec3(normal(), normal(), normal()); }

    /// Uniform direction on the unit sphere.
    Vec3 unit_vec3() {
        Vec3 v = normal_vec3();
        while (v.norm() < 1e-12) v = normal_vec3();
        return v.normalized();
    }

    /// Uniform point in the closed ball of given radius.
    Vec3 ball_vec3(double radius) {
        const Vec3 dir = unit_vec3();
        const double r = radius * std::cbrt(uniform01());
        return r * dir;
    }

    /// Uniform rotation (normalized 4-normal quaternion construction).
    Rotation uniform_rotation() {
        double q[4];
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (double& qi : q) {
                qi = normal();
                n2 += qi * qi;
            }
        } while (n2 < 1e-12);
        const double s = 1.0 / std::sqrt(n2);
        const double w = q[0] * s, x = q[1] * s, y = q[2] * s, z = q[3] * s;
        Mat3 R;
        R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
             2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
             2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
        return Rotation::trusted(R);
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace so3cert
