#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <vector>

namespace zaremba {

/// Fixed-dimension point/vector. N >= 2.
template <std::size_t N>
struct Vec {
    std::array<double, N> c{};

    double& operator[](std::size_t i) { return c[i]; }
    double operator[](std::size_t i) const { return c[i]; }
    static constexpr std::size_t dim() { return N; }

    Vec& operator+=(const Vec& o) {
        for (std::size_t i = 0; i < N; ++i) c[i] += o.c[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (std::size_t i = 0; i < N; ++i) c[i] -= o.c[i];
        return *this;
    }
    Vec& operator*=(double t) {
        for (std::size_t i = 0; i < N; ++i) c[i] *= t;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double t, Vec a) { return a *= t; }
    friend Vec operator*(Vec a, double t) { return a *= t; }
    friend Vec operator-(Vec a) {
        for (auto& x : a.c) x = -x;
        return a;
    }
    friend bool operator==(const Vec& a, const Vec& b) { return a.c == b.c; }
};

template <std::size_t N>
inline double dot(const Vec<N>& a, const Vec<N>& b) {
    double s = 0;
    for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t N>
inline double norm2(const Vec<N>& a) { return dot(a, a); }

template <std::size_t N>
inline double norm(const Vec<N>& a) { return std::sqrt(norm2(a)); }

template <std::size_t N>
inline double dist(const Vec<N>& a, const Vec<N>& b) { return norm(a - b); }

template <std::size_t N>
inline Vec<N> normalized(const Vec<N>& a) {
    double n = norm(a);
    return (1.0 / n) * a;
}

template <std::size_t N>
inline Vec<N> axis(std::size_t i, double s = 1.0) {
    Vec<N> v{};
    v[i] = s;
    return v;
}

/// Splits x = (x', x_n): tangential part and the last (graph) coordinate.
template <std::size_t N>
inline Vec<N - 1> tangential(const Vec<N>& x) {
    Vec<N - 1> t{};
    for (std::size_t i = 0; i + 1 < N; ++i) t[i] = x[i];
    return t;
}

template <std::size_t N>
inline Vec<N + 1> with_last(const Vec<N>& t, double xn) {
    Vec<N + 1> x{};
    for (std::size_t i = 0; i < N; ++i) x[i] = t[i];
    x[N] = xn;
    return x;
}

template <std::size_t N>
struct Box {
    Vec<N> lo{}, hi{};
    bool contains(const Vec<N>& x) const {
        for (std::size_t i = 0; i < N; ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
    double extent(std::size_t i) const { return hi[i] - lo[i]; }
    double min_extent() const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < N; ++i) m = std::min(m, extent(i));
        return m;
    }
};

/// SplitMix64: deterministic, platform-independent RNG for sampling.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform in [0,1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * next_double(); }
    /// Standard normal via Box-Muller (always consumes two uniforms).
    double normal() {
        double u1 = next_double(), u2 = next_double();
        u1 = std::max(u1, 1e-300);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    template <std::size_t N>
    Vec<N> unit_vector() {
        while (true) {
            Vec<N> v{};
            for (std::size_t i = 0; i < N; ++i) v[i] = normal();
            double n = norm(v);
            if (n > 1e-6) return (1.0 / n) * v;
        }
    }
    template <std::size_t N>
    Vec<N> in_box(const Box<N>& b) {
        Vec<N> v{};
        for (std::size_t i = 0; i < N; ++i) v[i] = uniform(b.lo[i], b.hi[i]);
        return v;
    }

  private:
    std::uint64_t state_;
};

/// Deterministic quasi-uniform points on the unit sphere S^2 (golden spiral).
inline std::vector<Vec<3>> fibonacci_sphere(std::size_t n) {
    std::vector<Vec<3>> pts;
    pts.reserve(n);
    const double ga = 3.141592653589793 * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        double z = 1.0 - (2.0 * double(i) + 1.0) / double(n);
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double th = ga * double(i);
        pts.push_back(Vec<3>{{r * std::cos(th), r * std::sin(th), z}});
    }
    return pts;
}

/// Quasi-uniform unit sphere samples in any dimension (seeded, deterministic).
template <std::size_t N>
inline std::vector<Vec<N>> sphere_samples(std::size_t n, std::uint64_t seed = 2024) {
    if constexpr (N == 3) {
        (void)seed;
        return fibonacci_sphere(n);
    } else {
        Rng rng(seed);
        std::vector<Vec<N>> pts;
        pts.reserve(n);
        for (std::size_t i = 0; i < n; ++i) pts.push_back(rng.unit_vector<N>());
        return pts;
    }
}

}  // namespace zaremba
