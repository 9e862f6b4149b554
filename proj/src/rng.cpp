#include "quopt/rng.hpp"

#include <cmath>

namespace quopt::rng {

namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
constexpr std::uint32_t kMultA = 0xD2511F53u;
constexpr std::uint32_t kMultB = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = std::uint64_t{a} * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kMultA, ctr[0], hi0, lo0);
    mul_hi_lo(kMultB, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        philox_round(counter, key);
    }
    return counter;
}

double uniform_from_bits(std::uint64_t bits) {
    // Top 52 bits plus a half-step offset. Every value is exactly
    // representable, strictly inside (0, 1), and the set is symmetric about
    // 1/2, so the inverse CDF never sees 0 or 1 and antithetic negation is
    // exact in distribution.
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

double inverse_normal_cdf(double p) {
    // Rational approximations from Wichura's AS 241 (PPND16).
    static constexpr double a[8] = {
        3.3871328727963666080e+0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
        1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
        3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static constexpr double b[8] = {
        1.0,                      4.2313330701600911252e+1, 6.8718700749205790830e+2,
        5.3941960214247511077e+3, 2.1213794301586595867e+4, 3.9307895800092710610e+4,
        2.8729085735721942674e+4, 5.2264952788528545610e+3};
    static constexpr double c[8] = {
        1.42343711074968357734e+0, 4.63033784615654529590e+0, 5.76949722146069140550e+0,
        3.64784832476320460504e+0, 1.27045825245236838258e+0, 2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double d[8] = {
        1.0,                       2.05319162663775882187e+0, 1.67638483018380384940e+0,
        6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static constexpr double e[8] = {
        6.65790464350110377720e+0, 5.46378491116411436990e+0, 1.78482653991729133580e+0,
        2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double f[8] = {
        1.0,                       5.99832206555887937690e-1, 1.36929880922735805310e-1,
        1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 2.04426310338993978564e-15};

    auto ratio = [](const double (&num)[8], const double (&den)[8], double x) {
        double n = num[7], m = den[7];
        for (int i = 6; i >= 0; --i) {
            n = n * x + num[i];
            m = m * x + den[i];
        }
        return n / m;
    };

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * ratio(a, b, r);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        value = ratio(c, d, r - 1.6);
    } else {
        value = ratio(e, f, r - 5.0);
    }
    return (q < 0.0) ? -value : value;
}

double normal_draw(std::uint64_t seed, std::uint64_t index) {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0u, 0u};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const auto out = philox4x32(counter, key);
    const std::uint64_t bits = (std::uint64_t{out[1]} << 32) | out[0];
    return inverse_normal_cdf(uniform_from_bits(bits));
}

void fill_normals(std::uint64_t seed, std::uint64_t first_row, std::size_t n_rows,
                  std::size_t dim, std::span<double> out) {
    const std::uint64_t first = first_row * dim;
    for (std::size_t k = 0; k < n_rows * dim; ++k) {
        out[k] = normal_draw(seed, first + k);
    }
}

Matrix normal_stream(std::uint64_t seed, std::uint64_t chunk_index, std::size_t chunk_size,
                     std::size_t dim) {
    Matrix m(chunk_size, dim);
    for (std::size_t r = 0; r < chunk_size; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            m(r, c) = normal_draw(seed, (chunk_index * chunk_size + r) * dim + c);
        }
    }
    return m;
}

}  // namespace quopt::rng
