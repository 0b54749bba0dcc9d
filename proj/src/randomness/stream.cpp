#include "gcl/stream.hpp"

#include <cmath>

#include "gcl/errors.hpp"

namespace gcl {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// One Philox4x32-10 block for counter (ctr, 0) and a 64-bit key.
std::array<std::uint32_t, 4> philox(std::uint64_t ctr, std::uint64_t key)
{
    constexpr std::uint32_t kM0 = 0xD2511F53U;
    constexpr std::uint32_t kM1 = 0xCD9E8D57U;
    constexpr std::uint32_t kW0 = 0x9E3779B9U;
    constexpr std::uint32_t kW1 = 0xBB67AE85U;
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr >> 32);
    std::uint32_t c2 = 0;
    std::uint32_t c3 = 0;
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        c0 = hi1 ^ c1 ^ k0;
        c1 = lo1;
        c2 = hi0 ^ c3 ^ k1;
        c3 = lo0;
        k0 += kW0;
        k1 += kW1;
    }
    return {c0, c1, c2, c3};
}

} // namespace

Stream::Stream(std::uint64_t seed) : seed_(seed), key_(splitmix64(seed ^ 0x6A09E667F3BCC908ULL)) {}

Stream Stream::derive(std::string_view label, std::uint64_t index) const
{
    Stream child(*this);
    std::uint64_t k = splitmix64(key_ + 0x3C6EF372FE94F82BULL);
    k = splitmix64(k ^ fnv1a64(label));
    k = splitmix64(k ^ splitmix64(index));
    child.key_ = k;
    child.path_.push_back({std::string(label), index});
    child.block_ = 0;
    child.buffered_ = 0;
    child.has_spare_ = false;
    return child;
}

void Stream::refill()
{
    const auto w = philox(block_++, key_);
    buffer_[0] = (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
    buffer_[1] = (static_cast<std::uint64_t>(w[3]) << 32) | w[2];
    buffered_ = 2;
}

std::uint64_t Stream::next_u64()
{
    if (buffered_ == 0) {
        refill();
    }
    return buffer_[2 - buffered_--];
}

double Stream::next_uniform()
{
    // (k + 0.5) / 2^53 for k in [0, 2^53): never 0 or 1.
    const std::uint64_t k = next_u64() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Stream::next_normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u;
    double v;
    double s;
    do {
        u = 2.0 * next_uniform() - 1.0;
        v = 2.0 * next_uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    has_spare_ = true;
    return u * f;
}

void Stream::fill_normal(std::span<double> out)
{
    for (double& x : out) {
        x = next_normal();
    }
}

nlohmann::json Stream::describe() const
{
    nlohmann::json path = nlohmann::json::array();
    for (const auto& p : path_) {
        path.push_back(nlohmann::json::array({p.label, p.index}));
    }
    return {{"seed", seed_}, {"path", std::move(path)}};
}

Stream derive_stream(const Stream& parent, std::string_view label, std::uint64_t index)
{
    return parent.derive(label, index);
}

Vector std_normal_vector(Stream& stream, int n)
{
    if (n < 1) {
        throw ContractViolation("std_normal_vector: dimension must be >= 1");
    }
    Vector v(n);
    stream.fill_normal({v.data(), static_cast<std::size_t>(n)});
    return v;
}

OrthogonalMatrix haar_orthogonal(Stream& stream, int n)
{
    if (n < 1) {
        throw ContractViolation("haar_orthogonal: dimension must be >= 1");
    }
    while (true) {
        Matrix g(n, n);
        stream.fill_normal({g.data(), static_cast<std::size_t>(n) * static_cast<std::size_t>(n)});
        const Eigen::HouseholderQR<Matrix> qr(g);
        const double dmin = qr.matrixQR().diagonal().cwiseAbs().minCoeff();
        if (dmin > 1e-10) {
            return orthogonal_from_qr(g);
        }
    }
}

Vector uniform_sphere(Stream& stream, int n)
{
    while (true) {
        Vector v = std_normal_vector(stream, n);
        const double r = v.norm();
        if (r > 1e-300) {
            return v / r;
        }
    }
}

} // namespace gcl
