#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gcl/linalg.hpp"

namespace gcl {

/// Name of the generator and normal method; written into every report.
inline constexpr const char* kGeneratorName = "philox4x32-10";
inline constexpr const char* kNormalMethod = "marsaglia-polar";

/// Deterministic, splittable random stream.
///
/// The bits come from Philox4x32-10 keyed by a 64-bit key that is a hash of
/// (seed, derivation path). Deriving a child is cheap and never consumes
/// draws from the parent.
class Stream {
  public:
    struct PathElement {
        std::string label;
        std::uint64_t index;
        bool operator==(const PathElement&) const = default;
    };

    explicit Stream(std::uint64_t seed);

    Stream derive(std::string_view label, std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }
    const std::vector<PathElement>& path() const { return path_; }
    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1), 53 random bits.
    double next_uniform();
    double next_normal();
    void fill_normal(std::span<double> out);

    /// {"seed": ..., "path": [[label, index], ...]}
    nlohmann::json describe() const;

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t key_;
    std::vector<PathElement> path_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

Stream derive_stream(const Stream& parent, std::string_view label, std::uint64_t index);

Vector std_normal_vector(Stream& stream, int n);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// columns of Q multiplied by sign(R_ii).
OrthogonalMatrix haar_orthogonal(Stream& stream, int n);

/// Point uniform on the unit sphere S^{n-1}.
Vector uniform_sphere(Stream& stream, int n);

} // namespace gcl
