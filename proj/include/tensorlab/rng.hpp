#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace tensorlab {

// Identifies the random stream that produced a batch: regenerating with the
// same trace reproduces identical bits.
struct SeedTrace {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
    std::string purpose;
};

// Mixes (master_seed, trial_index, purpose_tag) into a single 64-bit seed so
// trials are independent and order-insensitive.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index,
                          std::string_view purpose);

// Deterministic generator. Normal variates use Box-Muller on top of
// mt19937_64 so the byte stream does not depend on the standard library's
// unspecified std::normal_distribution algorithm.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    explicit Rng(const SeedTrace& trace)
        : Rng(derive_seed(trace.master_seed, trace.trial_index, trace.purpose)) {}

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double normal();

    int rademacher() { return (gen_() & 1u) ? 1 : -1; }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tensorlab
