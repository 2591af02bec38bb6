#pragma once

// Seeded samplers for each operator class and a catalog of small named
// matrices with known facts.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "oplens/linalg.hpp"

namespace oplens {

enum class GenClass {
    normal,
    psd,
    self_adjoint,
    accretive,
    sqrt_of_normal,
    nilpotent2,
    unitary,
    generic,
    near_hypothesis,
};

inline constexpr int kMaxGenDim = 16;

[[nodiscard]] std::string to_string(GenClass c);
/// Throws BadSpec for an unknown name.
[[nodiscard]] GenClass parse_gen_class(std::string_view name);
[[nodiscard]] const std::vector<GenClass>& all_gen_classes();

struct GenSpec {
    GenClass cls = GenClass::normal;
    int dim = 2;
    std::uint64_t seed = 0;
    double scale = 1.0;
    int p = 2;  // exponents for near_hypothesis
    int q = 3;
};

/// Bit-reproducible stream: mt19937_64 with uniform and Gaussian draws built
/// here rather than through <random> distributions, whose algorithms are
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform();                      // [0, 1) with 53 random bits
    double uniform(double lo, double hi);  // [lo, hi)
    double normal();                       // Box-Muller
    Complex complex_normal();              // unit variance
    std::uint64_t below(std::uint64_t n);  // [0, n)

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// QR of a complex Gaussian matrix with the phases of diag(R) folded into Q.
[[nodiscard]] ComplexMatrix random_unitary(int dim, Rng& rng);

/// Throws BadSpec unless 1 <= dim <= 16 and scale is positive and finite
/// (sqrt_of_normal and nilpotent2 need dim >= 2).
[[nodiscard]] ComplexMatrix generate(const GenSpec& spec);

struct CatalogEntry {
    std::string label;
    ComplexMatrix matrix;
    /// Fact names understood by evaluate_fact, with the expected value.
    std::vector<std::pair<std::string, bool>> facts;
};

[[nodiscard]] std::vector<CatalogEntry> catalog();

}  // namespace oplens
