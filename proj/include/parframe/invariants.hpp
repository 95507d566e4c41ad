#pragma once

#include <array>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "parframe/errors.hpp"

namespace parframe::arith {

enum class Field { Real, Complex };

/// A frame size guaranteed sufficient for Parseval frames on rank-k bundles
/// over d-manifolds: d + k over the reals, floor(d/2) + k over the complexes.
struct BoundResult {
    int sufficient = 0;
    /// Real tangent bundles (k = d) admit the sharper size 2d - 1.
    std::optional<int> tangent_sharpened;
};

BoundResult parseval_size_bound(int d, int k, Field field);

/// Deterministic trial division; inputs here are small.
bool is_odd_prime(long p);

/// Quotient of an odd sphere by the free Z/p action with weights b: p an odd
/// prime, b = (b_0, ..., b_n) with 1 <= b_i <= p - 1, dimension 2n + 1.
struct LensSpace {
    long p;
    std::vector<long> b;

    LensSpace(long prime, std::vector<long> weights);
    int n() const { return static_cast<int>(b.size()) - 1; }
    int dimension() const { return 2 * n() + 1; }
};

/// True iff n < p and the power sums b_0^{2j} + ... + b_n^{2j} vanish mod p
/// for every 1 <= j <= floor(n/2).
bool lens_stably_parallelizable(const LensSpace& lens);

/// First weight tuple (lexicographic) giving a stably parallelizable lens
/// space, or absent when the exhausted search space holds none. Throws
/// SearchBudgetExceeded when the budget runs out before either outcome.
std::optional<std::vector<long>> lens_search(long p, int n,
                                             long long budget = 10'000'000);

/// Caller-supplied topological facts; absent optional flags mean unknown,
/// never false.
struct ManifoldDescriptor {
    int dim = 0;
    bool orientable = false;
    std::optional<bool> closed;
    std::optional<bool> stably_parallelizable;
    std::optional<bool> h1_z2_trivial;
    std::optional<bool> w2_zero;
    std::optional<bool> p1_zero;
    bool homology_sphere = false;
    std::optional<std::vector<long>> betti;

    static ManifoldDescriptor from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

enum class Existence { Exists, NotExists, Unknown };

const char* to_string(Existence e);

struct Decision {
    Existence verdict = Existence::Unknown;
    std::vector<std::string> reasons;  // stable rule identifiers, in firing order
};

/// Decides whether the tangent bundle admits a Parseval frame of size d + 1.
/// Rules fire independently; contradictory verdicts raise
/// InconsistentDescriptor, silence leaves Unknown.
Decision decide_d_plus_1(const ManifoldDescriptor& m);

enum class GenericSections { NoIGenericSections, Unknown };

const char* to_string(GenericSections g);

struct GenericVerdict {
    GenericSections verdict = GenericSections::Unknown;
    long euler_characteristic = 0;
    std::vector<std::string> reasons;
};

/// Obstruction test for i-generic tangent frames on closed 4-manifolds from
/// the Betti numbers: simple connectivity plus nonzero Euler characteristic
/// rules out i-generic sections for every i.
GenericVerdict generic_obstruction_4mfld(const std::array<long, 5>& betti, bool simply_connected,
                                         std::optional<bool> orientable = std::nullopt);

nlohmann::json to_json(const Decision& d);
nlohmann::json to_json(const GenericVerdict& g);

}  // namespace parframe::arith
