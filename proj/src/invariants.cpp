#include "parframe/invariants.hpp"

#include <nlohmann/json.hpp>

namespace parframe::arith {

BoundResult parseval_size_bound(int d, int k, Field field) {
    if (d < 0) throw DomainError("base dimension d must be >= 0");
    if (k < 1) throw DomainError("rank k must be >= 1");
    BoundResult r;
    r.sufficient = field == Field::Real ? d + k : d / 2 + k;
    if (field == Field::Real && k == d) r.tangent_sharpened = 2 * d - 1;
    return r;
}

bool is_odd_prime(long p) {
    if (p < 3 || p % 2 == 0) return false;
    for (long q = 3; q * q <= p; q += 2)
        if (p % q == 0) return false;
    return true;
}

LensSpace::LensSpace(long prime, std::vector<long> weights) : p(prime), b(std::move(weights)) {
    if (!is_odd_prime(p)) throw DomainError("lens space modulus must be an odd prime");
    if (b.empty()) throw DomainError("lens space needs at least one weight");
    for (long w : b)
        if (w < 1 || w > p - 1)
            throw DomainError("lens space weights must satisfy 1 <= b_i <= p-1");
}

namespace {

long pow_mod(long base, long exp, long mod) {
    long result = 1 % mod;
    base %= mod;
    for (; exp > 0; exp >>= 1) {
        if (exp & 1) result = result * base % mod;
        base = base * base % mod;
    }
    return result;
}

bool power_sum_congruences_hold(long p, const std::vector<long>& b) {
    const int n = static_cast<int>(b.size()) - 1;
    if (n >= p) return false;
    for (long j = 1; j <= n / 2; ++j) {
        long sum = 0;
        for (long w : b) sum = (sum + pow_mod(w, 2 * j, p)) % p;
        if (sum != 0) return false;
    }
    return true;
}

}  // namespace

bool lens_stably_parallelizable(const LensSpace& lens) {
    return power_sum_congruences_hold(lens.p, lens.b);
}

std::optional<std::vector<long>> lens_search(long p, int n, long long budget) {
    if (!is_odd_prime(p)) throw DomainError("lens search modulus must be an odd prime");
    if (n < 1) throw DomainError("lens search needs n >= 1");
    if (n >= p) return std::nullopt;  // n < p fails for every tuple

    std::vector<long> b(static_cast<std::size_t>(n) + 1, 1);
    long long visited = 0;
    for (;;) {
        if (++visited > budget)
            throw SearchBudgetExceeded("lens search inspected " + std::to_string(budget) +
                                       " tuples without resolving (p=" + std::to_string(p) +
                                       ", n=" + std::to_string(n) + ")");
        if (power_sum_congruences_hold(p, b)) return b;
        // lexicographic increment over {1, ..., p-1}^(n+1)
        int pos = n;
        while (pos >= 0 && b[static_cast<std::size_t>(pos)] == p - 1) {
            b[static_cast<std::size_t>(pos)] = 1;
            --pos;
        }
        if (pos < 0) return std::nullopt;  // space exhausted: proven absent
        ++b[static_cast<std::size_t>(pos)];
    }
}

ManifoldDescriptor ManifoldDescriptor::from_json(const nlohmann::json& doc) {
    ManifoldDescriptor m;
    m.dim = doc.at("dim").get<int>();
    m.orientable = doc.value("orientable", false);
    auto opt_bool = [&doc](const char* key) -> std::optional<bool> {
        if (doc.contains(key) && !doc[key].is_null()) return doc[key].get<bool>();
        return std::nullopt;
    };
    m.closed = opt_bool("closed");
    m.stably_parallelizable = opt_bool("stably_parallelizable");
    m.h1_z2_trivial = opt_bool("h1_z2_trivial");
    m.w2_zero = opt_bool("w2_zero");
    m.p1_zero = opt_bool("p1_zero");
    m.homology_sphere = doc.value("homology_sphere", false);
    if (doc.contains("betti") && !doc["betti"].is_null())
        m.betti = doc["betti"].get<std::vector<long>>();
    return m;
}

nlohmann::json ManifoldDescriptor::to_json() const {
    nlohmann::json doc{{"dim", dim}, {"orientable", orientable},
                       {"homology_sphere", homology_sphere}};
    auto put = [&doc](const char* key, const std::optional<bool>& v) {
        if (v) doc[key] = *v;
    };
    put("closed", closed);
    put("stably_parallelizable", stably_parallelizable);
    put("h1_z2_trivial", h1_z2_trivial);
    put("w2_zero", w2_zero);
    put("p1_zero", p1_zero);
    if (betti) doc["betti"] = *betti;
    return doc;
}

const char* to_string(Existence e) {
    switch (e) {
        case Existence::Exists: return "exists";
        case Existence::NotExists: return "not_exists";
        case Existence::Unknown: return "unknown";
    }
    return "?";
}

Decision decide_d_plus_1(const ManifoldDescriptor& m) {
    if (m.dim < 1) throw DomainError("descriptor dimension must be >= 1");
    if (m.homology_sphere && m.stably_parallelizable == false)
        throw InconsistentDescriptor(
            "homology spheres are stably parallelizable; the flags contradict");

    std::vector<std::string> exists, not_exists;
    if (m.stably_parallelizable == true)
        exists.push_back("stably-parallelizable: project a global orthonormal basis of "
                         "TM + R onto TM");
    if (m.homology_sphere)
        exists.push_back("homology-sphere: homology spheres are stably parallelizable");
    if (m.dim == 2 && m.orientable && m.closed == true)
        exists.push_back("closed-orientable-surface: embed in 3-space and project the "
                         "ambient basis");
    if (m.dim == 3 && m.orientable)
        exists.push_back("orientable-3-manifold: the tangent bundle is trivial");
    if (m.dim == 4 && m.orientable && m.w2_zero == true && m.p1_zero == true)
        exists.push_back("orientable-4-manifold-w2-p1-zero: vanishing w2 and p1 give "
                         "stable parallelizability");
    if (m.stably_parallelizable == false && m.h1_z2_trivial == true)
        not_exists.push_back("not-stably-parallelizable-h1z2-zero: with H^1(M, Z/2) = 0 a "
                             "size-(d+1) Parseval frame would trivialize TM + R");

    if (!exists.empty() && !not_exists.empty())
        throw InconsistentDescriptor("flags imply both existence (" + exists.front() +
                                     ") and non-existence (" + not_exists.front() + ")");
    Decision d;
    if (!exists.empty()) {
        d.verdict = Existence::Exists;
        d.reasons = std::move(exists);
    } else if (!not_exists.empty()) {
        d.verdict = Existence::NotExists;
        d.reasons = std::move(not_exists);
    } else {
        d.verdict = Existence::Unknown;
        d.reasons.push_back("no rule applies to the supplied flags");
    }
    return d;
}

const char* to_string(GenericSections g) {
    switch (g) {
        case GenericSections::NoIGenericSections: return "no_i_generic_sections";
        case GenericSections::Unknown: return "unknown";
    }
    return "?";
}

GenericVerdict generic_obstruction_4mfld(const std::array<long, 5>& betti, bool simply_connected,
                                         std::optional<bool> orientable) {
    for (long b : betti)
        if (b < 0) throw InconsistentDescriptor("Betti numbers must be non-negative");
    if (simply_connected && (betti[0] != 1 || betti[1] != 0))
        throw InconsistentDescriptor(
            "a simply connected manifold has b_0 = 1 and b_1 = 0");
    if (simply_connected && orientable == false)
        throw InconsistentDescriptor("simply connected manifolds are orientable");

    GenericVerdict v;
    for (int i = 0; i < 5; ++i)
        v.euler_characteristic += (i % 2 == 0 ? 1 : -1) * betti[static_cast<std::size_t>(i)];
    if (simply_connected && v.euler_characteristic != 0) {
        v.verdict = GenericSections::NoIGenericSections;
        v.reasons = {
            "simply-connected: orientable with H_1(M, Z/2) = 0",
            "euler-characteristic-nonzero: chi = " + std::to_string(v.euler_characteristic),
            "eigenline double cover can neither split (a nowhere-zero section would "
            "exist) nor connect (no surjection pi_1 -> Z/2)",
        };
    } else {
        v.verdict = GenericSections::Unknown;
        v.reasons = {simply_connected
                         ? "euler characteristic vanishes; the obstruction is silent"
                         : "hypotheses unmet: simple connectivity not asserted"};
    }
    return v;
}

nlohmann::json to_json(const Decision& d) {
    return {{"verdict", to_string(d.verdict)}, {"reasons", d.reasons}};
}

nlohmann::json to_json(const GenericVerdict& g) {
    return {{"verdict", to_string(g.verdict)},
            {"euler_characteristic", g.euler_characteristic},
            {"reasons", g.reasons}};
}

}  // namespace parframe::arith
