#include "parframe/bundle.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>

namespace parframe::bundle {

namespace {

// stream tags for sub-seeding
constexpr std::uint64_t kNoiseWaves = 0x6e6f6973;   // wave parameters of one field
constexpr std::uint64_t kFrameField = 0x62667266;   // (attempt, column) -> noise field
constexpr std::uint64_t kVectorField = 0x76656366;  // vector-field noise

Eigen::Vector3d unit_direction(rng::Stream& stream) {
    for (;;) {
        Eigen::Vector3d v(stream.normal(), stream.normal(), stream.normal());
        double norm = v.norm();
        if (norm > 1e-8) return v / norm;
    }
}

}  // namespace

NoiseField::NoiseField(std::uint64_t seed, int num_waves, double decay)
    : seed_(seed), decay_(decay) {
    if (num_waves < 1) throw DomainError("noise field needs at least one wave");
    if (decay <= 0.0) throw DomainError("noise decay must be positive");
    rng::Stream stream(rng::mix(seed, kNoiseWaves));
    double amp = 1.0;
    for (int w = 0; w < num_waves; ++w) {
        amp *= decay;  // amplitude decay^w for the 1-based wave index
        amplitudes_.push_back(amp * unit_direction(stream));
        wave_vectors_.push_back(stream.uniform(1.0, 8.0) * unit_direction(stream));
        phases_.push_back(stream.uniform(0.0, 2.0 * std::numbers::pi));
    }
}

Eigen::Vector3d NoiseField::operator()(const Eigen::Vector3d& x) const {
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (std::size_t w = 0; w < amplitudes_.size(); ++w)
        out += amplitudes_[w] * std::sin(wave_vectors_[w].dot(x) + phases_[w]);
    return out;
}

double NoiseField::lipschitz_bound() const {
    double l = 0.0;
    for (std::size_t w = 0; w < amplitudes_.size(); ++w)
        l += amplitudes_[w].norm() * wave_vectors_[w].norm();
    return l;
}

void BundleFrame::validate(const Tolerance& tol) const {
    if (!sample) throw DomainError("bundle frame has no sample");
    if (num_points() != sample->num_points())
        throw DomainError("bundle frame needs one frame per sample point");
    for (int p = 0; p < num_points(); ++p) {
        const auto& f = frames[static_cast<std::size_t>(p)];
        if (f.fiber_dim() != fiber_dim() || f.size() != frame_size())
            throw DomainError("all per-point frames must share (k, n)");
        if (!is_frame(f, tol)) throw NotAFrame(0.0, p);
    }
}

BundleFrame projection_frame(SamplePtr sample) {
    if (!sample) throw DomainError("projection_frame: null sample");
    BundleFrame b;
    b.sample = std::move(sample);
    b.frames.reserve(static_cast<std::size_t>(b.sample->num_points()));
    for (const auto& t : b.sample->tangent_bases) b.frames.emplace_back(t);
    return b;
}

BundleFrame random_bundle_frame(SamplePtr sample, int n, std::uint64_t seed) {
    if (!sample) throw DomainError("random_bundle_frame: null sample");
    if (sample->intrinsic_dim() != 2 || sample->ambient_dim() != 3)
        throw DomainError("random_bundle_frame expects a sphere-type sample (k=2, m=3)");
    if (n != 3) throw DomainError("random_bundle_frame is defined for frame size n = 3");

    const int num_points = sample->num_points();
    constexpr int kMaxAttempts = 32;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        NoiseField fields[3] = {
            NoiseField(rng::mix(seed, kFrameField, attempt, 0)),
            NoiseField(rng::mix(seed, kFrameField, attempt, 1)),
            NoiseField(rng::mix(seed, kFrameField, attempt, 2)),
        };
        BundleFrame b;
        b.sample = sample;
        b.frames.reserve(static_cast<std::size_t>(num_points));
        bool ok = true;
        for (int p = 0; p < num_points && ok; ++p) {
            Eigen::Vector3d pos = sample->points.row(p).transpose();
            const auto& t = sample->tangent_bases[static_cast<std::size_t>(p)];
            Eigen::MatrixXd m(2, 3);
            for (int c = 0; c < 3 && ok; ++c) {
                Eigen::Vector3d ambient = fields[c](pos);
                double norm = ambient.norm();
                if (norm <= 1e-8) {
                    ok = false;  // vanishing field value; resample the bundle
                    break;
                }
                m.col(c) = t * (ambient / norm);
            }
            if (!ok) break;
            RealFrame f(std::move(m));
            if (!is_frame(f)) {
                ok = false;  // rank-deficient fiber; resample the whole bundle
                break;
            }
            b.frames.push_back(std::move(f));
        }
        if (ok) {
            b.provenance = NoiseProvenance{seed, fields[0].num_waves(), fields[0].decay(), attempt};
            return b;
        }
    }
    throw GenerationFailed("random_bundle_frame: degenerate noise fields after " +
                           std::to_string(kMaxAttempts) + " attempts");
}

VectorField project_ambient_field(
    SamplePtr sample, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& field) {
    if (!sample) throw DomainError("project_ambient_field: null sample");
    if (sample->ambient_dim() != 3)
        throw DomainError("project_ambient_field expects ambient dimension 3");
    const int n = sample->num_points();
    const int k = sample->intrinsic_dim();
    VectorField v;
    v.sample = sample;
    v.vectors.resize(n, k);
    for (int p = 0; p < n; ++p) {
        Eigen::Vector3d pos = sample->points.row(p).transpose();
        v.vectors.row(p) =
            (sample->tangent_bases[static_cast<std::size_t>(p)] * field(pos)).transpose();
    }
    return v;
}

VectorField random_vector_field(SamplePtr sample, std::uint64_t seed) {
    NoiseField f(rng::mix(seed, kVectorField));
    VectorField v = project_ambient_field(std::move(sample),
                                          [&f](const Eigen::Vector3d& x) { return f(x); });
    v.provenance = NoiseProvenance{seed, f.num_waves(), f.decay(), 0};
    return v;
}

BundleFrame bundle_parsevalize(const BundleFrame& b, const Tolerance& tol) {
    BundleFrame out;
    out.sample = b.sample;
    out.provenance = b.provenance;
    out.frames.reserve(b.frames.size());
    for (int p = 0; p < b.num_points(); ++p) {
        try {
            out.frames.push_back(parseval_retract(b.frames[static_cast<std::size_t>(p)], tol));
        } catch (const NotAFrame& e) {
            throw NotAFrame(e.min_eigenvalue, p);
        }
    }
    return out;
}

GenericityReport genericity_scan(const BundleFrame& b, const Tolerance& tol) {
    GenericityReport report;
    const int k = b.fiber_dim();
    report.per_index_generic.assign(static_cast<std::size_t>(k), true);
    report.min_gap = 1.0;
    report.argmin_point = b.num_points() > 0 ? 0 : -1;
    for (int p = 0; p < b.num_points(); ++p) {
        Spectrum spec = spectrum(b.frames[static_cast<std::size_t>(p)], tol);
        double gap = 1.0;
        for (int i = 0; i + 1 < k; ++i)
            gap = std::min(gap, (spec[static_cast<std::size_t>(i)] -
                                 spec[static_cast<std::size_t>(i + 1)]) /
                                    spec[0]);
        if (gap < report.min_gap) {
            report.min_gap = gap;
            report.argmin_point = p;
        }
        auto mu = multiplicities(spec, tol);
        for (int i = 0; i < k; ++i)
            if (mu[static_cast<std::size_t>(i)] != 1)
                report.per_index_generic[static_cast<std::size_t>(i)] = false;
    }
    return report;
}

namespace {

nlohmann::json provenance_json(const std::optional<NoiseProvenance>& p) {
    if (!p) return nullptr;
    return {{"seed", p->seed}, {"num_waves", p->num_waves}, {"decay", p->decay},
            {"attempt", p->attempt}};
}

std::optional<NoiseProvenance> provenance_from_json(const nlohmann::json& doc) {
    if (!doc.contains("noise") || doc["noise"].is_null()) return std::nullopt;
    const auto& n = doc["noise"];
    return NoiseProvenance{n.at("seed").get<std::uint64_t>(), n.at("num_waves").get<int>(),
                           n.at("decay").get<double>(), n.at("attempt").get<int>()};
}

}  // namespace

nlohmann::json to_json(const BundleFrame& b) {
    nlohmann::json doc;
    doc["kind"] = "bundle_frame";
    doc["k"] = b.fiber_dim();
    doc["n"] = b.frame_size();
    doc["noise"] = provenance_json(b.provenance);
    doc["frames"] = nlohmann::json::array();
    for (const auto& f : b.frames) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < f.fiber_dim(); ++r)
            rows.push_back(std::vector<double>(f.entries().row(r).begin(),
                                               f.entries().row(r).end()));
        doc["frames"].push_back(rows);
    }
    return doc;
}

nlohmann::json to_json(const VectorField& v) {
    nlohmann::json doc;
    doc["kind"] = "vector_field";
    doc["k"] = v.vectors.cols();
    doc["noise"] = provenance_json(v.provenance);
    doc["vectors"] = nlohmann::json::array();
    for (Eigen::Index p = 0; p < v.vectors.rows(); ++p)
        doc["vectors"].push_back(
            std::vector<double>(v.vectors.row(p).begin(), v.vectors.row(p).end()));
    return doc;
}

BundleFrame bundle_from_json(const nlohmann::json& doc, SamplePtr sample) {
    BundleFrame b;
    b.sample = std::move(sample);
    b.provenance = provenance_from_json(doc);
    for (const auto& rows : doc.at("frames")) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < rows[r].size(); ++c)
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    rows[r][c].get<double>();
        b.frames.emplace_back(std::move(m));
    }
    b.validate();
    return b;
}

VectorField field_from_json(const nlohmann::json& doc, SamplePtr sample) {
    VectorField v;
    v.sample = std::move(sample);
    v.provenance = provenance_from_json(doc);
    const auto& vectors = doc.at("vectors");
    if (vectors.empty()) throw DomainError("vector field document has no vectors");
    v.vectors.resize(static_cast<Eigen::Index>(vectors.size()),
                     static_cast<Eigen::Index>(vectors.front().size()));
    for (std::size_t p = 0; p < vectors.size(); ++p)
        for (std::size_t c = 0; c < vectors[p].size(); ++c)
            v.vectors(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)) =
                vectors[p][c].get<double>();
    if (v.sample && v.vectors.rows() != v.sample->num_points())
        throw DomainError("vector field length does not match the sample");
    return v;
}

}  // namespace parframe::bundle
