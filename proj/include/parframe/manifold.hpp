#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <utility>
#include <vector>

#include "parframe/errors.hpp"

namespace parframe::geo {

/// A discretized base manifold: ambient point sample, per-point orthonormal
/// tangent bases, and a neighbor graph. Edges are undirected, stored once
/// with first index < second, sorted.
struct ManifoldSample {
    Eigen::MatrixXd points;                         // N x m ambient coordinates
    std::vector<Eigen::MatrixXd> tangent_bases;     // per point: k x m, rows orthonormal
    std::vector<std::pair<int, int>> edges;
    std::string label;

    int num_points() const { return static_cast<int>(points.rows()); }
    int ambient_dim() const { return static_cast<int>(points.cols()); }
    int intrinsic_dim() const {
        return tangent_bases.empty() ? 0 : static_cast<int>(tangent_bases.front().rows());
    }

    /// Checks the structural invariants (orthonormal bases, in-range
    /// symmetric edges, no self-loops); throws DomainError on violation.
    void validate() const;
};

/// Orthonormal tangent basis at a unit 3-vector p. Rule: take the ambient
/// axis e_a least aligned with p (smallest |p_a|, ties by lower index),
/// t1 = normalize(e_a - (e_a . p) p), t2 = p x t1.
Eigen::Matrix<double, 2, 3> tangent_basis_sphere(const Eigen::Vector3d& p);

/// Symmetric union of each point's neighbor_count nearest neighbors under
/// Euclidean distance, ties broken by lower index.
std::vector<std::pair<int, int>> knn_graph(const Eigen::MatrixXd& points, int neighbor_count);

/// Near-uniform sphere sample on the Fibonacci lattice with tangent bases
/// and a 6-nearest-neighbor graph. Deterministic.
ManifoldSample fibonacci_sphere(int n, double radius = 1.0);

/// N equispaced points on the unit circle; tangent basis is the unit tangent
/// vector, edges form the cycle graph.
ManifoldSample circle_sample(int n);

/// Reads unit-sphere points from a 3-column CSV ('#' comments skipped), then
/// attaches tangent bases and a 6-nearest-neighbor graph. Rows within 1e-6 of
/// unit norm are normalized exactly; others raise NotOnSphere.
ManifoldSample load_points(const std::string& path, const std::string& format = "csv-xyz");

nlohmann::json to_json(const ManifoldSample& sample);
ManifoldSample sample_from_json(const nlohmann::json& doc);

}  // namespace parframe::geo
