#include "parframe/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>
#include <set>
#include <sstream>

namespace parframe::geo {

void ManifoldSample::validate() const {
    const int n = num_points();
    if (static_cast<int>(tangent_bases.size()) != n)
        throw DomainError("sample needs one tangent basis per point");
    const int k = intrinsic_dim();
    for (int p = 0; p < n; ++p) {
        const auto& t = tangent_bases[static_cast<std::size_t>(p)];
        if (t.rows() != k || t.cols() != points.cols())
            throw DomainError("tangent basis shape mismatch at point " + std::to_string(p));
        Eigen::MatrixXd gram = t * t.transpose() - Eigen::MatrixXd::Identity(k, k);
        if (gram.cwiseAbs().maxCoeff() > 1e-10)
            throw DomainError("tangent basis not orthonormal at point " + std::to_string(p));
    }
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n)
            throw DomainError("edge index out of range");
        if (a == b) throw DomainError("self-loop in neighbor graph");
        if (a > b) throw DomainError("edges must be stored with first index < second");
    }
}

Eigen::Matrix<double, 2, 3> tangent_basis_sphere(const Eigen::Vector3d& p) {
    double norm = p.norm();
    if (std::abs(norm - 1.0) > 1e-6)
        throw DomainError("tangent_basis_sphere: point norm " + std::to_string(norm) +
                          " deviates from 1");
    int axis = 0;
    for (int a = 1; a < 3; ++a)
        if (std::abs(p(a)) < std::abs(p(axis))) axis = a;
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(axis) = 1.0;
    Eigen::Vector3d t1 = e - e.dot(p) * p;
    t1.normalize();
    Eigen::Vector3d t2 = p.cross(t1);
    Eigen::Matrix<double, 2, 3> t;
    t.row(0) = t1.transpose();
    t.row(1) = t2.transpose();
    return t;
}

std::vector<std::pair<int, int>> knn_graph(const Eigen::MatrixXd& points, int neighbor_count) {
    const int n = static_cast<int>(points.rows());
    if (neighbor_count < 1) throw DomainError("neighbor_count must be >= 1");
    if (n <= neighbor_count)
        throw DomainError("need more points than neighbor_count");

    std::set<std::pair<int, int>> edge_set;
    std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            dist[static_cast<std::size_t>(j)] = {(points.row(j) - points.row(i)).squaredNorm(), j};
        dist[static_cast<std::size_t>(i)].first = std::numeric_limits<double>::infinity();
        std::partial_sort(dist.begin(), dist.begin() + neighbor_count, dist.end());
        for (int r = 0; r < neighbor_count; ++r) {
            int j = dist[static_cast<std::size_t>(r)].second;
            edge_set.emplace(std::min(i, j), std::max(i, j));
        }
    }
    return {edge_set.begin(), edge_set.end()};
}

ManifoldSample fibonacci_sphere(int n, double radius) {
    if (n < 4) throw DomainError("fibonacci_sphere needs at least 4 points");
    if (radius <= 0.0) throw DomainError("radius must be positive");

    ManifoldSample s;
    s.label = "fibonacci_sphere(" + std::to_string(n) + ")";
    s.points.resize(n, 3);
    s.tangent_bases.reserve(static_cast<std::size_t>(n));
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / n;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double a = golden_angle * i;
        Eigen::Vector3d unit(r * std::cos(a), r * std::sin(a), z);
        unit.normalize();  // pins |p| = 1 exactly up to one rounding
        s.points.row(i) = radius * unit.transpose();
        s.tangent_bases.push_back(tangent_basis_sphere(unit));
    }
    s.edges = knn_graph(s.points, std::min(6, n - 1));
    return s;
}

ManifoldSample circle_sample(int n) {
    if (n < 3) throw DomainError("circle_sample needs at least 3 points");
    ManifoldSample s;
    s.label = "circle_sample(" + std::to_string(n) + ")";
    s.points.resize(n, 2);
    s.tangent_bases.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double theta = 2.0 * std::numbers::pi * i / n;
        s.points.row(i) << std::cos(theta), std::sin(theta);
        Eigen::MatrixXd t(1, 2);
        t << -std::sin(theta), std::cos(theta);
        s.tangent_bases.push_back(std::move(t));
    }
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        s.edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(s.edges.begin(), s.edges.end());
    return s;
}

ManifoldSample load_points(const std::string& path, const std::string& format) {
    if (format != "csv-xyz") throw DomainError("unknown point format '" + format + "'");
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    std::vector<Eigen::Vector3d> rows;
    std::string line_text;
    int line = 0;
    while (std::getline(in, line_text)) {
        ++line;
        auto first = line_text.find_first_not_of(" \t\r\n");
        if (first == std::string::npos || line_text[first] == '#') continue;
        std::replace(line_text.begin(), line_text.end(), ',', ' ');
        std::istringstream ls(line_text);
        double x, y, z;
        if (!(ls >> x >> y >> z))
            throw ParseError("expected three comma-separated coordinates", line);
        std::string extra;
        if (ls >> extra) throw ParseError("more than three coordinates", line);
        rows.emplace_back(x, y, z);
    }
    if (rows.size() < 2) throw DomainError("point file holds fewer than 2 points");

    ManifoldSample s;
    s.label = path;
    s.points.resize(static_cast<Eigen::Index>(rows.size()), 3);
    s.tangent_bases.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double norm = rows[i].norm();
        if (std::abs(norm - 1.0) > 1e-6) throw NotOnSphere(static_cast<int>(i), norm);
        Eigen::Vector3d unit = rows[i] / norm;
        s.points.row(static_cast<Eigen::Index>(i)) = unit.transpose();
        s.tangent_bases.push_back(tangent_basis_sphere(unit));
    }
    s.edges = knn_graph(s.points, std::min<int>(6, static_cast<int>(rows.size()) - 1));
    return s;
}

nlohmann::json to_json(const ManifoldSample& sample) {
    nlohmann::json doc;
    doc["points"] = nlohmann::json::array();
    for (int i = 0; i < sample.num_points(); ++i) {
        std::vector<double> row(sample.points.row(i).begin(), sample.points.row(i).end());
        doc["points"].push_back(row);
    }
    doc["tangent_bases"] = nlohmann::json::array();
    for (const auto& t : sample.tangent_bases) {
        nlohmann::json basis = nlohmann::json::array();
        for (Eigen::Index r = 0; r < t.rows(); ++r)
            basis.push_back(std::vector<double>(t.row(r).begin(), t.row(r).end()));
        doc["tangent_bases"].push_back(basis);
    }
    doc["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : sample.edges) doc["edges"].push_back({a, b});
    doc["labels"] = sample.label;
    return doc;
}

ManifoldSample sample_from_json(const nlohmann::json& doc) {
    ManifoldSample s;
    const auto& pts = doc.at("points");
    if (pts.empty()) throw DomainError("sample document has no points");
    s.points.resize(static_cast<Eigen::Index>(pts.size()),
                    static_cast<Eigen::Index>(pts.front().size()));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts[i].size(); ++j)
            s.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                pts[i][j].get<double>();
    for (const auto& basis : doc.at("tangent_bases")) {
        Eigen::MatrixXd t(static_cast<Eigen::Index>(basis.size()),
                          static_cast<Eigen::Index>(basis.front().size()));
        for (std::size_t r = 0; r < basis.size(); ++r)
            for (std::size_t c = 0; c < basis[r].size(); ++c)
                t(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    basis[r][c].get<double>();
        s.tangent_bases.push_back(std::move(t));
    }
    for (const auto& e : doc.at("edges"))
        s.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    if (doc.contains("labels") && doc["labels"].is_string())
        s.label = doc["labels"].get<std::string>();
    s.validate();
    return s;
}

}  // namespace parframe::geo
