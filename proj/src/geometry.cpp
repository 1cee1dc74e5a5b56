#include "qae3d/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace qae3d {

Vec3 normalize_point(const Vec3& v, const NormalizationParams& p) {
    return {(v[0] - p.v_min[0]) / p.scale, (v[1] - p.v_min[1]) / p.scale,
            (v[2] - p.v_min[2]) / p.scale};
}

Vec3 denormalize_point(const Vec3& v, const NormalizationParams& p) {
    return {v[0] * p.scale + p.v_min[0], v[1] * p.scale + p.v_min[1],
            v[2] * p.scale + p.v_min[2]};
}

PointCloud normalize_cloud(const PointCloud& pc, const NormalizationParams& p) {
    PointCloud out;
    out.reserve(pc.size());
    for (const Vec3& v : pc) out.push_back(normalize_point(v, p));
    return out;
}

PointCloud denormalize_cloud(const PointCloud& pc, const NormalizationParams& p) {
    PointCloud out;
    out.reserve(pc.size());
    for (const Vec3& v : pc) out.push_back(denormalize_point(v, p));
    return out;
}

int qubits_for_vertices(int n_vertices) {
    if (n_vertices < 1) throw std::invalid_argument("need at least one vertex");
    int n = 1;
    while ((std::int64_t{1} << n) < 4 * std::int64_t{n_vertices}) ++n;
    return n;
}

std::vector<double> encode_target_amplitudes(const PointCloud& pc, int n_qubits) {
    const int v_count = static_cast<int>(pc.size());
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (4 * static_cast<std::size_t>(v_count) > dim)
        throw std::invalid_argument("4V exceeds 2^N");
    const double inv_norm = 1.0 / std::sqrt(3.0 * v_count);
    std::vector<double> amps(dim, 0.0);
    for (int i = 0; i < v_count; ++i) {
        const auto& [x, y, z] = pc[i];
        for (double c : {x, y, z})
            if (c < 0.0 || c > 1.0)
                throw std::invalid_argument("coordinate outside [0, 1]");
        amps[3 * i + 0] = x * inv_norm;
        amps[3 * i + 1] = y * inv_norm;
        amps[3 * i + 2] = z * inv_norm;
        amps[3 * v_count + i] = std::sqrt(3.0 - x * x - y * y - z * z) * inv_norm;
    }
    return amps;
}

StateVector encode_point_cloud(const PointCloud& pc, int n_qubits) {
    std::vector<double> amps = encode_target_amplitudes(pc, n_qubits);
    StateVector state(n_qubits);
    for (std::size_t i = 0; i < amps.size(); ++i) state.amplitudes[i] = amps[i];
    return state;
}

PointCloud decode_to_points(const std::vector<double>& alpha, int n_vertices,
                            const NormalizationParams& norm) {
    if (alpha.size() < 4 * static_cast<std::size_t>(n_vertices))
        throw std::invalid_argument("alpha too short for vertex count");
    const double s = std::sqrt(3.0 * n_vertices);
    PointCloud out;
    out.reserve(n_vertices);
    for (int i = 0; i < n_vertices; ++i) {
        Vec3 v{alpha[3 * i] * s, alpha[3 * i + 1] * s, alpha[3 * i + 2] * s};
        out.push_back(denormalize_point(v, norm));
    }
    return out;
}

double mean_euclidean_distance_cm(const PointCloud& pred, const PointCloud& gt) {
    if (pred.size() != gt.size()) throw std::invalid_argument("vertex count mismatch");
    if (pred.empty()) throw std::invalid_argument("empty point clouds");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double dx = pred[i][0] - gt[i][0];
        const double dy = pred[i][1] - gt[i][1];
        const double dz = pred[i][2] - gt[i][2];
        acc += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    return acc / static_cast<double>(pred.size()) * 100.0;
}

}  // namespace qae3d
