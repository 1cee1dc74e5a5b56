#pragma once

#include <array>
#include <vector>

#include "qae3d/state_vector.hpp"

namespace qae3d {

using Vec3 = std::array<double, 3>;
using PointCloud = std::vector<Vec3>;

/// Bounding-box origin and isotropic cube side used to map the dataset
/// into the unit cube in the positive octant.
struct NormalizationParams {
    Vec3 v_min{0.0, 0.0, 0.0};
    double scale = 1.0;
};

Vec3 normalize_point(const Vec3& v, const NormalizationParams& p);
Vec3 denormalize_point(const Vec3& v, const NormalizationParams& p);
PointCloud normalize_cloud(const PointCloud& pc, const NormalizationParams& p);
PointCloud denormalize_cloud(const PointCloud& pc, const NormalizationParams& p);

/// Smallest N with 4V <= 2^N.
int qubits_for_vertices(int n_vertices);

/// Amplitude encoding of a normalised cloud: coordinates at 3i..3i+2,
/// the per-vertex auxiliary sqrt(3 - x^2 - y^2 - z^2) at 3V+i, zeros
/// beyond 4V, everything scaled by 1/sqrt(3V).
StateVector encode_point_cloud(const PointCloud& pc, int n_qubits);

/// The nonnegative amplitude vector encode_point_cloud produces, as reals.
std::vector<double> encode_target_amplitudes(const PointCloud& pc, int n_qubits);

/// Inverse of the coordinate part of the encoding, followed by
/// denormalisation. Auxiliary and padding slots are ignored.
PointCloud decode_to_points(const std::vector<double>& alpha, int n_vertices,
                            const NormalizationParams& norm);

/// Mean per-vertex L2 distance, reported in centimetres (inputs metres).
double mean_euclidean_distance_cm(const PointCloud& pred, const PointCloud& gt);

}  // namespace qae3d
