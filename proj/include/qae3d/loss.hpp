#pragma once

#include <vector>

#include "qae3d/geometry.hpp"

namespace qae3d {

/// Reconstruction loss on the amplitude readout: per-vertex Euclidean
/// coordinate residual (square root of the squared 3-term sum), absolute
/// auxiliary residual, and absolute mass in the padding slots.
double reconstruction_loss(const std::vector<double>& alpha, const PointCloud& pc_norm,
                           int n_qubits);

/// Loss plus d(loss)/d(alpha). Square roots are clamped away from zero
/// inside the gradient only; the forward value is exact.
double reconstruction_loss_grad(const std::vector<double>& alpha, const PointCloud& pc_norm,
                                int n_qubits, std::vector<double>& d_alpha);

/// Vertex-only loss for the fully connected baseline: sum over vertices
/// of the Euclidean residual between predicted and target normalised
/// coordinates (no auxiliaries, no padding).
double vertex_loss(const std::vector<double>& pred_coords, const PointCloud& pc_norm);
double vertex_loss_grad(const std::vector<double>& pred_coords, const PointCloud& pc_norm,
                        std::vector<double>& d_pred);

}  // namespace qae3d
