#include "qae3d/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace qae3d {

namespace {

constexpr double kSqrtClamp = 1e-12;

double sign_or_zero(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
}

}  // namespace

double reconstruction_loss(const std::vector<double>& alpha, const PointCloud& pc_norm,
                           int n_qubits) {
    std::vector<double> unused;
    const int v_count = static_cast<int>(pc_norm.size());
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (alpha.size() != dim) throw std::invalid_argument("alpha length mismatch");
    if (4 * static_cast<std::size_t>(v_count) > dim)
        throw std::invalid_argument("4V exceeds 2^N");
    const double inv_norm = 1.0 / std::sqrt(3.0 * v_count);
    double loss = 0.0;
    for (int i = 0; i < v_count; ++i) {
        const auto& [x, y, z] = pc_norm[i];
        const double dx = alpha[3 * i + 0] - x * inv_norm;
        const double dy = alpha[3 * i + 1] - y * inv_norm;
        const double dz = alpha[3 * i + 2] - z * inv_norm;
        loss += std::sqrt(dx * dx + dy * dy + dz * dz);
        const double aux = std::sqrt(3.0 - x * x - y * y - z * z) * inv_norm;
        loss += std::abs(alpha[3 * v_count + i] - aux);
    }
    for (std::size_t j = 4 * static_cast<std::size_t>(v_count); j < dim; ++j)
        loss += std::abs(alpha[j]);
    return loss;
}

double reconstruction_loss_grad(const std::vector<double>& alpha, const PointCloud& pc_norm,
                                int n_qubits, std::vector<double>& d_alpha) {
    const int v_count = static_cast<int>(pc_norm.size());
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (alpha.size() != dim) throw std::invalid_argument("alpha length mismatch");
    const double inv_norm = 1.0 / std::sqrt(3.0 * v_count);
    d_alpha.assign(dim, 0.0);
    double loss = 0.0;
    for (int i = 0; i < v_count; ++i) {
        const auto& [x, y, z] = pc_norm[i];
        const double dx = alpha[3 * i + 0] - x * inv_norm;
        const double dy = alpha[3 * i + 1] - y * inv_norm;
        const double dz = alpha[3 * i + 2] - z * inv_norm;
        const double zeta = dx * dx + dy * dy + dz * dz;
        const double root = std::sqrt(zeta);
        loss += root;
        const double inv_root = 1.0 / std::sqrt(std::max(zeta, kSqrtClamp));
        d_alpha[3 * i + 0] = dx * inv_root;
        d_alpha[3 * i + 1] = dy * inv_root;
        d_alpha[3 * i + 2] = dz * inv_root;
        const double aux = std::sqrt(3.0 - x * x - y * y - z * z) * inv_norm;
        const double da = alpha[3 * v_count + i] - aux;
        loss += std::abs(da);
        d_alpha[3 * v_count + i] = sign_or_zero(da);
    }
    for (std::size_t j = 4 * static_cast<std::size_t>(v_count); j < dim; ++j) {
        loss += std::abs(alpha[j]);
        d_alpha[j] = sign_or_zero(alpha[j]);
    }
    return loss;
}

double vertex_loss(const std::vector<double>& pred_coords, const PointCloud& pc_norm) {
    const int v_count = static_cast<int>(pc_norm.size());
    if (pred_coords.size() != 3 * static_cast<std::size_t>(v_count))
        throw std::invalid_argument("prediction length mismatch");
    double loss = 0.0;
    for (int i = 0; i < v_count; ++i) {
        const double dx = pred_coords[3 * i + 0] - pc_norm[i][0];
        const double dy = pred_coords[3 * i + 1] - pc_norm[i][1];
        const double dz = pred_coords[3 * i + 2] - pc_norm[i][2];
        loss += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    return loss;
}

double vertex_loss_grad(const std::vector<double>& pred_coords, const PointCloud& pc_norm,
                        std::vector<double>& d_pred) {
    const int v_count = static_cast<int>(pc_norm.size());
    if (pred_coords.size() != 3 * static_cast<std::size_t>(v_count))
        throw std::invalid_argument("prediction length mismatch");
    d_pred.assign(pred_coords.size(), 0.0);
    double loss = 0.0;
    for (int i = 0; i < v_count; ++i) {
        const double dx = pred_coords[3 * i + 0] - pc_norm[i][0];
        const double dy = pred_coords[3 * i + 1] - pc_norm[i][1];
        const double dz = pred_coords[3 * i + 2] - pc_norm[i][2];
        const double zeta = dx * dx + dy * dy + dz * dz;
        loss += std::sqrt(zeta);
        const double inv_root = 1.0 / std::sqrt(std::max(zeta, kSqrtClamp));
        d_pred[3 * i + 0] = dx * inv_root;
        d_pred[3 * i + 1] = dy * inv_root;
        d_pred[3 * i + 2] = dz * inv_root;
    }
    return loss;
}

}  // namespace qae3d
