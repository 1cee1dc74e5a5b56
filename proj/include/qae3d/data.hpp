#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qae3d/geometry.hpp"

namespace qae3d {

/// An ordered sequence of registered point-cloud frames, in metres.
struct MotionDataset {
    std::vector<PointCloud> frames;
    double fps = 12.0;
    std::vector<std::string> joint_names;

    int n_vertices() const;
};

struct SplitSpec {
    double train_seconds = 16.0;
    double test_seconds = 4.0;
};

NormalizationParams compute_normalization(const MotionDataset& dataset);

MotionDataset normalize_dataset(const MotionDataset& dataset, const NormalizationParams& p);

/// Consecutive chunks of (train + test) seconds; within each chunk the
/// leading train_seconds go to train. A trailing partial chunk is split
/// by the same ratio with the train share rounded down.
std::pair<MotionDataset, MotionDataset> chunked_split(const MotionDataset& dataset,
                                                      const SplitSpec& spec);

MotionDataset select_joints(const MotionDataset& dataset, const std::vector<int>& indices);

/// CSV contract: optional `# fps=<float>` comment, header
/// `frame,joint,x,y,z`, contiguous frame ids from 0, joints 0..V-1.
MotionDataset load_csv(const std::string& path);
void save_csv(const MotionDataset& dataset, const std::string& path);

/// Kinematic chain of unit segments; joint angles follow seeded
/// sinusoids. AMASS stand-in for desk-scale experiments.
MotionDataset synthesize_chain(int n_frames, int n_joints, std::uint64_t seed,
                               double fps = 12.0, double amplitude = 0.5);

}  // namespace qae3d
