#include "qae3d/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qae3d/rng.hpp"

namespace qae3d {

int MotionDataset::n_vertices() const {
    return frames.empty() ? 0 : static_cast<int>(frames.front().size());
}

NormalizationParams compute_normalization(const MotionDataset& dataset) {
    if (dataset.frames.empty()) throw std::invalid_argument("empty dataset");
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};
    for (const PointCloud& pc : dataset.frames)
        for (const Vec3& v : pc)
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], v[a]);
                hi[a] = std::max(hi[a], v[a]);
            }
    NormalizationParams p;
    p.v_min = lo;
    p.scale = std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
    if (p.scale <= 0.0) p.scale = 1.0;  // degenerate (constant) dataset
    return p;
}

MotionDataset normalize_dataset(const MotionDataset& dataset, const NormalizationParams& p) {
    MotionDataset out = dataset;
    for (PointCloud& pc : out.frames) pc = normalize_cloud(pc, p);
    return out;
}

std::pair<MotionDataset, MotionDataset> chunked_split(const MotionDataset& dataset,
                                                      const SplitSpec& spec) {
    if (spec.train_seconds <= 0.0 || spec.test_seconds <= 0.0)
        throw std::invalid_argument("split seconds must be positive");
    if (dataset.fps <= 0.0) throw std::invalid_argument("dataset fps unknown");
    const std::size_t n_train =
        static_cast<std::size_t>(std::llround(spec.train_seconds * dataset.fps));
    const std::size_t n_test =
        static_cast<std::size_t>(std::llround(spec.test_seconds * dataset.fps));
    const std::size_t chunk = n_train + n_test;
    if (chunk == 0) throw std::invalid_argument("split chunk is empty");

    MotionDataset train, test;
    train.fps = test.fps = dataset.fps;
    train.joint_names = test.joint_names = dataset.joint_names;
    const std::size_t total = dataset.frames.size();
    for (std::size_t begin = 0; begin < total; begin += chunk) {
        const std::size_t len = std::min(chunk, total - begin);
        std::size_t train_len = n_train;
        if (len < chunk)  // partial chunk: same ratio, train rounded down
            train_len = len * n_train / chunk;
        for (std::size_t i = 0; i < len; ++i) {
            const PointCloud& frame = dataset.frames[begin + i];
            (i < train_len ? train : test).frames.push_back(frame);
        }
    }
    return {std::move(train), std::move(test)};
}

MotionDataset select_joints(const MotionDataset& dataset, const std::vector<int>& indices) {
    if (indices.empty()) throw std::invalid_argument("joint subset is empty");
    const int v_count = dataset.n_vertices();
    for (int idx : indices)
        if (idx < 0 || idx >= v_count) throw std::out_of_range("joint index out of range");
    MotionDataset out;
    out.fps = dataset.fps;
    for (int idx : indices)
        out.joint_names.push_back(idx < static_cast<int>(dataset.joint_names.size())
                                      ? dataset.joint_names[idx]
                                      : "joint" + std::to_string(idx));
    out.frames.reserve(dataset.frames.size());
    for (const PointCloud& pc : dataset.frames) {
        PointCloud sub;
        sub.reserve(indices.size());
        for (int idx : indices) sub.push_back(pc[idx]);
        out.frames.push_back(std::move(sub));
    }
    return out;
}

MotionDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    MotionDataset dataset;
    dataset.fps = 0.0;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    long expected_frame = 0;
    long expected_joint = 0;
    int v_count = -1;
    PointCloud current;

    auto fail = [&](const std::string& what) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
    };

    auto finish_frame = [&]() {
        if (current.empty()) return;
        if (v_count < 0)
            v_count = static_cast<int>(current.size());
        else if (static_cast<int>(current.size()) != v_count)
            fail("frame has " + std::to_string(current.size()) + " joints, expected " +
                 std::to_string(v_count));
        dataset.frames.push_back(std::move(current));
        current.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string key = "fps=";
            const auto pos = line.find(key);
            if (pos != std::string::npos)
                dataset.fps = std::stod(line.substr(pos + key.size()));
            continue;
        }
        if (!header_seen) {
            if (line != "frame,joint,x,y,z") fail("expected header frame,joint,x,y,z");
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 5) fail("expected 5 fields, got " + std::to_string(fields.size()));
        long frame_id, joint_id;
        Vec3 v;
        try {
            frame_id = std::stol(fields[0]);
            joint_id = std::stol(fields[1]);
            v = {std::stod(fields[2]), std::stod(fields[3]), std::stod(fields[4])};
        } catch (const std::exception&) {
            fail("malformed numeric field");
            throw;  // unreachable
        }
        if (frame_id == expected_frame + 1) {
            if (expected_joint == 0) fail("frame with no joints");
            finish_frame();
            expected_frame = frame_id;
            expected_joint = 0;
        } else if (frame_id != expected_frame) {
            fail("non-contiguous frame id " + std::to_string(frame_id));
        }
        if (joint_id != expected_joint)
            fail("expected joint " + std::to_string(expected_joint) + ", got " +
                 std::to_string(joint_id));
        if (v_count >= 0 && joint_id >= v_count) fail("joint id beyond first frame's count");
        current.push_back(v);
        ++expected_joint;
    }
    finish_frame();
    if (dataset.frames.empty()) throw std::runtime_error(path + ": no frames");
    if (dataset.fps <= 0.0) dataset.fps = 12.0;
    return dataset;
}

void save_csv(const MotionDataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);
    out.precision(17);
    out << "# fps=" << dataset.fps << "\n";
    out << "frame,joint,x,y,z\n";
    for (std::size_t f = 0; f < dataset.frames.size(); ++f) {
        const PointCloud& pc = dataset.frames[f];
        for (std::size_t j = 0; j < pc.size(); ++j)
            out << f << "," << j << "," << pc[j][0] << "," << pc[j][1] << ","
                << pc[j][2] << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

MotionDataset synthesize_chain(int n_frames, int n_joints, std::uint64_t seed,
                               double fps, double amplitude) {
    if (n_joints < 2) throw std::invalid_argument("chain needs at least 2 joints");
    if (n_frames < 1) throw std::invalid_argument("need at least one frame");
    std::mt19937_64 rng = substream_rng(seed, "synth");
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    // One shared low frequency keeps the motion on a low-dimensional
    // manifold; per-segment phases make the joints distinct.
    const double freq = 0.1 + 0.2 * uni(rng);
    const int n_segments = n_joints - 1;
    std::vector<double> base_polar(n_segments), base_azim(n_segments);
    std::vector<double> phase_polar(n_segments), phase_azim(n_segments);
    std::vector<double> gain_polar(n_segments), gain_azim(n_segments);
    for (int s = 0; s < n_segments; ++s) {
        base_polar[s] = 0.3 * std::numbers::pi + 0.4 * std::numbers::pi * uni(rng);
        base_azim[s] = 2.0 * std::numbers::pi * uni(rng);
        phase_polar[s] = 2.0 * std::numbers::pi * uni(rng);
        phase_azim[s] = 2.0 * std::numbers::pi * uni(rng);
        gain_polar[s] = 0.5 + 0.5 * uni(rng);
        gain_azim[s] = 0.5 + 0.5 * uni(rng);
    }

    MotionDataset dataset;
    dataset.fps = fps;
    for (int j = 0; j < n_joints; ++j) dataset.joint_names.push_back("chain" + std::to_string(j));
    dataset.frames.reserve(n_frames);
    for (int f = 0; f < n_frames; ++f) {
        const double t = static_cast<double>(f) / fps;
        const double osc = std::sin(2.0 * std::numbers::pi * freq * t);
        PointCloud pc;
        pc.reserve(n_joints);
        Vec3 pos{0.0, 0.0, 0.0};
        pc.push_back(pos);
        for (int s = 0; s < n_segments; ++s) {
            const double polar =
                base_polar[s] + amplitude * gain_polar[s] *
                                    std::sin(2.0 * std::numbers::pi * freq * t + phase_polar[s]);
            const double azim =
                base_azim[s] + amplitude * gain_azim[s] *
                                   std::sin(2.0 * std::numbers::pi * freq * t + phase_azim[s]);
            pos[0] += std::sin(polar) * std::cos(azim);
            pos[1] += std::sin(polar) * std::sin(azim);
            pos[2] += std::cos(polar);
            pc.push_back(pos);
        }
        (void)osc;
        dataset.frames.push_back(std::move(pc));
    }
    return dataset;
}

}  // namespace qae3d
