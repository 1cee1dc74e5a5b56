#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "doctest.h"
#include "qae3d/data.hpp"

using namespace qae3d;

namespace {

MotionDataset make_dataset(int frames, int joints, double fps) {
    MotionDataset ds;
    ds.fps = fps;
    for (int f = 0; f < frames; ++f) {
        PointCloud pc(joints);
        for (int j = 0; j < joints; ++j)
            pc[j] = {double(f), double(j), double(f + j) / 2.0};
        ds.frames.push_back(pc);
    }
    return ds;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = "/tmp/" + name;
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("compute_normalization worked examples") {
    MotionDataset ds;
    ds.frames = {{{0.0, 0.0, 0.0}, {2.0, 1.0, 1.0}}};
    const NormalizationParams p = compute_normalization(ds);
    CHECK(p.v_min == Vec3{0.0, 0.0, 0.0});
    CHECK(p.scale == 2.0);

    MotionDataset sym;
    sym.frames = {{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}}};
    const NormalizationParams q = compute_normalization(sym);
    CHECK(q.v_min == Vec3{-1.0, -1.0, -1.0});
    CHECK(q.scale == 2.0);

    MotionDataset flat;
    flat.frames = {{{0.5, 0.5, 0.5}}, {{0.5, 0.5, 0.5}}};
    CHECK(compute_normalization(flat).scale == 1.0);  // degenerate box fallback

    CHECK_THROWS(compute_normalization(MotionDataset{}));
}

TEST_CASE("normalize / denormalize round-trip") {
    NormalizationParams p;
    p.v_min = {0.0, 0.0, 0.0};
    p.scale = 2.0;
    CHECK(normalize_point({2.0, 1.0, 1.0}, p) == Vec3{1.0, 0.5, 0.5});
    CHECK(normalize_point(p.v_min, p) == Vec3{0.0, 0.0, 0.0});

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    NormalizationParams q;
    q.v_min = {u(rng), u(rng), u(rng)};
    q.scale = 3.7;
    for (int rep = 0; rep < 200; ++rep) {
        const Vec3 v = {u(rng), u(rng), u(rng)};
        const Vec3 back = denormalize_point(normalize_point(v, q), q);
        for (int a = 0; a < 3; ++a) CHECK(std::abs(back[a] - v[a]) <= 1e-14);
    }

    // fitting dataset maps into [0,1] on every coordinate
    const MotionDataset ds = synthesize_chain(50, 5, 99);
    const NormalizationParams fit = compute_normalization(ds);
    for (const PointCloud& pc : ds.frames)
        for (const Vec3& v : pc) {
            const Vec3 n = normalize_point(v, fit);
            for (double c : n) {
                CHECK(c >= 0.0);
                CHECK(c <= 1.0);
            }
        }
}

TEST_CASE("chunked_split frame accounting") {
    SUBCASE("240 frames at 12 fps -> 192 + 48") {
        const auto [train, test] = chunked_split(make_dataset(240, 2, 12.0), {});
        CHECK(train.frames.size() == 192);
        CHECK(test.frames.size() == 48);
    }
    SUBCASE("480 frames -> two chunks") {
        const auto [train, test] = chunked_split(make_dataset(480, 2, 12.0), {});
        CHECK(train.frames.size() == 384);
        CHECK(test.frames.size() == 96);
    }
    SUBCASE("100-frame partial chunk splits by ratio, train rounded down") {
        const auto [train, test] = chunked_split(make_dataset(100, 2, 12.0), {});
        CHECK(train.frames.size() == 80);
        CHECK(test.frames.size() == 20);
    }
    SUBCASE("order preserved, no frame lost or duplicated") {
        const MotionDataset ds = make_dataset(250, 2, 12.0);
        const auto [train, test] = chunked_split(ds, {});
        CHECK(train.frames.size() + test.frames.size() == 250);
        // frame index is recoverable from coordinate 0 of joint 0
        double prev = -1.0;
        for (const PointCloud& pc : train.frames) {
            CHECK(pc[0][0] > prev);
            prev = pc[0][0];
        }
        // first chunk: frames 0..191 train, 192..239 test
        CHECK(train.frames[0][0][0] == 0.0);
        CHECK(train.frames[191][0][0] == 191.0);
        CHECK(test.frames[0][0][0] == 192.0);
        CHECK(train.frames[192][0][0] == 240.0);
    }
}

TEST_CASE("select_joints") {
    const MotionDataset ds = make_dataset(5, 4, 12.0);
    const MotionDataset all = select_joints(ds, {0, 1, 2, 3});
    CHECK(all.frames == ds.frames);

    const MotionDataset three = select_joints(ds, {3, 1, 0});
    CHECK(three.n_vertices() == 3);
    CHECK(three.frames[2][0] == ds.frames[2][3]);
    CHECK(three.frames[2][1] == ds.frames[2][1]);

    CHECK_THROWS(select_joints(ds, {}));
    CHECK_THROWS(select_joints(ds, {4}));
}

TEST_CASE("CSV save/load round-trip and header contract") {
    const MotionDataset ds = synthesize_chain(7, 3, 12345, 25.0);
    const std::string path = "/tmp/qae3d_test_data.csv";
    save_csv(ds, path);
    const MotionDataset back = load_csv(path);
    CHECK(back.fps == ds.fps);
    REQUIRE(back.frames.size() == ds.frames.size());
    for (std::size_t f = 0; f < ds.frames.size(); ++f)
        for (int j = 0; j < 3; ++j)
            for (int a = 0; a < 3; ++a)
                CHECK(back.frames[f][j][a] == ds.frames[f][j][a]);
    std::remove(path.c_str());
}

TEST_CASE("CSV error paths name the offending line") {
    const std::string good = "frame,joint,x,y,z\n0,0,1,2,3\n0,1,4,5,6\n1,0,1,2,3\n1,1,4,5,6\n";
    CHECK(load_csv(write_temp("ok.csv", good)).n_vertices() == 2);

    const std::string short_row = "frame,joint,x,y,z\n0,0,1,2\n";
    try {
        load_csv(write_temp("bad_row.csv", short_row));
        FAIL("expected parse error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }

    const std::string missing_joint =
        "frame,joint,x,y,z\n0,0,1,2,3\n0,1,4,5,6\n1,0,1,2,3\n";
    CHECK_THROWS(load_csv(write_temp("missing.csv", missing_joint)));

    const std::string gap = "frame,joint,x,y,z\n0,0,1,2,3\n2,0,1,2,3\n";
    CHECK_THROWS(load_csv(write_temp("gap.csv", gap)));

    const std::string bad_header = "a,b,c,d,e\n0,0,1,2,3\n";
    CHECK_THROWS(load_csv(write_temp("hdr.csv", bad_header)));

    const std::string with_fps = "# fps=30\nframe,joint,x,y,z\n0,0,1,2,3\n";
    CHECK(load_csv(write_temp("fps.csv", with_fps)).fps == 30.0);

    CHECK_THROWS(load_csv("/nonexistent/nowhere.csv"));
}

TEST_CASE("synthesize_chain: determinism, geometry, degenerate cases") {
    const MotionDataset a = synthesize_chain(100, 8, 42);
    const MotionDataset b = synthesize_chain(100, 8, 42);
    CHECK(a.frames == b.frames);
    const MotionDataset c = synthesize_chain(100, 8, 43);
    CHECK(a.frames != c.frames);

    CHECK(a.n_vertices() == 8);
    CHECK(a.fps == 12.0);
    CHECK(compute_normalization(a).scale > 0.0);

    // unit segments throughout
    for (const PointCloud& pc : a.frames)
        for (int j = 1; j < 8; ++j) {
            double len = 0.0;
            for (int ax = 0; ax < 3; ++ax) {
                const double d = pc[j][ax] - pc[j - 1][ax];
                len += d * d;
            }
            CHECK(std::abs(std::sqrt(len) - 1.0) <= 1e-12);
        }

    // zero amplitude freezes the chain: the constant baseline is exact
    const MotionDataset frozen = synthesize_chain(20, 2, 7, 12.0, 0.0);
    for (const PointCloud& pc : frozen.frames) CHECK(pc == frozen.frames[0]);

    CHECK_THROWS(synthesize_chain(10, 1, 0));
    CHECK_THROWS(synthesize_chain(0, 4, 0));
}
