#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "support.hpp"
#include "vialsim/perception/cnn.hpp"
#include "vialsim/perception/crop.hpp"
#include "vialsim/perception/dataset.hpp"
#include "vialsim/perception/hough.hpp"
#include "vialsim/perception/projection.hpp"
#include "vialsim/perception/select.hpp"
#include "vialsim/simworld/render.hpp"

using namespace testing;
using namespace vialsim::perception;

namespace {

// Bright disk on a darker background, 4x4 supersampled.
Image disk_image(int w, int h, double cu, double cv, double r) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int inside = 0;
      for (int sy = 0; sy < 4; ++sy)
        for (int sx = 0; sx < 4; ++sx) {
          const double px = x - 0.375 + 0.25 * sx;
          const double py = y - 0.375 + 0.25 * sy;
          inside += std::hypot(px - cu, py - cv) <= r;
        }
      img.at(x, y) = to_gray(60.0 + 140.0 * inside / 16.0);
    }
  return img;
}

Image shifted(const Image& img, int du, int dv) {
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const int sx = std::clamp(x - du, 0, img.width - 1);
      const int sy = std::clamp(y - dv, 0, img.height - 1);
      out.at(x, y) = img.at(sx, sy);
    }
  return out;
}

Crop random_crop(RngStream& rng, int size = 32) {
  Crop c;
  c.size = size;
  c.data.resize(static_cast<std::size_t>(size) * size);
  for (auto& v : c.data) v = static_cast<float>(rng.uniform(0.0, 1.0));
  return c;
}

ScoredCandidate scored(double u, double v, double pr, double po) {
  return {{u, v, 10.0, 50.0}, pr, po};
}

}  // namespace

TEST_SUITE("perception") {

TEST_CASE("pixel to world examples") {
  CameraIntrinsics k;
  k.fx = k.fy = 600.0;
  k.cx = 320.0;
  k.cy = 240.0;
  const Pose3 cam{0.0, 0.0, 0.8, 0.0};

  const Vec3 a = pixel_to_world(380.0, 240.0, k, cam, 0.05);
  CHECK(a.x == doctest::Approx(0.075).epsilon(1e-15));
  CHECK(a.y == 0.0);
  CHECK(a.z == 0.05);

  const Vec3 b = pixel_to_world(320.0, 360.0, k, cam, 0.05);
  CHECK(b.x == 0.0);
  CHECK(b.y == doctest::Approx(0.15).epsilon(1e-15));

  const Pose3 off{0.12, -0.03, 0.5, 0.0};
  const Vec3 c = pixel_to_world(k.cx, k.cy, k, off, 0.03);
  CHECK(c == Vec3{0.12, -0.03, 0.03});

  CHECK_THROWS_AS(pixel_to_world(1, 1, k, {0, 0, 0.05, 0}, 0.05), InvalidArgument);
  CHECK_THROWS_AS(pixel_to_world(1, 1, k, {0, 0, 0.01, 0}, 0.05), InvalidArgument);
}

TEST_CASE("pixel to world inverts the forward projection") {
  RngStream rng(31);
  const CameraIntrinsics k;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double rz = rng.uniform(0.0, 0.1);
    const Pose3 cam{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rz + rng.uniform(0.02, 1.0), 0.0};
    const Vec3 p{cam.x + rng.uniform(-0.1, 0.1), cam.y + rng.uniform(-0.1, 0.1), rz};
    const Vec2 px = simworld::project_point(p, cam, k);
    const Vec3 q = pixel_to_world(px.x, px.y, k, cam, rz);
    worst = std::max(worst, (q - p).norm());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("circle detection") {
  HoughParams hp;
  hp.r_min = 7;
  hp.r_max = 14;

  SUBCASE("blank image") {
    CHECK(detect_circles(Image(128, 128, 120), hp).empty());
  }
  SUBCASE("single circle") {
    const auto found = detect_circles(disk_image(128, 128, 64.0, 64.0, 10.0), hp);
    REQUIRE_FALSE(found.empty());
    CHECK(std::hypot(found[0].u - 64.0, found[0].v - 64.0) <= 2.0);
    CHECK(std::abs(found[0].r - 10.0) <= 2.0);
    for (std::size_t i = 1; i < found.size(); ++i) CHECK(found[i].votes <= found[0].votes);
  }
  SUBCASE("empty radius range") {
    HoughParams bad = hp;
    bad.r_max = 6;
    CHECK_THROWS_AS(detect_circles(Image(32, 32), bad), InvalidArgument);
    bad.r_min = 0;
    CHECK_THROWS_AS(detect_circles(Image(32, 32), bad), InvalidArgument);
  }
}

TEST_CASE("circle detection is translation covariant") {
  const auto c = quiet_config();
  const auto s = held_scene(c);
  const Pose3 cam = c.camera.home;
  const Image img = simworld::render_topdown(s, cam, c.camera.intrinsics);
  const auto hp = hough_params_for(c, cam.z - c.rack.height);
  const auto base = detect_circles(img, hp);
  const int du = 7, dv = -4;
  const auto moved = detect_circles(shifted(img, du, dv), hp);
  const double margin = hp.r_max + 12.0;
  int checked = 0;
  for (const auto& a : base) {
    const double u = a.u + du, v = a.v + dv;
    if (std::min(a.u, u) < margin || std::max(a.u, u) > img.width - 1 - margin) continue;
    if (std::min(a.v, v) < margin || std::max(a.v, v) > img.height - 1 - margin) continue;
    double best = 1e9;
    for (const auto& b : moved) best = std::min(best, std::hypot(b.u - u, b.v - v));
    CHECK(best <= 1.0);
    ++checked;
  }
  CHECK(checked >= 24);
}

TEST_CASE("crop extraction") {
  Image ramp(200, 160);
  for (int y = 0; y < ramp.height; ++y)
    for (int x = 0; x < ramp.width; ++x) ramp.at(x, y) = static_cast<std::uint8_t>(x);

  SUBCASE("interior crop samples the ramp exactly") {
    const Candidate cand{100.0, 80.0, 10.0, 0.0};
    const Crop crop = extract_crop(ramp, cand);
    REQUIRE(crop.size == 32);
    const double half = 1.10 * 10.0;
    const double step = 2.0 * half / 32;
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        const double sx = 100.0 - half + (i + 0.5) * step;
        CHECK(crop.at(i, j) == doctest::Approx(sx / 255.0).epsilon(1e-6));
      }
  }
  SUBCASE("border overhang is replicated") {
    // region spans u in [-6, 16]: 6 px of overhang at 22/32 px per sample
    const Crop crop = extract_crop(ramp, {5.0, 80.0, 10.0, 0.0});
    int band = 0;
    for (int i = 0; i < 32; ++i) {
      bool edge = true;
      for (int j = 0; j < 32; ++j) edge = edge && crop.at(i, j) == 0.0f;
      band += edge;
    }
    CHECK(band == 9);
    CHECK(crop.at(9, 0) > 0.0f);
  }
  SUBCASE("uniform image") {
    const Crop crop = extract_crop(Image(64, 64, 77), {30.0, 30.0, 8.0, 0.0});
    for (float v : crop.data) CHECK(v == doctest::Approx(77.0 / 255.0));
  }
  SUBCASE("zero radius") {
    CHECK_THROWS_AS(extract_crop(ramp, {10.0, 10.0, 0.0, 0.0}), InvalidArgument);
  }
}

TEST_CASE("network shape") {
  const CnnShape shape;
  const auto layers = layer_layout(shape);
  REQUIRE(layers.size() == 10);
  CHECK(layers[0].name == "conv1.weight");
  CHECK(layers[0].dims == std::vector<int>{8, 1, 5, 5});
  CHECK(layers[4].dims == std::vector<int>{512, 64});
  CHECK(layers[8].dims == std::vector<int>{2, 128});
  std::size_t total = 0;
  for (const auto& l : layers) {
    CHECK(l.offset == total);
    total += l.count;
  }
  CHECK(CnnWeights(shape).params.size() == total);

  CnnShape odd;
  odd.input = 30;
  CHECK_THROWS_AS(check_shape(odd), InvalidArgument);
}

TEST_CASE("forward pass") {
  RngStream rng(41);
  const Crop crop = random_crop(rng);

  const CnnOutput zero = cnn_forward(crop, CnnWeights{});
  CHECK(zero.p_in_rack == 0.5);
  CHECK(zero.p_occupied == 0.5);

  const CnnWeights w = init_weights(CnnShape{}, rng);
  CHECK(w.finite());
  for (int i = 0; i < 20; ++i) {
    const auto out = cnn_forward(random_crop(rng), w);
    CHECK(std::isfinite(out.p_in_rack));
    CHECK(out.p_in_rack > 0.0);
    CHECK(out.p_in_rack < 1.0);
    CHECK(out.p_occupied > 0.0);
    CHECK(out.p_occupied < 1.0);
  }
  const auto a = cnn_forward(crop, w);
  const auto b = cnn_forward(crop, w);
  CHECK(a.p_in_rack == b.p_in_rack);
  CHECK(a.p_occupied == b.p_occupied);

  CHECK_THROWS_AS(cnn_forward(random_crop(rng, 16), w), InvalidArgument);
}

TEST_CASE("analytic gradient matches central differences") {
  RngStream rng(42);
  const CnnShape shape;
  const CnnWeights w = init_weights(shape, rng);
  std::vector<double> params(w.params.begin(), w.params.end());
  // non-zero biases so every path carries gradient
  for (const auto& l : layer_layout(shape))
    if (l.name.find("bias") != std::string::npos)
      for (std::size_t i = 0; i < l.count; ++i) params[l.offset + i] = rng.uniform(-0.1, 0.1);

  for (CropLabel label : {CropLabel::InRackVacant, CropLabel::NotInRack}) {
    const Crop crop = random_crop(rng);
    std::vector<double> grad;
    cnn_loss(crop, label, shape, params, &grad);
    REQUIRE(grad.size() == params.size());

    double worst = 0.0;
    int used = 0;
    for (int n = 0; n < 100; ++n) {
      const auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(params.size()) - 1));
      const double eps = 1e-3;
      auto p = params;
      p[i] = params[i] + eps;
      const double up = cnn_loss(crop, label, shape, p, nullptr);
      p[i] = params[i] - eps;
      const double down = cnn_loss(crop, label, shape, p, nullptr);
      const double numeric = (up - down) / (2.0 * eps);
      const double scale = std::max({std::abs(numeric), std::abs(grad[i]), 1e-6});
      worst = std::max(worst, std::abs(numeric - grad[i]) / scale);
      ++used;
    }
    CAPTURE(label);
    CHECK(used == 100);
    CHECK(worst <= 1e-3);
  }
}

TEST_CASE("float and double losses agree") {
  RngStream rng(43);
  const CnnWeights w = init_weights(CnnShape{}, rng);
  const Crop crop = random_crop(rng);
  std::vector<float> gf;
  std::vector<double> gd;
  const double lf = cnn_loss(crop, CropLabel::InRackOccupied, w, &gf);
  const double ld = cnn_loss(crop, CropLabel::InRackOccupied, w.shape,
                             std::vector<double>(w.params.begin(), w.params.end()), &gd);
  CHECK(lf == doctest::Approx(ld).epsilon(1e-4));
  double gmax = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < gd.size(); ++i) {
    gmax = std::max(gmax, std::abs(gd[i]));
    diff = std::max(diff, std::abs(gd[i] - gf[i]));
  }
  CHECK(diff <= 1e-3 * gmax);
}

TEST_CASE("occupancy head is masked for crops outside the rack") {
  RngStream rng(44);
  const CnnWeights w = init_weights(CnnShape{}, rng);
  const Crop crop = random_crop(rng);
  std::vector<float> grad;
  cnn_loss(crop, CropLabel::NotInRack, w, &grad);
  const auto fc3b = layer_layout(w.shape)[9];
  CHECK(grad[fc3b.offset + 0] != 0.0f);
  CHECK(grad[fc3b.offset + 1] == 0.0f);
}

TEST_CASE("training memorises a single sample and is reproducible") {
  RngStream data(45);
  const std::vector<LabeledCrop> one{{random_crop(data), CropLabel::InRackVacant}};
  TrainParams tp;
  tp.epochs = 150;
  tp.batch = 1;
  RngStream r1(7), r2(7);
  TrainReport report;
  const CnnWeights a = cnn_train(one, tp, r1, CnnShape{}, &report);
  const CnnWeights b = cnn_train(one, tp, r2);
  CHECK(a == b);
  CHECK(report.epoch_loss.size() == 150);
  CHECK(cnn_loss(one[0].crop, one[0].label, a, nullptr) < 0.01);
  CHECK(classify(cnn_forward(one[0].crop, a)) == CropLabel::InRackVacant);

  RngStream r3(7);
  CHECK_THROWS_AS(cnn_train({}, tp, r3), InvalidArgument);
}

TEST_CASE("divergence names the epoch") {
  RngStream data(46);
  std::vector<LabeledCrop> set;
  for (int i = 0; i < 8; ++i) set.push_back({random_crop(data), i % 2 ? CropLabel::NotInRack : CropLabel::InRackVacant});
  TrainParams tp;
  tp.learning_rate = 1e30;
  tp.epochs = 5;
  RngStream rng(8);
  try {
    cnn_train(set, tp, rng);
    FAIL("expected divergence");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("three-way decision") {
  CHECK(classify({0.2, 0.9}) == CropLabel::NotInRack);
  CHECK(classify({0.8, 0.9}) == CropLabel::InRackOccupied);
  CHECK(classify({0.8, 0.1}) == CropLabel::InRackVacant);
  CHECK(classify({0.5, 0.5}) == CropLabel::InRackVacant);
}

TEST_CASE("weights file round trip") {
  RngStream rng(47);
  const CnnWeights w = init_weights(CnnShape{}, rng);
  const std::string bytes = encode_weights(w);
  CHECK(bytes.rfind("VIALCNN1\n", 0) == 0);
  CHECK(bytes.find("end\n") != std::string::npos);
  CHECK(bytes.size() == bytes.find("end\n") + 4 + 4 * w.params.size());
  CHECK(decode_weights(bytes) == w);

  CHECK_THROWS(decode_weights("VIALCNN2\n" + bytes.substr(9)));
  CHECK_THROWS(decode_weights(bytes.substr(0, bytes.size() - 3)));
  CHECK_THROWS(decode_weights(bytes + "x"));
}

TEST_CASE("target selection") {
  const SelectParams sp;
  const Vec2 centre{240.0, 180.0};
  RngStream rng(48);

  SUBCASE("unique maximum") {
    const std::vector<ScoredCandidate> s{scored(10, 10, 0.9, 0.2), scored(20, 20, 0.95, 0.05),
                                         scored(30, 30, 0.7, 0.1)};
    const auto t = select_target(s, SelectMode::BestVacant, centre, sp, rng);
    REQUIRE(t);
    CHECK(t->candidate.u == 20.0);
  }
  SUBCASE("filtered candidates are never chosen") {
    // the best raw score fails the rack filter
    const std::vector<ScoredCandidate> s{scored(10, 10, 0.49, 0.0), scored(20, 20, 0.6, 0.5),
                                         scored(30, 30, 1.0, 0.51)};
    const auto t = select_target(s, SelectMode::BestVacant, centre, sp, rng);
    REQUIRE(t);
    CHECK(t->candidate.u == 20.0);
    CHECK_FALSE(select_target({scored(1, 1, 0.1, 0.1), scored(2, 2, 0.9, 0.9)}, SelectMode::BestVacant, centre,
                              sp, rng));
    CHECK_FALSE(select_target({}, SelectMode::NearestCenter, centre, sp, rng));
  }
  SUBCASE("ties split evenly and repeat per seed") {
    const std::vector<ScoredCandidate> s{scored(10, 10, 0.9, 0.1), scored(20, 20, 0.9, 0.1)};
    int first = 0;
    for (int seed = 0; seed < 1000; ++seed) {
      RngStream a(static_cast<std::uint64_t>(seed)), b(static_cast<std::uint64_t>(seed));
      const auto ta = select_target(s, SelectMode::BestVacant, centre, sp, a);
      const auto tb = select_target(s, SelectMode::BestVacant, centre, sp, b);
      CHECK(ta->candidate.u == tb->candidate.u);
      first += ta->candidate.u == 10.0;
    }
    // binomial(1000, 0.5): 4 sigma is about 63
    CHECK(std::abs(first - 500) < 63);
  }
  SUBCASE("nearest centre") {
    const std::vector<ScoredCandidate> s{scored(100, 100, 0.99, 0.0), scored(240, 180, 0.6, 0.4),
                                         scored(250, 180, 0.9, 0.0)};
    const auto t = select_target(s, SelectMode::NearestCenter, centre, sp, rng);
    REQUIRE(t);
    CHECK(t->candidate.u == 240.0);
  }
}

TEST_CASE("labelled dataset") {
  WorkspaceConfig c;
  const RngStream seed(49);

  SUBCASE("labels cover all three classes and repeat per seed") {
    const auto a = generate_labeled_dataset(c, 12, seed);
    const auto b = generate_labeled_dataset(c, 12, seed);
    REQUIRE(a.size() == b.size());
    int counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].label == b[i].label);
      CHECK(a[i].crop.data == b[i].crop.data);
      ++counts[static_cast<int>(a[i].label)];
    }
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
    CHECK(counts[2] > 0);
  }
  SUBCASE("full rack has no vacant labels") {
    c.workspace.occupancy = 1.0;
    for (const auto& s : generate_labeled_dataset(c, 4, seed)) CHECK(s.label != CropLabel::InRackVacant);
  }
}

}  // TEST_SUITE
