#include <doctest.h>

#include <cmath>
#include <random>

#include "gazeaffect/error.hpp"
#include "gazeaffect/network.hpp"
#include "test_util.hpp"

using namespace gazeaffect;
using namespace gazeaffect::model;

namespace {

ModelConfig tiny(Variant v) {
    ModelConfig c;
    c.lstm_hidden = 4;
    c.personality_width = 3;
    c.stimulus_width = 3;
    c.env_width = 2;
    c.fusion_width = 5;
    c.variant = v;
    return c;
}

Example random_example(std::mt19937_64& rng, int label) {
    std::normal_distribution<double> z;
    Example ex;
    for (auto& step : ex.sequence)
        for (double& v : step) v = z(rng);
    for (double& v : ex.personality) v = z(rng);
    ex.stimulus[static_cast<std::size_t>(label + 1)] = 1.0;
    for (double& v : ex.env) v = z(rng);
    ex.label = label;
    return ex;
}

NetworkParams random_params(const ModelConfig& c, std::mt19937_64& rng, double scale = 0.5) {
    NetworkParams p = NetworkParams::zeros(c);
    std::normal_distribution<double> z(0.0, scale);
    for (Tensor* t : p.tensors())
        for (double& v : t->data) v = z(rng);
    return p;
}

double norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("all-zero parameters give a uniform output") {
    const auto p = NetworkParams::zeros(ModelConfig{});
    std::mt19937_64 rng(1);
    const auto probs = forward(p, random_example(rng, 0), Mode::Eval, 0.0);
    for (double v : probs) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("softmax output is a simplex point and shift invariant") {
    std::mt19937_64 rng(2);
    for (Variant v : {Variant::Eye, Variant::EyePersonality, Variant::EyeStimulus, Variant::Full}) {
        const auto c = tiny(v);
        auto p = random_params(c, rng, 2.0);
        for (int trial = 0; trial < 20; ++trial) {
            const auto ex = random_example(rng, trial % 3);
            const auto probs = forward(p, ex, Mode::Eval, 0.0);
            double sum = 0;
            for (double x : probs) {
                CHECK(x >= 0.0);
                sum += x;
            }
            CHECK(std::fabs(sum - 1.0) < 1e-9);
            auto shifted = p;
            for (double& b : shifted.out_b.data) b += 3.7;
            const auto probs2 = forward(shifted, ex, Mode::Eval, 0.0);
            for (std::size_t k = 0; k < kClasses; ++k) CHECK(std::fabs(probs[k] - probs2[k]) < 1e-12);
        }
    }
}

TEST_CASE("weighted cross-entropy") {
    const std::array<double, 3> ones = {1, 1, 1};
    CHECK(loss({0, 1, 0}, 1, {4, 5, 6}) == 0.0);
    CHECK(loss({1.0 / 3, 1.0 / 3, 1.0 / 3}, 2, ones) == doctest::Approx(std::log(3.0)));
    const std::array<double, 3> p = {0.2, 0.5, 0.3};
    CHECK(loss(p, 0, {2, 2, 2}) == doctest::Approx(2.0 * loss(p, 0, ones)));
    CHECK(loss({1, 0, 0}, 2, ones) == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("backward matches central finite differences for every tensor") {
    for (Variant v : {Variant::Eye, Variant::EyePersonality, Variant::EyeStimulus, Variant::Full}) {
        CAPTURE(variant_name(v));
        const auto c = tiny(v);
        std::mt19937_64 rng(10 + static_cast<int>(v));
        auto p = random_params(c, rng);
        std::vector<Example> batch = {random_example(rng, 0), random_example(rng, 1), random_example(rng, 2)};
        std::vector<std::vector<double>> masks;
        for (int i = 0; i < 3; ++i) masks.push_back(dropout_mask(c.fusion_width, 0.3, rng));
        const std::array<double, 3> w = {0.7, 1.3, 2.0};

        auto grad = NetworkParams::zeros(c);
        batch_loss(p, batch, w, masks, &grad);

        const double h = 1e-5;
        auto ps = p.tensors();
        auto gs = grad.tensors();
        for (std::size_t t = 0; t < ps.size(); ++t) {
            if (ps[t]->data.empty()) continue;
            CAPTURE(ps[t]->name);
            std::vector<double> numeric(ps[t]->data.size());
            for (std::size_t k = 0; k < numeric.size(); ++k) {
                const double orig = ps[t]->data[k];
                ps[t]->data[k] = orig + h;
                const double up = batch_loss(p, batch, w, masks, nullptr);
                ps[t]->data[k] = orig - h;
                const double down = batch_loss(p, batch, w, masks, nullptr);
                ps[t]->data[k] = orig;
                numeric[k] = (up - down) / (2 * h);
            }
            std::vector<double> diff(numeric.size());
            for (std::size_t k = 0; k < numeric.size(); ++k) diff[k] = gs[t]->data[k] - numeric[k];
            const double denom = norm(gs[t]->data) + norm(numeric);
            const double rel = denom == 0.0 ? 0.0 : norm(diff) / denom;
            CHECK(rel < 1e-4);
        }
    }
}

TEST_CASE("zero class weights give a zero gradient") {
    const auto c = tiny(Variant::Full);
    std::mt19937_64 rng(4);
    const auto p = random_params(c, rng);
    std::vector<Example> batch = {random_example(rng, 0), random_example(rng, 2)};
    auto grad = NetworkParams::zeros(c);
    batch_loss(p, batch, {0, 0, 0}, {}, &grad);
    for (const Tensor* t : grad.tensors())
        for (double v : t->data) CHECK(v == 0.0);
}

TEST_CASE("duplicating the batch leaves the mean gradient unchanged") {
    const auto c = tiny(Variant::Full);
    std::mt19937_64 rng(5);
    const auto p = random_params(c, rng);
    std::vector<Example> batch = {random_example(rng, 0), random_example(rng, 1), random_example(rng, 2)};
    auto doubled = batch;
    doubled.insert(doubled.end(), batch.begin(), batch.end());
    auto g1 = NetworkParams::zeros(c), g2 = NetworkParams::zeros(c);
    const double l1 = batch_loss(p, batch, {1, 2, 3}, {}, &g1);
    const double l2 = batch_loss(p, doubled, {1, 2, 3}, {}, &g2);
    CHECK(l1 == doctest::Approx(l2).epsilon(1e-13));
    auto a = g1.tensors();
    auto b = g2.tensors();
    for (std::size_t t = 0; t < a.size(); ++t)
        for (std::size_t k = 0; k < a[t]->data.size(); ++k)
            CHECK(a[t]->data[k] == doctest::Approx(b[t]->data[k]).epsilon(1e-12).scale(1e-12));
}

TEST_CASE("dropout applies only in training mode with inverted scaling") {
    std::mt19937_64 rng(6);
    const auto mask = dropout_mask(100000, 0.3, rng);
    double sum = 0;
    for (double m : mask) {
        CHECK((m == 0.0 || m == doctest::Approx(1.0 / 0.7)));
        sum += m;
    }
    CHECK(sum / 100000 == doctest::Approx(1.0).epsilon(0.01));

    const auto c = tiny(Variant::Full);
    const auto p = random_params(c, rng);
    const auto ex = random_example(rng, 1);
    CHECK(forward(p, ex, Mode::Eval, 0.5) == forward(p, ex, Mode::Eval, 0.5));
    CHECK_THROWS_AS(forward(p, ex, Mode::Train, 0.5, nullptr), Error);
}

TEST_CASE("shape mismatches are reported") {
    auto p = NetworkParams::zeros(tiny(Variant::Full));
    p.fuse_w.cols += 1;
    p.fuse_w.data.resize(p.fuse_w.rows * p.fuse_w.cols);
    std::mt19937_64 rng(7);
    try {
        forward(p, random_example(rng, 0), Mode::Eval, 0.0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ShapeMismatch);
    }
}

TEST_CASE("variants drop the unused streams") {
    const auto eye = NetworkParams::zeros(tiny(Variant::Eye));
    CHECK(eye.pers_w.rows == 0);
    CHECK(eye.stim_w.rows == 0);
    CHECK(eye.fuse_w.cols == 4 + 2);
    const auto full = NetworkParams::zeros(tiny(Variant::Full));
    CHECK(full.fuse_w.cols == 4 + 3 + 3 + 2);
    CHECK(parse_variant("eye_personality") == Variant::EyePersonality);
    CHECK_THROWS_AS(parse_variant("ears"), Error);
}

TEST_CASE("checkpoint round trip is exact") {
    std::mt19937_64 rng(8);
    for (Variant v : {Variant::Eye, Variant::Full}) {
        const auto p = NetworkParams::initialize(tiny(v), rng);
        const std::string text = serialize_params(p);
        const auto q = parse_params(text);
        CHECK(serialize_params(q) == text);
        CHECK(q.variant == v);
        auto a = p.tensors();
        auto b = q.tensors();
        for (std::size_t t = 0; t < a.size(); ++t) CHECK(a[t]->data == b[t]->data);
    }
    testutil::TempDir dir;
    const auto p = NetworkParams::initialize(tiny(Variant::Full), rng);
    save_params(p, dir / "net.txt");
    CHECK(serialize_params(load_params(dir / "net.txt")) == serialize_params(p));

    CHECK_THROWS_AS(parse_params("nonsense"), Error);
    std::string text = serialize_params(p);
    CHECK_THROWS_AS(parse_params(text.substr(0, text.size() / 2)), Error);
}

TEST_CASE("adam first step moves each weight by the learning rate against the gradient sign") {
    const auto c = tiny(Variant::Full);
    std::mt19937_64 rng(9);
    auto p = random_params(c, rng);
    const auto before = p;
    auto g = random_params(c, rng);
    Adam adam(p, 0.01);
    adam.step(p, g);
    auto pa = p.tensors();
    auto pb = before.tensors();
    auto gg = g.tensors();
    for (std::size_t t = 0; t < pa.size(); ++t)
        for (std::size_t k = 0; k < pa[t]->data.size(); ++k) {
            const double gk = gg[t]->data[k];
            const double expected = pb[t]->data[k] - 0.01 * gk / (std::fabs(gk) + 1e-8);
            CHECK(pa[t]->data[k] == doctest::Approx(expected).epsilon(1e-12));
        }
    CHECK(adam.steps() == 1);
}

TEST_CASE("model config validation") {
    config::Document doc = config::Document::parse("[model]\nlearning_rate = 0.0002\ndropout = 0.3\nvariant = \"eye\"\n");
    const auto c = ModelConfig::from_config(doc);
    CHECK(c.learning_rate == 0.0002);
    CHECK(c.variant == Variant::Eye);
    CHECK_THROWS_AS(ModelConfig::from_config(config::Document::parse("[model]\ndropout = 1.0\n")), Error);
    CHECK_THROWS_AS(ModelConfig::from_config(config::Document::parse("[model]\npatience = 0\n")), Error);
    CHECK_THROWS_AS(ModelConfig::from_config(config::Document::parse("[model]\nlearning_rate = 0\n")), Error);
}
