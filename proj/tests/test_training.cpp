#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "gazeaffect/error.hpp"
#include "gazeaffect/training.hpp"

using namespace gazeaffect;
using namespace gazeaffect::model;

namespace {

// Class is readable from the level of the first sequence channel.
std::vector<Example> separable(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 0.15);
    std::vector<Example> out;
    for (std::size_t i = 0; i < n; ++i) {
        Example ex;
        ex.label = static_cast<int>(i % 3);
        const double level = static_cast<double>(ex.label) - 1.0;
        for (auto& step : ex.sequence) {
            step[0] = level + z(rng);
            step[1] = z(rng);
            step[2] = z(rng);
        }
        for (double& v : ex.env) v = z(rng);
        out.push_back(ex);
    }
    return out;
}

ModelConfig small_config() {
    ModelConfig c;
    c.lstm_hidden = 6;
    c.personality_width = 3;
    c.stimulus_width = 3;
    c.env_width = 2;
    c.fusion_width = 8;
    c.learning_rate = 1e-2;
    c.dropout = 0.1;
    c.batch_size = 16;
    c.max_epochs = 200;
    c.variant = Variant::Eye;
    return c;
}

}  // namespace

TEST_CASE("partition counts") {
    CHECK(partition_counts(100, {}) == std::array<std::size_t, 3>{64, 16, 20});
    CHECK(partition_counts(5, {}) == std::array<std::size_t, 3>{3, 1, 1});
    CHECK(partition_counts(1, {}) == std::array<std::size_t, 3>{1, 0, 0});
    CHECK(partition_counts(0, {}) == std::array<std::size_t, 3>{0, 0, 0});
    for (std::size_t n = 0; n < 300; ++n) {
        const auto c = partition_counts(n, {});
        CHECK(c[0] + c[1] + c[2] == n);
        CHECK(std::fabs(static_cast<double>(c[0]) - 0.64 * n) < 1.0 + 1e-9);
        CHECK(std::fabs(static_cast<double>(c[1]) - 0.16 * n) < 1.0 + 1e-9);
        CHECK(std::fabs(static_cast<double>(c[2]) - 0.20 * n) < 1.0 + 1e-9);
    }
    CHECK_THROWS_AS(partition_counts(10, {0.5, 0.5, 0.5}), Error);
}

TEST_CASE("stratified split") {
    std::vector<int> classes;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 100; ++i) classes.push_back(c);
    std::shuffle(classes.begin(), classes.end(), std::mt19937_64(1));
    const auto a = stratified_split(classes, {}, 42);
    CHECK(a == stratified_split(classes, {}, 42));
    CHECK(a != stratified_split(classes, {}, 43));
    std::map<std::pair<int, int>, int> counts;
    for (std::size_t i = 0; i < a.size(); ++i) ++counts[{classes[i], static_cast<int>(a[i])}];
    for (int c = 0; c < 3; ++c) {
        CHECK(counts[{c, 0}] == 64);
        CHECK(counts[{c, 1}] == 16);
        CHECK(counts[{c, 2}] == 20);
    }

    const std::vector<int> five = {0, 0, 0, 0, 0, 1, 2};
    const auto s = stratified_split(five, {}, 3);
    std::array<int, 3> parts{};
    for (int i = 0; i < 5; ++i) ++parts[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
    CHECK(parts == std::array<int, 3>{3, 1, 1});

    const std::vector<int> missing = {0, 0, 2, 2};
    try {
        stratified_split(missing, {}, 1);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyClass);
    }
}

TEST_CASE("participant split keeps participants whole") {
    std::vector<std::string> ids;
    for (int p = 0; p < 25; ++p)
        for (int t = 0; t < 7; ++t) ids.push_back("p" + std::to_string(p));
    const auto s = participant_split(ids, {}, 9);
    std::map<std::string, std::set<SplitPart>> seen;
    std::array<int, 3> per_part{};
    for (std::size_t i = 0; i < ids.size(); ++i) seen[ids[i]].insert(s[i]);
    for (const auto& [id, parts] : seen) {
        CHECK(parts.size() == 1);
        ++per_part[static_cast<std::size_t>(*parts.begin())];
    }
    CHECK(per_part == std::array<int, 3>{16, 4, 5});
    CHECK(s == participant_split(ids, {}, 9));
}

TEST_CASE("channel scaler") {
    const std::vector<ScaleMode> modes = {ScaleMode::ZScore, ScaleMode::MinMax, ScaleMode::ZScore,
                                          ScaleMode::Passthrough};
    const std::vector<std::vector<double>> rows = {{1, 0, 4, 9}, {3, 10, 4, -9}, {2, 5, 4, 0.5}, {2, 5, 4, 0}};
    const auto s = ChannelScaler::fit(rows, modes);
    // Column 0: mean 2, population sd sqrt(0.5).
    CHECK(s.apply(0, 2 + std::sqrt(0.5)) == doctest::Approx(1.0));
    CHECK(s.apply(1, 5) == 0.5);
    CHECK(s.apply(1, 12) == doctest::Approx(1.2));
    CHECK(s.apply(2, 4) == 0.0);
    CHECK(s.apply(2, 100) == 0.0);
    CHECK(s.zero_variance == std::vector<std::size_t>{2});
    CHECK(s.apply(3, 123.0) == 123.0);

    const std::vector<std::vector<double>> simple = {{1}, {3}};
    const std::vector<ScaleMode> z = {ScaleMode::ZScore};
    CHECK(ChannelScaler::fit(simple, z).apply(0, 3) == 1.0);
}

TEST_CASE("example scaler uses training data only") {
    auto train = separable(30, 1);
    auto other = separable(30, 2);
    for (auto& ex : other)
        for (auto& step : ex.sequence) step[0] += 100;
    const auto s1 = ExampleScaler::fit(train);
    const auto scaled = s1.apply(train);
    double mean = 0;
    for (const auto& ex : scaled)
        for (const auto& step : ex.sequence) mean += step[0];
    CHECK(mean / (30 * kSequenceSteps) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    // Region, progress, personality and stimulus pass through; constant channels are reported.
    CHECK(scaled[0].sequence[0][3] == train[0].sequence[0][3]);
    const auto zv = s1.zero_variance_channels();
    CHECK(std::find(zv.begin(), zv.end(), "speed") != zv.end());

    auto permuted = train;
    std::reverse(permuted.begin(), permuted.end());
    CHECK(ExampleScaler::fit(permuted).to_json() == s1.to_json());
    CHECK(ExampleScaler::from_json(s1.to_json()).to_json() == s1.to_json());
}

TEST_CASE("class weights") {
    CHECK(class_weights({10, 10, 10}) == std::array<double, 3>{1, 1, 1});
    const auto w = class_weights({10, 20, 70});
    CHECK(w[0] == doctest::Approx(10.0 / 3));
    CHECK(w[1] == doctest::Approx(5.0 / 3));
    CHECK(w[2] == doctest::Approx(10.0 / 21));
    CHECK(w[0] * 10 + w[1] * 20 + w[2] * 70 == doctest::Approx(100));
    const auto skew = class_weights({1, 1, 998});
    CHECK(skew[0] == skew[1]);
    CHECK(skew[0] > 100 * skew[2]);
    CHECK_THROWS_AS(class_weights({0, 1, 1}), Error);
}

TEST_CASE("noise augmentation") {
    std::mt19937_64 rng(3);
    Example ex = separable(1, 4)[0];
    ex.personality = {0.1, 0.2, 0.3, 0.4, 0.5};
    ex.stimulus[2] = 1;
    const Example orig = ex;
    noise_augment(ex, 0.0, rng);
    CHECK(ex.personality == orig.personality);
    noise_augment(ex, 0.5, rng, Mode::Eval);
    CHECK(ex.env == orig.env);
    noise_augment(ex, 0.05, rng);
    CHECK(ex.personality != orig.personality);
    CHECK(ex.env != orig.env);
    CHECK(ex.stimulus == orig.stimulus);
    CHECK(ex.sequence == orig.sequence);

    std::vector<double> zeros(100000, 0.0);
    noise_augment(std::span<double>(zeros), 0.05, rng);
    double m = 0, ss = 0;
    for (double v : zeros) m += v;
    m /= zeros.size();
    for (double v : zeros) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / (zeros.size() - 1));
    CHECK(sd >= 0.049);
    CHECK(sd <= 0.051);
}

TEST_CASE("metrics") {
    const std::vector<int> truth = {0, 0, 1, 1, 2, 2};
    const auto perfect = evaluate_predictions(truth, truth);
    CHECK(perfect.macro_f1 == 1.0);
    for (double f : perfect.f1) CHECK(f == 1.0);

    const std::vector<int> medium(6, 1);
    const auto m = evaluate_predictions(truth, medium);
    CHECK(m.f1[0] == 0.0);
    CHECK(m.f1[1] == doctest::Approx(0.5));
    CHECK(m.f1[2] == 0.0);
    CHECK(m.macro_f1 == doctest::Approx(1.0 / 6));
    CHECK(m.confusion[0][1] == 2);

    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> cls(0, 2);
    std::vector<int> t(50), p(50);
    for (int i = 0; i < 50; ++i) {
        t[i] = cls(rng);
        p[i] = cls(rng);
    }
    const auto r = evaluate_predictions(t, p);
    CHECK(std::fabs(r.macro_f1 - (r.f1[0] + r.f1[1] + r.f1[2]) / 3) < 1e-12);
    CHECK_THROWS_AS(evaluate_predictions(std::vector<int>{}, std::vector<int>{}), Error);
}

TEST_CASE("early stopper") {
    EarlyStopper s(10);
    std::size_t stopped = 0;
    for (std::size_t epoch = 1; epoch <= 100; ++epoch) {
        const double score = epoch <= 7 ? 0.1 * epoch : 0.7;
        if (s.update(epoch, score)) {
            stopped = epoch;
            break;
        }
    }
    CHECK(stopped == 17);
    CHECK(s.best_epoch() == 7);
    CHECK(s.best_score() == doctest::Approx(0.7));
    CHECK_THROWS_AS(EarlyStopper(0), Error);
}

TEST_CASE("training separates a constructed cohort and is deterministic") {
    const auto train_set = separable(150, 11);
    const auto val_set = separable(60, 12);
    const auto c = small_config();
    const auto r = train(c, train_set, val_set);
    CHECK(r.best_val_f1 >= 0.95);
    CHECK(r.log.size() <= 200);
    CHECK(evaluate(r.params, val_set).macro_f1 == r.best_val_f1);
    CHECK(r.log[r.best_epoch - 1].val_macro_f1 == r.best_val_f1);

    auto c2 = c;
    c2.max_epochs = 8;
    const auto a = train(c2, train_set, val_set);
    const auto b = train(c2, train_set, val_set);
    CHECK(training_log_csv(a.log) == training_log_csv(b.log));
    CHECK(serialize_params(a.params) == serialize_params(b.params));
}

TEST_CASE("grid search") {
    CHECK(paper_grid().size() == 9);
    CHECK(extended_grid().size() == 24);

    const auto train_set = separable(60, 1);
    const auto val_set = separable(30, 2);
    auto c = small_config();
    c.max_epochs = 3;
    const auto g = grid_search(c, paper_grid(), train_set, val_set);
    CHECK(g.leaderboard.size() == 9);
    const std::vector<GridPoint> single = {{3e-3, 0.2}};
    const auto s = grid_search(c, single, train_set, val_set);
    CHECK(s.best_config.learning_rate == 3e-3);
    CHECK(leaderboard_csv(s.leaderboard).starts_with("learning_rate,dropout,val_macro_f1,best_epoch\n"));

    const std::vector<LeaderboardRow> rows = {
        {{1e-3, 0.2}, 0.5, 3}, {{1e-4, 0.5}, 0.5, 3}, {{1e-4, 0.3}, 0.5, 3}, {{1e-5, 0.2}, 0.4, 3}};
    CHECK(select_best(rows) == 2);
}

TEST_CASE("svm baselines") {
    // Deterministic stimulus -> class mapping.
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> stim(0, 5);
    std::uniform_real_distribution<double> u(0, 1);
    auto make = [&](std::size_t n, bool random_labels) {
        std::vector<Example> xs;
        std::uniform_int_distribution<int> cls(0, 2);
        for (std::size_t i = 0; i < n; ++i) {
            Example ex;
            const int s = stim(rng);
            ex.stimulus[static_cast<std::size_t>(s)] = 1.0;
            for (double& v : ex.personality) v = u(rng);
            ex.label = random_labels ? cls(rng) : s % 3;
            xs.push_back(ex);
        }
        return xs;
    };
    const auto train_set = make(300, false);
    const auto test_set = make(100, false);
    const auto model = train_svm(train_set, SvmFeatures::Stimulus, {});
    CHECK(evaluate(model, test_set).macro_f1 == 1.0);

    double worst = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SvmConfig cfg;
        cfg.seed = seed;
        const auto noise_train = make(300, true);
        const auto noise_test = make(150, true);
        worst = std::max(worst, evaluate(train_svm(noise_train, SvmFeatures::StimulusPersonality, cfg), noise_test).macro_f1);
    }
    CHECK(worst < 0.45);

    CHECK(svm_input(train_set[0], SvmFeatures::StimulusPersonality).size() == 12);
    const auto again = train_svm(train_set, SvmFeatures::Stimulus, {});
    for (std::size_t c = 0; c < kClasses; ++c) CHECK(again.w[c] == model.w[c]);
}

TEST_CASE("make_examples requires parallel sequences") {
    FeatureTable table;
    table.rows.resize(2);
    table.rows[0].labels.ratings = {2, 5, 8, 5};
    table.rows[0].features.big5_scaled = {0.1, 0.2, 0.3, 0.4, 0.5};
    table.rows[0].features.env.ambient_lux = 300;
    CHECK_THROWS_AS(make_examples(table, LabelDim::FeltValence), Error);
    table.sequences.resize(2);
    const auto xs = make_examples(table, LabelDim::FeltValence);
    CHECK(xs[0].label == 2);
    CHECK(make_examples(table, LabelDim::PerceivedValence)[0].label == 0);
    CHECK(xs[0].personality[4] == 0.5);
    CHECK(xs[0].env[0] == 300);
}
