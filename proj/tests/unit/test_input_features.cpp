#include "fixtures.hpp"

#include "etk/input_features.hpp"
#include "etk/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace etk;
using namespace etk::input;

namespace {

// 10 ms samples over [0, span); `keys_at(t)` gives the held keys.
template <class Fn>
std::vector<InputSample> sampled(double span, Fn&& keys_at) {
    std::vector<InputSample> out;
    for (int i = 0; i < static_cast<int>(std::lround(span * 100)); ++i) {
        const double t = i / 100.0;
        out.push_back({t, 0, 0, keys_at(t)});
    }
    return out;
}

bool in(double t, double a, double b) { return t >= a - 1e-9 && t < b - 1e-9; }

}  // namespace

TEST_CASE("key hold intervals") {
    auto s = sampled(0.2, [](double t) { return t < 0.095 ? KeySet{Key::W} : KeySet{}; });
    auto h = key_hold_intervals(s, Key::W);
    REQUIRE(h.size() == 1);
    CHECK(h[0].interval.start_t == 0.0);
    CHECK(h[0].interval.end_t == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(key_hold_intervals(s, Key::A).empty());

    auto two = sampled(1.0, [](double t) { return in(t, 0.1, 0.2) || in(t, 0.5, 1.0) ? KeySet{Key::S} : KeySet{}; });
    auto h2 = key_hold_intervals(two, Key::S);
    REQUIRE(h2.size() == 2);
    CHECK(h2[1].interval.end_t == doctest::Approx(1.0).epsilon(1e-12));  // closes at last t + period
}

TEST_CASE("holds of a key and its complement partition the timeline") {
    Xorshift64Star rng(12);
    bool down = false;
    auto s = sampled(5.0, [&](double) {
        if (rng.bernoulli(0.1)) down = !down;
        return down ? KeySet{Key::E} : KeySet{};
    });
    std::vector<InputSample> complement = s;
    for (auto& x : complement) x.keys_down = x.keys_down.contains(Key::E) ? KeySet{} : KeySet{Key::E};
    auto a = key_hold_intervals(s, Key::E);
    auto b = key_hold_intervals(complement, Key::E);
    std::vector<Interval> all;
    for (const auto& h : a) all.push_back(h.interval);
    for (const auto& h : b) all.push_back(h.interval);
    std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.start_t < y.start_t; });
    REQUIRE_FALSE(all.empty());
    CHECK(all.front().start_t == 0.0);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i].start_t == all[i - 1].end_t);
    CHECK(all.back().end_t == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("fraction held: A or D") {
    auto s = sampled(60.0, [](double t) {
        if (in(t, 0, 12)) return KeySet{Key::A};
        if (in(t, 20, 26)) return KeySet{Key::D};
        return KeySet{};
    });
    std::vector<Interval> alive{{0, 60}};
    CHECK(fraction_held(s, {Key::A, Key::D}, alive, MatchMode::any) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(fraction_held(s, {Key::Q}, alive, MatchMode::any) == 0.0);
}

TEST_CASE("fraction held: W and MOUSE1 together") {
    auto s = sampled(60.0, [](double t) {
        KeySet k;
        if (in(t, 0, 10)) k.insert(Key::W);
        if (in(t, 5, 15)) k.insert(Key::MOUSE1);
        return k;
    });
    std::vector<Interval> alive{{0, 60}};
    const double all = fraction_held(s, {Key::W, Key::MOUSE1}, alive, MatchMode::all);
    const double any = fraction_held(s, {Key::W, Key::MOUSE1}, alive, MatchMode::any);
    CHECK(all == doctest::Approx(5.0 / 60.0).epsilon(1e-12));
    CHECK(any == doctest::Approx(15.0 / 60.0).epsilon(1e-12));
    CHECK(all <= any);
    std::vector<Interval> none{{3, 3}};
    CHECK_THROWS_AS(fraction_held(s, {Key::W}, none, MatchMode::any), EmptySupport);
}

TEST_CASE("held duration is additive over disjoint alive intervals") {
    Xorshift64Star rng(21);
    auto s = sampled(30.0, [&](double) {
        KeySet k;
        if (rng.bernoulli(0.4)) k.insert(Key::A);
        if (rng.bernoulli(0.3)) k.insert(Key::D);
        return k;
    });
    std::vector<Interval> alive{{0.005, 7.3}, {9.0, 18.125}, {20.0, 30.0}};
    double sum = 0.0;
    for (const auto& iv : alive) {
        std::span<const Interval> one(&iv, 1);
        sum += fraction_held(s, {Key::A, Key::D}, one, MatchMode::any) * iv.duration();
    }
    CHECK(sum == doctest::Approx(held_duration(s, {Key::A, Key::D}, alive, MatchMode::any)).epsilon(1e-12));
    const double f = fraction_held(s, {Key::A, Key::D}, alive, MatchMode::any);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
}

TEST_CASE("click stats") {
    auto s = sampled(60.0, [](double t) {
        return in(t, 1.0, 1.1) || in(t, 2.0, 2.3) ? KeySet{Key::MOUSE1} : KeySet{};
    });
    std::vector<Interval> alive{{0, 60}};
    auto c = click_stats(s, Key::MOUSE1, alive);
    CHECK(c.click_count == 2);
    CHECK(c.mean_duration_s == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(c.clicks_per_minute == doctest::Approx(2.0).epsilon(1e-12));

    auto quiet = click_stats(s, Key::MOUSE2, alive);
    CHECK(quiet.click_count == 0);
    CHECK(quiet.mean_duration_s == 0.0);
    CHECK(quiet.clicks_per_minute == 0.0);

    std::vector<Interval> cut{{2.1, 32.1}};
    auto clipped = click_stats(s, Key::MOUSE1, cut);
    CHECK(clipped.click_count == 1);
    CHECK(clipped.mean_duration_s == doctest::Approx(0.2).epsilon(1e-9));

    std::vector<Interval> empty{};
    CHECK_THROWS_AS(click_stats(s, Key::MOUSE1, empty), EmptySupport);
}

TEST_CASE("mouse kinematics") {
    std::vector<InputSample> s{{0.0, 0, 0, {}}, {0.01, 3, 4, {}}};
    std::vector<Interval> alive{{0, 1}};
    auto k = mouse_kinematics(s, alive);
    CHECK(k.path_mean_px == 5.0);
    CHECK(k.path_std_px == 0.0);
    CHECK(k.vel_mean_px_s == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(k.vel_std_px_s == 0.0);

    auto still = test::held(0.0, 3.0, {});
    auto z = mouse_kinematics(still, std::vector<Interval>{{0, 3}});
    CHECK(z.path_mean_px == 0.0);
    CHECK(z.path_std_px == 0.0);
    CHECK(z.vel_mean_px_s == 0.0);
    CHECK(z.vel_std_px_s == 0.0);

    std::vector<InputSample> one{{0.0, 1, 1, {}}};
    CHECK_THROWS_AS(mouse_kinematics(one, alive), InsufficientData);

    // two windows with path 10 and 20 px
    std::vector<InputSample> w{{0.0, 0, 0, {}}, {0.5, 10, 0, {}}, {1.0, 10, 0, {}}, {1.5, 10, 20, {}}};
    auto kw = mouse_kinematics(w, std::vector<Interval>{{0, 2}});
    CHECK(kw.path_mean_px == 15.0);
    CHECK(kw.path_std_px == doctest::Approx(std::sqrt(50.0)).epsilon(1e-12));
    CHECK(kw.vel_mean_px_s == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("click zone distribution") {
    const auto m = zones::default_zone_model();
    std::vector<InputSample> s;
    for (int i = 0; i < 40; ++i) {
        const bool down = (i / 5) % 2 == 1;
        const bool second = i >= 20;
        s.push_back({i * 0.01, second ? 345.0 : 960.0, second ? 815.0 : 540.0, down ? KeySet{Key::MOUSE1} : KeySet{}});
    }
    auto d = click_zone_distribution(s, Key::MOUSE1, m);
    CHECK(d[0] == 0.5);
    CHECK(d[1] == 0.5);
    CHECK(click_zone_distribution(s, Key::MOUSE2, m) == std::vector<double>(9, 0.0));

    for (auto& x : s) {
        x.mouse_x = 960;
        x.mouse_y = 540;
    }
    CHECK(click_zone_distribution(s, Key::MOUSE1, m)[0] == 1.0);
}

TEST_CASE("round features") {
    auto s = test::small_session();
    for (auto& x : s.input) {
        if (x.t < 3.0) x.keys_down = {Key::A};
        if (x.t >= 12.0 && x.t < 14.0) x.keys_down = {Key::W, Key::MOUSE1};
        x.mouse_x = 100 * x.t;
    }
    const auto rows = round_features(s);
    auto value = [&](int round, const std::string& name) {
        for (const auto& r : rows) {
            if (r.round == round && r.feature == name) return r.value;
        }
        FAIL("missing feature " << name);
        return -1.0;
    };
    CHECK(value(1, kFeatureAd) == doctest::Approx(0.5).epsilon(1e-12));  // 3 s of a 6 s life
    CHECK(value(2, kFeatureAd) == 0.0);
    CHECK(value(2, kFeatureWMouse1) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(value(2, "click_count") == 1.0);
    CHECK(value(1, "mouse_vel_mean_px_s") == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(rows.front().player_id == "p1");
}
