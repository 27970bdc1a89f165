#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include <greenplan/instance.hpp>
#include <greenplan/tables.hpp>

#include "test_config.hpp"

using namespace greenplan;

namespace {

std::string inst_path(const char* name) {
    return std::string(GREENPLAN_INSTANCE_DIR) + "/" + name;
}

} // namespace

TEST_CASE("channel gain is alpha over distance^n") {
    CHECK(channel_gain(3.0, 3.0, 100.0) == doctest::Approx(3e-6).epsilon(1e-12));
    CHECK(channel_gain(2.0, 2.0, 10.0) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK_THROWS_AS(channel_gain(3.0, 3.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(channel_gain(3.0, 3.0, -1.0), std::invalid_argument);
}

TEST_CASE("bitrate follows the capacity formula and idles at zero") {
    // 20 MHz, 40 W at gain 3e-6 over noise 1e-5: SNR 12, rate 20*log2(13)
    const double rate = max_bitrate_mbps(20.0, 40.0, 3e-6, 1e-5);
    CHECK(rate == doctest::Approx(74.008794362821843).epsilon(1e-12));
    CHECK(max_bitrate_mbps(20.0, 0.0, 3e-6, 1e-5) == 0.0);
}

TEST_CASE("required transmit power inverts the bitrate") {
    CHECK(required_transmit_w(0.0, 20.0, 3e-6, 1e-5) == 0.0);
    // round trip on a grid of cases
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist_m(10.0, 1200.0);
    std::uniform_real_distribution<double> rate_mbps(0.1, 120.0);
    for (int it = 0; it < 20; ++it) {
        const double d = dist_m(rng);
        const double gain = channel_gain(3.0, 3.0, d);
        const double rho = rate_mbps(rng);
        const double w = required_transmit_w(rho, 20.0, gain, 1e-5);
        CHECK(max_bitrate_mbps(20.0, w, gain, 1e-5) == doctest::Approx(rho).epsilon(1e-9));
    }
}

TEST_CASE("demand rate scales the yearly peak by the traffic profile") {
    const auto inst = load_instance(inst_path("micro1.json"));
    // tp0: 3 Mbps growing 20%/year; year 2 period 2 is the daily peak
    CHECK(demand_rate_mbps(inst, 0, 2, 2) == doctest::Approx(3.6).epsilon(1e-12));
    CHECK(demand_rate_mbps(inst, 0, 1, 1) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(demand_rate_mbps(inst, 0, 3, 4) == doctest::Approx(4.32 * 0.2).epsilon(1e-12));
}

TEST_CASE("demand energy matches a by-hand computation") {
    const auto inst = load_instance(inst_path("micro1.json"));
    // site b0 serving tp0 at year 1 period 2 (peak): 6 h of required transmit W
    const double d = inst.distance(0, 0);
    const double gain = channel_gain(3.0, 3.0, d);
    const double w = required_transmit_w(3.0, 20.0, gain, 1e-5);
    CHECK(demand_energy_kwh(inst, 0, 0, 1, 2, 20.0) ==
          doctest::Approx(w * 6.0 / 1000.0).epsilon(1e-12));
    // zero demand costs nothing
    const auto quiet = [&] {
        auto copy = inst;
        copy.test_points[0].peak_rate_by_year = {0.0, 0.0, 0.0};
        return copy;
    }();
    CHECK(demand_energy_kwh(quiet, 0, 0, 1, 2, 20.0) == 0.0);
}

TEST_CASE("solar yield applies area, irradiance and panel aging") {
    const auto inst = load_instance(inst_path("micro1.json"));
    // 2 m2 effective area, 800 W/m2 for 6 h in the install year
    CHECK(solar_yield_kwh(inst, 2, 1, 1, 3) == doctest::Approx(9.6).epsilon(1e-12));
    // one year of panel aging at 1%
    CHECK(solar_yield_kwh(inst, 2, 1, 2, 3) == doctest::Approx(9.6 * 0.99).epsilon(1e-12));
    // dark periods and non-solar types produce nothing
    CHECK(solar_yield_kwh(inst, 2, 1, 1, 1) == 0.0);
    CHECK(solar_yield_kwh(inst, 1, 1, 1, 3) == 0.0);
}

TEST_CASE("battery bounds age until the replacement epoch") {
    auto inst = load_instance(inst_path("micro1.json"));
    auto& b = inst.bs_types[2];
    b.battery_capacity_kwh = 10.0;
    b.battery_lifetime_years = 5;
    b.battery_aging_rate = 0.05;
    b.battery_min_fraction = 0.2;
    inst.years = 7;
    // two years after install: capacity 10 * 0.95^2, floor 20% of that
    const auto bb = battery_bounds(inst, 2, 1, 3);
    CHECK(bb.max_kwh == doctest::Approx(9.025).epsilon(1e-12));
    CHECK(bb.min_kwh == doctest::Approx(1.805).epsilon(1e-12));
    // replacement in year 6 restores a fresh battery
    const auto fresh = battery_bounds(inst, 2, 1, 6);
    CHECK(fresh.max_kwh == doctest::Approx(10.0).epsilon(1e-12));
    // age picks up again afterwards
    CHECK(battery_bounds(inst, 2, 1, 7).max_kwh == doctest::Approx(9.5).epsilon(1e-12));
}

TEST_CASE("coverage marks exactly the states that satisfy demand") {
    const auto inst = load_instance(inst_path("micro1.json"));
    const auto tables = build_tables(inst);
    const auto& k = tables.coverage;

    // tp1 sits 283 m from b0; 40 W cannot carry 16 Mbps there at peak
    CHECK(k.k(1, 0, 0, 0, 1, 2) == 0);
    // but its own candidate c0 at 45 m can, in the 20 W state
    CHECK(k.k(1, 1, 1, 2, 1, 2) == 1);
    // the idle state never covers positive demand
    CHECK(k.k(1, 1, 1, 0, 1, 2) == 0);
    // tp0 is close enough to b0 even at peak
    CHECK(k.k(0, 0, 0, 0, 2, 2) == 1);

    // monotone in state power: once covered, stronger states stay covering
    for (int i = 0; i < k.I; ++i)
        for (int j = 0; j < k.J; ++j)
            for (int l = 0; l < k.L; ++l)
                for (int q = 1; q <= k.Q; ++q)
                    for (int t = 1; t <= k.T; ++t) {
                        int prev = 0;
                        for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s) {
                            const int cur = k.k(i, j, l, s, q, t);
                            CHECK(cur >= prev);
                            prev = cur;
                        }
                    }
}

TEST_CASE("zero demand is coverable by any state, including idle") {
    auto inst = load_instance(inst_path("micro1.json"));
    inst.traffic_profile = {0.0, 0.0, 0.0, 0.0};
    const auto tables = build_tables(inst);
    const auto& k = tables.coverage;
    for (int i = 0; i < k.I; ++i)
        for (int j = 0; j < k.J; ++j)
            for (int l = 0; l < k.L; ++l)
                for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
                    for (int q = 1; q <= k.Q; ++q)
                        for (int t = 1; t <= k.T; ++t)
                            CHECK(k.k(i, j, l, s, q, t) == 1);
}

TEST_CASE("demand table uses the site bandwidth") {
    const auto inst = load_instance(inst_path("micro1.json"));
    CHECK(site_bandwidth_mhz(inst, 0) == 20.0);
    CHECK(site_bandwidth_mhz(inst, 1) == 20.0);
    const auto tables = build_tables(inst);
    CHECK(tables.demand.rate(0, 2, 2) == doctest::Approx(3.6).epsilon(1e-12));
    CHECK(tables.demand.energy(0, 0, 1, 2) ==
          doctest::Approx(demand_energy_kwh(inst, 0, 0, 1, 2, 20.0)).epsilon(1e-12));
}

TEST_CASE("parallel and serial table builders agree exactly") {
    for (const char* name : {"micro1.json", "p1-like.json"}) {
        CAPTURE(name);
        const auto inst = load_instance(inst_path(name));
        const auto par = build_tables(inst);
        const auto ser = build_tables_serial(inst);
        CHECK(par.coverage.data == ser.coverage.data);
        CHECK(par.demand.rate_mbps == ser.demand.rate_mbps);
        CHECK(par.demand.energy_kwh == ser.demand.energy_kwh);
        CHECK(par.solar.yield_kwh == ser.solar.yield_kwh);
        CHECK(par.solar.bmin_kwh == ser.solar.bmin_kwh);
        CHECK(par.solar.bmax_kwh == ser.solar.bmax_kwh);

        // rebuilding yields bit-identical tables
        const auto again = build_tables(inst);
        CHECK(again.coverage.data == par.coverage.data);
        CHECK(again.demand.energy_kwh == par.demand.energy_kwh);
        CHECK(again.solar.yield_kwh == par.solar.yield_kwh);
    }
}
