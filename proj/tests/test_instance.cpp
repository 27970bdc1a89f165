#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <greenplan/instance.hpp>

#include "test_config.hpp"

using namespace greenplan;

namespace {

std::string inst_path(const char* name) {
    return std::string(GREENPLAN_INSTANCE_DIR) + "/" + name;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// load a bundled instance, apply an in-place JSON mutation, reparse
template <class Fn>
PlanningInstance load_mutated(const char* name, Fn&& mutate) {
    auto doc = nlohmann::json::parse(read_text(inst_path(name)));
    mutate(doc);
    return load_instance_text(doc.dump());
}

} // namespace

TEST_CASE("loading resolves sites, horizon and index helpers") {
    const auto inst = load_instance(inst_path("micro1.json"));

    CHECK(inst.name == "micro1");
    CHECK(inst.num_sites() == 3);
    CHECK(inst.num_existing == 1);
    CHECK(inst.num_candidates() == 2);
    CHECK(inst.num_test_points() == 4);
    CHECK(inst.num_types() == 3);
    CHECK(inst.Q() == 3);
    CHECK(inst.T() == 4);

    // existing sites come first
    CHECK(inst.sites[0].id == "b0");
    CHECK(inst.sites[1].id == "c0");
    CHECK(inst.sites[2].id == "c1");
    CHECK(inst.is_existing(0));
    CHECK_FALSE(inst.is_existing(1));

    // legacy type is never installable; installable types default to all candidates
    for (int j = 0; j < inst.num_sites(); ++j) CHECK_FALSE(inst.is_allowed(0, j));
    CHECK_FALSE(inst.is_allowed(1, 0));
    CHECK(inst.is_allowed(1, 1));
    CHECK(inst.is_allowed(2, 2));

    CHECK(inst.smax(0) == 0);
    CHECK(inst.smax(1) == 2);
    CHECK(inst.distance(0, 0) == doctest::Approx(std::hypot(60.0, 60.0)).epsilon(1e-12));
    CHECK(inst.has_solar_type());
}

TEST_CASE("scalar conveniences resolve into per-year schedules") {
    const auto inst = load_instance(inst_path("micro1.json"));

    // flat peak rate grows at demand_growth_rate per year
    const auto& tp0 = inst.test_points[0];
    REQUIRE(tp0.peak_rate_by_year.size() == 3);
    CHECK(tp0.peak_rate_by_year[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(tp0.peak_rate_by_year[1] == doctest::Approx(3.6).epsilon(1e-12));
    CHECK(tp0.peak_rate_by_year[2] == doctest::Approx(4.32).epsilon(1e-12));

    // scalar tariff inflates per year, uniform across periods
    for (int q = 1; q <= inst.Q(); ++q) {
        const double want = 0.35 * std::pow(1.0264, q - 1);
        for (int t = 1; t <= inst.T(); ++t)
            CHECK(inst.tariff(0, q, t) == doctest::Approx(want).epsilon(1e-12));
    }

    // scalar solar unit cost inflates the same way
    const auto& solar = inst.bs_types[2];
    REQUIRE(solar.solar_unit_cost.size() == 3);
    for (int q = 1; q <= 3; ++q)
        CHECK(solar.solar_unit_cost[q - 1] ==
              doctest::Approx(1.2 * std::pow(1.0264, q - 1)).epsilon(1e-12));

    // scalar tax and emission factors fill the horizon
    for (int q = 1; q <= 3; ++q) {
        CHECK(inst.tax(q) == 0.0);
        CHECK(inst.grid_kg_per_kwh(q) == 1.0);
    }

    CHECK(inst.traffic_profile == std::vector<double>{0.3, 1.0, 0.8, 0.2});
    CHECK(inst.illumination_wm2 == std::vector<double>{0.0, 700.0, 800.0, 0.0});
}

TEST_CASE("save/load round trip preserves the instance exactly") {
    for (const char* name : {"micro1.json", "micro4.json", "p1-like.json"}) {
        CAPTURE(name);
        const auto inst = load_instance(inst_path(name));
        const std::string text = save_instance_text(inst);
        const auto again = load_instance_text(text);
        CHECK(again == inst);
        // resolved form is a fixed point of save
        CHECK(save_instance_text(again) == text);
    }
}

TEST_CASE("activation indicator follows the activation year") {
    const auto inst = load_instance(inst_path("micro1.json"));
    // tp2 activates in year 2
    CHECK(activation_indicator(inst, 2, 1) == 0);
    CHECK(activation_indicator(inst, 2, 2) == 1);
    CHECK(activation_indicator(inst, 2, 3) == 1);
    // tp0 is active from the start
    CHECK(activation_indicator(inst, 0, 1) == 1);
}

TEST_CASE("discount factor is (1+r)^-q") {
    const auto inst = load_instance(inst_path("micro1.json"));
    CHECK(discount_factor(inst, 1) == doctest::Approx(1.0 / 1.12).epsilon(1e-12));
    CHECK(discount_factor(inst, 3) == doctest::Approx(std::pow(1.12, -3)).epsilon(1e-12));
    CHECK_THROWS_AS(discount_factor(inst, 0), std::out_of_range);
    CHECK_THROWS_AS(discount_factor(inst, 4), std::out_of_range);

    const auto p1 = load_instance(inst_path("p1-like.json"));
    CHECK(discount_factor(p1, 6) == doctest::Approx(0.50663112).epsilon(1e-7));
}

TEST_CASE("installation cost matches a hand NPV computation") {
    const auto inst = load_instance(inst_path("micro1.json"));
    const double infl = 1.0264, r = 1.12;

    // plain type: inflated build cost only
    CHECK(installation_cost(inst, 1, 1) == doctest::Approx(8000.0).epsilon(1e-12));
    CHECK(installation_cost(inst, 1, 2) == doctest::Approx(8000.0 * infl).epsilon(1e-12));
    CHECK(solar_equipment_cost(inst, 1, 2) == 0.0);

    // solar type installed in year 1: panels now, one battery replacement in
    // year 3 (lifetime 2), inflated to year 3 and discounted back two years
    const double panels_y1 = 1.2 * 600.0;
    const double repl_y3 = 300.0 * std::pow(infl, 2) * std::pow(r, -2);
    CHECK(solar_equipment_cost(inst, 2, 1) ==
          doctest::Approx(panels_y1 + repl_y3).epsilon(1e-12));
    CHECK(installation_cost(inst, 2, 1) ==
          doctest::Approx(8000.0 + panels_y1 + repl_y3).epsilon(1e-12));

    // installed in year 3: no replacement fits the remaining horizon
    CHECK(solar_equipment_cost(inst, 2, 3) ==
          doctest::Approx(720.0 * std::pow(infl, 2)).epsilon(1e-12));
    CHECK(installation_cost(inst, 2, 3) ==
          doctest::Approx(8000.0 * std::pow(infl, 2) + 720.0 * std::pow(infl, 2)).epsilon(1e-12));

    // legacy type is never priced
    CHECK_THROWS_AS(installation_cost(inst, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(solar_equipment_cost(inst, 0, 1), std::invalid_argument);
}

TEST_CASE("default tax schedule is linear in the year") {
    const auto sched = default_tax_schedule(10.0, 5.0, 4);
    CHECK(sched == std::vector<double>{10.0, 15.0, 20.0, 25.0});
    CHECK_THROWS_AS(default_tax_schedule(10.0, 5.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(default_tax_schedule(-1.0, 5.0, 3), std::invalid_argument);
}

TEST_CASE("schema and horizon violations are rejected") {
    CHECK_THROWS_AS(load_mutated("micro1.json", [](nlohmann::json& d) { d["schema"] = 2; }),
                    ValidationError);
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["horizon"]["period_hours"] = {6.0, 6.0, 6.0};
                                 }),
                    ValidationError);
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) { d["horizon"]["years"] = 0; }),
                    ValidationError);
    CHECK_THROWS_AS(load_instance_text("not json at all"), ValidationError);
    CHECK_THROWS_AS(load_instance(inst_path("no-such-file.json")), ValidationError);
}

TEST_CASE("type shape violations are rejected") {
    // legacy type must have exactly one state
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["bs_types"][0]["states"].push_back(
                                         {{"total_w", 1200.0}, {"transmit_w", 60.0}});
                                 }),
                    ValidationError);
    // installable state 0 must be idle
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["bs_types"][1]["states"][0]["transmit_w"] = 0.5;
                                 }),
                    ValidationError);
    // transmit powers must ascend
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["bs_types"][1]["states"][2]["transmit_w"] = 0.5;
                                 }),
                    ValidationError);
    // draw must cover transmit
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["bs_types"][1]["states"][2]["total_w"] = 10.0;
                                 }),
                    ValidationError);
    // solar types need a battery replacement cadence
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["bs_types"][2]["solar"]["battery_lifetime_years"] = 0;
                                 }),
                    ValidationError);
    // installable types cannot target existing sites
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["bs_types"][1]["allowed_sites"] = {"b0"};
                                 }),
                    ValidationError);
}

TEST_CASE("geometry and activation violations are rejected") {
    // a test point on top of a site has no finite channel gain
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["test_points"][0]["position"] = {0.0, 0.0};
                                 }),
                    ValidationError);
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["test_points"][0]["activation_year"] = 0;
                                 }),
                    ValidationError);
    // Q+1 disables a test point, anything later is a typo
    CHECK_NOTHROW(load_mutated("micro1.json",
                               [](nlohmann::json& d) {
                                   d["test_points"][0]["activation_year"] = 4;
                               }));
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["test_points"][0]["activation_year"] = 5;
                                 }),
                    ValidationError);
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["economics"]["tax_per_ton"] = -1.0;
                                 }),
                    ValidationError);
    CHECK_THROWS_AS(load_mutated("micro1.json",
                                 [](nlohmann::json& d) {
                                     d["economics"]["grid_source"] = "gas";
                                 }),
                    ValidationError);
}
