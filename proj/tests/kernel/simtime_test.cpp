#include "doctest.h"

#include "polysim/kernel/errors.hpp"
#include "polysim/kernel/simtime.hpp"

#include <random>

using polysim::SimErrc;
using polysim::SimError;
using polysim::SimTime;

namespace {
SimErrc code_of(auto&& fn) {
    try {
        fn();
    } catch (const SimError& e) {
        return e.code();
    }
    FAIL("expected SimError");
    return SimErrc::InvalidState;
}
} // namespace

TEST_CASE("SimTime unit parsing") {
    CHECK(SimTime::parse("1s").ticks() == 1'000'000'000'000);
    CHECK(SimTime::parse("100ms").ticks() == 100'000'000'000);
    CHECK(SimTime::parse("0.1s") == SimTime::parse("100ms"));
    CHECK(SimTime::parse("1.5us").ticks() == 1'500'000);
    CHECK(SimTime::parse("7ps").ticks() == 7);
    CHECK(SimTime::parse("2ns").ticks() == 2'000);
    CHECK(code_of([] { SimTime::parse("1"); }) == SimErrc::TimeMissingUnit);
    CHECK(code_of([] { SimTime::parse("5kg"); }) == SimErrc::TimeUnknownUnit);
    CHECK(code_of([] { SimTime::parse("0.5ps"); }) == SimErrc::TimeTooPrecise);
    CHECK(code_of([] { SimTime::parse("1..2s"); }) == SimErrc::TimeSyntax);
    CHECK(code_of([] { SimTime::parse("ms"); }) == SimErrc::TimeSyntax);
}

TEST_CASE("SimTime printing") {
    CHECK(SimTime().str() == "0.0");
    CHECK(SimTime::seconds(1).str() == "1.0");
    CHECK(SimTime::millis(100).str() == "0.1");
    CHECK(SimTime::from_ticks(1).str() == "0.000000000001");
    CHECK(SimTime::from_ticks(-1'500'000'000'000).str() == "-1.5");
    CHECK(SimTime::millis(100).str_with_unit() == "100ms");
    CHECK(SimTime::seconds(3).str_with_unit() == "3s");
    CHECK(SimTime().str_with_unit() == "0s");
}

TEST_CASE("SimTime arithmetic detects overflow") {
    CHECK(SimTime::seconds(1) + SimTime::millis(5) == SimTime::millis(1005));
    CHECK(code_of([] { (void)(SimTime::max() + SimTime::from_ticks(1)); }) == SimErrc::TimeOverflow);
    CHECK(code_of([] { (void)(SimTime::from_ticks(INT64_MIN) - SimTime::from_ticks(1)); }) == SimErrc::TimeOverflow);
    CHECK(code_of([] { (void)(SimTime::max() * 2); }) == SimErrc::TimeOverflow);
    CHECK(code_of([] { (void)SimTime::seconds(10'000'000); }) == SimErrc::TimeOverflow);
}

TEST_CASE("SimTime print/parse round-trip over random values") {
    std::mt19937_64 gen(42);
    for (int i = 0; i < 20000; ++i) {
        std::int64_t ticks = static_cast<std::int64_t>(gen());
        if (i % 3 == 0) ticks %= 10'000'000'000'000;
        const auto t = SimTime::from_ticks(ticks);
        REQUIRE(SimTime::parse_seconds(t.str()) == t);
        REQUIRE(SimTime::parse(t.str_with_unit()) == t);
    }
    for (auto t : {SimTime::max(), SimTime::from_ticks(INT64_MIN + 1), SimTime()}) {
        CHECK(SimTime::parse_seconds(t.str()) == t);
    }
}
