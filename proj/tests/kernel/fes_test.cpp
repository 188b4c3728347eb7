#include "doctest.h"

#include "polysim/kernel/fes.hpp"

#include <algorithm>
#include <random>
#include <tuple>

using namespace polysim;

TEST_CASE("FES tie-breaks on priority then insertion sequence") {
    MessageTracker tracker;
    FutureEventSet fes;
    const auto t1 = SimTime::seconds(1);

    SUBCASE("equal time and priority: lower seq first") {
        for (int i = 0; i < 6; ++i) fes.insert(t1, 0, tracker.create("m" + std::to_string(i), 0, {}, Owner::fes()));
        std::vector<std::uint64_t> seqs;
        while (!fes.empty()) seqs.push_back(fes.pop().key.seq);
        CHECK(std::is_sorted(seqs.begin(), seqs.end()));
        CHECK(seqs.size() == 6);
    }
    SUBCASE("equal time: lower priority value first") {
        fes.insert(t1, 1, tracker.create("late", 0, {}, Owner::fes()));
        fes.insert(t1, 0, tracker.create("early", 0, {}, Owner::fes()));
        CHECK(fes.pop().message->name() == "early");
        CHECK(fes.pop().message->name() == "late");
    }
    SUBCASE("time dominates priority") {
        fes.insert(SimTime::seconds(2), -5, tracker.create("t2", 0, {}, Owner::fes()));
        fes.insert(t1, 5, tracker.create("t1", 0, {}, Owner::fes()));
        CHECK(fes.pop().message->name() == "t1");
    }
}

TEST_CASE("FES removal by message id") {
    MessageTracker tracker;
    FutureEventSet fes;
    auto m = tracker.create("x", 0, {}, Owner::fes());
    const auto id = m->id();
    fes.insert(SimTime::seconds(1), 0, std::move(m));
    CHECK(fes.contains(id));
    auto removed = fes.remove(id);
    REQUIRE(removed.has_value());
    CHECK(removed->message->id() == id);
    CHECK(fes.empty());
    CHECK_FALSE(fes.remove(id).has_value());
}

TEST_CASE("FES pop order equals brute-force sort of (time, priority, seq)") {
    MessageTracker tracker;
    FutureEventSet fes;
    std::mt19937_64 gen(7);
    using Key = std::tuple<std::int64_t, int, std::uint64_t>;
    std::vector<Key> oracle;
    for (int i = 0; i < 3000; ++i) {
        const auto t = static_cast<std::int64_t>(gen() % 50);
        const int prio = static_cast<int>(gen() % 5) - 2;
        const auto key = fes.insert(SimTime::from_ticks(t), prio, tracker.create("m", 0, {}, Owner::fes()));
        oracle.emplace_back(t, prio, key.seq);
        // interleave some removals of random earlier entries
        if (i % 97 == 0 && !fes.empty()) {
            auto top = fes.pop();
            auto it = std::find(oracle.begin(), oracle.end(), Key{top.key.time.ticks(), top.key.priority, top.key.seq});
            REQUIRE(it != oracle.end());
            oracle.erase(it);
        }
    }
    std::sort(oracle.begin(), oracle.end());
    std::vector<Key> popped;
    while (!fes.empty()) {
        auto e = fes.pop();
        popped.emplace_back(e.key.time.ticks(), e.key.priority, e.key.seq);
    }
    CHECK(popped == oracle);
}
