#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "livemodel/proximity.hpp"
#include "proximity_oracle.hpp"

using namespace livemodel;

namespace {

Scope bounded(int n) { return Scope{n, {}}; }

const BreakdownRow* row(const BreakdownReport& r, const std::string& id) {
    for (const auto& x : r.rows)
        if (x.id == id) return &x;
    return nullptr;
}

std::set<std::string> keys(const BreakdownReport& r) {
    std::set<std::string> out;
    for (const auto& x : r.rows) out.insert(oracle::row_key(x));
    return out;
}

}  // namespace

TEST_CASE("proximity: distance obeys the metric axioms") {
    std::mt19937 rng(7);
    for (const char* name : {"lts.als", "queue_dequeue.als", "cv.als"}) {
        auto m = fixtures::model(name);
        auto pool = oracle::pool(*m, 1);
        auto pool2 = oracle::pool(*m, 2);
        pool.insert(pool.end(), pool2.begin(), pool2.begin() + std::min<size_t>(pool2.size(), 4000));
        std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
        for (int trial = 0; trial < 300; ++trial) {
            const Instance& a = pool[pick(rng)];
            const Instance& b = pool[pick(rng)];
            const Instance& c = pool[pick(rng)];
            int ab = instance_distance(a, b);
            CHECK(ab == oracle::distance(a, b));
            CHECK(instance_distance(a, a) == 0);
            CHECK((ab == 0) == (a == b && a.universe.counts() == b.universe.counts()));
            CHECK(ab == instance_distance(b, a));
            CHECK(instance_distance(a, c) <= ab + instance_distance(b, c));
        }
    }
}

TEST_CASE("proximity: closest returns a satisfying target unchanged") {
    auto m = fixtures::model("lts.als");
    Instance fault = fixtures::instance(*m, "lts_fault.inst");
    auto r = closest(*m, fixtures::pred(*m, "inv3"), fault, Polarity::Valid, bounded(3));
    REQUIRE(r);
    CHECK(r->distance == 0);
    CHECK(r->instance == fault);
}

TEST_CASE("proximity: closest is absent for unsatisfiable hard constraints") {
    auto m = fixtures::model("self_rel.als");
    Instance t = Instance::empty(m->schema, Universe::standard(*m->schema, {1}));
    CHECK(!closest(*m, fixtures::formula(*m, "some A && no A"), t, Polarity::Valid, bounded(2)));
    CHECK(!closest(*m, Formula{}, t, Polarity::Invalid, bounded(2)));
}

TEST_CASE("proximity: faulty dequeue domain leaves a one-node queue as closest valid") {
    auto m = fixtures::model("queue_dequeue_faulty.als");
    Formula goal = fixtures::pred(*m, "dequeue");
    Instance target = fixtures::instance(*m, "queue_two_nodes.inst");
    CHECK(!check_instance(*m, target, goal).overall);
    CHECK(check_instance(*fixtures::model("queue_dequeue_fixed.als"), target, std::string("dequeue")).overall);

    auto r = closest(*m, goal, target, Polarity::Valid, bounded(3));
    REQUIRE(r);
    CHECK(r->distance == 3);
    CHECK(instance_to_text(r->instance) == instance_to_text(instance_from_text(
                                               "Queue = Queue0\nhead = Queue0->Node0\nno nextHead\n"
                                               "Node = Node0\nno link\nno nextLink\n",
                                               m->schema)));
    CHECK(satisfies(*m, r->instance, goal));

    // Exhaustive distance-ranked search at scope 3 agrees.
    std::vector<Instance> sat;
    for (const auto& x : oracle::pool(*m, 3))
        if (oracle::satisfies(*m, x, goal)) sat.push_back(x);
    auto best = oracle::nearest(sat, target);
    REQUIRE(best);
    CHECK(best->second == 3);
    CHECK(best->first == r->instance);
}

TEST_CASE("proximity: closest matches brute-force minimum at scope <= 2") {
    struct Case {
        std::string model;
        std::string goal;
    };
    std::vector<Case> cases = {{"lts.als", "inv3"},       {"lts.als", "inv2"},
                               {"queue_dequeue_faulty.als", "dequeue"}, {"queue_static.als", "nonEmpty"},
                               {"cv.als", "inv1"},        {"self_rel.als", "show"}};
    std::mt19937 rng(11);
    int trials = 0;
    for (const auto& c : cases) {
        auto m = fixtures::model(c.model);
        Formula goal = fixtures::pred(*m, c.goal);
        for (int bound = 1; bound <= 2; ++bound) {
            auto pool = oracle::pool(*m, bound);
            std::map<Polarity, std::vector<Instance>> sat;
            for (const auto& x : pool) {
                if (!oracle::satisfies(*m, x, Formula{})) continue;
                sat[oracle::holds(x, goal) ? Polarity::Valid : Polarity::Invalid].push_back(x);
            }
            std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
            for (int i = 0; i < 6; ++i) {
                const Instance& target = pool[pick(rng)];
                Polarity pol = i % 2 ? Polarity::Invalid : Polarity::Valid;
                CAPTURE(c.model);
                CAPTURE(bound);
                CAPTURE(instance_to_text(target));
                auto got = closest(*m, goal, target, pol, bounded(bound));
                auto want = oracle::nearest(sat[pol], target);
                REQUIRE(got.has_value() == want.has_value());
                ++trials;
                if (!got) continue;
                CHECK(got->distance == want->second);
                CHECK(got->distance == oracle::distance(got->instance, target));
                CHECK(got->instance == want->first);
                bool g = oracle::holds(got->instance, goal);
                CHECK(oracle::satisfies(*m, got->instance, Formula{}));
                CHECK(g == (pol == Polarity::Valid));
            }
        }
    }
    CHECK(trials >= 50);
}

TEST_CASE("proximity: closest validates its inputs and honours cancellation") {
    auto m = fixtures::model("lts.als");
    Instance fault = fixtures::instance(*m, "lts_fault.inst");
    CHECK_THROWS_AS(closest(*m, fixtures::pred(*m, "inv3"), fault, Polarity::Valid, bounded(2)), Error);
    SearchControl ctl;
    ctl.cancel.cancel();
    try {
        closest(*m, fixtures::pred(*m, "inv3"), fault, Polarity::Invalid, bounded(3), ctl);
        FAIL("expected Cancelled");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Cancelled);
    }
}

TEST_CASE("proximity: breakdown on the LTS fault instance") {
    auto m = fixtures::model("lts.als");
    Formula correct = fixtures::formula(*m, "all s : State, e : Event | lone e.(s.trans)");
    Instance a = fixtures::instance(*m, "lts_fault.inst");
    Instance b = a;
    b.field_rels[m->schema->find_field("trans")] =
        TupleSet::from(3, {Tuple{make_atom(0, 1), make_atom(1, 0), make_atom(0, 0)}});
    auto r = breakdown(*m, correct, a, b, "inv3");
    const BreakdownRow* top = row(r, "inv3");
    REQUIRE(top);
    CHECK(top->value_a == false);
    CHECK(top->value_b == true);
    bool found = false;
    for (const auto& pb : top->per_binding) {
        if (pb.bindings == Bindings{{"s", make_atom(0, 1)}, {"e", make_atom(1, 0)}}) {
            found = true;
            CHECK(pb.value_a == false);
            CHECK(pb.value_b == true);
        } else {
            CHECK(pb.value_a == pb.value_b);
        }
    }
    CHECK(found);
    CHECK(breakdown(*m, correct, a, a).rows.empty());
}

TEST_CASE("proximity: breakdown localizes the faulty quantified domain") {
    auto m = fixtures::model("queue_dequeue_faulty.als");
    Formula goal = fixtures::pred(*m, "dequeue");
    Instance a = fixtures::instance(*m, "queue_two_nodes.inst");
    auto near = closest(*m, goal, a, Polarity::Valid, bounded(3));
    REQUIRE(near);
    auto r = breakdown(*m, goal, a, near->instance, "dequeue");
    const BreakdownRow* top = row(r, "dequeue");
    REQUIRE(top);
    CHECK(top->value_a == false);
    CHECK(top->value_b == true);
    const BreakdownRow* q = row(r, "dequeue/0");
    REQUIRE(q);
    CHECK(q->formula.find("*link") != std::string::npos);
    CHECK(q->value_a == false);
    CHECK(q->value_b == true);
    // The first node of the queue is the binding that breaks the body.
    bool first_node = false;
    for (const auto& pb : q->per_binding)
        if (pb.bindings == Bindings{{"n", make_atom(1, 0)}}) {
            first_node = true;
            CHECK(pb.value_a == false);
            CHECK(pb.value_b == true);
        }
    CHECK(first_node);
}

TEST_CASE("proximity: breakdown rows are exactly the formulas whose values differ") {
    std::mt19937 rng(5);
    for (const char* name : {"lts.als", "queue_dequeue_faulty.als", "cv.als", "queue_static.als"}) {
        auto m = fixtures::model(name);
        Formula goal = m->command_goal(0);
        auto pool = oracle::pool(*m, 2);
        std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
        for (int i = 0; i < 40; ++i) {
            const Instance& a = pool[pick(rng)];
            const Instance& b = pool[pick(rng)];
            std::vector<std::pair<std::string, Formula>> named;
            auto want = oracle::expected_breakdown(*m, goal, "$goal", a, b, named);
            auto got = breakdown(*m, goal, a, b);
            CAPTURE(name);
            CAPTURE(instance_to_text(a));
            CAPTURE(instance_to_text(b));
            CHECK(keys(got) == want);
            for (const auto& r : got.rows) {
                bool differs = r.value_a != r.value_b;
                for (const auto& pb : r.per_binding) differs = differs || pb.value_a != pb.value_b;
                CHECK(differs);
            }
        }
    }
}
