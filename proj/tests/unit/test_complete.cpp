#include <doctest.h>

#include "fixtures.hpp"
#include "livemodel/complete.hpp"
#include "livemodel/finder.hpp"
#include "oracle.hpp"

using namespace livemodel;

namespace {

std::vector<std::string> texts(const SuggestionList& l) {
    std::vector<std::string> out;
    for (const auto& s : l.items) out.push_back(s.text);
    return out;
}

const Suggestion* find(const SuggestionList& l, const std::string& text) {
    for (const auto& s : l.items)
        if (s.text == text) return &s;
    return nullptr;
}

std::string value(const Instance& inst, const SuggestionList& l, const std::string& text) {
    const Suggestion* s = find(l, text);
    REQUIRE(s);
    REQUIRE(s->value);
    return inst.render(*s->value);
}

bool contains(const std::vector<std::string>& xs, const std::string& x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

// Every instance at scope <= 2 plus the ones the finder yields first at scope 3.
std::vector<Instance> sample(std::shared_ptr<const TypedModel> m) {
    std::vector<Instance> out = [&] {
        std::vector<Instance> xs;
        auto c = enumerate(m, Formula{}, Scope{2, {}});
        while (auto i = c.next()) xs.push_back(*i);
        return xs;
    }();
    try {
        auto c = enumerate(m, Formula{}, Scope{3, {}});
        for (int i = 0; i < 3000; ++i) {
            auto x = c.next();
            if (!x) break;
            out.push_back(*x);
        }
    } catch (const Error&) {
    }
    return out;
}

}  // namespace

TEST_CASE("complete: link continuations exclude head") {
    auto m = fixtures::model("queue_static.als");
    auto l = suggest(*m, prefix_context("link", *m));
    auto t = texts(l);
    CHECK(contains(t, "link"));
    CHECK(contains(t, "^link"));
    CHECK(contains(t, "*link"));
    CHECK(!contains(t, "head"));
    for (const auto& s : l.items) CHECK(!s.type.vacuous());
}

TEST_CASE("complete: head continuations include link") {
    auto m = fixtures::model("queue_static.als");
    auto t = texts(suggest(*m, prefix_context("head", *m)));
    CHECK(contains(t, "link"));
    CHECK(!contains(t, "head"));
}

TEST_CASE("complete: values over the two-node queue and reannotation over three nodes") {
    auto m = fixtures::model("queue_static.als");
    Instance two = fixtures::instance(*m, "queue_fig1b.inst");
    auto l = suggest(*m, prefix_context("Queue.head", *m), &two);
    CHECK(texts(l) == std::vector<std::string>{"link", "^link", "*link"});
    CHECK(value(two, l, "link") == "Node1");
    CHECK(value(two, l, "^link") == "Node1");
    CHECK(value(two, l, "*link") == "Node0 + Node1");
    for (const auto& s : l.items)
        CHECK(oracle::rel_of(*s.value) == oracle::eval(two, s.full, {}));

    Instance three = fixtures::instance(*m, "queue_three_nodes.inst");
    auto r = reannotate(*m, l, three);
    CHECK(value(three, r, "link") == "Node1");
    CHECK(value(three, r, "^link") == "Node1 + Node2");
    CHECK(value(three, r, "*link") == "Node0 + Node1 + Node2");
    for (size_t i = 0; i < l.items.size(); ++i) CHECK(r.items[i].rank == l.items[i].rank);

    auto again = reannotate(*m, r, three);
    for (size_t i = 0; i < r.items.size(); ++i) CHECK(again.items[i].value == r.items[i].value);

    Instance empty = Instance::empty(m->schema, three.universe);
    for (const auto& s : reannotate(*m, r, empty).items) {
        REQUIRE(s.value);
        CHECK(s.value->empty());
    }

    auto other = fixtures::model("lts.als");
    CHECK_THROWS_AS(reannotate(*m, r, fixtures::instance(*other, "lts_fault.inst")), Error);
}

TEST_CASE("complete: an Event variable is never continued by trans") {
    auto m = fixtures::model("lts.als");
    RelType event{1, {{m->schema->find_sig("Event")}}};
    auto l = suggest(*m, prefix_context("e", *m, {{"e", event}}));
    CHECK(!contains(texts(l), "trans"));
    CHECK(!contains(texts(l), "e"));
    auto s = suggest(*m, prefix_context("s", *m, {{"s", RelType{1, {{m->schema->find_sig("State")}}}}}));
    CHECK(contains(texts(s), "trans"));
}

TEST_CASE("complete: vacuous prefixes are rejected") {
    auto m = fixtures::model("queue_static.als");
    try {
        prefix_context("link.head", *m);
        FAIL("expected VacuousPrefix");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VacuousPrefix);
    }
}

TEST_CASE("complete: ranking puts fields first, closures after their field, sigs last") {
    auto m = fixtures::compile_text("sig N { b: set N, a: set N, c: set M }\n sig M { d: set N }\n sig K in N {}\n");
    auto t = texts(suggest(*m, prefix_context("N -> N", *m)));
    CHECK(t == std::vector<std::string>{"a", "^a", "*a", "b", "^b", "*b", "c", "K", "N"});
}

TEST_CASE("complete: the list is capped at twenty entries") {
    std::string text = "sig A {";
    for (int i = 0; i < 12; ++i) text += (i ? ", f" : " f") + std::to_string(10 + i) + ": set A";
    text += " }\n";
    auto m = fixtures::compile_text(text);
    auto l = suggest(*m, prefix_context("A", *m));
    CHECK(l.items.size() == kMaxSuggestions);
    CHECK(l.overflow);
    for (size_t i = 0; i < l.items.size(); ++i) CHECK(l.items[i].rank == static_cast<int>(i));
}

TEST_CASE("complete: cursor contexts from model text") {
    auto m = fixtures::model("queue_static.als");
    std::string text = "fact F {\n  all n : Node | n.li";
    auto ctx = completion_context(text, text.size(), *m);
    CHECK(ctx.kind == CursorKind::AfterDot);
    CHECK(ctx.partial == "li");
    REQUIRE(ctx.vars.size() == 1);
    CHECK(ctx.vars[0].name == "n");
    CHECK(ctx.replace.begin == text.size() - 2);
    auto t = texts(suggest(*m, ctx));
    CHECK(t == std::vector<std::string>{"link", "^link", "*link"});

    std::string unary = "pred p { some Queue.head.^";
    auto u = completion_context(unary, unary.size(), *m);
    CHECK(u.kind == CursorKind::AfterUnary);
    CHECK(u.unary == ExprKind::Closure);
    CHECK(texts(suggest(*m, u)) == std::vector<std::string>{"link"});

    std::string nested = "fact { all q : Queue | (all n : q.head.*link | n.";
    auto nc = completion_context(nested, nested.size(), *m);
    CHECK(nc.vars.size() == 2);

    std::string closed = "fact { (all x : Node | some x.link) && (Queue.";
    auto cc = completion_context(closed, closed.size(), *m);
    CHECK(cc.vars.empty());

    auto code_of = [&](const std::string& s, size_t off) {
        try {
            completion_context(s, off, *m);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    std::string comment = "fact { // Queue.";
    CHECK(code_of(comment, comment.size()) == ErrorCode::NoPrefixContext);
    std::string block = "fact { /* Queue. */ Queue.";
    CHECK(code_of(block, 17) == ErrorCode::NoPrefixContext);
    CHECK_NOTHROW(completion_context(block, block.size(), *m));
    std::string fresh = "fact { no ";
    CHECK(code_of(fresh, fresh.size()) == ErrorCode::NoPrefixContext);
    std::string vac = "fact { some link.head.";
    CHECK(code_of(vac, vac.size()) == ErrorCode::VacuousPrefix);
}

TEST_CASE("complete: emitted suggestions are non-vacuous and excluded ones are always empty") {
    for (const char* name : {"queue_static.als", "lts.als", "cv.als", "self_rel.als"}) {
        CAPTURE(name);
        auto m = fixtures::model(name);
        const Schema& s = *m->schema;
        auto instances = sample(m);
        std::vector<std::string> prefixes;
        for (const auto& sig : s.sigs) prefixes.push_back(sig.name);
        for (const auto& f : s.fields) prefixes.push_back(f.name);
        for (const auto& sig : s.sigs)
            for (const auto& f : s.fields) prefixes.push_back(sig.name + "." + f.name);
        for (const auto& p : prefixes) {
            CompletionContext ctx;
            try {
                ctx = prefix_context(p, *m);
            } catch (const Error&) {
                continue;
            }
            auto l = suggest(*m, ctx);
            for (const auto& sug : l.items) {
                CAPTURE(p);
                CAPTURE(sug.text);
                CHECK(!sug.type.vacuous());
                bool seen = false;
                for (const auto& inst : instances)
                    if (!eval_expr(inst, sug.full).empty()) {
                        seen = true;
                        break;
                    }
                CHECK(seen);
            }
            // Candidates that type-check but were dropped for an empty type.
            for (const auto& f : s.fields) {
                if (find(l, f.name)) continue;
                auto e = parse_expr("(" + p + ")." + f.name, *m);
                if (!e.expr) continue;
                CAPTURE(p);
                CAPTURE(f.name);
                CHECK(e.expr->type.vacuous());
                for (const auto& inst : instances) CHECK(oracle::eval(inst, *e.expr, {}).empty());
            }
        }
    }
}

TEST_CASE("complete: annotations equal direct evaluation") {
    auto m = fixtures::model("lts.als");
    Instance fault = fixtures::instance(*m, "lts_fault.inst");
    for (const char* p : {"State", "Init", "State.trans", "Event", "trans"}) {
        auto l = suggest(*m, prefix_context(p, *m), &fault);
        for (const auto& s : l.items) {
            REQUIRE(s.value);
            CHECK(oracle::rel_of(*s.value) == oracle::eval(fault, s.full, {}));
        }
    }
}
