#include "livemodel/finder.hpp"

#include <algorithm>

#include "livemodel/diagnostic.hpp"
#include "space.hpp"

namespace livemodel {

std::vector<std::pair<int, int>> Scope::ranges(const Schema& schema) const {
    if (default_bound < 0) throw Error(ErrorCode::InvalidArgument, "negative default bound");
    std::vector<int> bounds(schema.tops.size(), default_bound);
    for (const auto& [name, bound] : per_sig) {
        int id = schema.find_sig(name);
        if (id < 0) throw Error(ErrorCode::InvalidArgument, "scope names unknown sig " + name);
        if (schema.sigs[id].kind != SigKind::Top)
            throw Error(ErrorCode::InvalidArgument, "scope bound on non-top-level sig " + name);
        if (bound < 0) throw Error(ErrorCode::InvalidArgument, "negative bound for " + name);
        bounds[schema.sigs[id].top_ordinal] = bound;
    }
    std::vector<std::pair<int, int>> out;
    for (size_t t = 0; t < schema.tops.size(); ++t) {
        const SigInfo& sig = schema.sigs[schema.tops[t]];
        int lo = 0;
        int hi = bounds[t];
        switch (sig.mult) {
            case SigMult::Default: break;
            case SigMult::One: lo = hi = 1; break;
            case SigMult::Lone: hi = std::min(hi, 1); break;
            case SigMult::Some: lo = 1; break;
        }
        if (sig.is_abstract && sig.extends_children.empty()) hi = std::min(hi, 0);
        out.emplace_back(lo, hi);
    }
    return out;
}

CanonicalKey canonical_key(const Instance& inst) { return {inst.universe.counts(), detail::canonical_bits(inst)}; }

class SearchEngine {
public:
    SearchEngine(std::shared_ptr<const TypedModel> model, const Formula& goal, const Scope& scope,
                 SearchControl control)
        : model_(std::move(model)), query_(conjoin(model_->facts(), goal)), control_(std::move(control)) {
        ranges_ = scope.ranges(*model_->schema);
        check_budget();
        restart();
    }

    void set_control(SearchControl control) { control_ = std::move(control); }
    bool done() const { return state_ == State::Done; }
    uint64_t candidates() const { return candidates_; }

    std::optional<Instance> next() {
        if (!delayed_) {
            cancellable_sleep(control_.cancel, control_.artificial_delay);
            delayed_ = true;
        }
        while (true) {
            control_.cancel.check();
            bool found = false;
            switch (state_) {
                case State::Done: return std::nullopt;
                case State::NeedOpen:
                    open();
                    if (slot_count() == 0) {
                        found = true;
                        state_ = State::PastOnlyLeaf;
                    } else {
                        k_ = 0;
                        load_ = true;
                        state_ = State::Searching;
                        found = search();
                    }
                    break;
                case State::Searching: found = search(); break;
                case State::PastOnlyLeaf: found = false; break;
            }
            if (!found) {
                advance_vector();
                continue;
            }
            ++candidates_;
            if (eval_formula(cur_, query_)) return cur_;
        }
    }

    void seek_past(const Instance& target) {
        restart();
        std::vector<int> tc = target.universe.counts();
        while (state_ != State::Done && vec_ < tc) advance_vector();
        if (state_ == State::Done || vec_ != tc) return;
        open();
        size_t n = slot_count();
        if (n == 0) {
            state_ = State::PastOnlyLeaf;
            return;
        }
        state_ = State::Searching;
        load_ = false;
        for (size_t k = 0; k < n; ++k) {
            k_ = k;
            Frame& f = frames_[k];
            space_->choices(k, cur_, f.choices);
            uint64_t seg = space_->segment(k, target);
            auto it = std::lower_bound(f.choices.begin(), f.choices.end(), seg);
            int p = static_cast<int>(it - f.choices.begin());
            if (it == f.choices.end() || *it != seg) {
                f.idx = p - 1;
                return;
            }
            f.idx = p;
            space_->apply(k, seg, cur_);
            if (!space_->valid_after(k, cur_)) return;
        }
    }

private:
    enum class State { NeedOpen, Searching, PastOnlyLeaf, Done };
    struct Frame {
        std::vector<uint64_t> choices;
        int idx = -1;
    };

    void check_budget() { detail::check_budget(model_->schema, ranges_, control_.budget_log2); }

    void restart() {
        space_.reset();
        state_ = detail::first_vector(vec_, ranges_) ? State::NeedOpen : State::Done;
    }

    void advance_vector() {
        space_.reset();
        state_ = detail::next_vector(vec_, ranges_) ? State::NeedOpen : State::Done;
    }

    void open() {
        space_ = std::make_unique<detail::Space>(model_->schema, vec_);
        cur_ = space_->blank();
        frames_.assign(space_->slots().size(), Frame{});
    }

    size_t slot_count() const { return frames_.size(); }

    void poll() {
        if (++steps_ % control_.poll_interval == 0) control_.cancel.check();
    }

    // Moves to the next complete assignment from (k_, load_); false once the space is exhausted.
    bool search() {
        size_t n = slot_count();
        while (true) {
            poll();
            Frame& f = frames_[k_];
            if (load_) {
                space_->choices(k_, cur_, f.choices);
                f.idx = -1;
                load_ = false;
            }
            bool ok = false;
            while (++f.idx < static_cast<int>(f.choices.size())) {
                space_->apply(k_, f.choices[f.idx], cur_);
                if (space_->valid_after(k_, cur_)) {
                    ok = true;
                    break;
                }
            }
            if (ok) {
                if (k_ + 1 == n) return true;
                ++k_;
                load_ = true;
                continue;
            }
            if (k_ == 0) return false;
            --k_;
        }
    }

    std::shared_ptr<const TypedModel> model_;
    Formula query_;
    SearchControl control_;
    std::vector<std::pair<int, int>> ranges_;

    State state_ = State::Done;
    std::vector<int> vec_;
    std::unique_ptr<detail::Space> space_;
    Instance cur_;
    std::vector<Frame> frames_;
    size_t k_ = 0;
    bool load_ = true;
    bool delayed_ = false;
    uint64_t steps_ = 0;
    uint64_t candidates_ = 0;
};

SolutionCursor::SolutionCursor(std::shared_ptr<const TypedModel> model, Formula goal, Scope scope,
                               SearchControl control)
    : model_(std::move(model)), goal_(std::move(goal)), scope_(std::move(scope)) {
    engine_ = std::make_unique<SearchEngine>(model_, goal_, scope_, std::move(control));
}

SolutionCursor::~SolutionCursor() = default;
SolutionCursor::SolutionCursor(SolutionCursor&&) noexcept = default;
SolutionCursor& SolutionCursor::operator=(SolutionCursor&&) noexcept = default;

std::optional<Instance> SolutionCursor::next() {
    auto inst = engine_->next();
    if (inst) ++position_;
    return inst;
}

bool SolutionCursor::exhausted() const { return engine_->done(); }
uint64_t SolutionCursor::candidates() const { return engine_->candidates(); }
void SolutionCursor::seek_past(const Instance& inst) { engine_->seek_past(align(*model_, inst)); }
void SolutionCursor::set_control(SearchControl control) { engine_->set_control(std::move(control)); }

SolutionCursor enumerate(std::shared_ptr<const TypedModel> model, const Formula& goal, const Scope& scope,
                         SearchControl control) {
    return SolutionCursor(std::move(model), goal, scope, std::move(control));
}

const char* to_string(Category c) {
    switch (c) {
        case Category::StayedValid: return "stayedValid";
        case Category::BecameValid: return "becameValid";
        case Category::StayedInvalid: return "stayedInvalid";
        case Category::BecameInvalid: return "becameInvalid";
    }
    return "?";
}

std::optional<Category> category_from_string(std::string_view s) {
    for (Category c : kCategories)
        if (s == to_string(c)) return c;
    return std::nullopt;
}

Formula category_query(Category c, const Formula& old_goal, const Formula& new_goal) {
    switch (c) {
        case Category::StayedValid: return conjoin(old_goal, new_goal);
        case Category::BecameValid: return conjoin(negation(old_goal), new_goal);
        case Category::StayedInvalid: return conjoin(negation(old_goal), negation(new_goal));
        case Category::BecameInvalid: return conjoin(old_goal, negation(new_goal));
    }
    return {};
}

CategoryStreams categorize(std::shared_ptr<const TypedModel> model, const Formula& old_goal, const Formula& new_goal,
                           const Scope& scope, SearchControl control) {
    CategoryStreams s{model, scope, old_goal, new_goal, {}};
    for (Category c : kCategories)
        s.cursors[static_cast<int>(c)] =
            std::make_unique<SolutionCursor>(model, category_query(c, old_goal, new_goal), scope, control);
    return s;
}

bool within_scope(const Instance& inst, const Scope& scope) {
    auto ranges = scope.ranges(*inst.schema);
    auto counts = inst.universe.counts();
    if (counts.size() != ranges.size()) return false;
    for (size_t i = 0; i < counts.size(); ++i)
        if (counts[i] < ranges[i].first || counts[i] > ranges[i].second) return false;
    return true;
}

bool is_representative(const Instance& inst, const CategoryStreams& streams, Category c) {
    Instance aligned = align(*streams.model, inst);
    if (!within_scope(aligned, streams.scope)) return false;
    return satisfies(*streams.model, aligned, category_query(c, streams.old_goal, streams.new_goal));
}

}  // namespace livemodel
